#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "chichaos/config.hpp"
#include "chichaos/errors.hpp"
#include "chichaos/io_util.hpp"
#include "chichaos/version.hpp"

#ifndef CHICHAOS_PRESET_DIR
#define CHICHAOS_PRESET_DIR "presets"
#endif

namespace {

using namespace chichaos;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out = "out.csv";
    std::string presets_dir = CHICHAOS_PRESET_DIR;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration");
    cmd->add_option("--preset", opts.preset, "named preset from the presets directory");
    cmd->add_option("--out", opts.out, "output path");
    cmd->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
    cmd->add_option("--presets-dir", opts.presets_dir, "override the presets directory");
}

config::RunConfig load_config(const CommonOpts& opts) {
    if (!opts.config_path.empty() && !opts.preset.empty())
        throw PreconditionError("use either --config or --preset, not both");
    std::string text = "{}";
    if (!opts.config_path.empty()) {
        text = read_file(opts.config_path);
    } else if (!opts.preset.empty()) {
        text = read_file(opts.presets_dir + "/" + opts.preset + ".json");
    }
    return config::parse_config(text);
}

int finish_sweep(const std::string& out, const std::string& csv, const std::string& manifest,
                 std::size_t n_failed, std::size_t n_tasks) {
    sweep::persist_sweep(out, csv, manifest);
    if (n_failed > 0) {
        std::cerr << "warning: " << n_failed << " of " << n_tasks
                  << " grid cells failed; see in-row status\n";
        return 1;
    }
    return 0;
}

int cmd_simulate(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const integrator::Trajectory traj =
        integrator::integrate(cfg.params, cfg.drive, cfg.integration);

    std::string csv = cfg.simulate.raw_state
                          ? "tau,i_a,i_b,q,p,a_cw_re,a_cw_im,a_ccw_re,a_ccw_im,"
                            "b_cw_re,b_cw_im,b_ccw_re,b_ccw_im\n"
                          : "tau,i_a,i_b,q,p\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        csv += format_g17(traj.taus[i]) + ',' + format_g17(traj.i_a[i]) + ',' +
               format_g17(traj.i_b[i]) + ',' + format_g17(traj.q[i]) + ',' +
               format_g17(traj.p[i]);
        if (cfg.simulate.raw_state) {
            const StateVector& s = traj.states[i];
            csv += ',' + format_g17(s.a_cw.real()) + ',' + format_g17(s.a_cw.imag()) + ',' +
                   format_g17(s.a_ccw.real()) + ',' + format_g17(s.a_ccw.imag()) + ',' +
                   format_g17(s.b_cw.real()) + ',' + format_g17(s.b_cw.imag()) + ',' +
                   format_g17(s.b_ccw.real()) + ',' + format_g17(s.b_ccw.imag());
        }
        csv += '\n';
    }
    write_file(opts.out, csv);
    return 0;
}

int cmd_phase_diagram(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const sweep::SweepGrid grid = cfg.sweep_grid();
    const std::string hash = fnv1a_hex(config::fingerprint(cfg, "phase-diagram"));
    if (sweep::outputs_current(opts.out, hash)) {
        std::cout << opts.out << " is current (config hash " << hash << ")\n";
        return 0;
    }
    sweep::ResumeStore store(sweep::partial_path_for(opts.out), hash, 2);
    const sweep::ClassifyTable table =
        sweep::run_classify_sweep(grid, cfg.classify_config(), opts.workers, &store);
    const sweep::PhaseDiagram diagram = sweep::assemble_phase_diagram(table);
    (void)diagram;
    return finish_sweep(opts.out, table.to_csv(),
                        sweep::manifest_json(sweep::TaskKind::Classify, grid, hash,
                                             table.n_failed, true),
                        table.n_failed, grid.task_count());
}

int cmd_bifurcation(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const sweep::SweepGrid grid = cfg.sweep_grid();
    const sweep::BifurcationTable table =
        sweep::run_bifurcation_sweep(grid, cfg.integration, opts.workers);
    const std::string hash = fnv1a_hex(config::fingerprint(cfg, "bifurcation"));
    return finish_sweep(opts.out, table.to_csv(),
                        sweep::manifest_json(sweep::TaskKind::Classify, grid, hash,
                                             table.n_failed, true),
                        table.n_failed, grid.task_count());
}

int cmd_lyapunov(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const sweep::SweepGrid grid = cfg.sweep_grid();
    const std::string hash = fnv1a_hex(config::fingerprint(cfg, "lyapunov"));
    if (sweep::outputs_current(opts.out, hash)) {
        std::cout << opts.out << " is current (config hash " << hash << ")\n";
        return 0;
    }
    sweep::ResumeStore store(sweep::partial_path_for(opts.out), hash, 2);
    const sweep::LyapunovTable table =
        sweep::run_lyapunov_sweep(grid, cfg.classify_config(), opts.workers, &store);
    return finish_sweep(opts.out, table.to_csv(),
                        sweep::manifest_json(sweep::TaskKind::Lyapunov, grid, hash,
                                             table.n_failed, true),
                        table.n_failed, grid.task_count());
}

int cmd_metrics(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    if (cfg.metrics) {
        const double s = analysis::metric_s(cfg.metrics->lambda_1, cfg.metrics->lambda_2);
        const double c = analysis::metric_c(cfg.metrics->lambda_1, cfg.metrics->lambda_2);
        const nlohmann::json j = {{"s", s}, {"c", c}};
        write_file(opts.out, j.dump(2) + "\n");
        return 0;
    }
    const sweep::SweepGrid grid = cfg.sweep_grid();
    const std::string hash = fnv1a_hex(config::fingerprint(cfg, "metrics"));
    sweep::ResumeStore store(sweep::partial_path_for(opts.out), hash, 2);
    const sweep::LyapunovTable table =
        sweep::run_lyapunov_sweep(grid, cfg.classify_config(), opts.workers, &store);
    const sweep::MetricsTable metrics = sweep::metrics_from_lyapunov(table);
    return finish_sweep(opts.out, metrics.to_csv(),
                        sweep::manifest_json(sweep::TaskKind::Lyapunov, grid, hash,
                                             table.n_failed, true),
                        table.n_failed, grid.task_count());
}

nlohmann::json steady_json(const analytic::SteadySolution& s) {
    return {{"a_cw_re", s.a_cw.real()},   {"a_cw_im", s.a_cw.imag()},
            {"a_ccw_re", s.a_ccw.real()}, {"a_ccw_im", s.a_ccw.imag()},
            {"b_cw_re", s.b_cw.real()},   {"b_cw_im", s.b_cw.imag()},
            {"b_ccw_re", s.b_ccw.real()}, {"b_ccw_im", s.b_ccw.imag()},
            {"q", s.q},                   {"p", s.p},
            {"i_a", s.i_a},               {"i_b", s.i_b},
            {"g_factor", s.g_factor}};
}

int cmd_steady(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const analytic::SteadySolution s1 =
        analytic::steady_state(cfg.params, Port::One, cfg.drive.eps);
    const analytic::SteadySolution s2 =
        analytic::steady_state(cfg.params, Port::Two, cfg.drive.eps);
    nlohmann::json j;
    j["port1"] = steady_json(s1);
    j["port2"] = steady_json(s2);
    j["delta_i_a"] = analytic::delta_intensity_steady(cfg.params, cfg.drive.eps);
    j["residual_port1"] = analytic::steady_residual_rel(cfg.params, Port::One, cfg.drive.eps, s1);
    j["residual_port2"] = analytic::steady_residual_rel(cfg.params, Port::Two, cfg.drive.eps, s2);
    write_file(opts.out, j.dump(2) + "\n");
    return 0;
}

int cmd_tipmap(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const config::TipSection tip = cfg.tipmap.value_or(config::TipSection{});
    const std::vector<analytic::RegionPoint> region =
        analytic::achievable_region(tip.tip, tip.ranges, tip.r_count, tip.beta_count,
                                    tip.omega_m, tip.separation_min);
    std::string csv = "xi_over_omega,phi\n";
    for (const analytic::RegionPoint& p : region)
        csv += format_g17(p.xi_over_omega) + ',' + format_g17(p.phi) + '\n';
    write_file(opts.out, csv);
    return 0;
}

sensing::SensingWindow resolve_window(const config::RunConfig& cfg, int workers) {
    (void)workers;
    if (!cfg.window) throw PreconditionError("this command needs a window section");
    const config::WindowSection& w = *cfg.window;
    if (w.crit_port1 && w.crit_port2) {
        return sensing::window_from_critical_points(w.control, *w.crit_port1, *w.crit_port2,
                                                    w.resolution, w.working_point);
    }
    if (!w.lo || !w.hi)
        throw PreconditionError("window: either both critical points or lo/hi are required");
    return sensing::build_window(cfg.params, cfg.drive, w.control, *w.lo, *w.hi, w.resolution,
                                 cfg.classify_config(), w.working_point);
}

nlohmann::json window_json(const sensing::SensingWindow& win) {
    return {{"control", sensing::to_string(win.control)},
            {"crit_port1", win.crit_port1},
            {"crit_port2", win.crit_port2},
            {"half_width_d", win.half_width_d},
            {"center_p", win.center_p},
            {"working_point_f", win.working_point_f},
            {"resolution", win.resolution},
            {"degenerate", win.degenerate}};
}

int cmd_window(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    const sensing::SensingWindow win = resolve_window(cfg, opts.workers);
    write_file(opts.out, window_json(win).dump(2) + "\n");
    return 0;
}

int cmd_sense(const CommonOpts& opts) {
    const config::RunConfig cfg = load_config(opts);
    if (!cfg.sense) throw PreconditionError("sense: config needs a sense section");
    const sensing::SensingWindow win = resolve_window(cfg, opts.workers);

    sensing::RateSweepConfig rate;
    rate.thetas = sensing::default_theta_grid(cfg.sense->theta_count);
    rate.second_axis = cfg.sense->second_axis;
    const int n2 = cfg.sense->second_count;
    for (int i = 0; i < n2; ++i) {
        rate.second_values.push_back(
            n2 == 1 ? cfg.sense->second_min
                    : cfg.sense->second_min +
                          (cfg.sense->second_max - cfg.sense->second_min) * i / (n2 - 1));
    }
    rate.fixed_d_eps = cfg.sense->fixed_d_eps;
    rate.fixed_d_omega = cfg.sense->fixed_d_omega;
    rate.trial.classify = cfg.classify_config();
    rate.trial.amp_change_tol = cfg.sense->amp_change_tol;
    rate.workers = opts.workers;

    const sensing::RateTable table = sensing::success_rate_sweep(cfg.params, win, cfg.drive, rate);
    write_file(opts.out, table.to_csv());

    nlohmann::json j;
    j["window"] = window_json(win);
    j["second_axis"] = sensing::to_string(rate.second_axis);
    j["second_values"] = table.second_values;
    j["single_port_rate"] = table.single_rate;
    j["dual_port_rate"] = table.dual_rate;
    write_file(opts.out + ".summary.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chiral coupled-resonator optomechanics: simulation, phase structure, sensing"};
    app.set_version_flag("--version", chichaos::version_string);
    app.require_subcommand(1);

    CommonOpts opts;
    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(const CommonOpts&);
    };
    const Cmd cmds[] = {
        {"simulate", "integrate one operating point and write the trajectory CSV", cmd_simulate},
        {"phase-diagram", "classify both ports over a parameter grid", cmd_phase_diagram},
        {"bifurcation", "mechanical extrema along a 1-D control grid", cmd_bifurcation},
        {"lyapunov", "maximal-exponent spectra over a parameter grid", cmd_lyapunov},
        {"metrics", "symmetry/chirality metrics from exponent arrays or a sweep", cmd_metrics},
        {"steady", "closed-form steady state for both ports", cmd_steady},
        {"tipmap", "achievable (|xi|/Omega, phi) region of the tip controls", cmd_tipmap},
        {"window", "sensing-window geometry from the port-wise transitions", cmd_window},
        {"sense", "success-rate sweep over the signal phase grid", cmd_sense},
    };
    for (const Cmd& c : cmds) add_common(app.add_subcommand(c.name, c.help), opts);

    CLI11_PARSE(app, argc, argv);

    try {
        for (const Cmd& c : cmds) {
            if (app.get_subcommand(c.name)->parsed()) return c.fn(opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
