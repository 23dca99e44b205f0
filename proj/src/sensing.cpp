#include "chichaos/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "chichaos/errors.hpp"
#include "chichaos/parallel.hpp"

namespace chichaos::sensing {

namespace {
constexpr double hbar = 1.054571817e-34;  // J s

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

double ComposedDrive::eps_tot(double tau) const {
    const double c = std::cos(d_omega * tau + theta);
    return std::sqrt(eps * eps + d_eps * d_eps + 2.0 * eps * d_eps * c);
}

double ComposedDrive::theta_tot(double tau) const {
    const double ph = d_omega * tau + theta;
    return std::atan2(d_eps * std::sin(ph), eps + d_eps * std::cos(ph));
}

ComposedDrive compose_drive(double eps, double d_eps, double d_omega, double theta) {
    if (!(eps > 0.0)) throw PreconditionError("compose_drive: eps must be > 0");
    if (!(d_eps >= 0.0)) throw PreconditionError("compose_drive: d_eps must be >= 0");
    return ComposedDrive{eps, d_eps, d_omega, theta};
}

double signal_amplitude(double power, double omega_signal, double kappa0, double omega_m) {
    if (!(power >= 0.0)) throw PreconditionError("signal_amplitude: power must be >= 0");
    if (!(omega_signal > 0.0) || !(kappa0 > 0.0) || !(omega_m > 0.0))
        throw PreconditionError("signal_amplitude: rates must be > 0");
    return std::sqrt(kappa0 * power / (hbar * omega_signal)) / omega_m;
}

std::string to_string(WindowControl control) {
    switch (control) {
        case WindowControl::Phi: return "phi";
        case WindowControl::Eps: return "eps";
        case WindowControl::Delta: return "delta";
    }
    return "unknown";
}

WindowControl window_control_from_string(const std::string& name) {
    if (name == "phi") return WindowControl::Phi;
    if (name == "eps") return WindowControl::Eps;
    if (name == "delta") return WindowControl::Delta;
    throw PreconditionError("unknown window control: " + name);
}

std::string to_string(Protocol protocol) {
    return protocol == Protocol::SinglePort ? "single_port" : "dual_port";
}

std::string to_string(SecondAxis axis) { return axis == SecondAxis::DEps ? "d_eps" : "d_omega"; }

void apply_control(WindowControl control, double value, SystemParams& params, DriveSpec& drive) {
    switch (control) {
        case WindowControl::Phi:
            params.phi = value;
            return;
        case WindowControl::Eps:
            drive.eps = value;
            return;
        case WindowControl::Delta:
            params.delta_a = value;
            params.delta_b = value;
            return;
    }
}

PointResult classify_point(const SystemParams& params, const DriveSpec& drive,
                           const ClassifyConfig& config,
                           const std::optional<StateVector>& initial) {
    auto [traj, lyap] = lyapunov::simulate_with_lyapunov(params, drive, config.integration,
                                                         config.lyap, initial);
    PointResult out;
    out.label = analysis::classify(traj, lyap.lambda_max, config.thresholds);
    out.i_a_max = integrator::max_intensity(traj);
    out.final_state = traj.states.back();
    return out;
}

double bisect_transition(const std::function<bool(double)>& is_chaotic, double lo, double hi,
                         double resolution) {
    if (!(hi > lo)) throw PreconditionError("bisect_transition: empty range");
    if (!(resolution > 0.0)) throw PreconditionError("bisect_transition: resolution must be > 0");
    bool lo_chaotic = is_chaotic(lo);
    const bool hi_chaotic = is_chaotic(hi);
    if (lo_chaotic == hi_chaotic)
        throw NoTransitionError("bisect_transition: no classification change across the range");
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (is_chaotic(mid) == lo_chaotic)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double find_transition(const SystemParams& params, const DriveSpec& drive, WindowControl control,
                       double lo, double hi, double resolution, const ClassifyConfig& config) {
    auto is_chaotic = [&](double value) {
        SystemParams p = params;
        DriveSpec d = drive;
        apply_control(control, value, p, d);
        return classify_point(p, d, config).label.label == analysis::Phase::Chaos;
    };
    return bisect_transition(is_chaotic, lo, hi, resolution);
}

SensingWindow window_from_critical_points(WindowControl control, double crit_port1,
                                          double crit_port2, double resolution,
                                          std::optional<double> working_point) {
    SensingWindow w;
    w.control = control;
    w.resolution = resolution;
    w.crit_port1 = crit_port1;
    w.crit_port2 = crit_port2;
    w.half_width_d = std::abs(crit_port1 - crit_port2) / 2.0;
    w.center_p = (crit_port1 + crit_port2) / 2.0;
    w.working_point_f = working_point.value_or(w.center_p);
    w.degenerate = std::abs(crit_port1 - crit_port2) <= resolution;
    if (!w.degenerate && working_point) {
        const double lo = std::min(crit_port1, crit_port2);
        const double hi = std::max(crit_port1, crit_port2);
        if (!(w.working_point_f > lo && w.working_point_f < hi))
            throw PreconditionError("window: working point must lie strictly inside");
    }
    return w;
}

SensingWindow build_window(const SystemParams& params, const DriveSpec& base_drive,
                           WindowControl control, double lo, double hi, double resolution,
                           const ClassifyConfig& config, std::optional<double> working_point) {
    DriveSpec drive1 = base_drive;
    drive1.port = Port::One;
    DriveSpec drive2 = base_drive;
    drive2.port = Port::Two;

    const double c1 = find_transition(params, drive1, control, lo, hi, resolution, config);
    const double c2 = find_transition(params, drive2, control, lo, hi, resolution, config);
    return window_from_critical_points(control, c1, c2, resolution, working_point);
}

Baselines compute_baselines(const SystemParams& params, const DriveSpec& base_drive,
                            const SensingWindow& window, const ClassifyConfig& config) {
    SystemParams p = params;
    DriveSpec d = base_drive;
    apply_control(window.control, window.working_point_f, p, d);
    d.d_eps = 0.0;

    Baselines b;
    d.port = Port::One;
    const PointResult r1 = classify_point(p, d, config);
    b.port1 = {r1.label, r1.i_a_max, r1.final_state};
    d.port = Port::Two;
    const PointResult r2 = classify_point(p, d, config);
    b.port2 = {r2.label, r2.i_a_max, r2.final_state};
    return b;
}

namespace {

PortOutcome run_port(const SystemParams& params, const SensingWindow& window,
                     const PortBaseline& baseline, const DriveSpec& base_drive, Port port,
                     double d_eps, double d_omega, double theta, const TrialConfig& config) {
    SystemParams p = params;
    DriveSpec d = base_drive;
    apply_control(window.control, window.working_point_f, p, d);
    d.port = port;
    d.d_eps = d_eps;
    d.d_omega = d_omega;
    d.theta = theta;

    // The signal reaches the running device: continue from the baseline
    // attractor state with a short settle instead of a cold-start transient.
    ClassifyConfig trial_cfg = config.classify;
    trial_cfg.integration.t_transient = config.settle;
    const PointResult r = classify_point(p, d, trial_cfg, baseline.final_state);
    PortOutcome out;
    out.label = r.label;
    out.i_a_max = r.i_a_max;
    out.delta_i_a = r.i_a_max - baseline.i_a_max;
    out.transition_induced = r.label.label != baseline.label.label;
    const double ref = std::max(baseline.i_a_max, 1e-300);
    out.amplitude_changed = std::abs(out.delta_i_a) / ref > config.amp_change_tol;
    out.success = out.transition_induced && out.amplitude_changed;
    return out;
}

}  // namespace

SensingOutcome run_trial(const SystemParams& params, const SensingWindow& window,
                         const Baselines& baselines, const DriveSpec& base_drive, double d_eps,
                         double d_omega, double theta, Protocol protocol,
                         const TrialConfig& config) {
    SensingOutcome out;
    if (protocol == Protocol::DualPort) {
        out.port1 = run_port(params, window, baselines.port1, base_drive, Port::One, d_eps,
                             d_omega, theta, config);
    }
    out.port2 = run_port(params, window, baselines.port2, base_drive, Port::Two, d_eps, d_omega,
                         theta, config);

    const PortOutcome* report = nullptr;
    if (out.port1 && out.port1->success)
        report = &*out.port1;
    else if (out.port2->success)
        report = &*out.port2;
    else
        report = &*out.port2;  // nothing succeeded: report the conventional port

    out.transition_induced = report->transition_induced;
    out.amplitude_changed = report->amplitude_changed;
    out.delta_i_a = report->delta_i_a;
    out.success = (out.port1 && out.port1->success) || out.port2->success;
    return out;
}

std::vector<double> default_theta_grid(int count) {
    if (count < 1) throw PreconditionError("default_theta_grid: count must be >= 1");
    std::vector<double> thetas(count);
    for (int i = 0; i < count; ++i) thetas[i] = two_pi * static_cast<double>(i) / count;
    return thetas;
}

std::string RateTable::to_csv() const {
    std::string csv = "theta,second_axis,port1_success,port2_success,dual_success,"
                      "delta_i_a_1,delta_i_a_2\n";
    for (const RateRow& r : rows) {
        csv += format_double(r.theta) + ',' + format_double(r.second) + ',' +
               (r.port1_success ? "1" : "0") + ',' + (r.port2_success ? "1" : "0") + ',' +
               (r.dual_success ? "1" : "0") + ',' + format_double(r.delta_i_a_1) + ',' +
               format_double(r.delta_i_a_2) + '\n';
    }
    return csv;
}

RateTable success_rate_sweep(const SystemParams& params, const SensingWindow& window,
                             const DriveSpec& base_drive, const RateSweepConfig& config) {
    if (config.thetas.empty() || config.second_values.empty())
        throw PreconditionError("success_rate_sweep: empty grid");

    RateTable table;
    table.window = window;
    table.baselines = compute_baselines(params, base_drive, window, config.trial.classify);
    table.second_values = config.second_values;

    const size_t n_theta = config.thetas.size();
    const size_t n = n_theta * config.second_values.size();
    table.rows.resize(n);

    parallel_for(n, config.workers, [&](size_t idx) {
        const size_t si = idx / n_theta;
        const size_t ti = idx % n_theta;
        const double second = config.second_values[si];
        const double theta = config.thetas[ti];
        const double d_eps =
            config.second_axis == SecondAxis::DEps ? second : config.fixed_d_eps;
        const double d_omega =
            config.second_axis == SecondAxis::DOmega ? second : config.fixed_d_omega;

        const SensingOutcome outcome =
            run_trial(params, window, table.baselines, base_drive, d_eps, d_omega, theta,
                      Protocol::DualPort, config.trial);
        RateRow row;
        row.theta = theta;
        row.second = second;
        row.port1_success = outcome.port1 && outcome.port1->success;
        row.port2_success = outcome.port2->success;
        row.dual_success = outcome.success;
        row.delta_i_a_1 = outcome.port1 ? outcome.port1->delta_i_a : 0.0;
        row.delta_i_a_2 = outcome.port2->delta_i_a;
        table.rows[idx] = row;
    });

    table.single_rate.resize(config.second_values.size());
    table.dual_rate.resize(config.second_values.size());
    for (size_t si = 0; si < config.second_values.size(); ++si) {
        int single = 0;
        int dual = 0;
        for (size_t ti = 0; ti < n_theta; ++ti) {
            const RateRow& r = table.rows[si * n_theta + ti];
            single += r.port2_success ? 1 : 0;
            dual += r.dual_success ? 1 : 0;
        }
        table.single_rate[si] = static_cast<double>(single) / static_cast<double>(n_theta);
        table.dual_rate[si] = static_cast<double>(dual) / static_cast<double>(n_theta);
    }
    return table;
}

}  // namespace chichaos::sensing
