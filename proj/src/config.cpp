#include "chichaos/config.hpp"

#include <json.hpp>

#include <set>

#include "chichaos/errors.hpp"

namespace chichaos::config {

namespace {

using nlohmann::json;

/// Tracks which keys of an object were consumed; leftovers are an error.
class StrictObject {
public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw PreconditionError("config: " + path_ + " must be a JSON object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void load(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw PreconditionError("config: bad value at " + path_ + "/" + key + ": " + e.what());
        }
    }

    void load(const std::string& key, std::optional<double>& out) {
        if (!has(key) || j_.at(key).is_null()) return;
        double v = 0.0;
        load(key, v);
        out = v;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key()))
                throw PreconditionError("config: unknown key " + path_ + "/" + it.key());
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void parse_params(const json& j, const std::string& path, SystemParams& p) {
    StrictObject o(j, path);
    o.load("delta_a", p.delta_a);
    o.load("delta_b", p.delta_b);
    o.load("kappa", p.kappa);
    o.load("gamma", p.gamma);
    o.load("g_om", p.g_om);
    o.load("gamma_m", p.gamma_m);
    o.load("eta", p.eta);
    o.load("xi_mag", p.xi_mag);
    o.load("phi", p.phi);
    o.load("j_coupling", p.j_coupling);
    o.finish();
    p.validate();
}

void parse_drive(const json& j, const std::string& path, DriveSpec& d) {
    StrictObject o(j, path);
    if (o.has("port")) {
        const int port = j.at("port").get<int>();
        if (port != 1 && port != 2)
            throw PreconditionError("config: " + path + "/port must be 1 or 2");
        d.port = port == 1 ? Port::One : Port::Two;
    }
    o.load("eps", d.eps);
    o.load("d_eps", d.d_eps);
    o.load("d_omega", d.d_omega);
    o.load("theta", d.theta);
    o.finish();
    d.validate();
}

void parse_integration(const json& j, const std::string& path,
                       integrator::IntegrationConfig& c) {
    StrictObject o(j, path);
    if (o.has("method")) {
        const std::string m = j.at("method").get<std::string>();
        if (m == "rk45") c.method = integrator::Method::RK45Adaptive;
        else if (m == "rk4") c.method = integrator::Method::RK4Fixed;
        else throw PreconditionError("config: " + path + "/method must be rk45 or rk4");
    }
    o.load("dt", c.dt);
    o.load("rel_tol", c.rel_tol);
    o.load("abs_tol", c.abs_tol);
    double periods = 0.0;
    if (o.has("t_transient_periods")) {
        o.load("t_transient_periods", periods);
        c.t_transient = periods * two_pi;
    }
    if (o.has("t_record_periods")) {
        o.load("t_record_periods", periods);
        c.t_record = periods * two_pi;
    }
    if (o.has("samples_per_period")) {
        double spp = 64.0;
        o.load("samples_per_period", spp);
        if (!(spp > 0)) throw PreconditionError("config: samples_per_period must be > 0");
        c.sample_dt = two_pi / spp;
    }
    o.finish();
    c.validate();
}

void parse_lyapunov(const json& j, const std::string& path, lyapunov::LyapunovConfig& c) {
    StrictObject o(j, path);
    double periods = 0.0;
    if (o.has("t_renorm_periods")) {
        o.load("t_renorm_periods", periods);
        c.t_renorm = periods * two_pi;
    }
    if (o.has("t_average_periods")) {
        o.load("t_average_periods", periods);
        c.t_average = periods * two_pi;
    }
    if (o.has("t_align_periods")) {
        o.load("t_align_periods", periods);
        c.t_align = periods * two_pi;
    }
    o.load("conv_tol", c.conv_tol);
    o.finish();
    c.validate();
}

void parse_thresholds(const json& j, const std::string& path, analysis::Thresholds& t) {
    StrictObject o(j, path);
    o.load("lambda_chaos_tol", t.lambda_chaos_tol);
    o.load("cluster_eps_rel", t.cluster_eps_rel);
    o.load("var_eps", t.var_eps);
    o.load("flatness_chaos", t.flatness_chaos);
    o.load("flatness_band", t.flatness_band);
    o.load("n_chaos_clusters", t.n_chaos_clusters);
    o.finish();
}

GridAxis parse_axis(const json& j, const std::string& path) {
    GridAxis a;
    StrictObject o(j, path);
    o.load("name", a.name);
    o.load("min", a.min);
    o.load("max", a.max);
    o.load("count", a.count);
    o.finish();
    if (a.name.empty()) throw PreconditionError("config: " + path + "/name is required");
    if (a.count < 1) throw PreconditionError("config: " + path + "/count must be >= 1");
    return a;
}

void parse_grid(const json& j, const std::string& path, GridSection& g) {
    StrictObject o(j, path);
    if (!o.has("axis1")) throw PreconditionError("config: " + path + "/axis1 is required");
    g.axis1 = parse_axis(o.raw("axis1"), path + "/axis1");
    if (o.has("axis2") && !j.at("axis2").is_null())
        g.axis2 = parse_axis(o.raw("axis2"), path + "/axis2");
    o.finish();
}

void parse_window(const json& j, const std::string& path, WindowSection& w) {
    StrictObject o(j, path);
    if (o.has("control"))
        w.control = sensing::window_control_from_string(j.at("control").get<std::string>());
    o.load("lo", w.lo);
    o.load("hi", w.hi);
    o.load("resolution", w.resolution);
    o.load("working_point", w.working_point);
    o.load("crit_port1", w.crit_port1);
    o.load("crit_port2", w.crit_port2);
    o.finish();
}

void parse_sense(const json& j, const std::string& path, SenseSection& s) {
    StrictObject o(j, path);
    o.load("theta_count", s.theta_count);
    if (o.has("second_axis")) {
        const std::string a = j.at("second_axis").get<std::string>();
        if (a == "d_eps") s.second_axis = sensing::SecondAxis::DEps;
        else if (a == "d_omega") s.second_axis = sensing::SecondAxis::DOmega;
        else throw PreconditionError("config: " + path + "/second_axis must be d_eps or d_omega");
    }
    o.load("second_min", s.second_min);
    o.load("second_max", s.second_max);
    o.load("second_count", s.second_count);
    o.load("fixed_d_eps", s.fixed_d_eps);
    o.load("fixed_d_omega", s.fixed_d_omega);
    o.load("amp_change_tol", s.amp_change_tol);
    o.finish();
    if (s.theta_count < 1) throw PreconditionError("config: sense/theta_count must be >= 1");
    if (s.second_count < 1) throw PreconditionError("config: sense/second_count must be >= 1");
}

void parse_tipmap(const json& j, const std::string& path, TipSection& t) {
    StrictObject o(j, path);
    o.load("r1", t.tip.r1);
    o.load("r2", t.tip.r2);
    o.load("n1_sq", t.tip.n1_sq);
    o.load("n2_sq", t.tip.n2_sq);
    o.load("beta", t.tip.beta);
    o.load("azimuthal_n", t.tip.azimuthal_n);
    o.load("f1", t.tip.f1);
    o.load("f2", t.tip.f2);
    o.load("v_b", t.tip.v_b);
    o.load("omega_b", t.tip.omega_b);
    o.load("xi0", t.tip.xi0);
    o.load("v_light", t.tip.v_light);
    o.load("r_min", t.ranges.r_min);
    o.load("r_max", t.ranges.r_max);
    o.load("beta_min", t.ranges.beta_min);
    o.load("beta_max", t.ranges.beta_max);
    o.load("r_count", t.r_count);
    o.load("beta_count", t.beta_count);
    o.load("separation_min", t.separation_min);
    o.load("omega_m", t.omega_m);
    o.finish();
}

void parse_metrics(const json& j, const std::string& path, MetricsSection& m) {
    StrictObject o(j, path);
    o.load("lambda_1", m.lambda_1);
    o.load("lambda_2", m.lambda_2);
    o.finish();
}

void parse_simulate(const json& j, const std::string& path, SimulateSection& s) {
    StrictObject o(j, path);
    o.load("raw_state", s.raw_state);
    o.finish();
}

json axis_json(const GridAxis& a) {
    return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("config: JSON parse error: ") + e.what());
    }

    RunConfig c;
    StrictObject o(j, "");
    if (o.has("schema_version")) {
        const int v = j.at("schema_version").get<int>();
        if (v != 1) throw PreconditionError("config: unsupported schema_version");
    }
    if (o.has("params")) parse_params(o.raw("params"), "/params", c.params);
    if (o.has("drive")) parse_drive(o.raw("drive"), "/drive", c.drive);
    if (o.has("integration")) parse_integration(o.raw("integration"), "/integration", c.integration);
    if (o.has("lyapunov")) parse_lyapunov(o.raw("lyapunov"), "/lyapunov", c.lyap);
    if (o.has("thresholds")) parse_thresholds(o.raw("thresholds"), "/thresholds", c.thresholds);
    if (o.has("grid")) {
        GridSection g;
        parse_grid(o.raw("grid"), "/grid", g);
        c.grid = g;
    }
    if (o.has("window")) {
        WindowSection w;
        parse_window(o.raw("window"), "/window", w);
        c.window = w;
    }
    if (o.has("sense")) {
        SenseSection s;
        parse_sense(o.raw("sense"), "/sense", s);
        c.sense = s;
    }
    if (o.has("tipmap")) {
        TipSection t;
        parse_tipmap(o.raw("tipmap"), "/tipmap", t);
        c.tipmap = t;
    }
    if (o.has("metrics")) {
        MetricsSection m;
        parse_metrics(o.raw("metrics"), "/metrics", m);
        c.metrics = m;
    }
    if (o.has("simulate")) parse_simulate(o.raw("simulate"), "/simulate", c.simulate);
    o.finish();
    return c;
}

sensing::ClassifyConfig RunConfig::classify_config() const {
    return sensing::ClassifyConfig{integration, lyap, thresholds};
}

sweep::SweepGrid RunConfig::sweep_grid() const {
    if (!grid) throw PreconditionError("config: this command needs a grid section");
    sweep::SweepGrid g;
    g.base_params = params;
    g.base_drive = drive;
    g.axes.push_back({grid->axis1.name, grid->axis1.min, grid->axis1.max, grid->axis1.count});
    if (grid->axis2)
        g.axes.push_back({grid->axis2->name, grid->axis2->min, grid->axis2->max,
                          grid->axis2->count});
    g.validate();
    return g;
}

std::string fingerprint(const RunConfig& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["params"] = {{"delta_a", c.params.delta_a}, {"delta_b", c.params.delta_b},
                   {"kappa", c.params.kappa},     {"gamma", c.params.gamma},
                   {"g_om", c.params.g_om},       {"gamma_m", c.params.gamma_m},
                   {"eta", c.params.eta},         {"xi_mag", c.params.xi_mag},
                   {"phi", c.params.phi},         {"j_coupling", c.params.j_coupling}};
    j["drive"] = {{"port", c.drive.port == Port::One ? 1 : 2},
                  {"eps", c.drive.eps},
                  {"d_eps", c.drive.d_eps},
                  {"d_omega", c.drive.d_omega},
                  {"theta", c.drive.theta}};
    j["integration"] = {{"method", c.integration.method == integrator::Method::RK45Adaptive
                                       ? "rk45"
                                       : "rk4"},
                        {"dt", c.integration.dt},
                        {"rel_tol", c.integration.rel_tol},
                        {"abs_tol", c.integration.abs_tol},
                        {"t_transient", c.integration.t_transient},
                        {"t_record", c.integration.t_record},
                        {"sample_dt", c.integration.sample_dt}};
    j["lyapunov"] = {{"t_renorm", c.lyap.t_renorm},
                     {"t_average", c.lyap.t_average},
                     {"t_align", c.lyap.t_align},
                     {"conv_tol", c.lyap.conv_tol}};
    j["thresholds"] = {{"lambda_chaos_tol", c.thresholds.lambda_chaos_tol},
                       {"cluster_eps_rel", c.thresholds.cluster_eps_rel},
                       {"var_eps", c.thresholds.var_eps},
                       {"flatness_chaos", c.thresholds.flatness_chaos},
                       {"flatness_band", c.thresholds.flatness_band},
                       {"n_chaos_clusters", c.thresholds.n_chaos_clusters}};
    if (c.grid) {
        j["grid"]["axis1"] = axis_json(c.grid->axis1);
        if (c.grid->axis2) j["grid"]["axis2"] = axis_json(*c.grid->axis2);
    }
    if (c.window) {
        json w;
        w["control"] = sensing::to_string(c.window->control);
        if (c.window->lo) w["lo"] = *c.window->lo;
        if (c.window->hi) w["hi"] = *c.window->hi;
        w["resolution"] = c.window->resolution;
        if (c.window->working_point) w["working_point"] = *c.window->working_point;
        if (c.window->crit_port1) w["crit_port1"] = *c.window->crit_port1;
        if (c.window->crit_port2) w["crit_port2"] = *c.window->crit_port2;
        j["window"] = w;
    }
    if (c.sense) {
        j["sense"] = {{"theta_count", c.sense->theta_count},
                      {"second_axis", sensing::to_string(c.sense->second_axis)},
                      {"second_min", c.sense->second_min},
                      {"second_max", c.sense->second_max},
                      {"second_count", c.sense->second_count},
                      {"fixed_d_eps", c.sense->fixed_d_eps},
                      {"fixed_d_omega", c.sense->fixed_d_omega},
                      {"amp_change_tol", c.sense->amp_change_tol}};
    }
    if (c.tipmap) {
        j["tipmap"] = {{"r1", c.tipmap->tip.r1},
                       {"r2", c.tipmap->tip.r2},
                       {"n1_sq", c.tipmap->tip.n1_sq},
                       {"n2_sq", c.tipmap->tip.n2_sq},
                       {"beta", c.tipmap->tip.beta},
                       {"azimuthal_n", c.tipmap->tip.azimuthal_n},
                       {"f1", c.tipmap->tip.f1},
                       {"f2", c.tipmap->tip.f2},
                       {"v_b", c.tipmap->tip.v_b},
                       {"omega_b", c.tipmap->tip.omega_b},
                       {"xi0", c.tipmap->tip.xi0},
                       {"v_light", c.tipmap->tip.v_light},
                       {"r_min", c.tipmap->ranges.r_min},
                       {"r_max", c.tipmap->ranges.r_max},
                       {"beta_min", c.tipmap->ranges.beta_min},
                       {"beta_max", c.tipmap->ranges.beta_max},
                       {"r_count", c.tipmap->r_count},
                       {"beta_count", c.tipmap->beta_count},
                       {"separation_min", c.tipmap->separation_min},
                       {"omega_m", c.tipmap->omega_m}};
    }
    if (c.metrics) {
        j["metrics"] = {{"lambda_1", c.metrics->lambda_1}, {"lambda_2", c.metrics->lambda_2}};
    }
    j["simulate"] = {{"raw_state", c.simulate.raw_state}};
    return j.dump();
}

}  // namespace chichaos::config
