#include "chichaos/integrator.hpp"

#include <algorithm>

namespace chichaos::integrator {

void IntegrationConfig::validate() const {
    if (!(dt > 0.0)) throw PreconditionError("IntegrationConfig: dt must be > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw PreconditionError("IntegrationConfig: tolerances must be > 0");
    if (!(t_transient >= 0.0)) throw PreconditionError("IntegrationConfig: t_transient must be >= 0");
    if (!(t_record > 0.0)) throw PreconditionError("IntegrationConfig: t_record must be > 0");
    if (!(sample_dt > 0.0)) throw PreconditionError("IntegrationConfig: sample_dt must be > 0");
    if (method == Method::RK4Fixed && sample_dt < dt)
        throw PreconditionError("IntegrationConfig: sample_dt must be >= dt for fixed-step");
}

void Trajectory::push(double tau, const StateVector& s) {
    taus.push_back(tau);
    states.push_back(s);
    i_a.push_back(s.intensity_a());
    i_b.push_back(s.intensity_b());
    q.push_back(s.q);
    p.push_back(s.p);
}

double Trajectory::sample_dt() const {
    if (taus.size() < 2) throw PreconditionError("Trajectory: need >= 2 samples for sample_dt");
    return taus[1] - taus[0];
}

double max_intensity(const Trajectory& traj) {
    if (traj.empty()) throw PreconditionError("max_intensity: empty trajectory");
    return *std::max_element(traj.i_a.begin(), traj.i_a.end());
}

namespace {

template <class Driver>
Trajectory run(Driver& driver, const IntegrationConfig& config, Vec10 y) {
    double tau = 0.0;
    if (config.t_transient > 0.0) driver.advance_to(tau, y, config.t_transient);

    const int n_samples = static_cast<int>(std::floor(config.t_record / config.sample_dt + 1e-9));
    Trajectory traj;
    traj.taus.reserve(n_samples + 1);
    traj.states.reserve(n_samples + 1);
    traj.push(tau, StateVector::from_flat(y));
    for (int k = 1; k <= n_samples; ++k) {
        const double target = config.t_transient + k * config.sample_dt;
        driver.advance_to(tau, y, target);
        traj.push(tau, StateVector::from_flat(y));
    }
    return traj;
}

}  // namespace

Trajectory integrate(const SystemParams& params, const DriveSpec& drive,
                     const IntegrationConfig& config, const std::optional<StateVector>& initial) {
    params.validate();
    drive.validate();
    config.validate();

    Vec10 y = initial ? initial->flat() : Vec10(Vec10::Zero());
    if (!y.allFinite()) throw DivergenceError("integrate: non-finite initial state", 0.0);

    const FlowSystem sys(params, drive);
    if (config.method == Method::RK4Fixed) {
        FixedDriver<FlowSystem> driver(sys, config.dt);
        return run(driver, config, y);
    }
    AdaptiveDriver<FlowSystem> driver(sys, config.abs_tol, config.rel_tol, config.dt);
    return run(driver, config, y);
}

}  // namespace chichaos::integrator
