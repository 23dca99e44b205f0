#include "chichaos/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "chichaos/errors.hpp"

namespace chichaos::lyapunov {

void LyapunovConfig::validate() const {
    if (!(t_renorm > 0.0)) throw PreconditionError("LyapunovConfig: t_renorm must be > 0");
    if (!(t_average > 0.0)) throw PreconditionError("LyapunovConfig: t_average must be > 0");
    if (!(t_align >= 0.0)) throw PreconditionError("LyapunovConfig: t_align must be >= 0");
    if (!(conv_tol > 0.0)) throw PreconditionError("LyapunovConfig: conv_tol must be > 0");
}

double tangent_norm(const Vec10& v) {
    auto sq = [&](int i) { return v[i] * v[i]; };
    const double s_a = (sq(0) + sq(1)) + (sq(2) + sq(3));
    const double s_b = (sq(4) + sq(5)) + (sq(6) + sq(7));
    const double s_m = sq(8) + sq(9);
    return std::sqrt((s_a + s_b) + s_m);
}

namespace {

bool history_converged(const std::vector<double>& history, double conv_tol) {
    const size_t n = history.size();
    if (n < 8) return false;
    const size_t k = std::max<size_t>(2, n / 4);
    double mean = 0.0;
    for (size_t i = n - k; i < n; ++i) mean += history[i];
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (size_t i = n - k; i < n; ++i) {
        const double d = history[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(k);
    return std::sqrt(var) < conv_tol;
}

struct LyapunovRun {
    integrator::Trajectory trajectory;
    LyapunovEstimate estimate;
};

template <class Driver>
LyapunovRun run_tangent(Driver& driver, double tau, Vec20 y,
                        const integrator::IntegrationConfig& int_config,
                        const LyapunovConfig& lyap_config, bool record) {
    auto renormalize = [&]() {
        const Vec10 v = y.tail<10>();
        const double r = tangent_norm(v);
        y.tail<10>() = v / r;
        return r;
    };

    // Alignment: fold the tangent onto the leading direction before averaging.
    const int n_align =
        static_cast<int>(std::ceil(lyap_config.t_align / lyap_config.t_renorm - 1e-9));
    for (int j = 1; j <= n_align; ++j) {
        driver.advance_to(tau, y, tau + (lyap_config.t_renorm));
        renormalize();
    }

    const double t0 = tau;
    const int n_renorm =
        std::max(1, static_cast<int>(std::round(lyap_config.t_average / lyap_config.t_renorm)));
    const int n_samples =
        record ? static_cast<int>(std::floor(int_config.t_record / int_config.sample_dt + 1e-9))
               : -1;

    LyapunovRun out;
    out.estimate.history.reserve(n_renorm);
    if (record) out.trajectory.push(tau, StateVector::from_flat(Vec10(y.head<10>())));

    double log_sum = 0.0;
    int next_sample = 1;
    for (int j = 1; j <= n_renorm; ++j) {
        const double renorm_target = t0 + j * lyap_config.t_renorm;
        while (record && next_sample <= n_samples) {
            const double sample_target = t0 + next_sample * int_config.sample_dt;
            if (sample_target > renorm_target) break;
            driver.advance_to(tau, y, sample_target);
            out.trajectory.push(tau, StateVector::from_flat(Vec10(y.head<10>())));
            ++next_sample;
        }
        driver.advance_to(tau, y, renorm_target);
        log_sum += std::log(renormalize());
        out.estimate.history.push_back(log_sum / (j * lyap_config.t_renorm));
    }

    out.estimate.lambda_max = out.estimate.history.back();
    out.estimate.converged = history_converged(out.estimate.history, lyap_config.conv_tol);
    out.estimate.window = {int_config.t_transient, n_renorm * lyap_config.t_renorm};
    return out;
}

LyapunovRun run(const SystemParams& params, const DriveSpec& drive,
                const integrator::IntegrationConfig& int_config,
                const LyapunovConfig& lyap_config, bool record,
                const std::optional<StateVector>& initial) {
    params.validate();
    drive.validate();
    int_config.validate();
    lyap_config.validate();
    if (record && int_config.t_record > lyap_config.t_average + 1e-9)
        throw PreconditionError("simulate_with_lyapunov: t_record must not exceed t_average");

    Vec20 y = Vec20::Zero();
    double tau = 0.0;
    {
        // Transient on the plain flow before the tangent is attached.
        const integrator::FlowSystem sys(params, drive);
        Vec10 x = initial ? initial->flat() : Vec10(Vec10::Zero());
        if (!x.allFinite()) throw DivergenceError("non-finite initial state", 0.0);
        if (int_config.method == integrator::Method::RK4Fixed) {
            integrator::FixedDriver<integrator::FlowSystem> driver(sys, int_config.dt);
            driver.advance_to(tau, x, int_config.t_transient);
        } else {
            integrator::AdaptiveDriver<integrator::FlowSystem> driver(
                sys, int_config.abs_tol, int_config.rel_tol, int_config.dt);
            driver.advance_to(tau, x, int_config.t_transient);
        }
        y.head<10>() = x;
    }
    // Swap-invariant unit tangent seed.
    y.tail<10>().setConstant(1.0 / std::sqrt(10.0));

    const TangentSystem sys(params, drive);
    if (int_config.method == integrator::Method::RK4Fixed) {
        integrator::FixedDriver<TangentSystem> driver(sys, int_config.dt);
        return run_tangent(driver, tau, y, int_config, lyap_config, record);
    }
    integrator::AdaptiveDriver<TangentSystem> driver(sys, int_config.abs_tol, int_config.rel_tol,
                                                     int_config.dt);
    return run_tangent(driver, tau, y, int_config, lyap_config, record);
}

}  // namespace

LyapunovEstimate max_lyapunov(const SystemParams& params, const DriveSpec& drive,
                              const integrator::IntegrationConfig& int_config,
                              const LyapunovConfig& lyap_config,
                              const std::optional<StateVector>& initial) {
    return run(params, drive, int_config, lyap_config, false, initial).estimate;
}

std::pair<integrator::Trajectory, LyapunovEstimate> simulate_with_lyapunov(
    const SystemParams& params, const DriveSpec& drive,
    const integrator::IntegrationConfig& int_config, const LyapunovConfig& lyap_config,
    const std::optional<StateVector>& initial) {
    LyapunovRun r = run(params, drive, int_config, lyap_config, true, initial);
    return {std::move(r.trajectory), std::move(r.estimate)};
}

double linear_lambda_oracle(const SystemParams& params, const DriveSpec& drive) {
    (void)drive;
    params.validate();
    if (params.g_om != 0.0)
        throw PreconditionError("linear_lambda_oracle: requires g_om = 0 (affine flow)");
    const Mat10 jac = model::constant_jacobian(params);
    const Eigen::EigenSolver<Mat10> solver(jac, /*computeEigenvectors=*/false);
    return solver.eigenvalues().real().maxCoeff();
}

}  // namespace chichaos::lyapunov
