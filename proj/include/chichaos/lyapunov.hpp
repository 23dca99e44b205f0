#pragma once

#include <utility>
#include <vector>

#include "chichaos/integrator.hpp"
#include "chichaos/params.hpp"

namespace chichaos::lyapunov {

struct LyapunovConfig {
    double t_renorm = two_pi;             ///< renormalization interval
    double t_average = 2000.0 * two_pi;   ///< averaging window after alignment
    double t_align = 50.0 * two_pi;       ///< tangent alignment, excluded from the average
    double conv_tol = 5e-3;               ///< convergence: stddev of last-quarter history

    void validate() const;
};

struct LyapunovEstimate {
    double lambda_max = 0.0;            ///< final running estimate, units of Omega
    std::vector<double> history;        ///< running estimate after each renormalization
    bool converged = false;
    std::pair<double, double> window{0.0, 0.0};  ///< (t_transient, t_average)
};

/// Maximal Lyapunov exponent via tangent-space propagation: a unit tangent
/// vector evolves under the analytic Jacobian alongside the nonlinear flow and
/// is renormalized every t_renorm; lambda_max = (1/T) sum ln ||v_k||.
/// The flow starts from the all-zero state unless an override is supplied.
LyapunovEstimate max_lyapunov(const SystemParams& params, const DriveSpec& drive,
                              const integrator::IntegrationConfig& int_config,
                              const LyapunovConfig& lyap_config,
                              const std::optional<StateVector>& initial = std::nullopt);

/// One transient, one tangent run: the recorded trajectory and the exponent
/// estimate come from the same solution.
std::pair<integrator::Trajectory, LyapunovEstimate> simulate_with_lyapunov(
    const SystemParams& params, const DriveSpec& drive,
    const integrator::IntegrationConfig& int_config, const LyapunovConfig& lyap_config,
    const std::optional<StateVector>& initial = std::nullopt);

/// Independent oracle for affine flows: the largest real part of the constant
/// Jacobian's eigenvalues. Requires g_om = 0 (PreconditionError otherwise);
/// the drive offsets the fixed point but not the spectrum.
double linear_lambda_oracle(const SystemParams& params, const DriveSpec& drive);

/// The combined flow + tangent system (20 dimensions).
struct TangentSystem {
    using Vec = Vec20;
    static constexpr int dim = 20;

    model::Coefficients coeffs;
    DriveSpec drive;

    TangentSystem(const SystemParams& p, const DriveSpec& d) : coeffs(p, d), drive(d) {}

    Vec20 deriv(double tau, const Vec20& y) const {
        const Vec10 x = y.head<10>();
        const Vec10 v = y.tail<10>();
        Vec20 dy;
        dy.head<10>() = coeffs.rates(x, drive.envelope(tau));
        dy.tail<10>() = coeffs.tangent_rates(x, v);
        return dy;
    }
};

/// Mode-grouped Euclidean norm of a flat tangent vector; exactly invariant
/// under the CW/CCW swap permutation.
double tangent_norm(const Vec10& v);

}  // namespace chichaos::lyapunov
