#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "chichaos/errors.hpp"
#include "chichaos/model.hpp"
#include "chichaos/params.hpp"

namespace chichaos::integrator {

enum class Method { RK4Fixed, RK45Adaptive };

struct IntegrationConfig {
    Method method = Method::RK45Adaptive;
    double dt = two_pi / 200.0;        ///< fixed step (RK4) or initial step (RK45)
    double rel_tol = 1e-9;             ///< adaptive only
    double abs_tol = 1e-9;             ///< adaptive only
    double t_transient = 1000.0 * two_pi;
    double t_record = 200.0 * two_pi;
    double sample_dt = two_pi / 64.0;  ///< observable sampling interval

    void validate() const;
};

/// Sampled solution over the recorded window. Samples are equally spaced in
/// tau; observables are derived series of the states.
struct Trajectory {
    std::vector<double> taus;
    std::vector<StateVector> states;
    std::vector<double> i_a;  ///< |a_cw|^2 + |a_ccw|^2
    std::vector<double> i_b;  ///< |b_cw|^2 + |b_ccw|^2
    std::vector<double> q;
    std::vector<double> p;

    size_t size() const { return taus.size(); }
    bool empty() const { return taus.empty(); }
    void push(double tau, const StateVector& s);
    double sample_dt() const;
};

/// Maximum of the I_A series over the recorded window. Throws
/// PreconditionError on an empty trajectory.
double max_intensity(const Trajectory& traj);

/// Scaled RK error norm with mode-grouped accumulation: the CW/CCW pairs of
/// each resonator are summed with commutative grouping so the norm is exactly
/// invariant under the mode-swap permutation.
template <int N>
double grouped_error_norm(const Eigen::Matrix<double, N, 1>& err,
                          const Eigen::Matrix<double, N, 1>& y0,
                          const Eigen::Matrix<double, N, 1>& y1, double abs_tol,
                          double rel_tol) {
    static_assert(N % 10 == 0);
    auto comp = [&](int i) {
        const double scale =
            abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / scale;
        return r * r;
    };
    double total = 0.0;
    for (int base = 0; base < N; base += 10) {
        const double s_a = (comp(base + 0) + comp(base + 1)) + (comp(base + 2) + comp(base + 3));
        const double s_b = (comp(base + 4) + comp(base + 5)) + (comp(base + 6) + comp(base + 7));
        const double s_m = comp(base + 8) + comp(base + 9);
        total += (s_a + s_b) + s_m;
    }
    return std::sqrt(total / N);
}

/// Classic RK4 step for a System exposing deriv(tau, y).
template <class System>
typename System::Vec rk4_step(const System& sys, double tau, double h,
                              const typename System::Vec& y) {
    using Vec = typename System::Vec;
    const Vec k1 = sys.deriv(tau, y);
    const Vec k2 = sys.deriv(tau + 0.5 * h, Vec(y + (0.5 * h) * k1));
    const Vec k3 = sys.deriv(tau + 0.5 * h, Vec(y + (0.5 * h) * k2));
    const Vec k4 = sys.deriv(tau + h, Vec(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Dormand-Prince 5(4) driver with step clamping to exact target times.
/// Deterministic: identical inputs take identical step sequences.
template <class System>
class AdaptiveDriver {
public:
    using Vec = typename System::Vec;
    static constexpr int dim = System::dim;

    AdaptiveDriver(const System& sys, double abs_tol, double rel_tol, double h_init)
        : sys_(sys), abs_tol_(abs_tol), rel_tol_(rel_tol), h_(h_init) {}

    /// Advances y in place from tau to target (target > tau required).
    void advance_to(double& tau, Vec& y, double target) {
        if (!(target > tau)) return;
        if (!k1_valid_) {
            k1_ = sys_.deriv(tau, y);
            k1_valid_ = true;
        }
        while (tau < target) {
            double h = std::min(h_, target - tau);
            bool clipped = h < h_;
            for (;;) {
                if (h < 1e-14 * std::max(1.0, std::abs(tau)))
                    throw StiffnessError("adaptive step underflow at tau=" + std::to_string(tau));
                const Vec k2 = sys_.deriv(tau + c2 * h, Vec(y + h * (a21 * k1_)));
                const Vec k3 = sys_.deriv(tau + c3 * h, Vec(y + h * (a31 * k1_ + a32 * k2)));
                const Vec k4 = sys_.deriv(tau + c4 * h, Vec(y + h * (a41 * k1_ + a42 * k2 + a43 * k3)));
                const Vec k5 = sys_.deriv(tau + c5 * h,
                                          Vec(y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4)));
                const Vec k6 = sys_.deriv(
                    tau + h, Vec(y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
                const Vec y_new =
                    y + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
                const Vec k7 = sys_.deriv(tau + h, y_new);
                const Vec err_vec =
                    h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
                const double err =
                    grouped_error_norm<dim>(err_vec, y, y_new, abs_tol_, rel_tol_);
                if (!std::isfinite(err)) throw DivergenceError("state diverged", tau);
                if (err <= 1.0) {
                    tau += h;
                    y = y_new;
                    if (!y.allFinite())
                        throw DivergenceError("state diverged", tau);
                    k1_ = k7;  // FSAL
                    const double grow =
                        err == 0.0 ? fac_max : std::min(fac_max, safety * std::pow(err, -0.2));
                    const double h_next = h * std::max(fac_min, grow);
                    // A step clipped to the target must not poison the
                    // proposed step size.
                    h_ = clipped ? std::max(h_, h_next) : h_next;
                    break;
                }
                h *= std::max(fac_min, safety * std::pow(err, -0.2));
                clipped = false;
            }
        }
    }

    void reset_stage_cache() { k1_valid_ = false; }

private:
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;

    System sys_;
    double abs_tol_;
    double rel_tol_;
    double h_;
    Vec k1_{};
    bool k1_valid_ = false;
};

/// The 10-dimensional mean-field flow as an integrable system.
struct FlowSystem {
    using Vec = Vec10;
    static constexpr int dim = 10;

    model::Coefficients coeffs;
    DriveSpec drive;

    FlowSystem(const SystemParams& p, const DriveSpec& d) : coeffs(p, d), drive(d) {}

    Vec10 deriv(double tau, const Vec10& y) const { return coeffs.rates(y, drive.envelope(tau)); }
};

/// Fixed-step RK4 driver. The requested dt is an upper bound: each span is cut
/// into equal substeps of size span/n with n = ceil(span/dt), so sample
/// boundaries are hit exactly and spacing stays uniform.
template <class System>
class FixedDriver {
public:
    using Vec = typename System::Vec;

    FixedDriver(const System& sys, double dt) : sys_(sys), dt_(dt) {}

    void advance_to(double& tau, Vec& y, double target) {
        const double span = target - tau;
        if (!(span > 0)) return;
        const int n = std::max(1, static_cast<int>(std::ceil(span / dt_ - 1e-9)));
        const double h = span / n;
        for (int i = 0; i < n; ++i) {
            y = rk4_step(sys_, tau, h, y);
            tau += h;
        }
        tau = target;
        if (!y.allFinite()) throw DivergenceError("state diverged", tau);
    }

private:
    System sys_;
    double dt_;
};

/// Evolves the model from tau = 0 (all-zero state unless overridden) through
/// the transient, then records t_record at sample_dt spacing.
Trajectory integrate(const SystemParams& params, const DriveSpec& drive,
                     const IntegrationConfig& config,
                     const std::optional<StateVector>& initial = std::nullopt);

}  // namespace chichaos::integrator
