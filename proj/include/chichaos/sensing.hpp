#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chichaos/analysis.hpp"
#include "chichaos/lyapunov.hpp"
#include "chichaos/params.hpp"

namespace chichaos::sensing {

/// Equivalent amplitude and additional phase of a pump plus detected signal:
///   eps_tot(tau)   = sqrt(eps^2 + d_eps^2 + 2 eps d_eps cos(d_omega tau + theta))
///   theta_tot(tau) = arctan[d_eps sin(..) / (eps + d_eps cos(..))]
/// Diagnostic view; the integrator consumes the complex envelope directly.
struct ComposedDrive {
    double eps = 0.0;
    double d_eps = 0.0;
    double d_omega = 0.0;
    double theta = 0.0;

    double eps_tot(double tau) const;
    double theta_tot(double tau) const;
};

ComposedDrive compose_drive(double eps, double d_eps, double d_omega, double theta);

/// Converts a signal power (W) at angular frequency omega_signal (rad/s)
/// coupled through rate kappa0 (rad/s) into a normalized amplitude
/// d_eps / Omega: d_eps = sqrt(kappa0 * power / (hbar * omega_signal)).
double signal_amplitude(double power, double omega_signal, double kappa0,
                        double omega_m = two_pi * 20e6);

enum class WindowControl { Phi, Eps, Delta };

std::string to_string(WindowControl control);
WindowControl window_control_from_string(const std::string& name);

/// Sets the swept control on the operating point. Delta moves both detunings.
void apply_control(WindowControl control, double value, SystemParams& params, DriveSpec& drive);

/// Everything needed to integrate and label one operating point.
struct ClassifyConfig {
    integrator::IntegrationConfig integration;
    lyapunov::LyapunovConfig lyap;
    analysis::Thresholds thresholds;
};

/// Trajectory + exponent + label for one operating point.
struct PointResult {
    analysis::PhaseLabel label;
    double i_a_max = 0.0;
    StateVector final_state;  ///< where the run ended; trials continue from here
};

PointResult classify_point(const SystemParams& params, const DriveSpec& drive,
                           const ClassifyConfig& config,
                           const std::optional<StateVector>& initial = std::nullopt);

/// Bisection on a boolean classifier; the bracket endpoints must disagree
/// (NoTransitionError otherwise). Returns the bracket midpoint once the
/// bracket is narrower than resolution.
double bisect_transition(const std::function<bool(double)>& is_chaotic, double lo, double hi,
                         double resolution);

/// Critical control value where the classification of the driven system flips
/// between chaotic and ordered, for the port selected by drive.
double find_transition(const SystemParams& params, const DriveSpec& drive, WindowControl control,
                       double lo, double hi, double resolution, const ClassifyConfig& config);

/// Control interval bounded by the two port-wise critical points.
struct SensingWindow {
    WindowControl control = WindowControl::Eps;
    double crit_port1 = 0.0;
    double crit_port2 = 0.0;
    double half_width_d = 0.0;   ///< D = |crit_port1 - crit_port2| / 2
    double center_p = 0.0;       ///< P = (crit_port1 + crit_port2) / 2
    double working_point_f = 0.0;
    double resolution = 0.0;
    bool degenerate = false;     ///< critical points coincide within resolution
};

/// Window geometry from two known critical points: D = |c1 - c2|/2,
/// P = (c1 + c2)/2, F defaulting to P.
SensingWindow window_from_critical_points(WindowControl control, double crit_port1,
                                          double crit_port2, double resolution,
                                          std::optional<double> working_point = std::nullopt);

/// Builds the window from both port transitions over [lo, hi]. The working
/// point defaults to the center P.
SensingWindow build_window(const SystemParams& params, const DriveSpec& base_drive,
                           WindowControl control, double lo, double hi, double resolution,
                           const ClassifyConfig& config,
                           std::optional<double> working_point = std::nullopt);

enum class Protocol { SinglePort, DualPort };

std::string to_string(Protocol protocol);

struct PortBaseline {
    analysis::PhaseLabel label;
    double i_a_max = 0.0;
    StateVector final_state;  ///< running-device state the signal arrives at
};

struct Baselines {
    PortBaseline port1;
    PortBaseline port2;
};

/// Signal-free reference runs for both ports at the working point.
Baselines compute_baselines(const SystemParams& params, const DriveSpec& base_drive,
                            const SensingWindow& window, const ClassifyConfig& config);

struct TrialConfig {
    ClassifyConfig classify;
    double amp_change_tol = 0.2;   ///< relative |delta I_A,max| counting as "changed"
    /// Settling time between signal onset and the classification window. The
    /// trial continues from the baseline attractor state, so this is short
    /// compared to the cold-start transient.
    double settle = 200.0 * two_pi;
};

struct PortOutcome {
    analysis::PhaseLabel label;
    double i_a_max = 0.0;
    double delta_i_a = 0.0;
    bool transition_induced = false;
    bool amplitude_changed = false;
    bool success = false;
};

/// Combined result of one detection attempt. The reported scalar fields come
/// from the first succeeding port (port 1 before port 2), or from the single
/// evaluated port when nothing succeeded, so success == transition && changed
/// always holds.
struct SensingOutcome {
    bool transition_induced = false;
    bool amplitude_changed = false;
    double delta_i_a = 0.0;
    bool success = false;
    std::optional<PortOutcome> port1;
    std::optional<PortOutcome> port2;
};

/// One detection attempt with the signal (d_eps, d_omega, theta) riding the
/// pump. SinglePort drives port 2 only (the conventional reference);
/// DualPort tries both ports and succeeds if either satisfies both criteria:
/// (i) the classification changed against the baseline, (ii) I_A,max moved by
/// more than amp_change_tol relative.
SensingOutcome run_trial(const SystemParams& params, const SensingWindow& window,
                         const Baselines& baselines, const DriveSpec& base_drive, double d_eps,
                         double d_omega, double theta, Protocol protocol,
                         const TrialConfig& config);

enum class SecondAxis { DEps, DOmega };

std::string to_string(SecondAxis axis);

struct RateSweepConfig {
    std::vector<double> thetas;         ///< default: 16 uniform points in [0, 2pi)
    SecondAxis second_axis = SecondAxis::DEps;
    std::vector<double> second_values;  ///< d_eps or d_omega values
    double fixed_d_eps = 0.0;           ///< used when the second axis is DOmega
    double fixed_d_omega = 0.0;         ///< used when the second axis is DEps
    TrialConfig trial;
    int workers = 0;
};

std::vector<double> default_theta_grid(int count = 16);

struct RateRow {
    double theta = 0.0;
    double second = 0.0;
    bool port1_success = false;
    bool port2_success = false;
    bool dual_success = false;
    double delta_i_a_1 = 0.0;
    double delta_i_a_2 = 0.0;
};

struct RateTable {
    SensingWindow window;
    Baselines baselines;
    std::vector<double> second_values;
    std::vector<RateRow> rows;             ///< ordered (second, theta) row-major
    std::vector<double> single_rate;       ///< port-2 success fraction per second value
    std::vector<double> dual_rate;         ///< either-port success fraction per second value

    std::string to_csv() const;
};

/// Success map and rate curves over a (theta x second-axis) grid; both ports
/// are evaluated at every point, so the table carries the single-port and
/// dual-port protocols at once.
RateTable success_rate_sweep(const SystemParams& params, const SensingWindow& window,
                             const DriveSpec& base_drive, const RateSweepConfig& config);

}  // namespace chichaos::sensing
