#pragma once

#include <vector>

#include "chichaos/params.hpp"

namespace chichaos::analytic {

/// Handling of the optomechanical self-shift of the resonator-A detuning.
/// The closed form drops the quadratic-in-g_om term (g_om << 1); the
/// self-consistent variant iterates it to the exact fixed point.
enum class SelfShift { Omitted, SelfConsistent };

struct SteadySolution {
    Complex a_cw{}, a_ccw{}, b_cw{}, b_ccw{};
    double q = 0.0;
    double p = 0.0;  ///< identically 0
    double i_a = 0.0;
    double i_b = 0.0;
    Complex delta_tilde_a{};  ///< effective resonator-A detuning
    Complex f_factor{};       ///< F = J^2 |xi| / ((delta_b - i gamma)^2 - |xi|^2)
    double g_factor = 0.0;    ///< eps^2 / |denominator|^2 prefactor

    StateVector state() const;
};

/// Closed-form steady state under a monochromatic pump of amplitude eps at
/// the given port. Throws SingularityError at the F pole or when the optical
/// denominator vanishes.
SteadySolution steady_state(const SystemParams& params, Port port, double eps,
                            SelfShift shift = SelfShift::Omitted);

/// Steady light-intensity difference in resonator A between the two pump
/// ports, evaluated from the closed form
/// g * (|eta + F e^{i phi}|^2 - |eta + F e^{-i phi}|^2).
double delta_intensity_steady(const SystemParams& params, double eps);

/// Infinity-norm residual of the steady solution substituted back into the
/// equations of motion, relative to the drive/state scale. The optomechanical
/// detuning shift is handled with the same convention the solution used, so
/// the residual is roundoff-level by construction.
double steady_residual_rel(const SystemParams& params, Port port, double eps,
                           const SteadySolution& sol, SelfShift shift = SelfShift::Omitted);

/// Rayleigh-sphere polarizability chi = 4 pi R^3 (n^2 - 1)/(n^2 + 2), m^3.
double polarizability(double radius, double n_sq);

/// Geometry and mode constants of the two scatterer tips on resonator B.
/// SI units; defaults follow the reference configuration of the bundled
/// presets (index-3.9 tips on a 200 um^3, 190 THz mode).
struct TipConfig {
    double r1 = 40e-9;            ///< tip 1 effective radius, m
    double r2 = 40e-9;            ///< tip 2 effective radius, m
    double n1_sq = 3.9;           ///< squared refractive index of tip 1
    double n2_sq = 3.9;           ///< squared refractive index of tip 2
    double beta = 0.0;            ///< tip angular separation, rad
    int azimuthal_n = 127;        ///< WGM azimuthal order
    double f1 = 0.3;              ///< mode-function value at tip 1
    double f2 = 0.3;              ///< mode-function value at tip 2
    double v_b = 200e-18;         ///< mode volume, m^3
    double omega_b = two_pi * 190e12;  ///< optical angular frequency, rad/s
    double xi0 = 0.0;             ///< intrinsic backscattering, rad/s
    double v_light = 3e8;         ///< light speed in the surrounding medium, m/s

    void validate() const;
};

/// Tip-controlled couplings: coherent backscattering |xi| e^{+-i phi}, common
/// frequency shift delta, and the radiative broadening pair |zeta| e^{+-i Theta},
/// gamma_t. All rad/s.
struct TipDerived {
    double xi_mag = 0.0;
    double phi = 0.0;
    double delta_shift = 0.0;
    double gamma_t = 0.0;
    double zeta_mag = 0.0;
    double theta_cap = 0.0;
};

TipDerived tip_map(const TipConfig& config);

/// Normalization constant used by the region export: mechanical frequency
/// Omega = 2 pi x 20 MHz.
inline constexpr double default_omega_m = two_pi * 20e6;

struct RegionPoint {
    double xi_over_omega = 0.0;
    double phi = 0.0;
};

struct RegionRanges {
    double r_min = 20e-9;
    double r_max = 80e-9;
    double beta_min = -pi;
    double beta_max = pi;
};

/// Image of tip_map over an (r1, r2, beta) grid, reported as normalized
/// (|xi|/Omega, phi) points. Points violating the small-tip validity bound
/// min(|xi|, delta) > separation_min * max(|zeta|, gamma_t) are excluded:
/// there the radiative broadening competes with the coherent coupling and the
/// dipole tip model no longer applies. separation_min = 0 disables the filter.
std::vector<RegionPoint> achievable_region(const TipConfig& base, const RegionRanges& ranges,
                                           int r_count, int beta_count,
                                           double omega_m = default_omega_m,
                                           double separation_min = 10.0);

}  // namespace chichaos::analytic
