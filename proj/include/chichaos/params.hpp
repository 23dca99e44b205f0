#pragma once

#include <Eigen/Dense>
#include <complex>

namespace chichaos {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.14159265358979323846264338328;

using Complex = std::complex<double>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Vec20 = Eigen::Matrix<double, 20, 1>;
using Mat10 = Eigen::Matrix<double, 10, 10>;

/// Pump entry port. Port 1 drives the CW mode of resonator A, port 2 the CCW mode.
enum class Port { One = 1, Two = 2 };

Port other_port(Port p);

/// Model rates and detunings, all normalized to the mechanical frequency
/// (time runs in tau = Omega * t). Defaults are the reference operating
/// point used throughout the bundled presets.
struct SystemParams {
    double delta_a = -0.5;    ///< optical detuning of resonator A, (omega_A - omega)/Omega
    double delta_b = -0.5;    ///< optical detuning of resonator B
    double kappa = 0.25;      ///< optical damping of resonator A
    double gamma = 5.0;       ///< optical damping of resonator B
    double g_om = 5e-5;       ///< single-photon optomechanical coupling
    double gamma_m = 5e-3;    ///< mechanical damping
    double eta = 0.15;        ///< intrinsic backscattering in resonator A
    double xi_mag = 3.0;      ///< tip-induced backscattering magnitude |xi|
    double phi = 0.0;         ///< hopping phase, canonical in (-pi, pi]
    double j_coupling = 2.0;  ///< inter-resonator coupling J

    /// Throws PreconditionError if a rate or magnitude is negative or non-finite.
    void validate() const;

    /// Reduce an angle to the canonical interval (-pi, pi].
    static double canonical_phase(double angle);

    /// The mirror configuration: phi -> -phi, everything else unchanged.
    SystemParams mirrored() const;
};

/// Mean-field state: four complex mode amplitudes plus mechanical
/// displacement and momentum (10 real dimensions).
///
/// Flat real ordering, fixed because golden fixtures depend on it:
///   [Re a_cw, Im a_cw, Re a_ccw, Im a_ccw,
///    Re b_cw, Im b_cw, Re b_ccw, Im b_ccw, q, p]
struct StateVector {
    Complex a_cw{0.0, 0.0};
    Complex a_ccw{0.0, 0.0};
    Complex b_cw{0.0, 0.0};
    Complex b_ccw{0.0, 0.0};
    double q = 0.0;
    double p = 0.0;

    Vec10 flat() const;
    static StateVector from_flat(const Vec10& v);

    bool finite() const;

    /// Total light intensity in resonator A, |a_cw|^2 + |a_ccw|^2.
    double intensity_a() const;
    /// Total light intensity in resonator B.
    double intensity_b() const;

    /// CW <-> CCW exchange in both resonators.
    StateVector swapped_modes() const;
};

/// Index constants for the flat ordering.
namespace flat {
inline constexpr int a_cw_re = 0, a_cw_im = 1;
inline constexpr int a_ccw_re = 2, a_ccw_im = 3;
inline constexpr int b_cw_re = 4, b_cw_im = 5;
inline constexpr int b_ccw_re = 6, b_ccw_im = 7;
inline constexpr int q = 8, p = 9;
}  // namespace flat

Vec10 swap_flat(const Vec10& v);

/// Pump plus optional monochromatic detected signal entering one port.
/// The pumped mode receives eps + d_eps * exp(-i(d_omega*tau + theta));
/// the opposite mode receives no drive.
struct DriveSpec {
    Port port = Port::One;
    double eps = 5.8e4;   ///< pump amplitude
    double d_eps = 0.0;   ///< detected-signal amplitude
    double d_omega = 0.0; ///< signal detuning from the pump
    double theta = 0.0;   ///< initial phase difference

    void validate() const;

    /// Complex drive envelope at normalized time tau.
    Complex envelope(double tau) const;

    /// True when the envelope is constant in tau.
    bool autonomous() const { return d_eps == 0.0 || d_omega == 0.0; }

    /// The same signal applied through the opposite port.
    DriveSpec swapped_port() const;
};

}  // namespace chichaos
