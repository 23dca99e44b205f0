#pragma once

#include <array>
#include <cmath>

#include "chichaos/params.hpp"

namespace chichaos::model {

/// Precomputed coefficients of the equations of motion for one (params, drive)
/// pair. The CW/CCW equations in each resonator are evaluated through the same
/// expression so that the mode-swap symmetry of the flow holds exactly in
/// floating point.
struct Coefficients {
    Complex l_a;            ///< -kappa - i*delta_a (q-dependent shift added at eval time)
    Complex l_b;            ///< -gamma - i*delta_b
    Complex i_eta;          ///< i*eta
    Complex i_j;            ///< i*j_coupling
    std::array<Complex, 2> xi_hop;  ///< {i*|xi|e^{+i phi}, i*|xi|e^{-i phi}}
    double g_om = 0.0;
    double gamma_m = 0.0;
    int pumped = 0;         ///< 0 -> a_cw (port 1), 1 -> a_ccw (port 2)

    Coefficients() = default;
    Coefficients(const SystemParams& p, const DriveSpec& d) {
        l_a = Complex(-p.kappa, -p.delta_a);
        l_b = Complex(-p.gamma, -p.delta_b);
        i_eta = Complex(0.0, p.eta);
        i_j = Complex(0.0, p.j_coupling);
        const double c = std::cos(p.phi);
        const double s = std::sin(p.phi);
        // i*|xi|*(c + i s) = |xi|*(-s + i c); the conjugate hop negates s only,
        // so mirrored parameters reproduce the opposite element bit for bit.
        xi_hop[0] = Complex(p.xi_mag * -s, p.xi_mag * c);
        xi_hop[1] = Complex(p.xi_mag * s, p.xi_mag * c);
        g_om = p.g_om;
        gamma_m = p.gamma_m;
        pumped = d.port == Port::One ? 0 : 1;
    }

    /// Time derivative of the flat state. drive_value is the complex envelope
    /// at the current tau.
    Vec10 rates(const Vec10& x, Complex drive_value) const {
        const std::array<Complex, 2> a{Complex(x[0], x[1]), Complex(x[2], x[3])};
        const std::array<Complex, 2> b{Complex(x[4], x[5]), Complex(x[6], x[7])};
        const double q = x[8];
        const double p = x[9];

        const Complex la = l_a + Complex(0.0, g_om * q);
        std::array<Complex, 2> drive{Complex(0.0, 0.0), Complex(0.0, 0.0)};
        drive[static_cast<size_t>(pumped)] = drive_value;

        Vec10 dx;
        for (int m = 0; m < 2; ++m) {
            const int o = 1 - m;
            const Complex da = la * a[m] + i_eta * a[o] + i_j * b[o] + drive[m];
            const Complex db = l_b * b[m] + xi_hop[m] * b[o] + i_j * a[o];
            dx[2 * m] = da.real();
            dx[2 * m + 1] = da.imag();
            dx[4 + 2 * m] = db.real();
            dx[4 + 2 * m + 1] = db.imag();
        }
        const double intensity = (std::norm(a[0]) + std::norm(a[1]));
        dx[8] = p;
        dx[9] = -q + g_om * intensity - gamma_m * p;
        return dx;
    }

    /// Tangent-space derivative J(x) * v without forming the matrix.
    Vec10 tangent_rates(const Vec10& x, const Vec10& v) const {
        const std::array<Complex, 2> a{Complex(x[0], x[1]), Complex(x[2], x[3])};
        const std::array<Complex, 2> va{Complex(v[0], v[1]), Complex(v[2], v[3])};
        const std::array<Complex, 2> vb{Complex(v[4], v[5]), Complex(v[6], v[7])};
        const double q = x[8];
        const double vq = v[8];
        const double vp = v[9];

        const Complex la = l_a + Complex(0.0, g_om * q);
        const Complex ig(0.0, g_om);

        Vec10 dv;
        std::array<double, 2> amp_term;
        for (int m = 0; m < 2; ++m) {
            const int o = 1 - m;
            const Complex da = la * va[m] + ig * (a[m] * vq) + i_eta * va[o] + i_j * vb[o];
            const Complex db = l_b * vb[m] + xi_hop[m] * vb[o] + i_j * va[o];
            dv[2 * m] = da.real();
            dv[2 * m + 1] = da.imag();
            dv[4 + 2 * m] = db.real();
            dv[4 + 2 * m + 1] = db.imag();
            amp_term[static_cast<size_t>(m)] =
                a[m].real() * va[m].real() + a[m].imag() * va[m].imag();
        }
        dv[8] = vp;
        dv[9] = -vq + 2.0 * g_om * (amp_term[0] + amp_term[1]) - gamma_m * vp;
        return dv;
    }
};

/// Right-hand side of the equations of motion at normalized time tau.
/// Throws DivergenceError on a non-finite state component.
StateVector rhs(const SystemParams& params, const DriveSpec& drive, double tau,
                const StateVector& state);

/// Flat-ordering variant of rhs (no finiteness check; used by integrators,
/// which check per accepted step).
Vec10 rhs_flat(const SystemParams& params, const DriveSpec& drive, double tau, const Vec10& x);

/// Analytic Jacobian d(dx/dtau)/dx in the flat real ordering. Only the
/// optomechanical terms contribute state-dependent entries; the drive
/// contributes none, so tau and drive affect nothing.
Mat10 jacobian(const SystemParams& params, const DriveSpec& drive, double tau, const Vec10& x);
Mat10 jacobian(const SystemParams& params, const DriveSpec& drive, double tau,
               const StateVector& state);

/// Jacobian of the flow at the origin; equals the (constant) Jacobian of the
/// affine g_om = 0 flow with the same rates.
Mat10 constant_jacobian(const SystemParams& params);

}  // namespace chichaos::model
