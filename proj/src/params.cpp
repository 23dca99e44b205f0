#include "chichaos/params.hpp"

#include <cmath>

#include "chichaos/errors.hpp"

namespace chichaos {

Port other_port(Port p) { return p == Port::One ? Port::Two : Port::One; }

void SystemParams::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw PreconditionError(std::string("SystemParams: ") + name + " must be finite and >= 0");
    };
    nonneg(kappa, "kappa");
    nonneg(gamma, "gamma");
    nonneg(g_om, "g_om");
    nonneg(gamma_m, "gamma_m");
    nonneg(eta, "eta");
    nonneg(xi_mag, "xi_mag");
    nonneg(j_coupling, "j_coupling");
    if (!std::isfinite(delta_a) || !std::isfinite(delta_b) || !std::isfinite(phi))
        throw PreconditionError("SystemParams: detunings and phi must be finite");
}

double SystemParams::canonical_phase(double angle) {
    double a = std::remainder(angle, two_pi);  // (-pi, pi] up to the boundary convention
    if (a <= -pi) a += two_pi;
    return a;
}

SystemParams SystemParams::mirrored() const {
    SystemParams m = *this;
    m.phi = -phi;
    return m;
}

Vec10 StateVector::flat() const {
    Vec10 v;
    v << a_cw.real(), a_cw.imag(), a_ccw.real(), a_ccw.imag(),
         b_cw.real(), b_cw.imag(), b_ccw.real(), b_ccw.imag(), q, p;
    return v;
}

StateVector StateVector::from_flat(const Vec10& v) {
    StateVector s;
    s.a_cw = {v[flat::a_cw_re], v[flat::a_cw_im]};
    s.a_ccw = {v[flat::a_ccw_re], v[flat::a_ccw_im]};
    s.b_cw = {v[flat::b_cw_re], v[flat::b_cw_im]};
    s.b_ccw = {v[flat::b_ccw_re], v[flat::b_ccw_im]};
    s.q = v[flat::q];
    s.p = v[flat::p];
    return s;
}

bool StateVector::finite() const {
    return flat().allFinite();
}

double StateVector::intensity_a() const { return std::norm(a_cw) + std::norm(a_ccw); }
double StateVector::intensity_b() const { return std::norm(b_cw) + std::norm(b_ccw); }

StateVector StateVector::swapped_modes() const {
    StateVector s = *this;
    std::swap(s.a_cw, s.a_ccw);
    std::swap(s.b_cw, s.b_ccw);
    return s;
}

Vec10 swap_flat(const Vec10& v) {
    Vec10 w;
    w[flat::a_cw_re] = v[flat::a_ccw_re];
    w[flat::a_cw_im] = v[flat::a_ccw_im];
    w[flat::a_ccw_re] = v[flat::a_cw_re];
    w[flat::a_ccw_im] = v[flat::a_cw_im];
    w[flat::b_cw_re] = v[flat::b_ccw_re];
    w[flat::b_cw_im] = v[flat::b_ccw_im];
    w[flat::b_ccw_re] = v[flat::b_cw_re];
    w[flat::b_ccw_im] = v[flat::b_cw_im];
    w[flat::q] = v[flat::q];
    w[flat::p] = v[flat::p];
    return w;
}

void DriveSpec::validate() const {
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw PreconditionError("DriveSpec: eps must be finite and >= 0");
    if (!(d_eps >= 0.0) || !std::isfinite(d_eps))
        throw PreconditionError("DriveSpec: d_eps must be finite and >= 0");
    if (!std::isfinite(d_omega) || !std::isfinite(theta))
        throw PreconditionError("DriveSpec: d_omega and theta must be finite");
}

Complex DriveSpec::envelope(double tau) const {
    if (d_eps == 0.0) return Complex(eps, 0.0);
    const double ph = d_omega * tau + theta;
    return Complex(eps + d_eps * std::cos(ph), -d_eps * std::sin(ph));
}

DriveSpec DriveSpec::swapped_port() const {
    DriveSpec d = *this;
    d.port = other_port(port);
    return d;
}

}  // namespace chichaos
