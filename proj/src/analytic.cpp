#include "chichaos/analytic.hpp"

#include <cmath>

#include "chichaos/errors.hpp"
#include "chichaos/model.hpp"

namespace chichaos::analytic {

StateVector SteadySolution::state() const {
    StateVector s;
    s.a_cw = a_cw;
    s.a_ccw = a_ccw;
    s.b_cw = b_cw;
    s.b_ccw = b_ccw;
    s.q = q;
    s.p = p;
    return s;
}

namespace {

struct SteadyCore {
    Complex den_b;    // (delta_b - i gamma)^2 - |xi|^2
    Complex f;        // J^2 |xi| / den_b
    Complex db_ig;    // delta_b - i gamma
    Complex u_plus;   // eta + F e^{+i phi}
    Complex u_minus;  // eta + F e^{-i phi}
};

SteadyCore steady_core(const SystemParams& p) {
    SteadyCore c;
    c.db_ig = Complex(p.delta_b, -p.gamma);
    c.den_b = c.db_ig * c.db_ig - Complex(p.xi_mag * p.xi_mag, 0.0);
    const double scale_b = std::norm(c.db_ig) + p.xi_mag * p.xi_mag;
    if (!(std::abs(c.den_b) > 1e-14 * scale_b))
        throw SingularityError("steady_state: pole of F, (delta_b - i gamma)^2 == |xi|^2");
    c.f = (p.j_coupling * p.j_coupling * p.xi_mag) / c.den_b;
    const Complex e_ip(std::cos(p.phi), std::sin(p.phi));
    c.u_plus = p.eta + c.f * e_ip;
    c.u_minus = p.eta + c.f * std::conj(e_ip);
    return c;
}

// Effective detuning with an explicit intensity estimate for the
// optomechanical self-shift (0 for the omitted convention).
Complex effective_detuning(const SystemParams& p, const SteadyCore& c, double i_a) {
    // F (delta_b - i gamma)/|xi| reduces to J^2 (delta_b - i gamma)/den_b,
    // well defined also at xi = 0.
    const Complex hybrid = (p.j_coupling * p.j_coupling) * c.db_ig / c.den_b;
    return Complex(p.delta_a - p.g_om * p.g_om * i_a, -p.kappa) - hybrid;
}

SteadySolution evaluate(const SystemParams& p, Port port, double eps, const SteadyCore& c,
                        double i_a_shift) {
    const Complex delta_tilde = effective_detuning(p, c, i_a_shift);
    const Complex den_a = delta_tilde * delta_tilde - c.u_minus * c.u_plus;
    const double scale_a = std::norm(delta_tilde) + std::abs(c.u_minus * c.u_plus);
    if (!(std::abs(den_a) > 1e-14 * scale_a))
        throw SingularityError("steady_state: vanishing optical denominator");

    const Complex eps1(port == Port::One ? eps : 0.0, 0.0);
    const Complex eps2(port == Port::Two ? eps : 0.0, 0.0);
    const Complex minus_i(0.0, -1.0);

    SteadySolution s;
    s.delta_tilde_a = delta_tilde;
    s.f_factor = c.f;
    s.g_factor = eps * eps / std::norm(den_a);
    s.a_cw = minus_i * (eps2 * c.u_minus + eps1 * delta_tilde) / den_a;
    s.a_ccw = minus_i * (eps1 * c.u_plus + eps2 * delta_tilde) / den_a;

    const Complex e_ip(std::cos(p.phi), std::sin(p.phi));
    const Complex xi_p = p.xi_mag * e_ip;
    const Complex xi_m = p.xi_mag * std::conj(e_ip);
    s.b_cw = p.j_coupling * (xi_p * s.a_cw + c.db_ig * s.a_ccw) / c.den_b;
    s.b_ccw = p.j_coupling * (xi_m * s.a_ccw + c.db_ig * s.a_cw) / c.den_b;

    s.i_a = std::norm(s.a_cw) + std::norm(s.a_ccw);
    s.i_b = std::norm(s.b_cw) + std::norm(s.b_ccw);
    s.q = p.g_om * s.i_a;
    s.p = 0.0;
    return s;
}

}  // namespace

SteadySolution steady_state(const SystemParams& params, Port port, double eps, SelfShift shift) {
    params.validate();
    if (!(eps >= 0.0)) throw PreconditionError("steady_state: eps must be >= 0");

    const SteadyCore core = steady_core(params);
    SteadySolution sol = evaluate(params, port, eps, core, 0.0);
    if (shift == SelfShift::SelfConsistent) {
        for (int iter = 0; iter < 200; ++iter) {
            const double prev = sol.i_a;
            sol = evaluate(params, port, eps, core, sol.i_a);
            if (std::abs(sol.i_a - prev) <= 1e-15 * std::max(1.0, sol.i_a)) break;
        }
    }
    return sol;
}

double delta_intensity_steady(const SystemParams& params, double eps) {
    params.validate();
    const SteadyCore core = steady_core(params);
    const SteadySolution probe = evaluate(params, Port::One, eps, core, 0.0);
    return probe.g_factor * (std::norm(core.u_plus) - std::norm(core.u_minus));
}

double steady_residual_rel(const SystemParams& params, Port port, double eps,
                           const SteadySolution& sol, SelfShift shift) {
    DriveSpec drive;
    drive.port = port;
    drive.eps = eps;

    const Vec10 x = sol.state().flat();
    Vec10 r;
    if (shift == SelfShift::SelfConsistent) {
        r = model::rhs_flat(params, drive, 0.0, x);
    } else {
        // Same convention as the closed form: no optomechanical detuning
        // shift in the optical equations, full radiation pressure in dp.
        SystemParams optical = params;
        optical.g_om = 0.0;
        r = model::rhs_flat(optical, drive, 0.0, x);
        r[flat::p] += params.g_om * sol.i_a;
    }

    const double coef_scale = std::abs(params.delta_a) + params.kappa + std::abs(params.delta_b) +
                              params.gamma + params.eta + params.xi_mag + params.j_coupling +
                              params.g_om * std::abs(sol.q) + 1.0;
    const double scale = eps + coef_scale * x.cwiseAbs().maxCoeff();
    return r.cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

double polarizability(double radius, double n_sq) {
    if (!(radius > 0.0)) throw PreconditionError("polarizability: radius must be > 0");
    if (!(n_sq > 0.0)) throw PreconditionError("polarizability: n_sq must be > 0");
    return 4.0 * pi * radius * radius * radius * (n_sq - 1.0) / (n_sq + 2.0);
}

void TipConfig::validate() const {
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw PreconditionError("TipConfig: radii must be > 0");
    if (!(n1_sq > 0.0) || !(n2_sq > 0.0)) throw PreconditionError("TipConfig: n_sq must be > 0");
    if (!(v_b > 0.0)) throw PreconditionError("TipConfig: mode volume must be > 0");
    if (!(omega_b > 0.0)) throw PreconditionError("TipConfig: omega_b must be > 0");
    if (!(v_light > 0.0)) throw PreconditionError("TipConfig: v_light must be > 0");
    if (azimuthal_n < 1) throw PreconditionError("TipConfig: azimuthal order must be >= 1");
    if (!(xi0 >= 0.0)) throw PreconditionError("TipConfig: xi0 must be >= 0");
}

TipDerived tip_map(const TipConfig& config) {
    config.validate();
    const double chi1 = polarizability(config.r1, config.n1_sq);
    const double chi2 = polarizability(config.r2, config.n2_sq);
    const double w1 = chi1 * config.f1 * config.f1;
    const double w2 = chi2 * config.f2 * config.f2;
    const double two_n_beta = 2.0 * config.azimuthal_n * config.beta;
    const Complex interference(std::cos(two_n_beta), std::sin(two_n_beta));

    TipDerived d;
    const Complex xi_complex = config.xi0 + config.omega_b * (w1 + w2 * interference) / (2.0 * config.v_b);
    d.xi_mag = std::abs(xi_complex);
    d.phi = std::arg(xi_complex);
    d.delta_shift = config.omega_b * (w1 + w2) / (2.0 * config.v_b);

    const double omega4 = config.omega_b * config.omega_b * config.omega_b * config.omega_b;
    const double v3 = config.v_light * config.v_light * config.v_light;
    const double radiative = omega4 / (12.0 * pi * v3 * config.v_b);
    const double u1 = chi1 * chi1 * config.f1 * config.f1;
    const double u2 = chi2 * chi2 * config.f2 * config.f2;
    const Complex zeta_complex = radiative * (u1 + u2 * interference);
    d.zeta_mag = std::abs(zeta_complex);
    d.theta_cap = std::arg(zeta_complex);
    d.gamma_t = radiative * (u1 + u2);
    return d;
}

std::vector<RegionPoint> achievable_region(const TipConfig& base, const RegionRanges& ranges,
                                           int r_count, int beta_count, double omega_m,
                                           double separation_min) {
    if (r_count < 1 || beta_count < 1)
        throw PreconditionError("achievable_region: grid counts must be >= 1");
    if (!(ranges.r_max >= ranges.r_min) || !(ranges.beta_max >= ranges.beta_min))
        throw PreconditionError("achievable_region: empty ranges");
    if (!(omega_m > 0.0)) throw PreconditionError("achievable_region: omega_m must be > 0");

    auto lerp = [](double lo, double hi, int i, int count) {
        return count == 1 ? lo : lo + (hi - lo) * (static_cast<double>(i) / (count - 1));
    };

    std::vector<RegionPoint> region;
    region.reserve(static_cast<size_t>(r_count) * r_count * beta_count);
    TipConfig cfg = base;
    for (int i = 0; i < r_count; ++i) {
        cfg.r1 = lerp(ranges.r_min, ranges.r_max, i, r_count);
        for (int j = 0; j < r_count; ++j) {
            cfg.r2 = lerp(ranges.r_min, ranges.r_max, j, r_count);
            for (int k = 0; k < beta_count; ++k) {
                cfg.beta = lerp(ranges.beta_min, ranges.beta_max, k, beta_count);
                const TipDerived d = tip_map(cfg);
                if (d.xi_mag == 0.0) continue;  // phase undefined
                if (separation_min > 0.0) {
                    const double broad = std::max(d.zeta_mag, d.gamma_t);
                    if (broad > 0.0 &&
                        std::min(d.xi_mag, d.delta_shift) <= separation_min * broad)
                        continue;
                }
                region.push_back({d.xi_mag / omega_m, d.phi});
            }
        }
    }
    return region;
}

}  // namespace chichaos::analytic
