#include "chichaos/model.hpp"

#include "chichaos/errors.hpp"

namespace chichaos::model {

namespace {

// Writes the 2x2 real block representing multiplication by z into m at (r, c).
void put_block(Mat10& m, int r, int c, Complex z) {
    m(r, c) = z.real();
    m(r, c + 1) = -z.imag();
    m(r + 1, c) = z.imag();
    m(r + 1, c + 1) = z.real();
}

}  // namespace

StateVector rhs(const SystemParams& params, const DriveSpec& drive, double tau,
                const StateVector& state) {
    params.validate();
    if (!state.finite())
        throw DivergenceError("model::rhs: non-finite state component", tau);
    return StateVector::from_flat(rhs_flat(params, drive, tau, state.flat()));
}

Vec10 rhs_flat(const SystemParams& params, const DriveSpec& drive, double tau, const Vec10& x) {
    const Coefficients coeffs(params, drive);
    return coeffs.rates(x, drive.envelope(tau));
}

Mat10 jacobian(const SystemParams& params, const DriveSpec& drive, double tau, const Vec10& x) {
    (void)tau;
    if (!x.allFinite())
        throw DivergenceError("model::jacobian: non-finite state component", tau);
    const Coefficients coeffs(params, drive);
    const Complex a_cw(x[flat::a_cw_re], x[flat::a_cw_im]);
    const Complex a_ccw(x[flat::a_ccw_re], x[flat::a_ccw_im]);
    const double q = x[flat::q];

    const Complex la = coeffs.l_a + Complex(0.0, params.g_om * q);
    const Complex ig(0.0, params.g_om);

    Mat10 m = Mat10::Zero();
    // Resonator A rows.
    put_block(m, 0, 0, la);
    put_block(m, 0, 2, coeffs.i_eta);
    put_block(m, 0, 6, coeffs.i_j);
    put_block(m, 2, 2, la);
    put_block(m, 2, 0, coeffs.i_eta);
    put_block(m, 2, 4, coeffs.i_j);
    // d(da/dtau)/dq = i * g_om * a.
    const Complex dq_cw = ig * a_cw;
    const Complex dq_ccw = ig * a_ccw;
    m(0, flat::q) = dq_cw.real();
    m(1, flat::q) = dq_cw.imag();
    m(2, flat::q) = dq_ccw.real();
    m(3, flat::q) = dq_ccw.imag();
    // Resonator B rows.
    put_block(m, 4, 4, coeffs.l_b);
    put_block(m, 4, 6, coeffs.xi_hop[0]);
    put_block(m, 4, 2, coeffs.i_j);
    put_block(m, 6, 6, coeffs.l_b);
    put_block(m, 6, 4, coeffs.xi_hop[1]);
    put_block(m, 6, 0, coeffs.i_j);
    // Mechanical rows.
    m(flat::q, flat::p) = 1.0;
    m(flat::p, flat::a_cw_re) = 2.0 * params.g_om * a_cw.real();
    m(flat::p, flat::a_cw_im) = 2.0 * params.g_om * a_cw.imag();
    m(flat::p, flat::a_ccw_re) = 2.0 * params.g_om * a_ccw.real();
    m(flat::p, flat::a_ccw_im) = 2.0 * params.g_om * a_ccw.imag();
    m(flat::p, flat::q) = -1.0;
    m(flat::p, flat::p) = -params.gamma_m;
    return m;
}

Mat10 jacobian(const SystemParams& params, const DriveSpec& drive, double tau,
               const StateVector& state) {
    return jacobian(params, drive, tau, state.flat());
}

Mat10 constant_jacobian(const SystemParams& params) {
    return jacobian(params, DriveSpec{}, 0.0, Vec10(Vec10::Zero()));
}

}  // namespace chichaos::model
