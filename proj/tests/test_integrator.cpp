#include <doctest.h>

#include <Eigen/Dense>

#include "chichaos/analytic.hpp"
#include "chichaos/errors.hpp"
#include "chichaos/integrator.hpp"
#include "chichaos/model.hpp"

using namespace chichaos;
using integrator::IntegrationConfig;
using integrator::Method;

namespace {

IntegrationConfig short_config() {
    IntegrationConfig c;
    c.t_transient = 200.0 * two_pi;
    c.t_record = 2.0 * two_pi;
    return c;
}

// Fixed point of the affine (g_om = 0) flow from the constant Jacobian:
// 0 = A x + b  =>  x = -A^{-1} b.
Vec10 linear_fixed_point(const SystemParams& p, const DriveSpec& d) {
    const Mat10 a = model::constant_jacobian(p);
    Vec10 b = Vec10::Zero();
    const Complex e = d.envelope(0.0);
    if (d.port == Port::One) {
        b[flat::a_cw_re] = e.real();
        b[flat::a_cw_im] = e.imag();
    } else {
        b[flat::a_ccw_re] = e.real();
        b[flat::a_ccw_im] = e.imag();
    }
    return a.partialPivLu().solve(Vec10(-b));
}

}  // namespace

TEST_CASE("integrate: unforced zero state stays zero") {
    SystemParams p;
    DriveSpec d;
    d.eps = 0.0;
    for (Method m : {Method::RK45Adaptive, Method::RK4Fixed}) {
        IntegrationConfig c = short_config();
        c.method = m;
        c.t_transient = 5.0 * two_pi;
        const integrator::Trajectory traj = integrator::integrate(p, d, c);
        REQUIRE(!traj.empty());
        for (size_t i = 0; i < traj.size(); ++i) {
            CHECK(traj.i_a[i] == 0.0);
            CHECK(traj.q[i] == 0.0);
        }
        CHECK(integrator::max_intensity(traj) == 0.0);
    }
}

TEST_CASE("integrate: affine flow settles on the linear steady state") {
    SystemParams p;
    p.g_om = 0.0;
    DriveSpec d;
    d.eps = 10.0;

    const Vec10 expected = linear_fixed_point(p, d);

    // Closed-form route for the same fixed point.
    const analytic::SteadySolution sol = analytic::steady_state(p, Port::One, d.eps);
    const Vec10 closed = sol.state().flat();
    CHECK((closed - expected).norm() / expected.norm() < 1e-10);

    for (Method m : {Method::RK45Adaptive, Method::RK4Fixed}) {
        IntegrationConfig c = short_config();
        c.method = m;
        const integrator::Trajectory traj = integrator::integrate(p, d, c);
        const Vec10 last = traj.states.back().flat();
        CHECK((last - expected).norm() / expected.norm() < 1e-6);
        CHECK(integrator::max_intensity(traj) ==
              doctest::Approx(sol.i_a).epsilon(1e-6));
    }
}

TEST_CASE("integrate: deterministic replays bit for bit") {
    SystemParams p;
    p.phi = 0.4 * pi;
    DriveSpec d;
    d.eps = 2.0e4;
    IntegrationConfig c = short_config();
    c.t_transient = 20.0 * two_pi;
    c.t_record = 5.0 * two_pi;

    const integrator::Trajectory t1 = integrator::integrate(p, d, c);
    const integrator::Trajectory t2 = integrator::integrate(p, d, c);
    REQUIRE(t1.size() == t2.size());
    for (size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1.taus[i] == t2.taus[i]);
        CHECK(t1.states[i].flat() == t2.states[i].flat());
    }
}

TEST_CASE("integrate: recorded samples are equally spaced") {
    SystemParams p;
    DriveSpec d;
    d.eps = 100.0;
    IntegrationConfig c = short_config();
    c.t_transient = two_pi;
    c.t_record = 3.0 * two_pi;
    const integrator::Trajectory traj = integrator::integrate(p, d, c);
    REQUIRE(traj.size() >= 3);
    const double dt = traj.sample_dt();
    CHECK(dt == doctest::Approx(c.sample_dt).epsilon(1e-12));
    for (size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.taus[i] - traj.taus[i - 1] == doctest::Approx(dt).epsilon(1e-9));
}

TEST_CASE("integrate: fixed-step error falls ~16x per step halving") {
    SystemParams p;  // smooth regime: weak pump toward a stable fixed point
    DriveSpec d;
    d.eps = 10.0;
    IntegrationConfig base;
    base.method = Method::RK4Fixed;
    base.t_transient = 0.0;
    base.t_record = 4.0 * two_pi;
    base.sample_dt = two_pi / 16.0;

    auto final_q = [&](double dt) {
        IntegrationConfig c = base;
        c.dt = dt;
        const integrator::Trajectory traj = integrator::integrate(p, d, c);
        return traj.states.back().flat();
    };

    const Vec10 ref = final_q(base.sample_dt / 64.0);
    const double err1 = (final_q(base.sample_dt / 4.0) - ref).norm();
    const double err2 = (final_q(base.sample_dt / 8.0) - ref).norm();
    const double ratio = err1 / err2;
    CHECK(ratio > 8.0);
    CHECK(ratio < 40.0);
}

TEST_CASE("integrate: trajectory-level swap symmetry in an ordered regime") {
    SystemParams p;
    p.phi = 0.3 * pi;
    DriveSpec d1;
    d1.port = Port::One;
    d1.eps = 1.0e4;
    IntegrationConfig c = short_config();
    c.t_transient = 50.0 * two_pi;
    c.t_record = 10.0 * two_pi;

    const integrator::Trajectory t1 = integrator::integrate(p, d1, c);
    const integrator::Trajectory t2 = integrator::integrate(p.mirrored(), d1.swapped_port(), c);
    REQUIRE(t1.size() == t2.size());
    double worst = 0.0;
    for (size_t i = 0; i < t1.size(); ++i) {
        const Vec10 mirrored = swap_flat(t2.states[i].flat());
        const Vec10 direct = t1.states[i].flat();
        const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
        worst = std::max(worst, (mirrored - direct).cwiseAbs().maxCoeff() / scale);
    }
    CHECK(worst < 1e-6);   // contract
    CHECK(worst == 0.0);   // the implementation mirrors bit for bit
}

TEST_CASE("integrate: divergence carries the failure time") {
    SystemParams p;
    DriveSpec d;
    StateVector huge;
    huge.a_cw = {1e260, 0.0};
    IntegrationConfig c = short_config();
    c.t_transient = two_pi;
    try {
        integrator::integrate(p, d, c, huge);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.tau() >= 0.0);
    }
}

TEST_CASE("max_intensity: single-sample arithmetic") {
    integrator::Trajectory traj;
    StateVector s;
    s.a_cw = {1.0, 0.0};
    s.a_ccw = {0.0, 2.0};
    traj.push(0.0, s);
    CHECK(integrator::max_intensity(traj) == doctest::Approx(5.0));

    integrator::Trajectory empty;
    CHECK_THROWS_AS(integrator::max_intensity(empty), PreconditionError);
}

TEST_CASE("integrate: RK45 and RK4 agree on a smooth run") {
    SystemParams p;
    DriveSpec d;
    d.eps = 50.0;
    IntegrationConfig c45 = short_config();
    c45.t_transient = 10.0 * two_pi;
    c45.t_record = 2.0 * two_pi;
    IntegrationConfig c4 = c45;
    c4.method = Method::RK4Fixed;
    c4.dt = two_pi / 400.0;

    const Vec10 a = integrator::integrate(p, d, c45).states.back().flat();
    const Vec10 b = integrator::integrate(p, d, c4).states.back().flat();
    CHECK((a - b).norm() / a.norm() < 1e-6);
}

TEST_CASE("config validation") {
    IntegrationConfig c;
    c.dt = -1.0;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = IntegrationConfig{};
    c.method = Method::RK4Fixed;
    c.dt = 1.0;
    c.sample_dt = 0.5;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
}
