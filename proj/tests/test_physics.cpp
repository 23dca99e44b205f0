#include <doctest.h>

#include <cmath>

#include "chichaos/analysis.hpp"
#include "chichaos/analytic.hpp"
#include "chichaos/lyapunov.hpp"
#include "chichaos/sweep.hpp"

using namespace chichaos;

namespace {

// Reduced-scale run settings: long enough for clean labels, short enough for
// a unit-test budget.
integrator::IntegrationConfig physics_integration() {
    integrator::IntegrationConfig c;
    c.t_transient = 500.0 * two_pi;
    c.t_record = 200.0 * two_pi;
    return c;
}

lyapunov::LyapunovConfig physics_lyap() {
    lyapunov::LyapunovConfig c;
    c.t_average = 800.0 * two_pi;
    return c;
}

SystemParams nonreciprocal_point() {
    SystemParams p;  // reference rates
    p.xi_mag = 3.29;
    p.phi = 0.755 * pi;
    return p;
}

}  // namespace

TEST_CASE("port switch flips the operating mode at the nonreciprocal point") {
    const SystemParams p = nonreciprocal_point();
    DriveSpec d;
    d.eps = 5.8e4;

    d.port = Port::One;
    const auto [traj1, lyap1] =
        lyapunov::simulate_with_lyapunov(p, d, physics_integration(), physics_lyap());
    const auto label1 = analysis::classify(traj1, lyap1.lambda_max);
    INFO("port1 lambda_max = ", lyap1.lambda_max);
    CHECK(lyap1.lambda_max > 0.01);
    CHECK(label1.label == analysis::Phase::Chaos);
    CHECK(!label1.discrete_spectrum_flag);

    // chaotic record scatters far beyond any finite period-doubling ladder
    const auto extrema = analysis::extract_extrema(traj1);
    CHECK(analysis::count_clusters(extrema, analysis::Thresholds{}.cluster_eps_rel) > 50);

    d.port = Port::Two;
    const auto [traj2, lyap2] =
        lyapunov::simulate_with_lyapunov(p, d, physics_integration(), physics_lyap());
    const auto label2 = analysis::classify(traj2, lyap2.lambda_max);
    INFO("port2 lambda_max = ", lyap2.lambda_max);
    CHECK(label2.label != analysis::Phase::Chaos);
    CHECK(std::abs(lyap2.lambda_max) < 0.01);
}

TEST_CASE("self-oscillation spectrum is harmonic at the reciprocal point") {
    SystemParams p;
    p.xi_mag = 3.0;
    p.phi = 0.0;
    DriveSpec d;
    d.eps = 5.8e4;

    const auto [traj, lyap] =
        lyapunov::simulate_with_lyapunov(p, d, physics_integration(), physics_lyap());
    const auto label = analysis::classify(traj, lyap.lambda_max);
    CHECK(label.label == analysis::Phase::SelfOscillation);
    CHECK(label.n_clusters == 1);

    // Discrete peaks sit on harmonics of the (slightly pulled) fundamental.
    const analysis::Spectrum spec = analysis::power_spectrum(traj.i_a, traj.sample_dt());
    double max_mag = 0.0;
    size_t fundamental = 0;
    for (size_t k = 1; k < spec.mags.size(); ++k) {
        if (spec.freqs[k] > 1.5) break;
        if (spec.mags[k] > max_mag) {
            max_mag = spec.mags[k];
            fundamental = k;
        }
    }
    const double f0 = spec.freqs[fundamental];
    CHECK(f0 == doctest::Approx(1.0).epsilon(0.05));

    double global_max = 0.0;
    for (double m : spec.mags) global_max = std::max(global_max, m);
    for (size_t k = 0; k < spec.mags.size(); ++k) {
        if (spec.mags[k] > 0.1 * global_max && spec.freqs[k] <= 8.0) {
            const double ratio = spec.freqs[k] / f0;
            CHECK(std::abs(ratio - std::round(ratio)) < 0.05);
        }
    }
    CHECK(analysis::spectral_flatness(spec, 0.0, 8.0) < 0.2);
}

TEST_CASE("exponent spectra mirror under port swap with phi -> -phi") {
    const SystemParams p = nonreciprocal_point();
    DriveSpec d;
    d.eps = 5.8e4;
    d.port = Port::One;

    integrator::IntegrationConfig ic = physics_integration();
    lyapunov::LyapunovConfig lc;
    lc.t_average = 300.0 * two_pi;

    const double l1 = lyapunov::max_lyapunov(p, d, ic, lc).lambda_max;
    const double l2 = lyapunov::max_lyapunov(p.mirrored(), d.swapped_port(), ic, lc).lambda_max;
    INFO("lambda(port1, phi) = ", l1, ", lambda(port2, -phi) = ", l2);
    CHECK(std::abs(l1 - l2) < 0.02);  // contract
    CHECK(l1 == l2);                  // bitwise mirror of the implementation
}

TEST_CASE("weak-drive fixed point matches the closed-form steady state") {
    SystemParams p;
    p.xi_mag = 3.0;
    p.phi = 0.3 * pi;
    DriveSpec d;
    d.eps = 10.0;
    d.port = Port::One;

    // fixed point is stable here: the affine-flow oracle puts all rates in
    // the left half plane and g_om corrections are tiny
    SystemParams affine = p;
    affine.g_om = 0.0;
    CHECK(lyapunov::linear_lambda_oracle(affine, d) < -1e-3);

    integrator::IntegrationConfig c;
    c.t_transient = 1500.0 * two_pi;
    c.t_record = 2.0 * two_pi;
    const integrator::Trajectory traj = integrator::integrate(p, d, c);
    const double i_a_sim = traj.i_a.back();

    const auto omitted = analytic::steady_state(p, Port::One, d.eps, analytic::SelfShift::Omitted);
    const auto exact =
        analytic::steady_state(p, Port::One, d.eps, analytic::SelfShift::SelfConsistent);
    const double err_omitted = std::abs(i_a_sim - omitted.i_a) / i_a_sim;
    const double err_exact = std::abs(i_a_sim - exact.i_a) / i_a_sim;
    INFO("I_A sim = ", i_a_sim, " omitted = ", omitted.i_a, " self-consistent = ", exact.i_a);
    INFO("rel err omitted = ", err_omitted, " self-consistent = ", err_exact);
    CHECK(err_exact < 1e-6);
    CHECK(err_omitted < 1e-4);  // the dropped quadratic shift costs ~1e-6 here
    // at a stable fixed point the recorded maximum is the steady intensity
    CHECK(integrator::max_intensity(traj) == doctest::Approx(omitted.i_a).epsilon(1e-6));

    // the mechanical displacement sits on q = g_om * I_A
    CHECK(traj.q.back() == doctest::Approx(p.g_om * i_a_sim).epsilon(1e-6));
}

TEST_CASE("a dual-chaos region exists on the (eps, delta) plane") {
    // Sampled strip of the pump-amplitude axis where both ports run chaotic;
    // this region hosts the amplitude sensing windows.
    sweep::SweepGrid grid;
    grid.axes.push_back({"eps", 58600.0, 59100.0, 2});
    grid.base_params.xi_mag = 5.0;
    grid.base_params.phi = 0.5 * pi;
    grid.base_params.delta_a = 0.5598;
    grid.base_params.delta_b = 0.5598;

    sensing::ClassifyConfig cfg;
    cfg.integration.t_transient = 1000.0 * two_pi;
    cfg.integration.t_record = 100.0 * two_pi;
    cfg.lyap.t_average = 800.0 * two_pi;

    const auto table = sweep::run_classify_sweep(grid, cfg, 2);
    const auto diagram = sweep::assemble_phase_diagram(table);
    CHECK(diagram.complete);
    int dual = 0;
    for (auto v : diagram.dual_chaos) dual += v;
    CHECK(dual > 0);
}

TEST_CASE("phase diagrams mirror cell-wise between ports") {
    sweep::SweepGrid grid;
    grid.axes.push_back({"phi", -0.65 * pi, 0.65 * pi, 5});
    grid.base_params.xi_mag = 3.0;

    sensing::ClassifyConfig cfg;
    cfg.integration.t_transient = 500.0 * two_pi;
    cfg.integration.t_record = 60.0 * two_pi;
    cfg.lyap.t_average = 500.0 * two_pi;

    const auto table = sweep::run_classify_sweep(grid, cfg, 2);
    REQUIRE(table.n_failed == 0);
    const size_t n = grid.task_count();
    for (size_t t = 0; t < n; ++t) {
        // port 2 at phi equals port 1 at -phi (the grid is symmetric)
        const auto& port2 = table.cells[2 * t + 1];
        const auto& port1_mirror = table.cells[2 * (n - 1 - t)];
        CHECK(port2.label.label == port1_mirror.label.label);
    }
}

TEST_CASE("reciprocity of intensities at trivial gauge phase") {
    SystemParams p;
    p.xi_mag = 3.0;
    DriveSpec d;
    d.eps = 1.0e4;  // ordered at this drive

    integrator::IntegrationConfig c;
    c.t_transient = 100.0 * two_pi;
    c.t_record = 10.0 * two_pi;

    for (double phi : {0.0, pi}) {
        p.phi = phi;
        d.port = Port::One;
        const auto t1 = integrator::integrate(p, d, c);
        d.port = Port::Two;
        const auto t2 = integrator::integrate(p, d, c);
        double worst = 0.0;
        for (size_t i = 0; i < t1.size(); ++i) {
            const double scale = std::max(1.0, std::abs(t1.i_a[i]));
            worst = std::max(worst, std::abs(t1.i_a[i] - t2.i_a[i]) / scale);
        }
        INFO("phi = ", phi, " worst I_A mismatch = ", worst);
        CHECK(worst < 1e-6);
    }
}
