#include <doctest.h>

#include <cmath>
#include <random>

#include "chichaos/analysis.hpp"
#include "chichaos/errors.hpp"

using namespace chichaos;
using analysis::Phase;

namespace {

integrator::Trajectory series_trajectory(const std::vector<double>& q, double dt) {
    integrator::Trajectory traj;
    for (size_t i = 0; i < q.size(); ++i) {
        StateVector s;
        s.q = q[i];
        traj.push(static_cast<double>(i) * dt, s);
    }
    return traj;
}

std::vector<double> sampled(double (*f)(double), double dt, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * dt);
    return v;
}

double two_tone(double t) { return std::sin(t) + 0.5 * std::sin(t / 2.0); }

// Independent extrema oracle: near-continuous sampling of the function itself.
std::vector<double> dense_maxima(double (*f)(double), double t_max) {
    const double dt = 1e-4;
    std::vector<double> maxima;
    double prev = f(0.0);
    double cur = f(dt);
    for (double t = 2.0 * dt; t <= t_max; t += dt) {
        const double next = f(t);
        if (cur > prev && cur > next) maxima.push_back(cur);
        prev = cur;
        cur = next;
    }
    std::sort(maxima.begin(), maxima.end());
    return maxima;
}

}  // namespace

TEST_CASE("extrema: pure tone gives one cluster at the crest") {
    const double dt = 0.01;
    const auto q = sampled([](double t) { return std::sin(t); }, dt, 12000);
    const auto extrema = analysis::extract_extrema(series_trajectory(q, dt));
    CHECK(analysis::count_clusters(extrema, 1e-3) == 1);
    for (double e : extrema) CHECK(e == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("extrema: two-tone signal shows the period-2 signature") {
    const double dt = 0.01;
    const auto q = sampled(two_tone, dt, 20000);
    const auto extrema = analysis::extract_extrema(series_trajectory(q, dt));
    const auto oracle = dense_maxima(two_tone, 8.0 * two_pi);
    const auto oracle_clusters = analysis::cluster_values(oracle, 1e-3 * 1.36);
    REQUIRE(oracle_clusters.size() == 2);
    CHECK(analysis::count_clusters(extrema, 1e-3) == 2);

    const auto got = analysis::cluster_values(extrema, 1e-3 * 1.36);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == doctest::Approx(oracle_clusters[0]).epsilon(1e-3));
    CHECK(got[1] == doctest::Approx(oracle_clusters[1]).epsilon(1e-3));
}

TEST_CASE("extrema preconditions") {
    integrator::Trajectory tiny;
    StateVector s;
    tiny.push(0.0, s);
    CHECK_THROWS_AS(analysis::extract_extrema(tiny), PreconditionError);
}

TEST_CASE("power spectrum: pure cosine peaks at frequency 1") {
    const double dt = two_pi / 64.0;
    const auto q = sampled([](double t) { return std::cos(t); }, dt, 8192);
    const analysis::Spectrum spec = analysis::power_spectrum(q, dt);

    size_t peak = 0;
    for (size_t k = 1; k < spec.mags.size(); ++k)
        if (spec.mags[k] > spec.mags[peak]) peak = k;
    CHECK(spec.freqs[peak] == doctest::Approx(1.0).epsilon(1e-9));

    double second = 0.0;
    for (size_t k = 1; k < spec.mags.size(); ++k)
        if (k != peak) second = std::max(second, spec.mags[k]);
    CHECK(spec.mags[peak] > 100.0 * second);
    CHECK(analysis::spectral_flatness(spec, 0.0, 8.0) < 0.05);
}

TEST_CASE("power spectrum: white noise is spectrally flat") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> q(8192);
    for (double& v : q) v = u(rng);
    const analysis::Spectrum spec = analysis::power_spectrum(q, two_pi / 64.0);
    CHECK(analysis::spectral_flatness(spec, 0.0, 8.0) > 0.2);
}

TEST_CASE("power spectrum preconditions") {
    std::vector<double> too_short(100, 0.0);
    CHECK_THROWS_AS(analysis::power_spectrum(too_short, 0.1), PreconditionError);

    std::vector<double> taus(300), series(300, 0.0);
    for (size_t i = 0; i < taus.size(); ++i) taus[i] = 0.1 * i;
    taus[200] += 0.05;  // break uniformity
    CHECK_THROWS_AS(analysis::power_spectrum(taus, series), PreconditionError);
}

TEST_CASE("classify: zero record is stationary regardless of lambda") {
    const std::vector<double> q(2048, 0.0);
    const auto traj = series_trajectory(q, 0.1);
    CHECK(analysis::classify(traj, -0.5).label == Phase::Stationary);
    CHECK(analysis::classify(traj, 5.0).label == Phase::Stationary);
}

TEST_CASE("classify: synthetic fixtures") {
    const double dt = two_pi / 64.0;
    const auto tone = sampled([](double t) { return std::sin(t); }, dt, 4096);
    const auto two = sampled(two_tone, dt, 4096);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> noise(4096);
    for (double& v : noise) v = u(rng);

    const auto lc = analysis::classify(series_trajectory(tone, dt), -0.05);
    CHECK(lc.label == Phase::SelfOscillation);
    CHECK(lc.n_clusters == 1);

    const auto pd = analysis::classify(series_trajectory(two, dt), -0.02);
    CHECK(pd.label == Phase::PeriodDoubling);
    CHECK(pd.n_clusters == 2);

    const auto chaos = analysis::classify(series_trajectory(noise, dt), 0.3);
    CHECK(chaos.label == Phase::Chaos);
    CHECK(!chaos.discrete_spectrum_flag);

    // contradictory evidence: positive exponent, discrete spectrum
    const auto flagged = analysis::classify(series_trajectory(tone, dt), 0.3);
    CHECK(flagged.label == Phase::Chaos);
    CHECK(flagged.discrete_spectrum_flag);
}

TEST_CASE("metrics: identity and sign extremes") {
    const std::vector<double> l{0.5, -0.3, 0.2};
    CHECK(analysis::metric_s(l, l) == 1.0);

    const std::vector<double> a{0.5, -0.3};
    const std::vector<double> b{-0.5, 0.3};
    CHECK(analysis::metric_s(a, b) == 0.0);

    const std::vector<double> x{1.0, 2.0, -0.7};
    std::vector<double> rx(x.rbegin(), x.rend());
    CHECK(analysis::metric_c(x, rx) == 1.0);

    const std::vector<double> c1{0.5, -0.3};
    const std::vector<double> c2{0.3, -0.5};
    CHECK(analysis::metric_c(c1, c2) == 0.0);
}

TEST_CASE("metrics: hand-computed mixed case is exactly one half") {
    const std::vector<double> l1{1.0, -1.0};
    const std::vector<double> l2{1.0, 1.0};
    CHECK(analysis::metric_s(l1, l2) == 0.5);
    CHECK(analysis::metric_c(l1, l2) == 0.5);
}

TEST_CASE("metrics: C equals S with the second array reversed") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(17), b(17);
        for (double& v : a) v = u(rng);
        for (double& v : b) v = u(rng);
        std::vector<double> rb(b.rbegin(), b.rend());
        CHECK(analysis::metric_c(a, b) == analysis::metric_s(a, rb));

        const double s = analysis::metric_s(a, b);
        const double c = analysis::metric_c(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);

        // scale invariance
        std::vector<double> a2 = a, b2 = b;
        for (double& v : a2) v *= 3.5;
        for (double& v : b2) v *= 3.5;
        CHECK(analysis::metric_s(a2, b2) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("metrics: 0/0 terms count as fully similar") {
    const std::vector<double> a{0.0, 1.0};
    const std::vector<double> b{0.0, 1.0};
    CHECK(analysis::metric_s(a, b) == 1.0);
    const std::vector<double> z{0.0};
    const std::vector<double> nz{1.0};
    CHECK(analysis::metric_s(z, nz) == 0.0);  // |0-1|/(0+1) = 1
}

TEST_CASE("metrics: errors") {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    CHECK_THROWS_AS(analysis::metric_s(a, b), PreconditionError);
    CHECK_THROWS_AS(analysis::metric_s({}, {}), PreconditionError);
    analysis::LyapunovSpectrumPair pair;
    pair.lambda_1 = {1.0};
    pair.lambda_2 = {1.0, 2.0};
    CHECK_THROWS_AS(analysis::metric_s(pair), PreconditionError);
}
