#include <doctest.h>

#include <filesystem>

#include "chichaos/errors.hpp"
#include "chichaos/io_util.hpp"
#include "chichaos/sweep.hpp"

using namespace chichaos;
using sweep::SweepGrid;

namespace {

sensing::ClassifyConfig tiny_classify() {
    sensing::ClassifyConfig c;
    c.integration.t_transient = 10.0 * two_pi;
    c.integration.t_record = 4.0 * two_pi;
    c.lyap.t_align = 2.0 * two_pi;
    c.lyap.t_average = 6.0 * two_pi;
    return c;
}

SweepGrid tiny_grid(int count) {
    SweepGrid g;
    g.axes.push_back({"phi", -0.5, 0.5, count});
    g.base_drive.eps = 100.0;
    return g;
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("apply_named covers the sweepable parameters") {
    SystemParams p;
    DriveSpec d;
    sweep::apply_named("delta", 0.25, p, d);
    CHECK(p.delta_a == 0.25);
    CHECK(p.delta_b == 0.25);
    sweep::apply_named("eps", 123.0, p, d);
    CHECK(d.eps == 123.0);
    sweep::apply_named("xi_mag", 3.3, p, d);
    CHECK(p.xi_mag == 3.3);
    CHECK_THROWS_AS(sweep::apply_named("bogus", 1.0, p, d), PreconditionError);
}

TEST_CASE("grid enumeration is row major") {
    SweepGrid g;
    g.axes.push_back({"phi", 0.0, 1.0, 3});
    g.axes.push_back({"xi_mag", 2.0, 3.0, 2});
    g.validate();
    CHECK(g.task_count() == 6);
    CHECK(g.coords(0) == std::pair<double, double>{0.0, 2.0});
    CHECK(g.coords(1) == std::pair<double, double>{0.0, 3.0});
    CHECK(g.coords(2) == std::pair<double, double>{0.5, 2.0});
    CHECK(g.coords(5) == std::pair<double, double>{1.0, 3.0});

    SystemParams p;
    DriveSpec d;
    g.apply(3, p, d);
    CHECK(p.phi == 0.5);
    CHECK(p.xi_mag == 3.0);
}

TEST_CASE("grid validation") {
    SweepGrid empty;
    CHECK_THROWS_AS(empty.validate(), PreconditionError);
    SweepGrid bad = tiny_grid(3);
    bad.axes[0].name = "nope";
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    SweepGrid zero = tiny_grid(0);
    CHECK_THROWS_AS(zero.validate(), PreconditionError);
}

TEST_CASE("1x1 classify sweep equals the direct module call") {
    SweepGrid g = tiny_grid(1);
    const auto cfg = tiny_classify();
    const sweep::ClassifyTable table = sweep::run_classify_sweep(g, cfg, 1);
    REQUIRE(table.cells.size() == 2);

    SystemParams p = g.base_params;
    DriveSpec d = g.base_drive;
    p.phi = -0.5;
    d.port = Port::One;
    const auto direct = sensing::classify_point(p, d, cfg);
    CHECK(table.cells[0].lambda_max == direct.label.lambda_max);
    CHECK(table.cells[0].label.label == direct.label.label);
    CHECK(table.cells[0].port == 1);
    CHECK(table.cells[1].port == 2);
}

TEST_CASE("classify sweep output is worker-count independent") {
    SweepGrid g = tiny_grid(3);
    const auto cfg = tiny_classify();
    const auto t1 = sweep::run_classify_sweep(g, cfg, 1);
    const auto t2 = sweep::run_classify_sweep(g, cfg, 2);
    CHECK(t1.to_csv() == t2.to_csv());
    CHECK(t1.n_failed == 0);
}

TEST_CASE("resume store reuses completed rows verbatim") {
    SweepGrid g = tiny_grid(3);
    const auto cfg = tiny_classify();
    const std::string path = tmp_path("chichaos_resume_test.partial");
    std::remove(path.c_str());

    {
        // Poison task 1 with sentinel rows: a resumed sweep must keep them,
        // proving completed tasks are never recomputed.
        sweep::ResumeStore store(path, "h1", 2);
        store.append(1, {"0,0,1,999,chaos,7", "0,0,2,999,chaos,7"});
    }
    sweep::ResumeStore store(path, "h1", 2);
    const auto table = sweep::run_classify_sweep(g, cfg, 2, &store);
    CHECK(table.cells[2].lambda_max == 999.0);
    CHECK(table.cells[3].lambda_max == 999.0);
    CHECK(table.cells[0].lambda_max != 999.0);

    // A different config hash invalidates the sidecar.
    sweep::ResumeStore stale(path, "h2", 2);
    CHECK(stale.load() == 0);
    const auto fresh = sweep::run_classify_sweep(g, cfg, 2, &stale);
    CHECK(fresh.cells[2].lambda_max != 999.0);
    std::remove(path.c_str());
}

TEST_CASE("interrupted sweep resumes without recomputing finished tasks") {
    SweepGrid g = tiny_grid(4);
    const auto cfg = tiny_classify();
    const std::string path = tmp_path("chichaos_resume_test2.partial");
    std::remove(path.c_str());

    sweep::ResumeStore first(path, "h", 2);
    const auto full = sweep::run_classify_sweep(g, cfg, 2, &first);

    // Second run over the same sidecar: everything is already complete.
    sweep::ResumeStore second(path, "h", 2);
    CHECK(second.load() == 4);
    const auto resumed = sweep::run_classify_sweep(g, cfg, 2, &second);
    CHECK(resumed.to_csv() == full.to_csv());
    std::remove(path.c_str());
}

TEST_CASE("classify cell rows round trip") {
    sweep::ClassifyCell c;
    c.axis1 = 0.123456789012345;
    c.axis2 = -3.5;
    c.port = 2;
    c.lambda_max = 0.0625;
    c.label.label = analysis::Phase::PeriodDoubling;
    c.label.n_clusters = 4;
    const auto back = sweep::ClassifyCell::from_row(c.to_row());
    CHECK(back.axis1 == c.axis1);
    CHECK(back.port == 2);
    CHECK(back.lambda_max == c.lambda_max);
    CHECK(back.label.label == c.label.label);
    CHECK(back.label.n_clusters == 4);

    sweep::ClassifyCell err;
    err.error = "divergence";
    err.lambda_max = std::nan("");
    const auto back2 = sweep::ClassifyCell::from_row(err.to_row());
    CHECK(back2.error == "divergence");
}

TEST_CASE("bifurcation sweep: quiet drive leaves empty slices") {
    SweepGrid g = tiny_grid(3);
    g.base_drive.eps = 0.0;
    integrator::IntegrationConfig ic;
    ic.t_transient = two_pi;
    ic.t_record = 2.0 * two_pi;
    const auto table = sweep::run_bifurcation_sweep(g, ic, 2);
    CHECK(table.n_failed == 0);
    REQUIRE(table.slices.size() == 3);
    for (const auto& s : table.slices) CHECK(s.extrema.empty());
    CHECK(table.to_csv() == std::string("control,extremum\n"));
}

TEST_CASE("metrics from a two-axis exponent sweep") {
    sweep::LyapunovTable table;
    table.grid.axes.push_back({"phi", 0.0, 1.0, 3});   // array axis
    table.grid.axes.push_back({"xi_mag", 5.0, 6.0, 2}); // curve axis
    // cells: task-major (phi-major), 2 ports per task
    const std::vector<double> l1_col0{0.5, -0.3, 0.2};
    const std::vector<double> l2_col0{0.2, -0.3, 0.5};
    const std::vector<double> l1_col1{1.0, -1.0, 0.0};
    const std::vector<double> l2_col1{1.0, 1.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            sweep::LyapunovCell c1, c2;
            c1.port = 1;
            c2.port = 2;
            c1.lambda_max = j == 0 ? l1_col0[i] : l1_col1[i];
            c2.lambda_max = j == 0 ? l2_col0[i] : l2_col1[i];
            table.cells.push_back(c1);
            table.cells.push_back(c2);
        }
    }
    const auto metrics = sweep::metrics_from_lyapunov(table);
    REQUIRE(metrics.control.size() == 2);
    CHECK(metrics.control[0] == 5.0);
    CHECK(metrics.s[0] == analysis::metric_s(l1_col0, l2_col0));
    CHECK(metrics.c[0] == analysis::metric_c(l1_col0, l2_col0));
    CHECK(metrics.c[0] == 1.0);  // reversed copy
    CHECK(metrics.s[1] == analysis::metric_s(l1_col1, l2_col1));
}

TEST_CASE("phase diagram assembly and the dual-chaos mask") {
    sweep::ClassifyTable t;
    t.grid.axes.push_back({"eps", 1.0, 2.0, 2});
    auto cell = [](int port, analysis::Phase ph) {
        sweep::ClassifyCell c;
        c.port = port;
        c.label.label = ph;
        return c;
    };
    t.cells = {cell(1, analysis::Phase::Chaos), cell(2, analysis::Phase::Chaos),
               cell(1, analysis::Phase::Chaos), cell(2, analysis::Phase::SelfOscillation)};
    const auto d = sweep::assemble_phase_diagram(t);
    CHECK(d.complete);
    CHECK(d.dual_chaos[0] == 1);
    CHECK(d.dual_chaos[1] == 0);

    // all-ordered table: empty dual-chaos region
    sweep::ClassifyTable ordered = t;
    for (auto& c : ordered.cells) c.label.label = analysis::Phase::SelfOscillation;
    const auto d2 = sweep::assemble_phase_diagram(ordered);
    for (auto v : d2.dual_chaos) CHECK(v == 0);

    // grid mismatch between per-port sweeps
    sweep::ClassifyTable other = t;
    other.grid.axes[0].count = 3;
    CHECK_THROWS_AS(sweep::assemble_phase_diagram(t, other), PreconditionError);
}

TEST_CASE("manifest and outputs_current") {
    const std::string out = tmp_path("chichaos_sweep_out.csv");
    SweepGrid g = tiny_grid(2);
    const std::string manifest = sweep::manifest_json(sweep::TaskKind::Classify, g, "abc", 0, true);
    sweep::persist_sweep(out, "axis1\n", manifest);
    CHECK(sweep::outputs_current(out, "abc"));
    CHECK(!sweep::outputs_current(out, "other-hash"));
    std::remove(out.c_str());
    std::remove(sweep::manifest_path_for(out).c_str());
}
