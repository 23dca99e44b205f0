#include "chichaos/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chichaos/errors.hpp"
#include "chichaos/io_util.hpp"
#include "chichaos/parallel.hpp"
#include "chichaos/version.hpp"

namespace chichaos::sweep {

double AxisSpec::value(int i) const {
    if (count == 1) return min;
    return min + (max - min) * (static_cast<double>(i) / (count - 1));
}

void apply_named(const std::string& name, double value, SystemParams& params, DriveSpec& drive) {
    if (name == "phi") params.phi = value;
    else if (name == "xi_mag") params.xi_mag = value;
    else if (name == "eta") params.eta = value;
    else if (name == "j_coupling") params.j_coupling = value;
    else if (name == "kappa") params.kappa = value;
    else if (name == "gamma") params.gamma = value;
    else if (name == "g_om") params.g_om = value;
    else if (name == "gamma_m") params.gamma_m = value;
    else if (name == "delta_a") params.delta_a = value;
    else if (name == "delta_b") params.delta_b = value;
    else if (name == "delta") { params.delta_a = value; params.delta_b = value; }
    else if (name == "eps") drive.eps = value;
    else if (name == "d_eps") drive.d_eps = value;
    else if (name == "d_omega") drive.d_omega = value;
    else if (name == "theta") drive.theta = value;
    else throw PreconditionError("unknown sweep axis: " + name);
}

void SweepGrid::validate() const {
    if (axes.empty() || axes.size() > 2)
        throw PreconditionError("SweepGrid: need 1 or 2 axes");
    for (const AxisSpec& a : axes) {
        if (a.count < 1) throw PreconditionError("SweepGrid: axis count must be >= 1");
        SystemParams p = base_params;
        DriveSpec d = base_drive;
        apply_named(a.name, a.min, p, d);  // validates the name
    }
    base_params.validate();
    base_drive.validate();
}

std::size_t SweepGrid::task_count() const {
    std::size_t n = 1;
    for (const AxisSpec& a : axes) n *= static_cast<std::size_t>(a.count);
    return n;
}

std::pair<double, double> SweepGrid::coords(std::size_t task) const {
    if (axes.size() == 1) return {axes[0].value(static_cast<int>(task)), 0.0};
    const int n2 = axes[1].count;
    const int i1 = static_cast<int>(task / static_cast<std::size_t>(n2));
    const int i2 = static_cast<int>(task % static_cast<std::size_t>(n2));
    return {axes[0].value(i1), axes[1].value(i2)};
}

void SweepGrid::apply(std::size_t task, SystemParams& params, DriveSpec& drive) const {
    params = base_params;
    drive = base_drive;
    const auto [v1, v2] = coords(task);
    apply_named(axes[0].name, v1, params, drive);
    if (axes.size() == 2) apply_named(axes[1].name, v2, params, drive);
}

bool SweepGrid::same_axes(const SweepGrid& other) const {
    if (axes.size() != other.axes.size()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const AxisSpec& a = axes[i];
        const AxisSpec& b = other.axes[i];
        if (a.name != b.name || a.min != b.min || a.max != b.max || a.count != b.count)
            return false;
    }
    return true;
}

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::Classify: return "classify";
        case TaskKind::Lyapunov: return "lyapunov";
        case TaskKind::Window: return "window";
        case TaskKind::Sensing: return "sensing";
    }
    return "unknown";
}

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "classify") return TaskKind::Classify;
    if (name == "lyapunov") return TaskKind::Lyapunov;
    if (name == "window") return TaskKind::Window;
    if (name == "sensing") return TaskKind::Sensing;
    throw PreconditionError("unknown task kind: " + name);
}

// --- resume sidecar ---------------------------------------------------------

ResumeStore::ResumeStore(std::string path, std::string config_hash, std::size_t rows_per_task)
    : path_(std::move(path)), config_hash_(std::move(config_hash)), rows_per_task_(rows_per_task) {}

std::size_t ResumeStore::load() {
    done_.clear();
    header_written_ = false;
    if (!file_exists(path_)) return 0;
    std::ifstream in(path_);
    std::string line;
    if (!std::getline(in, line) || line != "hash " + config_hash_) return 0;  // stale sidecar
    header_written_ = true;
    std::map<std::size_t, std::vector<std::string>> partial;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        const std::size_t task = std::stoull(line.substr(0, tab));
        partial[task].push_back(line.substr(tab + 1));
    }
    for (auto& [task, rows] : partial) {
        if (rows.size() == rows_per_task_) done_.emplace(task, std::move(rows));
    }
    return done_.size();
}

bool ResumeStore::has(std::size_t task) const { return done_.count(task) != 0; }

const std::vector<std::string>& ResumeStore::rows(std::size_t task) const {
    return done_.at(task);
}

void ResumeStore::append(std::size_t task, const std::vector<std::string>& rows) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream out(path_, header_written_ ? std::ios::app : std::ios::trunc);
    if (!header_written_) {
        out << "hash " << config_hash_ << '\n';
        header_written_ = true;
    }
    for (const std::string& r : rows) out << task << '\t' << r << '\n';
}

void ResumeStore::discard_file() {
    std::remove(path_.c_str());
    header_written_ = false;
}

// --- generic cell runner -----------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& row) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(row);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

template <class Cell>
struct RunResult {
    std::vector<Cell> cells;
    std::size_t n_failed = 0;
};

// Executes one task -> fixed number of cells, honoring the resume store.
template <class Cell, class TaskFn>
RunResult<Cell> run_cells(std::size_t n_tasks, std::size_t cells_per_task, int workers,
                          ResumeStore* store, const TaskFn& task_fn) {
    RunResult<Cell> out;
    out.cells.resize(n_tasks * cells_per_task);
    std::vector<std::uint8_t> done(n_tasks, 0);

    if (store) {
        store->load();
        for (std::size_t t = 0; t < n_tasks; ++t) {
            if (!store->has(t)) continue;
            const auto& rows = store->rows(t);
            for (std::size_t j = 0; j < cells_per_task; ++j)
                out.cells[t * cells_per_task + j] = Cell::from_row(rows[j]);
            done[t] = 1;
        }
    }

    parallel_for(n_tasks, workers, [&](std::size_t t) {
        if (done[t]) return;
        std::vector<Cell> cells = task_fn(t);
        if (store) {
            std::vector<std::string> rows;
            rows.reserve(cells.size());
            for (const Cell& c : cells) rows.push_back(c.to_row());
            store->append(t, rows);
        }
        for (std::size_t j = 0; j < cells_per_task; ++j)
            out.cells[t * cells_per_task + j] = cells[j];
    });

    for (const Cell& c : out.cells)
        if (!c.error.empty()) ++out.n_failed;
    return out;
}

std::string phase_or_error(const analysis::PhaseLabel& label, const std::string& error) {
    return error.empty() ? analysis::to_string(label.label) : "error:" + error;
}

}  // namespace

// --- classify ----------------------------------------------------------------

std::string ClassifyCell::to_row() const {
    return format_g17(axis1) + ',' + format_g17(axis2) + ',' + std::to_string(port) + ',' +
           format_g17(lambda_max) + ',' + phase_or_error(label, error) + ',' +
           std::to_string(label.n_clusters);
}

ClassifyCell ClassifyCell::from_row(const std::string& row) {
    const auto cells = split_csv(row);
    if (cells.size() != 6) throw Error("classify row: expected 6 cells: " + row);
    ClassifyCell c;
    c.axis1 = parse_double(cells[0]);
    c.axis2 = parse_double(cells[1]);
    c.port = std::stoi(cells[2]);
    c.lambda_max = parse_double(cells[3]);
    if (cells[4].rfind("error:", 0) == 0) {
        c.error = cells[4].substr(6);
    } else if (cells[4] == "stationary") c.label.label = analysis::Phase::Stationary;
    else if (cells[4] == "self_oscillation") c.label.label = analysis::Phase::SelfOscillation;
    else if (cells[4] == "period_doubling") c.label.label = analysis::Phase::PeriodDoubling;
    else if (cells[4] == "chaos") c.label.label = analysis::Phase::Chaos;
    else throw Error("classify row: unknown label " + cells[4]);
    c.label.lambda_max = c.lambda_max;
    c.label.n_clusters = std::stoi(cells[5]);
    return c;
}

const char* ClassifyTable::csv_header() { return "axis1,axis2,port,lambda_max,label,n_clusters"; }

std::string ClassifyTable::to_csv() const {
    std::string csv = std::string(csv_header()) + '\n';
    for (const ClassifyCell& c : cells) csv += c.to_row() + '\n';
    return csv;
}

ClassifyTable run_classify_sweep(const SweepGrid& grid, const sensing::ClassifyConfig& config,
                                 int workers, ResumeStore* store) {
    grid.validate();
    ClassifyTable table;
    table.grid = grid;

    auto task_fn = [&](std::size_t t) {
        const auto [v1, v2] = grid.coords(t);
        std::vector<ClassifyCell> cells(2);
        for (int port = 0; port < 2; ++port) {
            SystemParams params;
            DriveSpec drive;
            grid.apply(t, params, drive);
            drive.port = port == 0 ? Port::One : Port::Two;
            ClassifyCell& cell = cells[static_cast<std::size_t>(port)];
            cell.axis1 = v1;
            cell.axis2 = v2;
            cell.port = port + 1;
            try {
                auto [traj, lyap] = lyapunov::simulate_with_lyapunov(
                    params, drive, config.integration, config.lyap);
                cell.lambda_max = lyap.lambda_max;
                cell.label = analysis::classify(traj, lyap.lambda_max, config.thresholds);
            } catch (const DivergenceError&) {
                cell.error = "divergence";
                cell.lambda_max = std::nan("");
            } catch (const StiffnessError&) {
                cell.error = "stiffness";
                cell.lambda_max = std::nan("");
            }
        }
        return cells;
    };

    RunResult<ClassifyCell> r = run_cells<ClassifyCell>(grid.task_count(), 2, workers, store, task_fn);
    table.cells = std::move(r.cells);
    table.n_failed = r.n_failed;
    return table;
}

// --- lyapunov ----------------------------------------------------------------

std::string LyapunovCell::to_row() const {
    return format_g17(axis1) + ',' + format_g17(axis2) + ',' + std::to_string(port) + ',' +
           format_g17(lambda_max) + ',' +
           (error.empty() ? (converged ? "1" : "0") : "error:" + error);
}

LyapunovCell LyapunovCell::from_row(const std::string& row) {
    const auto cells = split_csv(row);
    if (cells.size() != 5) throw Error("lyapunov row: expected 5 cells: " + row);
    LyapunovCell c;
    c.axis1 = parse_double(cells[0]);
    c.axis2 = parse_double(cells[1]);
    c.port = std::stoi(cells[2]);
    c.lambda_max = parse_double(cells[3]);
    if (cells[4].rfind("error:", 0) == 0)
        c.error = cells[4].substr(6);
    else
        c.converged = cells[4] == "1";
    return c;
}

const char* LyapunovTable::csv_header() { return "axis1,axis2,port,lambda_max,converged"; }

std::string LyapunovTable::to_csv() const {
    std::string csv = std::string(csv_header()) + '\n';
    for (const LyapunovCell& c : cells) csv += c.to_row() + '\n';
    return csv;
}

LyapunovTable run_lyapunov_sweep(const SweepGrid& grid, const sensing::ClassifyConfig& config,
                                 int workers, ResumeStore* store) {
    grid.validate();
    LyapunovTable table;
    table.grid = grid;

    auto task_fn = [&](std::size_t t) {
        const auto [v1, v2] = grid.coords(t);
        std::vector<LyapunovCell> cells(2);
        for (int port = 0; port < 2; ++port) {
            SystemParams params;
            DriveSpec drive;
            grid.apply(t, params, drive);
            drive.port = port == 0 ? Port::One : Port::Two;
            LyapunovCell& cell = cells[static_cast<std::size_t>(port)];
            cell.axis1 = v1;
            cell.axis2 = v2;
            cell.port = port + 1;
            try {
                const lyapunov::LyapunovEstimate est =
                    lyapunov::max_lyapunov(params, drive, config.integration, config.lyap);
                cell.lambda_max = est.lambda_max;
                cell.converged = est.converged;
            } catch (const DivergenceError&) {
                cell.error = "divergence";
                cell.lambda_max = std::nan("");
            } catch (const StiffnessError&) {
                cell.error = "stiffness";
                cell.lambda_max = std::nan("");
            }
        }
        return cells;
    };

    RunResult<LyapunovCell> r =
        run_cells<LyapunovCell>(grid.task_count(), 2, workers, store, task_fn);
    table.cells = std::move(r.cells);
    table.n_failed = r.n_failed;
    return table;
}

// --- window -----------------------------------------------------------------

std::string WindowCell::to_row() const {
    return format_g17(axis1) + ',' + format_g17(axis2) + ',' + format_g17(window.crit_port1) +
           ',' + format_g17(window.crit_port2) + ',' + format_g17(window.half_width_d) + ',' +
           format_g17(window.center_p) + ',' + (error.empty() ? "ok" : "error:" + error);
}

WindowCell WindowCell::from_row(const std::string& row) {
    const auto cells = split_csv(row);
    if (cells.size() != 7) throw Error("window row: expected 7 cells: " + row);
    WindowCell c;
    c.axis1 = parse_double(cells[0]);
    c.axis2 = parse_double(cells[1]);
    c.window.crit_port1 = parse_double(cells[2]);
    c.window.crit_port2 = parse_double(cells[3]);
    c.window.half_width_d = parse_double(cells[4]);
    c.window.center_p = parse_double(cells[5]);
    if (cells[6].rfind("error:", 0) == 0) c.error = cells[6].substr(6);
    return c;
}

const char* WindowTable::csv_header() {
    return "axis1,axis2,crit_port1,crit_port2,half_width_d,center_p,status";
}

std::string WindowTable::to_csv() const {
    std::string csv = std::string(csv_header()) + '\n';
    for (const WindowCell& c : cells) csv += c.to_row() + '\n';
    return csv;
}

WindowTable run_window_sweep(const SweepGrid& grid, const WindowSearch& search,
                             const sensing::ClassifyConfig& config, int workers,
                             ResumeStore* store) {
    grid.validate();
    WindowTable table;
    table.grid = grid;

    auto task_fn = [&](std::size_t t) {
        const auto [v1, v2] = grid.coords(t);
        std::vector<WindowCell> cells(1);
        WindowCell& cell = cells[0];
        cell.axis1 = v1;
        cell.axis2 = v2;
        SystemParams params;
        DriveSpec drive;
        grid.apply(t, params, drive);
        try {
            cell.window = sensing::build_window(params, drive, search.control, search.lo,
                                                search.hi, search.resolution, config,
                                                search.working_point);
        } catch (const NoTransitionError&) {
            cell.error = "no-transition";
        } catch (const DivergenceError&) {
            cell.error = "divergence";
        } catch (const PreconditionError&) {
            cell.error = "invalid-working-point";
        }
        return cells;
    };

    RunResult<WindowCell> r = run_cells<WindowCell>(grid.task_count(), 1, workers, store, task_fn);
    table.cells = std::move(r.cells);
    table.n_failed = r.n_failed;
    return table;
}

// --- bifurcation ---------------------------------------------------------------

const char* BifurcationTable::csv_header() { return "control,extremum"; }

std::string BifurcationTable::to_csv() const {
    std::string csv = std::string(csv_header()) + '\n';
    for (const analysis::BifurcationSlice& s : slices) {
        for (double e : s.extrema)
            csv += format_g17(s.control_value) + ',' + format_g17(e) + '\n';
    }
    return csv;
}

BifurcationTable run_bifurcation_sweep(const SweepGrid& grid,
                                       const integrator::IntegrationConfig& config, int workers) {
    grid.validate();
    if (grid.axes.size() != 1)
        throw PreconditionError("run_bifurcation_sweep: 1-D grids only");

    BifurcationTable table;
    table.grid = grid;
    const std::size_t n = grid.task_count();
    table.slices.resize(n);
    table.errors.assign(n, "");

    parallel_for(n, workers, [&](std::size_t t) {
        SystemParams params;
        DriveSpec drive;
        grid.apply(t, params, drive);
        analysis::BifurcationSlice slice;
        slice.control_value = grid.coords(t).first;
        try {
            const integrator::Trajectory traj = integrator::integrate(params, drive, config);
            slice.extrema = analysis::extract_extrema(traj);
        } catch (const DivergenceError&) {
            table.errors[t] = "divergence";
        }
        table.slices[t] = std::move(slice);
    });

    for (const std::string& e : table.errors)
        if (!e.empty()) ++table.n_failed;
    return table;
}

// --- metrics ---------------------------------------------------------------------

const char* MetricsTable::csv_header() { return "xi,S,C"; }

std::string MetricsTable::to_csv() const {
    std::string csv = std::string(csv_header()) + '\n';
    for (std::size_t i = 0; i < control.size(); ++i)
        csv += format_g17(control[i]) + ',' + format_g17(s[i]) + ',' + format_g17(c[i]) + '\n';
    return csv;
}

MetricsTable metrics_from_lyapunov(const LyapunovTable& table) {
    const SweepGrid& grid = table.grid;
    if (grid.axes.size() != 2)
        throw PreconditionError("metrics_from_lyapunov: need a 2-axis sweep (array x curve)");
    const int n1 = grid.axes[0].count;  // lambda-array axis
    const int n2 = grid.axes[1].count;  // metric-curve axis

    MetricsTable out;
    for (int j = 0; j < n2; ++j) {
        std::vector<double> l1, l2;
        l1.reserve(n1);
        l2.reserve(n1);
        for (int i = 0; i < n1; ++i) {
            const std::size_t t = static_cast<std::size_t>(i) * n2 + j;
            const LyapunovCell& c1 = table.cells[2 * t];
            const LyapunovCell& c2 = table.cells[2 * t + 1];
            if (!c1.error.empty() || !c2.error.empty())
                throw Error("metrics_from_lyapunov: failed cells in column");
            l1.push_back(c1.lambda_max);
            l2.push_back(c2.lambda_max);
        }
        out.control.push_back(grid.axes[1].value(j));
        out.s.push_back(analysis::metric_s(l1, l2));
        out.c.push_back(analysis::metric_c(l1, l2));
    }
    return out;
}

// --- phase diagram ----------------------------------------------------------------

PhaseDiagram assemble_phase_diagram(const ClassifyTable& table) {
    const std::size_t n = table.grid.task_count();
    if (table.cells.size() != 2 * n)
        throw PreconditionError("assemble_phase_diagram: cell count does not match grid");

    PhaseDiagram d;
    d.grid = table.grid;
    d.port1.resize(n);
    d.port2.resize(n);
    d.lambda1.resize(n);
    d.lambda2.resize(n);
    d.dual_chaos.resize(n);
    d.errors.assign(n, "");
    for (std::size_t t = 0; t < n; ++t) {
        const ClassifyCell& c1 = table.cells[2 * t];
        const ClassifyCell& c2 = table.cells[2 * t + 1];
        d.port1[t] = c1.label;
        d.port2[t] = c2.label;
        d.lambda1[t] = c1.lambda_max;
        d.lambda2[t] = c2.lambda_max;
        if (!c1.error.empty() || !c2.error.empty()) {
            d.errors[t] = !c1.error.empty() ? c1.error : c2.error;
            d.complete = false;
            d.dual_chaos[t] = 0;
            continue;
        }
        d.dual_chaos[t] = c1.label.label == analysis::Phase::Chaos &&
                          c2.label.label == analysis::Phase::Chaos;
    }
    return d;
}

PhaseDiagram assemble_phase_diagram(const ClassifyTable& port1_cells,
                                    const ClassifyTable& port2_cells) {
    if (!port1_cells.grid.same_axes(port2_cells.grid))
        throw PreconditionError("assemble_phase_diagram: grid mismatch between ports");
    ClassifyTable merged;
    merged.grid = port1_cells.grid;
    const std::size_t n = merged.grid.task_count();
    if (port1_cells.cells.size() != 2 * n || port2_cells.cells.size() != 2 * n)
        throw PreconditionError("assemble_phase_diagram: cell count does not match grid");
    merged.cells.resize(2 * n);
    for (std::size_t t = 0; t < n; ++t) {
        merged.cells[2 * t] = port1_cells.cells[2 * t];          // port 1 of the first sweep
        merged.cells[2 * t + 1] = port2_cells.cells[2 * t + 1];  // port 2 of the second
    }
    return assemble_phase_diagram(merged);
}

// --- persistence ---------------------------------------------------------------------

std::string manifest_path_for(const std::string& out_path) { return out_path + ".manifest.json"; }
std::string partial_path_for(const std::string& out_path) { return out_path + ".partial"; }

std::string manifest_json(TaskKind kind, const SweepGrid& grid, const std::string& config_hash,
                          std::size_t n_failed, bool complete) {
    nlohmann::json axes = nlohmann::json::array();
    for (const AxisSpec& a : grid.axes) {
        axes.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}});
    }
    const nlohmann::json j = {
        {"schema_version", 1},
        {"software_version", version_string},
        {"task", to_string(kind)},
        {"config_hash", config_hash},
        {"axes", axes},
        {"n_tasks", grid.task_count()},
        {"n_failed", n_failed},
        {"complete", complete},
    };
    return j.dump(2) + "\n";
}

bool outputs_current(const std::string& out_path, const std::string& config_hash) {
    const std::string mpath = manifest_path_for(out_path);
    if (!file_exists(out_path) || !file_exists(mpath)) return false;
    try {
        const nlohmann::json j = nlohmann::json::parse(read_file(mpath));
        return j.at("config_hash").get<std::string>() == config_hash &&
               j.at("complete").get<bool>();
    } catch (const std::exception&) {
        return false;
    }
}

void persist_sweep(const std::string& out_path, const std::string& csv,
                   const std::string& manifest) {
    write_file(out_path, csv);
    write_file(manifest_path_for(out_path), manifest);
    std::remove(partial_path_for(out_path).c_str());
}

}  // namespace chichaos::sweep
