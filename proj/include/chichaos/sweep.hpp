#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chichaos/analysis.hpp"
#include "chichaos/sensing.hpp"

namespace chichaos::sweep {

/// One named parameter axis, uniformly spaced over [min, max].
struct AxisSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    double value(int i) const;
};

/// Assigns a named sweep value onto the operating point. Supported names:
/// phi, xi_mag, eta, j_coupling, kappa, gamma, g_om, gamma_m, delta_a,
/// delta_b, delta (both detunings), eps, d_eps, d_omega, theta.
void apply_named(const std::string& name, double value, SystemParams& params, DriveSpec& drive);

/// 1- or 2-axis parameter grid over a base operating point. Tasks are
/// enumerated in row major order (axis1 slow, axis2 fast); the ordering is
/// part of the output contract.
struct SweepGrid {
    std::vector<AxisSpec> axes;
    SystemParams base_params;
    DriveSpec base_drive;

    void validate() const;
    std::size_t task_count() const;
    std::pair<double, double> coords(std::size_t task) const;  ///< (axis1, axis2-or-0)
    void apply(std::size_t task, SystemParams& params, DriveSpec& drive) const;
    bool same_axes(const SweepGrid& other) const;
};

enum class TaskKind { Classify, Lyapunov, Window, Sensing };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

/// Append-only sidecar of completed task rows, keyed by a configuration hash.
/// A re-invoked sweep with the same hash reuses completed tasks verbatim and
/// recomputes nothing else; a hash change invalidates the sidecar.
class ResumeStore {
public:
    ResumeStore(std::string path, std::string config_hash, std::size_t rows_per_task);

    /// Loads any matching entries from disk; returns number of complete tasks.
    std::size_t load();
    bool has(std::size_t task) const;
    const std::vector<std::string>& rows(std::size_t task) const;
    void append(std::size_t task, const std::vector<std::string>& rows);
    void discard_file();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string config_hash_;
    std::size_t rows_per_task_;
    std::map<std::size_t, std::vector<std::string>> done_;
    std::mutex mutex_;
    bool header_written_ = false;
};

struct ClassifyCell {
    double axis1 = 0.0;
    double axis2 = 0.0;
    int port = 1;
    double lambda_max = 0.0;
    analysis::PhaseLabel label;
    std::string error;  ///< empty when the point ran clean

    std::string to_row() const;
    static ClassifyCell from_row(const std::string& row);
};

struct ClassifyTable {
    SweepGrid grid;
    std::vector<ClassifyCell> cells;  ///< 2 per task: port 1 then port 2
    std::size_t n_failed = 0;

    static const char* csv_header();  ///< axis1,axis2,port,lambda_max,label,n_clusters
    std::string to_csv() const;
};

/// Integrate + exponent + label for both ports at every grid point.
ClassifyTable run_classify_sweep(const SweepGrid& grid, const sensing::ClassifyConfig& config,
                                 int workers, ResumeStore* store = nullptr);

struct LyapunovCell {
    double axis1 = 0.0;
    double axis2 = 0.0;
    int port = 1;
    double lambda_max = 0.0;
    bool converged = false;
    std::string error;

    std::string to_row() const;
    static LyapunovCell from_row(const std::string& row);
};

struct LyapunovTable {
    SweepGrid grid;
    std::vector<LyapunovCell> cells;  ///< 2 per task
    std::size_t n_failed = 0;

    static const char* csv_header();
    std::string to_csv() const;
};

/// Maximal-exponent spectra for both ports (no trajectory recording).
LyapunovTable run_lyapunov_sweep(const SweepGrid& grid, const sensing::ClassifyConfig& config,
                                 int workers, ResumeStore* store = nullptr);

struct WindowSearch {
    sensing::WindowControl control = sensing::WindowControl::Eps;
    double lo = 0.0;
    double hi = 0.0;
    double resolution = 1e-3;
    std::optional<double> working_point;
};

struct WindowCell {
    double axis1 = 0.0;
    double axis2 = 0.0;
    sensing::SensingWindow window;
    std::string error;

    std::string to_row() const;
    static WindowCell from_row(const std::string& row);
};

struct WindowTable {
    SweepGrid grid;
    std::vector<WindowCell> cells;  ///< 1 per task
    std::size_t n_failed = 0;

    static const char* csv_header();
    std::string to_csv() const;
};

/// Window geometry (D, P surfaces) over the grid.
WindowTable run_window_sweep(const SweepGrid& grid, const WindowSearch& search,
                             const sensing::ClassifyConfig& config, int workers,
                             ResumeStore* store = nullptr);

/// Bifurcation-diagram data: local maxima of q per control value, for the
/// port of the grid's base drive. 1-D grids only.
struct BifurcationTable {
    SweepGrid grid;
    std::vector<analysis::BifurcationSlice> slices;
    std::size_t n_failed = 0;
    std::vector<std::string> errors;

    static const char* csv_header();  ///< control,extremum
    std::string to_csv() const;
};

BifurcationTable run_bifurcation_sweep(const SweepGrid& grid,
                                       const integrator::IntegrationConfig& config, int workers);

/// Structural metrics per axis-2 value from a 2-axis Lyapunov sweep: the
/// axis-1 sequence of exponents of the two ports feeds S and C.
struct MetricsTable {
    std::vector<double> control;  ///< axis-2 value per row
    std::vector<double> s;
    std::vector<double> c;

    static const char* csv_header();  ///< xi,S,C
    std::string to_csv() const;
};

MetricsTable metrics_from_lyapunov(const LyapunovTable& table);

/// Merged two-port diagram with the dual-chaos mask (chaotic under both
/// ports), the region sensing windows are built in.
struct PhaseDiagram {
    SweepGrid grid;
    std::vector<analysis::PhaseLabel> port1;
    std::vector<analysis::PhaseLabel> port2;
    std::vector<double> lambda1;
    std::vector<double> lambda2;
    std::vector<std::uint8_t> dual_chaos;
    std::vector<std::string> errors;  ///< per task, empty = clean
    bool complete = true;
};

PhaseDiagram assemble_phase_diagram(const ClassifyTable& table);
/// Two-sweep variant; the grids' axes must match (PreconditionError otherwise).
PhaseDiagram assemble_phase_diagram(const ClassifyTable& port1_cells,
                                    const ClassifyTable& port2_cells);

/// Sidecar JSON describing a persisted sweep (grid, config hash, version).
std::string manifest_json(TaskKind kind, const SweepGrid& grid, const std::string& config_hash,
                          std::size_t n_failed, bool complete);

/// True when out_path + manifest already hold a complete run for config_hash.
bool outputs_current(const std::string& out_path, const std::string& config_hash);

/// Writes the CSV and its manifest; removes a consumed partial sidecar.
void persist_sweep(const std::string& out_path, const std::string& csv,
                   const std::string& manifest);

std::string manifest_path_for(const std::string& out_path);
std::string partial_path_for(const std::string& out_path);

}  // namespace chichaos::sweep
