#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chichaos/analytic.hpp"
#include "chichaos/sensing.hpp"
#include "chichaos/sweep.hpp"

namespace chichaos::config {

struct GridAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
};

struct GridSection {
    GridAxis axis1;
    std::optional<GridAxis> axis2;
};

struct WindowSection {
    sensing::WindowControl control = sensing::WindowControl::Eps;
    std::optional<double> lo;
    std::optional<double> hi;
    double resolution = 1e-3;
    std::optional<double> working_point;
    /// When both critical points are given the search is skipped and the
    /// window is assembled directly.
    std::optional<double> crit_port1;
    std::optional<double> crit_port2;
};

struct SenseSection {
    int theta_count = 16;
    sensing::SecondAxis second_axis = sensing::SecondAxis::DEps;
    double second_min = 0.0;
    double second_max = 0.0;
    int second_count = 1;
    double fixed_d_eps = 0.0;
    double fixed_d_omega = 0.0;
    double amp_change_tol = 0.2;
};

struct TipSection {
    analytic::TipConfig tip;
    analytic::RegionRanges ranges;
    int r_count = 61;
    int beta_count = 61;
    double separation_min = 10.0;
    double omega_m = analytic::default_omega_m;
};

struct MetricsSection {
    std::vector<double> lambda_1;
    std::vector<double> lambda_2;
};

struct SimulateSection {
    bool raw_state = false;
};

/// Fully resolved run configuration; every field carries the reference
/// defaults, so an empty JSON document is a valid config.
struct RunConfig {
    SystemParams params;
    DriveSpec drive;
    integrator::IntegrationConfig integration;
    lyapunov::LyapunovConfig lyap;
    analysis::Thresholds thresholds;
    std::optional<GridSection> grid;
    std::optional<WindowSection> window;
    std::optional<SenseSection> sense;
    std::optional<TipSection> tipmap;
    std::optional<MetricsSection> metrics;
    SimulateSection simulate;

    sensing::ClassifyConfig classify_config() const;
    /// Builds the sweep grid from the grid section (PreconditionError when absent).
    sweep::SweepGrid sweep_grid() const;
};

/// Strict parse: unknown keys are rejected with their JSON path, the schema
/// version must match, and enum strings are validated.
RunConfig parse_config(const std::string& json_text);

/// Canonical serialization of the resolved configuration plus the command
/// name; hashing this string keys sweep resumability.
std::string fingerprint(const RunConfig& config, const std::string& command);

}  // namespace chichaos::config
