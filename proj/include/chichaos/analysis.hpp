#pragma once

#include <string>
#include <vector>

#include "chichaos/integrator.hpp"
#include "chichaos/params.hpp"

namespace chichaos::analysis {

/// Classifier thresholds. The phase boundaries of the device are physical;
/// these cutoffs only pin down the finite-time estimators.
struct Thresholds {
    double lambda_chaos_tol = 0.01;  ///< lambda_max above this counts as chaotic stretching
    double cluster_eps_rel = 1e-4;   ///< extrema cluster width, relative to max |extremum|
    double var_eps = 1e-12;          ///< q-variance below this is a stationary record
    double flatness_chaos = 0.2;     ///< spectral flatness above this is broadband
    double flatness_band = 8.0;      ///< flatness evaluated over (0, band] in Omega units
    int n_chaos_clusters = 50;       ///< "infinite scatter" cutoff for bifurcation counts
};

enum class Phase { Stationary, SelfOscillation, PeriodDoubling, Chaos };

std::string to_string(Phase phase);

struct PhaseLabel {
    Phase label = Phase::Stationary;
    double lambda_max = 0.0;
    int n_clusters = 0;
    /// Set when lambda_max exceeds the chaos cutoff but the spectrum stayed
    /// discrete; the point is labeled Chaos with this diagnostic raised.
    bool discrete_spectrum_flag = false;
};

/// One bifurcation-diagram column: local-maximum amplitudes of q at a fixed
/// control value, recorded window only.
struct BifurcationSlice {
    double control_value = 0.0;
    std::vector<double> extrema;
};

/// Strict discrete local maxima of the q series, sorted ascending.
/// Throws PreconditionError on fewer than 3 samples.
std::vector<double> extract_extrema(const integrator::Trajectory& traj);

/// Merge sorted values into clusters of width cluster_eps; returns cluster means.
std::vector<double> cluster_values(const std::vector<double>& sorted_values, double cluster_eps);

/// Cluster count with the relative width rule from Thresholds.
int count_clusters(const std::vector<double>& extrema, double cluster_eps_rel);

struct Spectrum {
    std::vector<double> freqs;  ///< angular frequency in units of Omega
    std::vector<double> mags;   ///< magnitude spectrum, mean removed, scaled by 1/N
};

/// Discrete Fourier magnitude spectrum of a uniformly sampled series
/// (mean removed). Requires length >= 256; an odd trailing sample is dropped.
Spectrum power_spectrum(const std::vector<double>& series, double sample_dt);

/// Variant validating uniform sampling of the provided time grid.
Spectrum power_spectrum(const std::vector<double>& taus, const std::vector<double>& series);

/// Geometric over arithmetic mean of spectral magnitudes in (band_lo, band_hi].
double spectral_flatness(const Spectrum& spectrum, double band_lo, double band_hi);

/// Label a recorded trajectory given its converged lambda_max estimate.
PhaseLabel classify(const integrator::Trajectory& traj, double lambda_max,
                    const Thresholds& thresholds = {});

/// Two maximal-exponent arrays over the same uniformly spaced control grid,
/// one per pump port.
struct LyapunovSpectrumPair {
    std::vector<double> controls;
    std::vector<double> lambda_1;
    std::vector<double> lambda_2;

    void validate() const;
};

/// Symmetry metric: S = 1 - (1/N) sum |x_i - y_i| / (|x_i| + |y_i|),
/// with a 0/0 term defined as 0.
double metric_s(const std::vector<double>& lambda_1, const std::vector<double>& lambda_2);
double metric_s(const LyapunovSpectrumPair& pair);

/// Chirality metric: same as metric_s with the second array order-reversed.
double metric_c(const std::vector<double>& lambda_1, const std::vector<double>& lambda_2);
double metric_c(const LyapunovSpectrumPair& pair);

}  // namespace chichaos::analysis
