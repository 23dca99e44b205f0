#include "chichaos/analysis.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chichaos/errors.hpp"

namespace chichaos::analysis {

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::Stationary: return "stationary";
        case Phase::SelfOscillation: return "self_oscillation";
        case Phase::PeriodDoubling: return "period_doubling";
        case Phase::Chaos: return "chaos";
    }
    return "unknown";
}

std::vector<double> extract_extrema(const integrator::Trajectory& traj) {
    if (traj.size() < 3)
        throw PreconditionError("extract_extrema: need at least 3 recorded samples");
    std::vector<double> extrema;
    const auto& q = traj.q;
    for (size_t i = 1; i + 1 < q.size(); ++i) {
        if (q[i] > q[i - 1] && q[i] > q[i + 1]) {
            // Parabolic crest refinement; the discrete sample alone carries an
            // O((omega dt)^2) bias that would smear limit-cycle clusters.
            const double a = q[i - 1];
            const double b = q[i];
            const double c = q[i + 1];
            const double denom = a - 2.0 * b + c;
            double peak = b;
            if (denom < 0.0) peak = b - (a - c) * (a - c) / (8.0 * denom);
            extrema.push_back(peak);
        }
    }
    std::sort(extrema.begin(), extrema.end());
    return extrema;
}

std::vector<double> cluster_values(const std::vector<double>& sorted_values, double cluster_eps) {
    std::vector<double> reps;
    size_t begin = 0;
    while (begin < sorted_values.size()) {
        size_t end = begin + 1;
        while (end < sorted_values.size() &&
               sorted_values[end] - sorted_values[begin] <= cluster_eps)
            ++end;
        const double sum =
            std::accumulate(sorted_values.begin() + begin, sorted_values.begin() + end, 0.0);
        reps.push_back(sum / static_cast<double>(end - begin));
        begin = end;
    }
    return reps;
}

int count_clusters(const std::vector<double>& extrema, double cluster_eps_rel) {
    if (extrema.empty()) return 0;
    double max_mag = 0.0;
    for (double v : extrema) max_mag = std::max(max_mag, std::abs(v));
    std::vector<double> sorted = extrema;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<int>(cluster_values(sorted, cluster_eps_rel * max_mag).size());
}

Spectrum power_spectrum(const std::vector<double>& series, double sample_dt) {
    if (series.size() < 256)
        throw PreconditionError("power_spectrum: need at least 256 samples");
    if (!(sample_dt > 0.0)) throw PreconditionError("power_spectrum: sample_dt must be > 0");

    size_t n = series.size();
    if (n % 2 == 1) --n;  // real FFT wants an even length

    const double mean = std::accumulate(series.begin(), series.begin() + n, 0.0) / n;
    std::vector<double> centered(n);
    for (size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> bins;
    fft.fwd(bins, centered);

    Spectrum spec;
    const size_t n_bins = n / 2 + 1;
    spec.freqs.resize(n_bins);
    spec.mags.resize(n_bins);
    for (size_t k = 0; k < n_bins; ++k) {
        spec.freqs[k] = two_pi * static_cast<double>(k) / (static_cast<double>(n) * sample_dt);
        spec.mags[k] = std::abs(bins[k]) / static_cast<double>(n);
    }
    return spec;
}

Spectrum power_spectrum(const std::vector<double>& taus, const std::vector<double>& series) {
    if (taus.size() != series.size())
        throw PreconditionError("power_spectrum: taus/series length mismatch");
    if (taus.size() < 2) throw PreconditionError("power_spectrum: need at least 2 samples");
    const double dt = taus[1] - taus[0];
    for (size_t i = 1; i < taus.size(); ++i) {
        if (std::abs((taus[i] - taus[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw PreconditionError("power_spectrum: non-uniform sampling");
    }
    return power_spectrum(series, dt);
}

double spectral_flatness(const Spectrum& spectrum, double band_lo, double band_hi) {
    double log_sum = 0.0;
    double sum = 0.0;
    size_t count = 0;
    bool has_zero = false;
    for (size_t k = 0; k < spectrum.freqs.size(); ++k) {
        const double f = spectrum.freqs[k];
        if (f <= band_lo || f > band_hi) continue;
        const double m = spectrum.mags[k];
        sum += m;
        if (m > 0.0)
            log_sum += std::log(m);
        else
            has_zero = true;
        ++count;
    }
    if (count == 0) throw PreconditionError("spectral_flatness: empty band");
    if (sum <= 0.0) return 1.0;  // empty signal: flat by convention
    const double arith = sum / static_cast<double>(count);
    const double geo = has_zero ? 0.0 : std::exp(log_sum / static_cast<double>(count));
    return geo / arith;
}

namespace {

double variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

}  // namespace

PhaseLabel classify(const integrator::Trajectory& traj, double lambda_max,
                    const Thresholds& thresholds) {
    if (traj.size() < 3) throw PreconditionError("classify: need at least 3 recorded samples");

    PhaseLabel out;
    out.lambda_max = lambda_max;

    if (variance(traj.q) < thresholds.var_eps) {
        out.label = Phase::Stationary;
        return out;
    }

    const std::vector<double> extrema = extract_extrema(traj);
    out.n_clusters = count_clusters(extrema, thresholds.cluster_eps_rel);

    if (lambda_max > thresholds.lambda_chaos_tol) {
        const Spectrum spec = power_spectrum(traj.q, traj.sample_dt());
        const double flatness = spectral_flatness(spec, 0.0, thresholds.flatness_band);
        out.label = Phase::Chaos;
        out.discrete_spectrum_flag = flatness <= thresholds.flatness_chaos;
        return out;
    }

    out.label = out.n_clusters <= 1 ? Phase::SelfOscillation : Phase::PeriodDoubling;
    return out;
}

void LyapunovSpectrumPair::validate() const {
    if (lambda_1.size() != lambda_2.size())
        throw PreconditionError("LyapunovSpectrumPair: array length mismatch");
    if (!controls.empty() && controls.size() != lambda_1.size())
        throw PreconditionError("LyapunovSpectrumPair: control grid length mismatch");
    if (lambda_1.empty()) throw PreconditionError("LyapunovSpectrumPair: empty arrays");
}

namespace {

double metric_mean_term(const std::vector<double>& a, const std::vector<double>& b,
                        bool reverse_b) {
    if (a.size() != b.size()) throw PreconditionError("metric: array length mismatch");
    if (a.empty()) throw PreconditionError("metric: empty arrays");
    const size_t n = a.size();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double x = a[i];
        const double y = b[reverse_b ? n - 1 - i : i];
        const double den = std::abs(x) + std::abs(y);
        acc += den == 0.0 ? 0.0 : std::abs(x - y) / den;
    }
    return acc / static_cast<double>(n);
}

}  // namespace

double metric_s(const std::vector<double>& lambda_1, const std::vector<double>& lambda_2) {
    return 1.0 - metric_mean_term(lambda_1, lambda_2, false);
}

double metric_s(const LyapunovSpectrumPair& pair) {
    pair.validate();
    return metric_s(pair.lambda_1, pair.lambda_2);
}

double metric_c(const std::vector<double>& lambda_1, const std::vector<double>& lambda_2) {
    return 1.0 - metric_mean_term(lambda_1, lambda_2, true);
}

double metric_c(const LyapunovSpectrumPair& pair) {
    pair.validate();
    return metric_c(pair.lambda_1, pair.lambda_2);
}

}  // namespace chichaos::analysis
