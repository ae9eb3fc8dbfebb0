#pragma once

// Uniformly sampled series, spectral densities with explicit conventions,
// periodogram estimation and 1/f^n noise synthesis.

#include <cstddef>
#include <span>
#include <vector>

#include "qsc/rng.hpp"

namespace qsc::noise {

/// Samples at a fixed step `dt` (seconds). Nonempty, dt > 0.
class TimeSeries {
public:
    TimeSeries(double dt, std::vector<double> samples);

    double dt() const { return dt_; }
    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }

    double mean() const;
    /// Population variance.
    double variance() const;

private:
    double dt_;
    std::vector<double> samples_;
};

enum class Sidedness { OneSided, TwoSided };
enum class FrequencyAxis { Linear, Angular };

/// PSD samples on a strictly increasing frequency grid. Values are per unit
/// of the axis (per Hz for Linear; for Angular the density is taken against
/// d(omega)/2pi, the convention under which a Lorentzian 2RkT/(1+(RC w)^2)
/// integrates to the variance).
class SpectralDensity {
public:
    SpectralDensity(std::vector<double> frequencies, std::vector<double> values, Sidedness side,
                    FrequencyAxis axis);

    const std::vector<double>& frequencies() const { return freq_; }
    const std::vector<double>& values() const { return values_; }
    Sidedness sidedness() const { return side_; }
    FrequencyAxis axis() const { return axis_; }
    std::size_t size() const { return freq_.size(); }

    /// Converts to the requested convention. One-sided values are twice the
    /// two-sided ones for f > 0; a linear<->angular change rescales the axis
    /// by 2pi and leaves the per-cycle density unchanged.
    SpectralDensity converted(Sidedness side, FrequencyAxis axis) const;

    /// Sum of value * bin width (bins assumed uniform).
    double integral() const;

private:
    std::vector<double> freq_;
    std::vector<double> values_;
    Sidedness side_;
    FrequencyAxis axis_;
};

/// One-sided, per-Hz, rectangular-window periodogram of the mean-removed
/// series at f_k = k / (N dt), k = 0..N/2. integral() equals the population
/// variance. Errors: fewer than 2 samples.
SpectralDensity periodogram(const TimeSeries& ts);

/// Averages periodograms over `segments` non-overlapping equal segments.
SpectralDensity averaged_periodogram(const TimeSeries& ts, std::size_t segments);

/// Gaussian noise with S(f) proportional to 1/f^n for n in {-1,0,1,2,3}
/// (blue, white, pink, brown, black). Shaped in the frequency domain with the
/// DC bin zeroed and scaled to unit sample variance. Errors: unsupported
/// exponent, length not a power of two >= 256.
TimeSeries colored_noise(int exponent, std::size_t length, double dt, Rng& rng);

/// Least-squares slope of log10(S) against log10(f) over [f_lo, f_hi].
/// Bins are first averaged in log-spaced groups (bins_per_decade per decade)
/// so raw periodogram scatter does not dominate; 0 fits every bin directly.
double loglog_slope(const SpectralDensity& psd, double f_lo, double f_hi, std::size_t bins_per_decade = 10);

/// dt * sum_{|k| <= max_lag} C(k) with C the biased sample autocovariance;
/// approximates the integral of the autocorrelation over all lags.
double autocorrelation_integral(const TimeSeries& ts, std::size_t max_lag);

/// Biased sample autocovariance at lag k (mean removed).
double autocovariance(const TimeSeries& ts, std::size_t lag);

}  // namespace qsc::noise
