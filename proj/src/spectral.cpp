#include "qsc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

#include "qsc/error.hpp"

namespace qsc::noise {

namespace {

constexpr const char* kModule = "noisephys";

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
    void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

// Real-to-half-complex forward transform, X_k = sum_n x_n e^{-2 pi i k n / N}.
std::vector<std::complex<double>> rfft(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(x.size()));
    std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(x.size() / 2 + 1));
    PlanPtr plan(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan.get());
    std::vector<std::complex<double>> result(x.size() / 2 + 1);
    for (std::size_t k = 0; k < result.size(); ++k)
        result[k] = {out.get()[k][0], out.get()[k][1]};
    return result;
}

// Inverse of rfft without the 1/N factor.
std::vector<double> irfft(std::span<const std::complex<double>> spec, std::size_t n) {
    std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(spec.size()));
    std::unique_ptr<double, FftwFree> out(fftw_alloc_real(n));
    PlanPtr plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        in.get()[k][0] = spec[k].real();
        in.get()[k][1] = spec[k].imag();
    }
    fftw_execute(plan.get());
    return {out.get(), out.get() + n};
}

}  // namespace

TimeSeries::TimeSeries(double dt, std::vector<double> samples)
    : dt_(dt), samples_(std::move(samples)) {
    if (!(dt_ > 0.0)) detail::fail(kModule, "time step must be positive");
    if (samples_.empty()) detail::fail(kModule, "time series is empty");
}

double TimeSeries::mean() const {
    return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
           static_cast<double>(samples_.size());
}

double TimeSeries::variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double v : samples_) acc += (v - m) * (v - m);
    return acc / static_cast<double>(samples_.size());
}

SpectralDensity::SpectralDensity(std::vector<double> frequencies, std::vector<double> values,
                                 Sidedness side, FrequencyAxis axis)
    : freq_(std::move(frequencies)), values_(std::move(values)), side_(side), axis_(axis) {
    if (freq_.size() != values_.size())
        detail::fail(kModule, "spectral density grid and values differ in length");
    if (std::adjacent_find(freq_.begin(), freq_.end(), std::greater_equal<>()) != freq_.end())
        detail::fail(kModule, "spectral density frequencies must be strictly increasing");
    if (std::any_of(values_.begin(), values_.end(), [](double v) { return !(v >= 0.0); }))
        detail::fail(kModule, "spectral density values must be non-negative");
}

SpectralDensity SpectralDensity::converted(Sidedness side, FrequencyAxis axis) const {
    std::vector<double> f = freq_;
    std::vector<double> v = values_;
    if (axis != axis_) {
        const double s = axis == FrequencyAxis::Angular ? 2.0 * std::numbers::pi
                                                        : 1.0 / (2.0 * std::numbers::pi);
        for (double& x : f) x *= s;
    }
    if (side != side_) {
        const double s = side == Sidedness::OneSided ? 2.0 : 0.5;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (f[i] != 0.0) v[i] *= s;
    }
    return SpectralDensity(std::move(f), std::move(v), side, axis);
}

double SpectralDensity::integral() const {
    if (freq_.size() < 2) return 0.0;
    double df = freq_[1] - freq_[0];
    if (axis_ == FrequencyAxis::Angular) df /= 2.0 * std::numbers::pi;
    return std::accumulate(values_.begin(), values_.end(), 0.0) * df;
}

SpectralDensity periodogram(const TimeSeries& ts) {
    const std::size_t n = ts.size();
    if (n < 2) detail::fail(kModule, "periodogram needs at least 2 samples");
    const double m = ts.mean();
    std::vector<double> x(ts.samples());
    for (double& v : x) v -= m;
    const auto spec = rfft(x);

    const double nn = static_cast<double>(n);
    const double dt = ts.dt();
    std::vector<double> f(spec.size()), p(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        f[k] = static_cast<double>(k) / (nn * dt);
        double v = std::norm(spec[k]) * dt / nn;
        const bool nyquist = (n % 2 == 0) && (k == n / 2);
        if (k != 0 && !nyquist) v *= 2.0;
        p[k] = v;
    }
    return SpectralDensity(std::move(f), std::move(p), Sidedness::OneSided, FrequencyAxis::Linear);
}

SpectralDensity averaged_periodogram(const TimeSeries& ts, std::size_t segments) {
    if (segments == 0 || ts.size() / segments < 2)
        detail::fail(kModule, "too many periodogram segments for the series length");
    const std::size_t len = ts.size() / segments;
    std::vector<double> sum;
    std::vector<double> freq;
    for (std::size_t s = 0; s < segments; ++s) {
        auto begin = ts.samples().begin() + static_cast<std::ptrdiff_t>(s * len);
        const auto p = periodogram(TimeSeries(ts.dt(), std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(len))));
        if (sum.empty()) {
            sum.assign(p.size(), 0.0);
            freq = p.frequencies();
        }
        for (std::size_t k = 0; k < p.size(); ++k) sum[k] += p.values()[k];
    }
    for (double& v : sum) v /= static_cast<double>(segments);
    return SpectralDensity(std::move(freq), std::move(sum), Sidedness::OneSided,
                           FrequencyAxis::Linear);
}

TimeSeries colored_noise(int exponent, std::size_t length, double dt, Rng& rng) {
    if (exponent < -1 || exponent > 3)
        detail::fail(kModule, "unsupported noise exponent " + std::to_string(exponent) +
                                  " (expected -1..3)");
    if (length < 256 || !std::has_single_bit(length))
        detail::fail(kModule, "colored noise length must be a power of two >= 256");
    if (!(dt > 0.0)) detail::fail(kModule, "time step must be positive");

    std::vector<double> white(length);
    for (double& v : white) v = rng.normal();
    auto spec = rfft(white);

    // Amplitude gain f^{-n/2} gives power 1/f^n; frequencies in units of the bin.
    spec[0] = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k)
        spec[k] *= std::pow(static_cast<double>(k), -0.5 * exponent);
    auto shaped = irfft(spec, length);

    const double mean = std::accumulate(shaped.begin(), shaped.end(), 0.0) / static_cast<double>(length);
    double var = 0.0;
    for (double v : shaped) var += (v - mean) * (v - mean);
    var /= static_cast<double>(length);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (double& v : shaped) v = (v - mean) * scale;
    return TimeSeries(dt, std::move(shaped));
}

double loglog_slope(const SpectralDensity& psd, double f_lo, double f_hi, std::size_t bins_per_decade) {
    std::vector<double> xs, ys;
    double group_f = 0, group_v = 0;
    std::size_t group_n = 0;
    long group = 0;
    auto flush = [&] {
        if (group_n == 0) return;
        xs.push_back(std::log10(group_f / static_cast<double>(group_n)));
        ys.push_back(std::log10(group_v / static_cast<double>(group_n)));
        group_f = group_v = 0;
        group_n = 0;
    };
    for (std::size_t k = 0; k < psd.size(); ++k) {
        const double f = psd.frequencies()[k];
        const double v = psd.values()[k];
        if (f < f_lo || f > f_hi || f <= 0.0 || v <= 0.0) continue;
        if (bins_per_decade == 0) {
            xs.push_back(std::log10(f));
            ys.push_back(std::log10(v));
            continue;
        }
        const auto g = static_cast<long>(std::floor(std::log10(f / f_lo) * static_cast<double>(bins_per_decade)));
        if (g != group) flush();
        group = g;
        group_f += f;
        group_v += v;
        ++group_n;
    }
    flush();
    if (xs.size() < 2) detail::fail(kModule, "fewer than 2 spectral points in the fit range");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double c = static_cast<double>(xs.size());
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

double autocovariance(const TimeSeries& ts, std::size_t lag) {
    const std::size_t n = ts.size();
    if (lag >= n) return 0.0;
    const double m = ts.mean();
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (ts[i] - m) * (ts[i + lag] - m);
    return acc / static_cast<double>(n);
}

double autocorrelation_integral(const TimeSeries& ts, std::size_t max_lag) {
    double acc = autocovariance(ts, 0);
    for (std::size_t k = 1; k <= max_lag; ++k) acc += 2.0 * autocovariance(ts, k);
    return acc * ts.dt();
}

}  // namespace qsc::noise
