#include "qsc/spread.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsc/error.hpp"

namespace qsc::spread {

namespace {
constexpr const char* kModule = "spread";
}

ChannelImpulseResponse::ChannelImpulseResponse(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) detail::fail(kModule, "impulse response needs at least one tap");
    if (std::none_of(taps_.begin(), taps_.end(), [](double v) { return v != 0.0; }))
        detail::fail(kModule, "impulse response is identically zero");
    if (std::any_of(taps_.begin(), taps_.end(), [](double v) { return !std::isfinite(v); }))
        detail::fail(kModule, "impulse response has non-finite taps");
}

ChipStream spread(std::span<const std::uint8_t> msg, const prbs::MlsSequence& code) {
    ChipStream out;
    out.reserve(msg.size() * code.period());
    for (std::uint8_t bit : msg) {
        if (bit > 1) detail::fail(kModule, "message bits must be 0 or 1");
        const double s = bit ? -1.0 : 1.0;
        for (int c : code.chips()) out.push_back(s * c);
    }
    return out;
}

std::vector<std::optional<std::uint8_t>> DespreadResult::decisions() const {
    std::vector<std::optional<std::uint8_t>> out(bits.begin(), bits.end());
    for (std::size_t i : erasures) out[i] = std::nullopt;
    return out;
}

DespreadResult despread(std::span<const double> chips, const prbs::MlsSequence& code) {
    const std::size_t n = code.period();
    if (chips.empty() || chips.size() % n != 0) detail::fail(kModule, "misaligned stream");
    const std::size_t blocks = chips.size() / n;
    DespreadResult r;
    r.bits.resize(blocks, 0);
    r.statistics.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += chips[b * n + i] * code[i];
        r.statistics[b] = acc;
        if (acc < 0.0)
            r.bits[b] = 1;
        else if (acc == 0.0)
            r.erasures.push_back(b);
    }
    return r;
}

ChipStream convolve(const ChannelImpulseResponse& h, std::span<const double> x) {
    if (x.empty()) return {};
    const auto& taps = h.taps();
    ChipStream y(x.size() + taps.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < taps.size(); ++k) y[i + k] += taps[k] * x[i];
    return y;
}

ChipStream periodic_probe(const prbs::MlsSequence& probe, std::size_t periods) {
    ChipStream out;
    out.reserve(periods * probe.period());
    for (std::size_t p = 0; p < periods; ++p)
        for (int c : probe.chips()) out.push_back(c);
    return out;
}

ChannelImpulseResponse identify_impulse_response(const prbs::MlsSequence& probe,
                                                 std::span<const double> y,
                                                 std::size_t max_taps) {
    const std::size_t n = probe.period();
    if (y.size() < 2 * n) detail::fail(kModule, "insufficient observation");
    if (max_taps < 1 || max_taps > n / 2)
        detail::fail(kModule, "max_taps must lie in [1, N/2] = [1, " + std::to_string(n / 2) + "]");

    // Average the steady-state periods 1..P-1.
    const std::size_t periods = y.size() / n;
    std::vector<double> avg(n, 0.0);
    for (std::size_t p = 1; p < periods; ++p)
        for (std::size_t i = 0; i < n; ++i) avg[i] += y[p * n + i];
    for (double& v : avg) v /= static_cast<double>(periods - 1);

    // c[m] = sum_i avg[i] x[(i - m) mod N] = (N + 1) h[m] - sum(h)
    std::vector<double> corr(max_taps, 0.0);
    for (std::size_t m = 0; m < max_taps; ++m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += avg[i] * probe[(i + n - m) % n];
        corr[m] = acc;
    }
    double corr_sum = 0.0;
    for (double c : corr) corr_sum += c;
    const double nn = static_cast<double>(n);
    const double tap_sum = corr_sum / (nn + 1.0 - static_cast<double>(max_taps));

    std::vector<double> taps(max_taps);
    for (std::size_t m = 0; m < max_taps; ++m) taps[m] = (corr[m] + tap_sum) / (nn + 1.0);
    if (std::none_of(taps.begin(), taps.end(), [](double v) { return v != 0.0; }))
        detail::fail(kModule, "observation carries no channel response");
    return ChannelImpulseResponse(std::move(taps));
}

ChipStream add_awgn(std::span<const double> x, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) detail::fail(kModule, "noise sigma must be >= 0");
    ChipStream out(x.begin(), x.end());
    if (sigma == 0.0) return out;
    for (double& v : out) v += sigma * rng.normal();
    return out;
}

}  // namespace qsc::spread
