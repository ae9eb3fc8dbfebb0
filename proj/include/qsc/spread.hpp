#pragma once

// Direct-sequence spreading with MLS codes, FIR channels and MLS-probe
// channel identification. All signals are dimensionless chip-rate samples.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qsc/prbs.hpp"
#include "qsc/rng.hpp"

namespace qsc::spread {

using Message = std::vector<std::uint8_t>;
using ChipStream = std::vector<double>;

/// FIR taps h[0..M-1] at chip spacing; at least one tap is nonzero.
class ChannelImpulseResponse {
public:
    explicit ChannelImpulseResponse(std::vector<double> taps);
    const std::vector<double>& taps() const { return taps_; }
    std::size_t size() const { return taps_.size(); }

private:
    std::vector<double> taps_;
};

/// Each bit b contributes (-1)^b * code, concatenated.
ChipStream spread(std::span<const std::uint8_t> msg, const prbs::MlsSequence& code);

struct DespreadResult {
    /// Decided bits; an erased position holds 0 and is listed in `erasures`.
    Message bits;
    std::vector<std::size_t> erasures;
    /// Per-block correlation with the code (the decision statistic).
    std::vector<double> statistics;

    /// Bits with erasures as std::nullopt.
    std::vector<std::optional<std::uint8_t>> decisions() const;
};

/// Correlates each N-chip block with the code: > 0 gives 0, < 0 gives 1, an
/// exact 0 is an erasure. Errors: length not a positive multiple of N.
DespreadResult despread(std::span<const double> chips, const prbs::MlsSequence& code);

/// Full linear convolution, length len(x) + M - 1.
ChipStream convolve(const ChannelImpulseResponse& h, std::span<const double> x);

/// `periods` back-to-back copies of the probe as real chips.
ChipStream periodic_probe(const prbs::MlsSequence& probe, std::size_t periods);

/// Estimates the first `max_taps` channel taps from the response `y` to a
/// periodically repeated probe. The first period is discarded as transient and
/// the remaining complete periods are averaged; the -1 off-peak correlation
/// bias is removed with the tap sum estimated from the same correlation.
/// Errors: fewer than 2 periods, max_taps outside [1, N/2].
ChannelImpulseResponse identify_impulse_response(const prbs::MlsSequence& probe,
                                                 std::span<const double> y,
                                                 std::size_t max_taps);

/// Adds i.i.d. N(0, sigma^2) samples. Errors: sigma < 0.
ChipStream add_awgn(std::span<const double> x, double sigma, Rng& rng);

}  // namespace qsc::spread
