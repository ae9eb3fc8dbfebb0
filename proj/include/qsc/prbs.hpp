#pragma once

// Pseudo-random binary sequences from primitive mod-2 polynomials and the
// +/-1 maximum-length sequences built from them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace qsc::prbs {

using BitSequence = std::vector<std::uint8_t>;

/// Mod-2 polynomial given by its nonzero exponents, e.g. (9,4,0) for
/// 1 + x^4 + x^9. Taps are stored in descending order and always contain
/// the degree and 0.
class GaloisPolynomial {
public:
    static constexpr int kMaxDegree = 32;
    /// Foreign (non-table) polynomials up to this degree must pass a
    /// full-period check at construction.
    static constexpr int kPeriodCheckDegree = 20;

    /// Throws ContractError on malformed taps or, for foreign polynomials of
    /// degree <= kPeriodCheckDegree, when the period is not 2^n - 1.
    explicit GaloisPolynomial(std::vector<int> taps);

    /// Entry of the built-in table for degree 1..15.
    static GaloisPolynomial from_table(int degree);

    int degree() const { return taps_.front(); }
    const std::vector<int>& taps() const { return taps_; }
    /// Register mask of the feedback stages (all taps except 0); bit i-1 is stage i.
    std::uint32_t feedback_mask() const { return mask_; }

    friend bool operator==(const GaloisPolynomial& a, const GaloisPolynomial& b) {
        return a.taps_ == b.taps_;
    }

private:
    std::vector<int> taps_;
    std::uint32_t mask_ = 0;
};

/// The 15 primitive polynomials of degree 1..15, in degree order.
const std::vector<GaloisPolynomial>& polynomial_table();

/// Fibonacci shift register. Stage i is bit i-1 of `reg`; the output is the
/// last stage (stage n) and the feedback XOR of the tapped stages enters
/// stage 1.
class LfsrState {
public:
    /// Throws ContractError("degenerate seed") for an all-zero register.
    LfsrState(GaloisPolynomial poly, std::uint32_t reg);
    /// Seed given stage by stage: seed[0] is stage 1, seed[n-1] is stage n.
    LfsrState(GaloisPolynomial poly, std::span<const std::uint8_t> seed);

    const GaloisPolynomial& polynomial() const { return poly_; }
    std::uint32_t reg() const { return reg_; }

    friend bool operator==(const LfsrState& a, const LfsrState& b) {
        return a.reg_ == b.reg_ && a.poly_ == b.poly_;
    }

private:
    GaloisPolynomial poly_;
    std::uint32_t reg_;
};

/// One clock: returns the output bit and the successor state.
std::pair<std::uint8_t, LfsrState> lfsr_step(const LfsrState& state);

/// Number of clocks until the register returns to its initial contents.
std::uint64_t lfsr_period(const LfsrState& state);

/// First `length` output bits. Errors: zero seed, length 0.
BitSequence generate_prbs(const GaloisPolynomial& poly, std::span<const std::uint8_t> seed,
                          std::size_t length);
BitSequence generate_prbs(const GaloisPolynomial& poly, std::uint32_t seed, std::size_t length);

/// Parses a seed written stage by stage ("001" = stages 1,2 clear, stage 3 set).
BitSequence parse_seed(std::string_view text);

/// One full period of +/-1 chips, chip = (-1)^bit.
class MlsSequence {
public:
    /// Validates length 2^n - 1 and balance (|sum| == 1).
    static MlsSequence from_chips(std::vector<int> chips);

    const std::vector<int>& chips() const { return chips_; }
    std::size_t period() const { return chips_.size(); }
    int order() const { return order_; }
    int operator[](std::size_t i) const { return chips_[i]; }

private:
    MlsSequence(std::vector<int> chips, int order) : chips_(std::move(chips)), order_(order) {}
    std::vector<int> chips_;
    int order_;
};

/// chips[n] = (-1)^bits[n]. Errors: length not 2^n - 1 ("not a full MLS
/// period") or the result is unbalanced.
MlsSequence mls_from_prbs(std::span<const std::uint8_t> bits);

/// Full period MLS of a table polynomial.
MlsSequence mls(const GaloisPolynomial& poly, std::uint32_t seed = 1);

/// True when `chips` has MLS length, balance and two-valued autocorrelation.
bool satisfies_mls_invariants(std::span<const int> chips);

/// R[n] = sum_i x[i] x[(i+n) mod N], unnormalized.
std::vector<std::int64_t> circular_autocorrelation(std::span<const int> chips);
inline std::vector<std::int64_t> circular_autocorrelation(const MlsSequence& seq) {
    return circular_autocorrelation(std::span<const int>(seq.chips()));
}
/// R[n] / N.
std::vector<double> normalized_autocorrelation(const MlsSequence& seq);

/// max|chip| / population standard deviation. Errors on zero deviation.
double crest_factor(std::span<const int> chips);
inline double crest_factor(const MlsSequence& seq) {
    return crest_factor(std::span<const int>(seq.chips()));
}

}  // namespace qsc::prbs
