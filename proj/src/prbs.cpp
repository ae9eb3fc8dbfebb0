#include "qsc/prbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "qsc/error.hpp"

namespace qsc::prbs {

namespace {

constexpr const char* kModule = "prbs";

std::uint32_t full_mask(int degree) {
    return degree >= 32 ? 0xFFFFFFFFu : ((std::uint32_t{1} << degree) - 1u);
}

std::uint32_t clock(std::uint32_t reg, int degree, std::uint32_t fb_mask, std::uint8_t* out) {
    if (out) *out = static_cast<std::uint8_t>((reg >> (degree - 1)) & 1u);
    const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(reg & fb_mask) & 1);
    return static_cast<std::uint32_t>(((std::uint64_t{reg} << 1) | fb) & full_mask(degree));
}

std::uint64_t period_from(std::uint32_t start, int degree, std::uint32_t fb_mask,
                          std::uint64_t limit) {
    std::uint32_t reg = start;
    for (std::uint64_t k = 1; k <= limit; ++k) {
        reg = clock(reg, degree, fb_mask, nullptr);
        if (reg == start) return k;
    }
    return 0;
}

// Returns n when size == 2^n - 1, else 0.
int order_of_period(std::size_t size) {
    const std::uint64_t p = static_cast<std::uint64_t>(size) + 1;
    if (size == 0 || !std::has_single_bit(p)) return 0;
    return std::countr_zero(p);
}

std::vector<int> normalize_taps(std::vector<int> taps) {
    std::sort(taps.begin(), taps.end(), std::greater<>());
    if (std::adjacent_find(taps.begin(), taps.end()) != taps.end())
        detail::fail(kModule, "duplicate polynomial tap");
    if (taps.size() < 2 || taps.back() != 0)
        detail::fail(kModule, "polynomial must contain the constant term 0 and a degree term");
    if (taps.front() < 1 || taps.front() > GaloisPolynomial::kMaxDegree)
        detail::fail(kModule, "polynomial degree out of range 1.." +
                                  std::to_string(GaloisPolynomial::kMaxDegree));
    return taps;
}

std::uint32_t mask_of(const std::vector<int>& taps) {
    std::uint32_t mask = 0;
    for (int t : taps)
        if (t > 0) mask |= std::uint32_t{1} << (t - 1);
    return mask;
}

}  // namespace

GaloisPolynomial::GaloisPolynomial(std::vector<int> taps)
    : taps_(normalize_taps(std::move(taps))), mask_(mask_of(taps_)) {
    const int n = degree();
    if (n <= kPeriodCheckDegree) {
        const std::uint64_t expected = (std::uint64_t{1} << n) - 1;
        if (period_from(1u, n, mask_, expected) != expected)
            detail::fail(kModule, "polynomial is not primitive: period differs from 2^" +
                                      std::to_string(n) + "-1");
    }
}

GaloisPolynomial GaloisPolynomial::from_table(int degree) {
    const auto& table = polynomial_table();
    if (degree < 1 || degree > static_cast<int>(table.size()))
        detail::fail(kModule, "no table polynomial of degree " + std::to_string(degree));
    return table[static_cast<std::size_t>(degree - 1)];
}

const std::vector<GaloisPolynomial>& polynomial_table() {
    static const std::vector<GaloisPolynomial> table = [] {
        const std::vector<std::vector<int>> raw = {
            {1, 0},          {2, 1, 0},       {3, 1, 0},         {4, 1, 0},
            {5, 2, 0},       {6, 1, 0},       {7, 1, 0},         {8, 4, 3, 2, 0},
            {9, 4, 0},       {10, 3, 0},      {11, 2, 0},        {12, 6, 4, 1, 0},
            {13, 4, 3, 1, 0}, {14, 5, 3, 1, 0}, {15, 1, 0},
        };
        std::vector<GaloisPolynomial> out;
        out.reserve(raw.size());
        for (const auto& taps : raw) out.emplace_back(taps);
        return out;
    }();
    return table;
}

LfsrState::LfsrState(GaloisPolynomial poly, std::uint32_t reg)
    : poly_(std::move(poly)), reg_(reg & full_mask(poly_.degree())) {
    if (reg_ == 0) detail::fail(kModule, "degenerate seed");
}

LfsrState::LfsrState(GaloisPolynomial poly, std::span<const std::uint8_t> seed)
    : LfsrState(poly, [&] {
          if (seed.size() != static_cast<std::size_t>(poly.degree()))
              detail::fail(kModule, "seed length " + std::to_string(seed.size()) +
                                        " does not match degree " +
                                        std::to_string(poly.degree()));
          std::uint32_t reg = 0;
          for (std::size_t i = 0; i < seed.size(); ++i) {
              if (seed[i] > 1) detail::fail(kModule, "seed must be binary");
              reg |= std::uint32_t{seed[i]} << i;
          }
          return reg;
      }()) {}

std::pair<std::uint8_t, LfsrState> lfsr_step(const LfsrState& state) {
    std::uint8_t bit = 0;
    const auto& poly = state.polynomial();
    const std::uint32_t next = clock(state.reg(), poly.degree(), poly.feedback_mask(), &bit);
    return {bit, LfsrState(poly, next)};
}

std::uint64_t lfsr_period(const LfsrState& state) {
    const auto& poly = state.polynomial();
    const std::uint64_t limit = (std::uint64_t{1} << poly.degree()) - 1;
    return period_from(state.reg(), poly.degree(), poly.feedback_mask(), limit);
}

BitSequence generate_prbs(const GaloisPolynomial& poly, std::uint32_t seed, std::size_t length) {
    if (length == 0) detail::fail(kModule, "empty request");
    LfsrState start(poly, seed);
    BitSequence out(length);
    std::uint32_t reg = start.reg();
    for (auto& bit : out) reg = clock(reg, poly.degree(), poly.feedback_mask(), &bit);
    return out;
}

BitSequence generate_prbs(const GaloisPolynomial& poly, std::span<const std::uint8_t> seed,
                          std::size_t length) {
    const LfsrState start(poly, seed);
    return generate_prbs(poly, start.reg(), length);
}

BitSequence parse_seed(std::string_view text) {
    BitSequence out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') detail::fail(kModule, "seed must be a string of 0/1 digits");
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

MlsSequence MlsSequence::from_chips(std::vector<int> chips) {
    const int order = order_of_period(chips.size());
    if (order == 0) detail::fail(kModule, "not a full MLS period");
    long long sum = 0;
    for (int c : chips) {
        if (c != 1 && c != -1) detail::fail(kModule, "MLS chips must be +1 or -1");
        sum += c;
    }
    if (std::llabs(sum) != 1) detail::fail(kModule, "sequence is not balanced");
    return MlsSequence(std::move(chips), order);
}

MlsSequence mls_from_prbs(std::span<const std::uint8_t> bits) {
    if (order_of_period(bits.size()) == 0) detail::fail(kModule, "not a full MLS period");
    std::vector<int> chips(bits.size());
    std::transform(bits.begin(), bits.end(), chips.begin(),
                   [](std::uint8_t b) { return b ? -1 : 1; });
    return MlsSequence::from_chips(std::move(chips));
}

MlsSequence mls(const GaloisPolynomial& poly, std::uint32_t seed) {
    const std::size_t period = (std::size_t{1} << poly.degree()) - 1;
    return mls_from_prbs(generate_prbs(poly, seed, period));
}

std::vector<std::int64_t> circular_autocorrelation(std::span<const int> chips) {
    const std::size_t n = chips.size();
    std::vector<std::int64_t> r(n, 0);
    for (std::size_t lag = 0; lag < n; ++lag) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += chips[i] * chips[(i + lag) % n];
        r[lag] = acc;
    }
    return r;
}

std::vector<double> normalized_autocorrelation(const MlsSequence& seq) {
    const auto r = circular_autocorrelation(seq);
    std::vector<double> out(r.size());
    const double n = static_cast<double>(seq.period());
    std::transform(r.begin(), r.end(), out.begin(),
                   [n](std::int64_t v) { return static_cast<double>(v) / n; });
    return out;
}

bool satisfies_mls_invariants(std::span<const int> chips) {
    if (order_of_period(chips.size()) == 0) return false;
    if (std::any_of(chips.begin(), chips.end(), [](int c) { return c != 1 && c != -1; }))
        return false;
    if (std::llabs(std::accumulate(chips.begin(), chips.end(), 0LL)) != 1) return false;
    const auto r = circular_autocorrelation(chips);
    const auto n = static_cast<std::int64_t>(chips.size());
    if (r[0] != n) return false;
    return std::all_of(r.begin() + 1, r.end(), [](std::int64_t v) { return v == -1; });
}

double crest_factor(std::span<const int> chips) {
    if (chips.empty()) detail::fail(kModule, "empty sequence");
    const double n = static_cast<double>(chips.size());
    double mean = 0.0;
    int peak = 0;
    for (int c : chips) {
        mean += c;
        peak = std::max(peak, std::abs(c));
    }
    mean /= n;
    double var = 0.0;
    for (int c : chips) var += (c - mean) * (c - mean);
    var /= n;
    if (var <= 0.0) detail::fail(kModule, "degenerate sequence");
    return peak / std::sqrt(var);
}

}  // namespace qsc::prbs
