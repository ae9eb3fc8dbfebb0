#include "qsc/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "qsc/error.hpp"

namespace qsc::entropy {

namespace {

constexpr const char* kModule = "entropy";

double log2_sum_pow(const std::vector<double>& p, double q) {
    double acc = 0.0;
    for (double v : p)
        if (v > 0.0) acc += std::pow(v, q);
    return std::log2(acc);
}

}  // namespace

Distribution::Distribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    if (p_.empty()) detail::fail(kModule, "distribution is empty");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) detail::fail(kModule, "probabilities must be >= 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) detail::fail(kModule, "probabilities must sum to 1");
}

Distribution Distribution::uniform(std::size_t n) {
    if (n == 0) detail::fail(kModule, "distribution is empty");
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double shannon_entropy(const Distribution& d) {
    double h = 0.0;
    for (double v : d.probabilities())
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

double renyi_entropy(const Distribution& d, double q) {
    if (!(q >= 0.0)) detail::fail(kModule, "Renyi order must be >= 0");
    if (q == 1.0) detail::fail(kModule, "Renyi order 1 is the Shannon entropy; use shannon_entropy");
    if (std::isinf(q)) detail::fail(kModule, "infinite Renyi order is the min-entropy; use min_entropy");
    if (q == 0.0) {
        const auto support = std::count_if(d.probabilities().begin(), d.probabilities().end(),
                                           [](double v) { return v > 0.0; });
        return std::log2(static_cast<double>(support));
    }
    return log2_sum_pow(d.probabilities(), q) / (1.0 - q);
}

double min_entropy(const Distribution& d) {
    const auto& p = d.probabilities();
    return -std::log2(*std::max_element(p.begin(), p.end()));
}

PoissonEntropies poisson_entropies(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) detail::fail(kModule, "Poisson mean must be positive");
    const double shannon = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * mean);
    const double mode = std::floor(mean);
    // -ln p(mode) = mean - mode ln(mean) + ln(mode!)
    const double neg_ln_p = mean - mode * std::log(mean) + std::lgamma(mode + 1.0);
    return {shannon, neg_ln_p / std::numbers::ln2};
}

double poisson_shannon_exact(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) detail::fail(kModule, "Poisson mean must be positive");
    const double width = 40.0 * std::sqrt(mean) + 60.0;
    const auto lo = static_cast<long long>(std::max(0.0, std::floor(mean - width)));
    const auto hi = static_cast<long long>(std::ceil(mean + width));
    const double ln_mean = std::log(mean);
    double h = 0.0;
    for (long long i = lo; i <= hi; ++i) {
        const double x = static_cast<double>(i);
        const double ln_p = -mean + x * ln_mean - std::lgamma(x + 1.0);
        h -= std::exp(ln_p) * ln_p;
    }
    return h / std::numbers::ln2;
}

bool HierarchyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

HierarchyReport hierarchy_check(const Distribution& d, std::span<const double> q_list,
                                std::span<const double> q_prime_list) {
    HierarchyReport report;
    auto add = [&](std::string what, double lower, double upper) {
        const double slack = upper - lower;
        const double tol = 1e-12 * std::max(1.0, std::abs(upper));
        report.checks.push_back({std::move(what), lower, upper, slack, slack >= -tol});
    };
    auto fmt = [](double q) {
        std::string s = std::to_string(q);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    const double r_inf = min_entropy(d);
    const double h = shannon_entropy(d);
    add("0 <= R_inf", 0.0, r_inf);
    for (double q : q_list) {
        const double rq = renyi_entropy(d, q);
        add("R_inf <= R_" + fmt(q), r_inf, rq);
        add("R_" + fmt(q) + " <= H_S", rq, h);
    }
    for (double q : q_prime_list) add("H_S <= R_" + fmt(q), h, renyi_entropy(d, q));
    return report;
}

ExtractorMatrix::ExtractorMatrix(std::size_t k, std::size_t l)
    : k_(k), l_(l), words_((l + 63) / 64), bits_(k * ((l + 63) / 64), 0) {
    if (k == 0 || l == 0) detail::fail(kModule, "extractor dimensions must be positive");
    if (k >= l) detail::fail(kModule, "extractor needs k < l");
}

bool ExtractorMatrix::get(std::size_t row, std::size_t col) const {
    return (bits_[row * words_ + col / 64] >> (col % 64)) & 1u;
}

void ExtractorMatrix::set(std::size_t row, std::size_t col, bool value) {
    auto& w = bits_[row * words_ + col / 64];
    const std::uint64_t mask = std::uint64_t{1} << (col % 64);
    w = value ? (w | mask) : (w & ~mask);
}

std::span<const std::uint64_t> ExtractorMatrix::row_words(std::size_t row) const {
    return {bits_.data() + row * words_, words_};
}

std::size_t ExtractorMatrix::rank() const {
    std::vector<std::uint64_t> m = bits_;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < l_ && rank < k_; ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t pivot = rank;
        while (pivot < k_ && !(m[pivot * words_ + w] & bit)) ++pivot;
        if (pivot == k_) continue;
        if (pivot != rank)
            std::swap_ranges(m.begin() + static_cast<std::ptrdiff_t>(pivot * words_),
                             m.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * words_),
                             m.begin() + static_cast<std::ptrdiff_t>(rank * words_));
        for (std::size_t r = 0; r < k_; ++r)
            if (r != rank && (m[r * words_ + w] & bit))
                for (std::size_t j = 0; j < words_; ++j) m[r * words_ + j] ^= m[rank * words_ + j];
        ++rank;
    }
    return rank;
}

BitString extract(const ExtractorMatrix& m, std::span<const std::uint8_t> x) {
    if (x.size() != m.cols()) detail::fail(kModule, "input length differs from extractor width l");
    std::vector<std::uint64_t> packed((x.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 1) detail::fail(kModule, "input bits must be 0 or 1");
        if (x[i]) packed[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    BitString y(m.rows());
    for (std::size_t j = 0; j < m.rows(); ++j) {
        const auto row = m.row_words(j);
        int parity = 0;
        for (std::size_t w = 0; w < row.size(); ++w) parity ^= std::popcount(row[w] & packed[w]) & 1;
        y[j] = static_cast<std::uint8_t>(parity);
    }
    return y;
}

ExtractorMatrix generate_extractor_matrix(const prbs::GaloisPolynomial& poly, std::uint32_t seed,
                                          std::size_t k, std::size_t l) {
    ExtractorMatrix m(k, l);
    const auto bits = prbs::generate_prbs(poly, seed, k * l);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < l; ++c) m.set(r, c, bits[r * l + c] != 0);
    return m;
}

EpsilonBound extractor_epsilon_log2(double l, double k, double s, double s_prime) {
    if (!(l >= 0.0 && k >= 0.0 && s >= 0.0 && s_prime >= 0.0))
        detail::fail(kModule, "extractor bound inputs must be non-negative");
    const double margin = l * s - k * s_prime;
    EpsilonBound b{-margin / 2.0, std::nullopt, margin >= 0.0};
    const double eps = std::exp2(b.log2_epsilon);
    if (std::isnormal(eps)) b.epsilon = eps;
    return b;
}

}  // namespace qsc::entropy
