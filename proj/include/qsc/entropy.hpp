#pragma once

// Entropy functionals (Shannon, Renyi, min-entropy), Poisson photon-count
// entropies, and the mod-2 linear randomness extractor.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsc/prbs.hpp"

namespace qsc::entropy {

using BitString = std::vector<std::uint8_t>;

/// Probability vector: p_i >= 0 and sum within 1e-9 of 1.
class Distribution {
public:
    explicit Distribution(std::vector<double> probabilities);

    static Distribution uniform(std::size_t n);

    const std::vector<double>& probabilities() const { return p_; }
    std::size_t size() const { return p_.size(); }

private:
    std::vector<double> p_;
};

/// -sum p log2 p, bits.
double shannon_entropy(const Distribution& d);

/// (1/(1-q)) log2 sum p^q. q = 0 counts the support. Errors: q < 0; q == 1
/// (use shannon_entropy); q infinite (use min_entropy).
double renyi_entropy(const Distribution& d, double q);

/// -log2 max p.
double min_entropy(const Distribution& d);

struct PoissonEntropies {
    double shannon;  // bits, Gaussian-limit form 0.5 log2(2 pi e mean)
    double min;      // bits, -log2 of the pmf at floor(mean)
};

/// Errors: mean <= 0.
PoissonEntropies poisson_entropies(double mean);

/// Exact Shannon entropy of Poisson(mean) by summing the pmf. Practical for
/// mean up to ~1e6.
double poisson_shannon_exact(double mean);

struct InequalityCheck {
    std::string description;  // e.g. "R_2 <= H_S"
    double lower;
    double upper;
    double slack;  // upper - lower
    bool pass;
};

struct HierarchyReport {
    std::vector<InequalityCheck> checks;
    bool all_pass() const;
};

/// Checks 0 <= R_inf <= R_q <= H_S <= R_q' for every q in `q_list` and q' in
/// `q_prime_list`, with 1e-12 tolerance on each inequality. Intended for
/// q > 1 and 0 < q' < 1; other values are evaluated as given and simply
/// show up as failures.
HierarchyReport hierarchy_check(const Distribution& d, std::span<const double> q_list,
                                std::span<const double> q_prime_list);

/// k x l matrix over GF(2), k < l, rows bit-packed.
class ExtractorMatrix {
public:
    /// Zero matrix. Errors: k == 0 or k >= l.
    ExtractorMatrix(std::size_t k, std::size_t l);

    std::size_t rows() const { return k_; }
    std::size_t cols() const { return l_; }
    bool get(std::size_t row, std::size_t col) const;
    void set(std::size_t row, std::size_t col, bool value);

    /// Rank over GF(2).
    std::size_t rank() const;

    std::span<const std::uint64_t> row_words(std::size_t row) const;

private:
    std::size_t k_, l_, words_;
    std::vector<std::uint64_t> bits_;
};

/// Y_j = XOR_i m_ji X_i. Errors: length(x) != l.
BitString extract(const ExtractorMatrix& m, std::span<const std::uint8_t> x);

/// Fills a k x l matrix row-major from k*l PRBS bits.
/// Errors: k >= l, zero seed.
ExtractorMatrix generate_extractor_matrix(const prbs::GaloisPolynomial& poly, std::uint32_t seed,
                                          std::size_t k, std::size_t l);

struct EpsilonBound {
    double log2_epsilon;            // -(l s - k s') / 2
    std::optional<double> epsilon;  // 2^log2_epsilon when a normal double
    bool has_margin;                // l s >= k s'
};

/// Distance-from-uniform bound 2^{-(l s - k s')/2} in log domain.
/// Errors: negative inputs.
EpsilonBound extractor_epsilon_log2(double l, double k, double s, double s_prime);

}  // namespace qsc::entropy
