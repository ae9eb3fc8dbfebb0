#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qsc/entropy.hpp"
#include "qsc/error.hpp"
#include "qsc/prbs.hpp"
#include "qsc/rng.hpp"

using namespace qsc;
using namespace qsc::entropy;

namespace {

Distribution random_distribution(Rng& rng, std::size_t n) {
    std::vector<double> p(n);
    double sum = 0;
    for (auto& v : p) {
        v = -std::log(1.0 - rng.uniform());
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return Distribution(p);
}

// Plain Gaussian elimination on unpacked rows.
std::size_t rank_oracle(std::vector<std::vector<int>> rows) {
    std::size_t rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][c])
                for (std::size_t j = 0; j < cols; ++j) rows[r][j] ^= rows[rank][j];
        ++rank;
    }
    return rank;
}

std::vector<std::vector<int>> unpack(const ExtractorMatrix& m) {
    std::vector<std::vector<int>> rows(m.rows(), std::vector<int>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m.get(r, c);
    return rows;
}

BitString bits_of(unsigned v, std::size_t n) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((v >> i) & 1u);
    return b;
}

}  // namespace

TEST(Distribution, Validation) {
    EXPECT_THROW(Distribution({0.5, 0.6}), ContractError);
    EXPECT_THROW(Distribution({1.1, -0.1}), ContractError);
    EXPECT_THROW(Distribution({}), ContractError);
    EXPECT_NO_THROW(Distribution({0.5, 0.5 + 1e-12}));
}

TEST(Shannon, Values) {
    EXPECT_NEAR(shannon_entropy(Distribution::uniform(16)), 4.0, 1e-12);
    EXPECT_EQ(shannon_entropy(Distribution({0.0, 1.0, 0.0})), 0.0);
    EXPECT_NEAR(shannon_entropy(Distribution({0.25, 0.75})), 0.81128, 1e-5);
}

TEST(Renyi, Values) {
    EXPECT_NEAR(renyi_entropy(Distribution::uniform(37), 2.0), std::log2(37.0), 1e-12);
    EXPECT_NEAR(renyi_entropy(Distribution({0.5, 0.5, 0.0, 0.0}), 0.0), 1.0, 1e-12);
    EXPECT_THROW(renyi_entropy(Distribution::uniform(2), 1.0), ContractError);
    EXPECT_THROW(renyi_entropy(Distribution::uniform(2), -0.5), ContractError);
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto d = random_distribution(rng, 2 + static_cast<std::size_t>(rng.uniform() * 30));
        const double h = shannon_entropy(d);
        EXPECT_NEAR(renyi_entropy(d, 1.0 + 1e-6), h, 1e-4);
        EXPECT_NEAR(renyi_entropy(d, 1.0 - 1e-6), h, 1e-4);
    }
}

TEST(Renyi, MonotoneInOrder) {
    Rng rng(3);
    const std::vector<double> grid = {0.0, 0.2, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0};
    for (int i = 0; i < 100; ++i) {
        const auto d = random_distribution(rng, 10);
        for (std::size_t j = 1; j < grid.size(); ++j)
            EXPECT_GE(renyi_entropy(d, grid[j - 1]) + 1e-12, renyi_entropy(d, grid[j]));
        EXPECT_GE(renyi_entropy(d, 50.0) + 1e-12, min_entropy(d));
    }
}

TEST(MinEntropy, Values) {
    EXPECT_NEAR(min_entropy(Distribution::uniform(256)), 8.0, 1e-12);
    EXPECT_NEAR(min_entropy(Distribution::uniform(256)) / 8.0, 1.0, 1e-12);
    EXPECT_EQ(min_entropy(Distribution({1.0})), 0.0);
    EXPECT_NEAR(min_entropy(Distribution({0.25, 0.75})), -std::log2(0.75), 1e-15);
}

TEST(Hierarchy, RandomDistributionsPass) {
    Rng rng(4);
    const std::vector<double> q = {1.5, 2.0, 5.0}, qp = {0.3, 0.7};
    for (int i = 0; i < 1000; ++i) {
        const auto d = random_distribution(rng, 2 + static_cast<std::size_t>(rng.uniform() * 64));
        const auto report = hierarchy_check(d, q, qp);
        ASSERT_TRUE(report.all_pass()) << i;
        EXPECT_LE(min_entropy(d), renyi_entropy(d, 2.0) + 1e-12);
        EXPECT_LE(renyi_entropy(d, 2.0), shannon_entropy(d) + 1e-12);
    }
}

TEST(Hierarchy, UniformIsTightAndSwappedOrdersFail) {
    const auto d = Distribution::uniform(8);
    const std::vector<double> q = {2.0}, qp = {0.5};
    const auto tight = hierarchy_check(d, q, qp);
    EXPECT_TRUE(tight.all_pass());
    for (const auto& c : tight.checks)
        if (c.description.rfind("0 <=", 0) != 0) EXPECT_NEAR(c.slack, 0.0, 1e-12) << c.description;
    const auto skew = Distribution({0.7, 0.2, 0.1});
    EXPECT_FALSE(hierarchy_check(skew, qp, q).all_pass());
}

TEST(Poisson, PublishedValues) {
    const auto e = poisson_entropies(2e4);
    EXPECT_NEAR(e.shannon, 9.191, 0.01);
    EXPECT_NEAR(e.min, 8.469, 0.01);
    EXPECT_NEAR(e.min / 16.0, 0.529, 5e-4);
    EXPECT_THROW(poisson_entropies(0.0), ContractError);
}

TEST(Poisson, MinEntropyMatchesExactFactorials) {
    for (double mean : {0.5, 1.0, 2.5, 7.0, 12.3, 20.0}) {
        const int k = static_cast<int>(std::floor(mean));
        double fact = 1;
        for (int i = 2; i <= k; ++i) fact *= i;
        const double p = std::exp(-mean) * std::pow(mean, k) / fact;
        EXPECT_NEAR(poisson_entropies(mean).min, -std::log2(p), 1e-12) << mean;
    }
}

TEST(Poisson, GaussianFormTracksExactEntropy) {
    for (double mean : {100.0, 1e3, 2e4}) {
        const double exact = poisson_shannon_exact(mean);
        EXPECT_NEAR(poisson_entropies(mean).shannon, exact, 5e-3) << mean;
    }
}

TEST(Poisson, MinEntropyIncreasing) {
    double prev = -1;
    for (double lm = 1.0; lm <= 6.0; lm += 0.05) {
        const double v = poisson_entropies(std::pow(10.0, lm)).min;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Extractor, SelectionAndZeroMatrices) {
    ExtractorMatrix sel(4, 10);
    for (std::size_t i = 0; i < 4; ++i) sel.set(i, i, true);
    Rng rng(5);
    BitString x(10);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng.coin());
    EXPECT_EQ(extract(sel, x), BitString(x.begin(), x.begin() + 4));
    EXPECT_EQ(extract(ExtractorMatrix(4, 10), x), BitString(4, 0));
    EXPECT_THROW(extract(sel, BitString(9)), ContractError);
    EXPECT_THROW(ExtractorMatrix(10, 10), ContractError);
    EXPECT_THROW(ExtractorMatrix(0, 10), ContractError);
}

TEST(Extractor, LinearOverGf2) {
    Rng rng(6);
    ExtractorMatrix m(70, 150);
    for (std::size_t r = 0; r < 70; ++r)
        for (std::size_t c = 0; c < 150; ++c) m.set(r, c, rng.coin());
    for (int t = 0; t < 100; ++t) {
        BitString x(150), y(150), s(150);
        for (std::size_t i = 0; i < 150; ++i) {
            x[i] = static_cast<std::uint8_t>(rng.coin());
            y[i] = static_cast<std::uint8_t>(rng.coin());
            s[i] = x[i] ^ y[i];
        }
        const auto ex = extract(m, x), ey = extract(m, y), es = extract(m, s);
        for (std::size_t j = 0; j < 70; ++j) ASSERT_EQ(es[j], ex[j] ^ ey[j]);
        // row-by-row parity oracle
        for (std::size_t j = 0; j < 70; ++j) {
            int parity = 0;
            for (std::size_t i = 0; i < 150; ++i) parity ^= m.get(j, i) & x[i];
            ASSERT_EQ(ex[j], parity);
        }
    }
}

TEST(Extractor, ExhaustiveUniformityForFullRank) {
    Rng rng(7);
    for (std::size_t l : {12u, 14u}) {
        ExtractorMatrix m(4, l);
        do {
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t c = 0; c < l; ++c) m.set(r, c, rng.coin());
        } while (rank_oracle(unpack(m)) < 4);
        std::vector<int> hist(16, 0);
        for (unsigned v = 0; v < (1u << l); ++v) {
            const auto y = extract(m, bits_of(v, l));
            ++hist[y[0] | y[1] << 1 | y[2] << 2 | y[3] << 3];
        }
        for (int h : hist) EXPECT_EQ(h, 1 << (l - 4));
    }
}

TEST(Extractor, RankMatchesOracle) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 40);
        const std::size_t l = k + 1 + static_cast<std::size_t>(rng.uniform() * 100);
        ExtractorMatrix m(k, l);
        const double density = rng.uniform();
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < l; ++c) m.set(r, c, rng.uniform() < density);
        ASSERT_EQ(m.rank(), rank_oracle(unpack(m)));
    }
}

TEST(GenerateMatrix, PrbsFilledAndGoldenRank) {
    const auto poly = prbs::GaloisPolynomial::from_table(9);
    const auto m1 = generate_extractor_matrix(poly, 5u, 4, 12);
    const auto m2 = generate_extractor_matrix(poly, 5u, 4, 12);
    const auto bits = prbs::generate_prbs(poly, 5u, 48);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 12; ++c) {
            ASSERT_EQ(m1.get(r, c), m2.get(r, c));
            ASSERT_EQ(m1.get(r, c), bits[r * 12 + c] != 0);
        }
    EXPECT_EQ(m1.rank(), rank_oracle(unpack(m1)));
    EXPECT_GE(m1.rank(), 3u);
    EXPECT_EQ(m1.rank(), 4u);
    EXPECT_THROW(generate_extractor_matrix(poly, 0u, 4, 12), ContractError);
    EXPECT_THROW(generate_extractor_matrix(poly, 5u, 12, 12), ContractError);
}

TEST(GenerateMatrix, RankBoundedByRegisterLength) {
    // every row is a window of one LFSR stream, so rows span at most `degree` dimensions
    const auto poly = prbs::GaloisPolynomial::from_table(9);
    EXPECT_EQ(generate_extractor_matrix(poly, 1u, 40, 100).rank(), 9u);
}

TEST(Epsilon, FormulaLevelValues) {
    const auto b = extractor_epsilon_log2(2000, 400, 0.529, 1);
    EXPECT_EQ(b.log2_epsilon, -329.0);
    ASSERT_TRUE(b.epsilon.has_value());
    EXPECT_NEAR(*b.epsilon / std::ldexp(1.0, -329), 1.0, 1e-12);
    EXPECT_TRUE(b.has_margin);
    const auto zero = extractor_epsilon_log2(1000, 500, 0.5, 1);
    EXPECT_EQ(zero.log2_epsilon, 0.0);
    const auto twice = extractor_epsilon_log2(4000, 400, 0.529, 1);
    EXPECT_NEAR(twice.log2_epsilon - b.log2_epsilon, -2000 * 0.529 / 2, 1e-9);
    const auto deep = extractor_epsilon_log2(1e6, 10, 0.5, 1);
    EXPECT_FALSE(deep.epsilon.has_value());
    EXPECT_FALSE(extractor_epsilon_log2(100, 90, 0.5, 1).has_margin);
    EXPECT_THROW(extractor_epsilon_log2(-1, 1, 1, 1), ContractError);
}
