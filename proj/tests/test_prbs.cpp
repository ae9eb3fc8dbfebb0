#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qsc/error.hpp"
#include "qsc/prbs.hpp"

using namespace qsc;
using namespace qsc::prbs;

namespace {

// Independent Fibonacci register: stages held as a bit array, output = last
// stage, feedback = XOR of the tapped stages shifted in at stage 1.
std::vector<int> reference_bits(const std::vector<int>& taps, std::vector<int> stages, std::size_t n) {
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(stages.back());
        int fb = 0;
        for (int t : taps)
            if (t > 0) fb ^= stages[static_cast<std::size_t>(t - 1)];
        stages.insert(stages.begin(), fb);
        stages.pop_back();
    }
    return out;
}

}  // namespace

TEST(PolynomialTable, MatchesPublishedList) {
    const std::vector<std::vector<int>> expected = {
        {1, 0},        {2, 1, 0},        {3, 1, 0},        {4, 1, 0},       {5, 2, 0},
        {6, 1, 0},     {7, 1, 0},        {8, 4, 3, 2, 0},  {9, 4, 0},       {10, 3, 0},
        {11, 2, 0},    {12, 6, 4, 1, 0}, {13, 4, 3, 1, 0}, {14, 5, 3, 1, 0}, {15, 1, 0}};
    const auto& table = polynomial_table();
    ASSERT_EQ(table.size(), 15u);
    for (std::size_t i = 0; i < table.size(); ++i) {
        EXPECT_EQ(table[i].taps(), expected[i]);
        EXPECT_EQ(table[i].degree(), static_cast<int>(i + 1));
    }
    EXPECT_EQ(table[7].taps(), (std::vector<int>{8, 4, 3, 2, 0}));
    EXPECT_EQ(table[11].taps(), (std::vector<int>{12, 6, 4, 1, 0}));
}

TEST(GaloisPolynomial, RejectsMalformedTaps) {
    EXPECT_THROW(GaloisPolynomial({3, 1}), ContractError);
    EXPECT_THROW(GaloisPolynomial({3, 1, 1, 0}), ContractError);
    EXPECT_THROW(GaloisPolynomial({0}), ContractError);
    EXPECT_THROW(GaloisPolynomial({33, 0}), ContractError);
    // x^4 + x^2 + 1 = (x^2+x+1)^2, not primitive
    EXPECT_THROW(GaloisPolynomial({4, 2, 0}), ContractError);
    EXPECT_NO_THROW(GaloisPolynomial({0, 4, 9}));
    EXPECT_EQ(GaloisPolynomial({0, 4, 9}).taps(), (std::vector<int>{9, 4, 0}));
}

TEST(Lfsr, ThreeStageGoldenStream) {
    const auto poly = GaloisPolynomial::from_table(3);
    const auto seed = parse_seed("001");
    const auto bits = generate_prbs(poly, seed, 14);
    const BitSequence golden = {1, 0, 0, 1, 1, 1, 0};
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(bits[i], golden[i]) << i;
        EXPECT_EQ(bits[i + 7], bits[i]) << i;
    }
}

TEST(Lfsr, ThreeStageVisitsAllNonzeroStates) {
    const auto poly = GaloisPolynomial::from_table(3);
    LfsrState s(poly, parse_seed("001"));
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 7; ++i) {
        seen.insert(s.reg());
        s = lfsr_step(s).second;
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_EQ(seen.count(0u), 0u);
    EXPECT_EQ(s.reg(), LfsrState(poly, parse_seed("001")).reg());
}

TEST(Lfsr, MatchesIndependentRegisterModel) {
    for (int n = 2; n <= 12; ++n) {
        const auto& poly = polynomial_table()[static_cast<std::size_t>(n - 1)];
        std::vector<int> stages(static_cast<std::size_t>(n), 0);
        stages[0] = 1;
        stages[static_cast<std::size_t>(n - 1)] = 1;
        BitSequence seed(stages.begin(), stages.end());
        const auto got = generate_prbs(poly, seed, 300);
        const auto want = reference_bits(poly.taps(), stages, 300);
        for (std::size_t i = 0; i < got.size(); ++i) ASSERT_EQ(got[i], want[i]) << "n=" << n << " i=" << i;
    }
}

TEST(Lfsr, StepIsDeterministic) {
    const LfsrState s(GaloisPolynomial::from_table(9), 0x155u);
    const auto a = lfsr_step(s);
    const auto b = lfsr_step(s);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
}

TEST(Lfsr, PeriodIsMaximalForEveryTablePolynomial) {
    for (const auto& poly : polynomial_table()) {
        const std::uint64_t full = (std::uint64_t{1} << poly.degree()) - 1;
        for (std::uint32_t seed : {1u, static_cast<std::uint32_t>(full), static_cast<std::uint32_t>(full / 3 + 1)}) {
            if (seed == 0 || seed > full) continue;
            EXPECT_EQ(lfsr_period(LfsrState(poly, seed)), full) << "degree " << poly.degree();
        }
    }
    EXPECT_EQ(lfsr_period(LfsrState(GaloisPolynomial::from_table(9), 0x1A3u)), 511u);
}

TEST(Lfsr, DegenerateAndEmptyRequests) {
    const auto poly = GaloisPolynomial::from_table(5);
    EXPECT_THROW(LfsrState(poly, 0u), ContractError);
    EXPECT_THROW(generate_prbs(poly, 0u, 10), ContractError);
    EXPECT_THROW(generate_prbs(poly, 1u, 0), ContractError);
    try {
        generate_prbs(poly, 0u, 4);
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate seed"), std::string::npos);
        EXPECT_EQ(e.module(), "prbs");
    }
    try {
        generate_prbs(poly, 3u, 0);
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("empty request"), std::string::npos);
    }
}

TEST(Lfsr, SingleStageRegisterRepeatsItself) {
    const auto bits = generate_prbs(GaloisPolynomial::from_table(1), 1u, 3);
    EXPECT_EQ(bits, (BitSequence{1, 1, 1}));
}

TEST(Mls, PointwiseMap) {
    const BitSequence bits = {0, 1, 1};
    const auto m = mls_from_prbs(bits);
    EXPECT_EQ(m.chips(), (std::vector<int>{1, -1, -1}));
    EXPECT_EQ(m.order(), 2);
}

TEST(Mls, RejectsNonPeriodLengths) {
    const BitSequence four = {0, 1, 1, 0};
    try {
        mls_from_prbs(four);
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("not a full MLS period"), std::string::npos);
    }
    const BitSequence zeros(7, 0);
    EXPECT_THROW(mls_from_prbs(zeros), ContractError);
}

TEST(Mls, OrderNineBalance) {
    const auto bits = generate_prbs(GaloisPolynomial::from_table(9), 1u, 511);
    EXPECT_EQ(std::count(bits.begin(), bits.end(), 1), 256);
    EXPECT_EQ(std::count(bits.begin(), bits.end(), 0), 255);
    const auto m = mls_from_prbs(bits);
    EXPECT_EQ(std::abs(std::accumulate(m.chips().begin(), m.chips().end(), 0)), 1);
}

TEST(Mls, TwoValuedAutocorrelationExhaustive) {
    for (int n = 2; n <= 10; ++n) {
        const auto m = mls(GaloisPolynomial::from_table(n));
        const auto N = static_cast<std::int64_t>(m.period());
        // brute-force oracle
        for (std::size_t lag = 0; lag < m.period(); ++lag) {
            std::int64_t r = 0;
            for (std::size_t i = 0; i < m.period(); ++i) r += m[i] * m[(i + lag) % m.period()];
            ASSERT_EQ(r, lag == 0 ? N : -1) << "n=" << n << " lag=" << lag;
        }
        const auto r = circular_autocorrelation(m);
        EXPECT_EQ(r[0], N);
        for (std::size_t lag = 1; lag < r.size(); ++lag) ASSERT_EQ(r[lag], -1);
        const auto rn = normalized_autocorrelation(m);
        EXPECT_DOUBLE_EQ(rn[0], 1.0);
        EXPECT_DOUBLE_EQ(rn[1], -1.0 / static_cast<double>(N));
    }
}

TEST(Mls, ConstantSequenceIsNotAnMls) {
    const std::vector<int> ones = {1, 1, 1};
    const auto r = circular_autocorrelation(ones);
    EXPECT_EQ(r, (std::vector<std::int64_t>{3, 3, 3}));
    EXPECT_FALSE(satisfies_mls_invariants(ones));
    EXPECT_THROW(MlsSequence::from_chips(ones), ContractError);
    EXPECT_TRUE(satisfies_mls_invariants(mls(GaloisPolynomial::from_table(6)).chips()));
}

TEST(Mls, SeedsGiveCyclicShifts) {
    for (int n = 2; n <= 10; ++n) {
        const auto poly = GaloisPolynomial::from_table(n);
        const auto ref = mls(poly, 1u).chips();
        const std::uint32_t full = (1u << n) - 1;
        for (std::uint32_t seed : {full, full / 2 + 1, 5u % full + 1}) {
            const auto other = mls(poly, seed).chips();
            auto doubled = ref;
            doubled.insert(doubled.end(), ref.begin(), ref.end());
            const bool matched = other.size() == ref.size() &&
                                 std::search(doubled.begin(), doubled.end(), other.begin(), other.end()) != doubled.end();
            EXPECT_TRUE(matched) << "n=" << n << " seed=" << seed;
        }
    }
}

TEST(CrestFactor, Values) {
    for (int n = 3; n <= 15; ++n) {
        const double cf = crest_factor(mls(GaloisPolynomial::from_table(n)));
        EXPECT_GE(cf, 1.0);
        if (n >= 5) EXPECT_LE(cf, 1.0 + 1e-3) << n;
        const double N = std::pow(2.0, n) - 1;
        EXPECT_NEAR(cf, 1.0 / std::sqrt(1.0 - 1.0 / (N * N)), 1e-12);
    }
    const std::vector<int> pm = {1, -1};
    EXPECT_DOUBLE_EQ(crest_factor(pm), 1.0);
    const std::vector<int> pp = {1, 1};
    EXPECT_THROW(crest_factor(pp), ContractError);
}
