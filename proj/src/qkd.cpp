#include "qsc/qkd.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsc/error.hpp"

namespace qsc::qkd {

namespace {

constexpr const char* kModule = "qkd";
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Real basis vectors in (H, V) for outcome bit of a basis.
std::array<double, 2> basis_vector(Basis basis, std::uint8_t bit) {
    if (basis == Basis::Plus) return bit ? std::array{0.0, 1.0} : std::array{1.0, 0.0};
    return bit ? std::array{kInvSqrt2, kInvSqrt2} : std::array{kInvSqrt2, -kInvSqrt2};
}

Basis random_basis(Rng& rng) { return rng.coin() ? Basis::Cross : Basis::Plus; }

void require_fraction(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) detail::fail(kModule, std::string(what) + " must lie in [0, 1]");
}

void finish(SiftResult& r) {
    r.matched_basis_fraction =
        r.sent ? static_cast<double>(r.key_alice.size()) / static_cast<double>(r.sent) : 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < r.key_alice.size(); ++i) errors += r.key_alice[i] != r.key_bob[i];
    r.error_fraction =
        r.key_alice.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(r.key_alice.size());
}

}  // namespace

Qubit polarization_state(const QkdSymbol& symbol) {
    const auto v = basis_vector(symbol.basis, symbol.bit);
    return {std::complex<double>(v[0]), std::complex<double>(v[1])};
}

Qubit qubit_rotate(double theta, double phi, const Qubit& state) {
    const double norm = std::norm(state[0]) + std::norm(state[1]);
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) detail::fail(kModule, "qubit state is not normalized");
    using namespace std::complex_literals;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const std::complex<double> off_up = -1i * std::exp(1i * phi) * s;
    const std::complex<double> off_down = -1i * std::exp(-1i * phi) * s;
    return {c * state[0] + off_up * state[1], off_down * state[0] + c * state[1]};
}

std::uint8_t measure(const Qubit& state, Basis basis, Rng& rng) {
    const auto v = basis_vector(basis, 0);
    const double p0 = std::norm(v[0] * state[0] + v[1] * state[1]);
    return rng.uniform() < p0 ? 0 : 1;
}

SiftResult bb84_session(std::size_t n, Eavesdropper eve, Rng& rng) {
    if (n == 0) detail::fail(kModule, "session needs at least one symbol");
    SiftResult r;
    r.sent = n;
    r.transcript.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const QkdSymbol alice{random_basis(rng), static_cast<std::uint8_t>(rng.coin())};
        Qubit photon = polarization_state(alice);
        std::optional<Basis> eve_basis;
        if (eve == Eavesdropper::InterceptResend) {
            eve_basis = random_basis(rng);
            const std::uint8_t eve_bit = measure(photon, *eve_basis, rng);
            photon = polarization_state({*eve_basis, eve_bit});
        }
        const Basis bob_basis = random_basis(rng);
        const std::uint8_t bob_bit = measure(photon, bob_basis, rng);
        r.transcript.push_back({alice, bob_basis, bob_bit, eve_basis});
        if (bob_basis == alice.basis) {
            r.key_alice.push_back(alice.bit);
            r.key_bob.push_back(bob_bit);
        }
    }
    finish(r);
    return r;
}

std::string_view to_string(BellState s) {
    switch (s) {
        case BellState::PsiPlus: return "psi+";
        case BellState::PsiMinus: return "psi-";
        case BellState::PhiPlus: return "phi+";
        case BellState::PhiMinus: return "phi-";
    }
    return "?";
}

std::string_view to_string(Basis b) { return b == Basis::Plus ? "plus" : "cross"; }

std::array<std::complex<double>, 4> bell_amplitudes(BellState s) {
    const double a = kInvSqrt2;
    switch (s) {
        case BellState::PsiPlus: return {0.0, a, a, 0.0};
        case BellState::PsiMinus: return {0.0, a, -a, 0.0};
        case BellState::PhiPlus: return {a, 0.0, 0.0, a};
        case BellState::PhiMinus: return {a, 0.0, 0.0, -a};
    }
    return {};
}

JointTable born_probabilities(BellState s, Basis basis_a, Basis basis_b) {
    const auto psi = bell_amplitudes(s);
    JointTable p{};
    for (std::uint8_t a = 0; a < 2; ++a) {
        const auto va = basis_vector(basis_a, a);
        for (std::uint8_t b = 0; b < 2; ++b) {
            const auto vb = basis_vector(basis_b, b);
            std::complex<double> amp = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) amp += va[i] * vb[j] * psi[2 * i + j];
            p[a][b] = std::norm(amp);
        }
    }
    return p;
}

std::pair<std::uint8_t, std::uint8_t> bbm92_measure(BellState s, Basis basis_a, Basis basis_b,
                                                    Rng& rng) {
    const auto p = born_probabilities(s, basis_a, basis_b);
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::uint8_t a = 0; a < 2; ++a)
        for (std::uint8_t b = 0; b < 2; ++b) {
            cum += p[a][b];
            if (u < cum) return {a, b};
        }
    // u landed in the rounding gap above the last cumulative value
    for (std::uint8_t a = 2; a-- > 0;)
        for (std::uint8_t b = 2; b-- > 0;)
            if (p[a][b] > 0.0) return {a, b};
    return {1, 1};
}

SiftResult bbm92_session(std::size_t n, BellState s, Rng& rng) {
    if (n == 0) detail::fail(kModule, "session needs at least one pair");
    SiftResult r;
    r.sent = n;
    r.transcript.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Basis ba = random_basis(rng);
        const Basis bb = random_basis(rng);
        const auto [a, b] = bbm92_measure(s, ba, bb, rng);
        r.transcript.push_back({{ba, a}, bb, b, std::nullopt});
        if (ba != bb) continue;
        const auto p = born_probabilities(s, ba, bb);
        const bool anti = p[0][0] + p[1][1] < 0.5;
        r.key_alice.push_back(a);
        r.key_bob.push_back(anti ? static_cast<std::uint8_t>(1 - b) : b);
    }
    finish(r);
    return r;
}

double attenuation(double length_km, double alpha0_db_per_km) {
    if (!(length_km >= 0.0)) detail::fail(kModule, "distance must be >= 0");
    if (!(alpha0_db_per_km >= 0.0)) detail::fail(kModule, "attenuation coefficient must be >= 0");
    return std::pow(10.0, -alpha0_db_per_km * length_km / 10.0);
}

double optimal_distance(int n, double alpha0_db_per_km) {
    if (n < 1) detail::fail(kModule, "exponent n must be >= 1");
    if (!(alpha0_db_per_km > 0.0)) detail::fail(kModule, "attenuation coefficient must be positive");
    return 10.0 / (n * alpha0_db_per_km * std::numbers::ln10);
}

void LinkParams::validate() const {
    if (!(alpha0 > 0.0)) detail::fail(kModule, "alpha0 must be positive");
    require_fraction(p_error, "P_e");
    require_fraction(eta_bob, "eta_Bob");
    if (!(mu > 0.0)) detail::fail(kModule, "mu must be positive");
}

double qber(double length_km, const LinkParams& link) {
    link.validate();
    const double a = attenuation(length_km, link.alpha0);
    const double denom = a * link.mu * link.eta_bob + 2.0 * link.p_error;
    if (!(denom > 0.0)) detail::fail(kModule, "QBER undefined: no signal and no error counts");
    return link.p_error / denom;
}

double binary_entropy(double x) {
    require_fraction(x, "binary entropy argument");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

void KeyRateParams::validate() const {
    require_fraction(omega, "Omega");
    require_fraction(e_detector, "e_D");
    if (e1) require_fraction(*e1, "e1");
    if (const auto* c = std::get_if<ConstantGain>(&gain); c && !(c->value >= 0.0))
        detail::fail(kModule, "constant gain must be >= 0");
}

double gain(double length_km, const LinkParams& link, const KeyRateParams& kp) {
    if (const auto* c = std::get_if<ConstantGain>(&kp.gain)) return c->value;
    return 0.5 * attenuation(length_km, link.alpha0) * link.mu * link.eta_bob;
}

double single_photon_error(double length_km, const LinkParams& link, const KeyRateParams& kp) {
    if (kp.e1) return *kp.e1;
    const double q = qber(length_km, link);
    const double ed = kp.e_detector;
    return ed * (1.0 - q) + q * (1.0 - ed);
}

KeyRate key_rate(double length_km, const LinkParams& link, const KeyRateParams& kp) {
    link.validate();
    kp.validate();
    const double qe = qber(length_km, link);
    const double e1 = single_photon_error(length_km, link, kp);
    const double raw =
        gain(length_km, link, kp) * (-binary_entropy(qe) + kp.omega * (1.0 - binary_entropy(e1)));
    return {raw > 0.0 ? raw : 0.0, raw, !(raw > 0.0)};
}

std::optional<double> key_rate_cutoff(const LinkParams& link, const KeyRateParams& kp,
                                      double l_max) {
    // sign of K(L) is the sign of the braced term; G_mu only scales it
    auto bracket = [&](double l) {
        const double qe = qber(l, link);
        const double e1 = single_photon_error(l, link, kp);
        return -binary_entropy(qe) + kp.omega * (1.0 - binary_entropy(e1));
    };
    if (bracket(0.0) <= 0.0) return 0.0;
    if (bracket(l_max) > 0.0) return std::nullopt;
    double lo = 0.0, hi = l_max;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * l_max; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bracket(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace qsc::qkd
