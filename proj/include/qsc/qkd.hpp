#pragma once

// BB84 / BBM92 symbol-level simulation with sifting, plus the analytic
// fiber attenuation, QBER and secure key rate models.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "qsc/rng.hpp"

namespace qsc::qkd {

/// PLUS: rectilinear (0/90 deg); CROSS: diagonal (+/-45 deg).
enum class Basis : std::uint8_t { Plus, Cross };

/// Polarization symbol. Plus: horizontal = 0, vertical = 1. Cross: -45 deg = 0,
/// +45 deg = 1.
struct QkdSymbol {
    Basis basis;
    std::uint8_t bit;

    friend bool operator==(const QkdSymbol&, const QkdSymbol&) = default;
};

/// Single-photon polarization state in the (horizontal, vertical) basis.
using Qubit = std::array<std::complex<double>, 2>;

/// State vector prepared by a symbol.
Qubit polarization_state(const QkdSymbol& symbol);

/// Applies [[cos(t/2), -i e^{i p} sin(t/2)], [-i e^{-i p} sin(t/2), cos(t/2)]].
/// Errors: input norm differs from 1 by more than 1e-9.
Qubit qubit_rotate(double theta, double phi, const Qubit& state);

enum class Eavesdropper { None, InterceptResend };

struct Bb84Record {
    QkdSymbol alice;
    Basis bob_basis;
    std::uint8_t bob_bit;
    std::optional<Basis> eve_basis;
};

struct SiftResult {
    std::size_t sent = 0;
    std::vector<std::uint8_t> key_alice;
    std::vector<std::uint8_t> key_bob;
    double matched_basis_fraction = 0.0;
    double error_fraction = 0.0;
    std::vector<Bb84Record> transcript;

    std::size_t sifted() const { return key_alice.size(); }
};

/// Born-rule measurement of a single photon in `basis`.
std::uint8_t measure(const Qubit& state, Basis basis, Rng& rng);

/// Lossless BB84 exchange of n symbols with optional intercept-resend.
/// Errors: n == 0.
SiftResult bb84_session(std::size_t n, Eavesdropper eve, Rng& rng);

enum class BellState : std::uint8_t { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

std::string_view to_string(BellState s);
std::string_view to_string(Basis b);

/// Two-photon amplitudes over (HH, HV, VH, VV).
std::array<std::complex<double>, 4> bell_amplitudes(BellState s);

/// P(bitA, bitB) for a joint measurement, indexed [bitA][bitB].
using JointTable = std::array<std::array<double, 2>, 2>;
JointTable born_probabilities(BellState s, Basis basis_a, Basis basis_b);

/// Samples one joint outcome from born_probabilities.
std::pair<std::uint8_t, std::uint8_t> bbm92_measure(BellState s, Basis basis_a, Basis basis_b,
                                                    Rng& rng);

/// n entangled pairs, independent uniform bases, sift on matched bases.
/// Bob complements his bit in a basis where the state is anti-correlated.
SiftResult bbm92_session(std::size_t n, BellState s, Rng& rng);

/// A(L) = 10^(-alpha0 L / 10). Errors: L < 0, alpha0 < 0.
double attenuation(double length_km, double alpha0_db_per_km);

/// Maximizer of L A(L)^n: 10 / (n alpha0 ln 10). Errors: n < 1, alpha0 <= 0.
double optimal_distance(int n, double alpha0_db_per_km);

struct LinkParams {
    double alpha0 = 0.2;      // dB/km
    double p_error = 8.5e-7;  // error probability per clock cycle
    double mu = 0.1;          // mean photons per pulse
    double eta_bob = 0.045;   // detection efficiency

    /// Throws ContractError when a field is outside its range.
    void validate() const;
};

/// Q_e(L) = P_e / (A(L) mu eta_Bob + 2 P_e). Errors: L < 0.
double qber(double length_km, const LinkParams& link);

/// -x log2 x - (1-x) log2(1-x). Errors: x outside [0,1].
double binary_entropy(double x);

/// Gain G_mu: either the sifting-halved detection gain 0.5 A(L) mu eta_Bob or a
/// fixed value.
struct SiftedDetectionGain {};
struct ConstantGain {
    double value;
};
using GainModel = std::variant<SiftedDetectionGain, ConstantGain>;

struct KeyRateParams {
    double omega = 1.0;  // single-photon fraction of detections
    /// Single-photon QBER. When absent it is composed from the detector error
    /// and the channel QBER as two independent flips:
    /// e1 = e_D (1 - Q_e) + Q_e (1 - e_D).
    std::optional<double> e1;
    double e_detector = 0.01;
    GainModel gain = SiftedDetectionGain{};

    void validate() const;
};

double gain(double length_km, const LinkParams& link, const KeyRateParams& kp);
double single_photon_error(double length_km, const LinkParams& link, const KeyRateParams& kp);

struct KeyRate {
    double rate;     // bits per symbol, clamped at 0
    double raw;      // unclamped value
    bool link_dead;  // raw <= 0
};

/// K(L) = G_mu { -h2(Q_e(L)) + Omega [1 - h2(e1)] }.
KeyRate key_rate(double length_km, const LinkParams& link, const KeyRateParams& kp);

/// Smallest L on [0, l_max] where the raw key rate reaches 0 (bisection);
/// nullopt if still positive at l_max.
std::optional<double> key_rate_cutoff(const LinkParams& link, const KeyRateParams& kp,
                                      double l_max = 1000.0);

}  // namespace qsc::qkd
