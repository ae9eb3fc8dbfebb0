#pragma once

// Thermal noise: closed-form classical and quantum spectral laws, Langevin
// simulators for an RC circuit and a Brownian particle, and the
// fluctuation-dissipation estimator.

#include <cstddef>

#include "qsc/rng.hpp"
#include "qsc/spectral.hpp"

namespace qsc::noise {

/// CODATA 2018 exact SI values.
namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kPlanck = 6.62607015e-34;   // J s
inline constexpr double kHbar = kPlanck / (2.0 * 3.14159265358979323846);
}  // namespace constants

struct ResistorSpec {
    double resistance;   // ohm
    double temperature;  // K

    ResistorSpec(double r, double t);
};

struct RcCircuit {
    double resistance;   // ohm
    double capacitance;  // F
    double temperature;  // K

    RcCircuit(double r, double c, double t);
    double tau() const { return resistance * capacitance; }
    /// k_B T / C
    double stationary_variance() const;
};

/// Particle obeying m dv/dt = -m gamma v + xi(t). `diffusion` is the velocity
/// diffusion constant D = gamma k_B T / m, so the stationary variance is D/gamma.
struct LangevinParticle {
    double mass;         // kg
    double gamma;        // 1/s
    double diffusion;    // m^2/s^3
    double temperature;  // K

    /// Derives D from gamma, m and T.
    LangevinParticle(double m, double gamma, double temperature);
    /// Explicit D; throws unless D matches gamma k_B T / m to 1e-9 relative.
    LangevinParticle(double m, double gamma, double d, double temperature);

    /// Noise strength lambda with <xi(t) xi(t')> = lambda delta(t - t').
    double noise_strength() const;
    double stationary_variance() const { return diffusion / gamma; }
};

/// 1 / (exp(hbar w / k_B T) - 1). Errors: omega <= 0 or T <= 0.
double bose_einstein(double omega, double temperature);

/// Quantum Nyquist PSD 4 R h f / (exp(h f / k_B T) - 1), one-sided, V^2/Hz.
/// Errors: f <= 0.
double psd_nyquist_quantum(double f, const ResistorSpec& spec);

/// Classical white level 4 R k_B T, one-sided, V^2/Hz.
double psd_white_classical(const ResistorSpec& spec);

/// Integral of the quantum Nyquist PSD over all f > 0: 2 R (pi k_B T)^2 / (3 h).
double variance_quantum_total(const ResistorSpec& spec);

enum class BandConvention {
    Nyquist,   ///< 4 R k_B T df
    Einstein,  ///< 2 R k_B T df
};

/// Band-limited white-noise variance. Errors: df < 0.
double variance_band_limited(const ResistorSpec& spec, double df,
                             BandConvention convention = BandConvention::Nyquist);

/// Euler-Maruyama integration of R dq/dt = -q/C + xi, returning V = q/C
/// sampled every dt, starting uncharged. The forcing is scaled so that the
/// stationary variance is k_B T / C.
/// Errors: dt > RC/100 ("timestep exceeds RC/100"), steps < 10 RC/dt.
TimeSeries simulate_rc(const RcCircuit& circuit, double dt, std::size_t steps, Rng& rng);

/// 2 R k_B T / (1 + (RC w)^2): two-sided density against d(omega)/2pi.
double psd_rc_lorentzian(double omega, const RcCircuit& circuit);

struct BrownianTrajectory {
    TimeSeries velocity;  // m/s, velocity[0] = v0
    TimeSeries forcing;   // N, xi averaged over each step
};

/// Euler-Maruyama for m dv/dt = -m gamma v + xi with lambda = 2 m gamma k_B T.
/// Returns steps + 1 samples including v0. Errors: dt > 1/(100 gamma).
TimeSeries simulate_brownian(const LangevinParticle& p, double v0, double dt, std::size_t steps,
                             Rng& rng);
/// Same stream as simulate_brownian plus the forcing history.
BrownianTrajectory simulate_brownian_traced(const LangevinParticle& p, double v0, double dt,
                                            std::size_t steps, Rng& rng);

/// Mean of v(t) from v0: v0 exp(-gamma t).
double brownian_mean(const LangevinParticle& p, double v0, double t);
/// Velocity dispersion (D/gamma)(1 - exp(-2 gamma t)).
double brownian_variance(const LangevinParticle& p, double t);

/// gamma = integral / (2 m k_B T), where integral is the autocorrelation
/// integral of the forcing (N^2 s). Errors: non-positive inputs.
double fdt_gamma_from_autocorrelation(double xi_autocorr_integral, double mass,
                                      double temperature);

/// hbar w coth(hbar w / 2 k_B T) Re Y, with the w = 0 limit 2 k_B T Re Y.
/// Errors: reY < 0, T <= 0.
double qfdt_current_psd(double omega, double re_admittance, double temperature);
/// 2 (<n> + 1/2) hbar w Re Y, the occupation-number form of the same law.
double qfdt_current_psd_occupation(double omega, double re_admittance, double temperature);

/// Emission branch 2 R hbar w / (1 - exp(-hbar w / k_B T)). Errors: omega <= 0.
double psd_transmission_line(double omega, double resistance, double temperature);
/// Same expression for any signed omega (omega < 0 is the absorption
/// branch); omega = 0 returns the limit 2 R k_B T.
double psd_transmission_line_signed(double omega, double resistance, double temperature);
/// S(w) + S(-w) = 2 R hbar w coth(hbar w / 2 k_B T).
double psd_transmission_line_symmetrized(double omega, double resistance, double temperature);

/// (<n> + 1/2) hbar w. Errors: omega <= 0.
double mean_mode_energy(double omega, double temperature);
/// <n> hbar w, without the zero-point term.
double mean_mode_energy_thermal(double omega, double temperature);

/// Density of states Np (l/2pi)^d (1/vg) s_d (w/vg)^{d-1}, with s_d the area
/// of the unit sphere in d dimensions. Errors: d outside 1..3, non-positive
/// inputs.
double density_of_states(int dimension, double polarizations, double group_velocity,
                         double length, double omega);

}  // namespace qsc::noise
