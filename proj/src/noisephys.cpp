#include "qsc/noisephys.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsc/error.hpp"

namespace qsc::noise {

using constants::kBoltzmann;
using constants::kHbar;
using constants::kPlanck;

namespace {

constexpr const char* kModule = "noisephys";

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) detail::fail(kModule, std::string(what) + " must be positive");
}

// x coth(x), even in x, with the x -> 0 limit 1.
double x_coth_x(double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 1.0;
    return ax / std::tanh(ax);
}

}  // namespace

ResistorSpec::ResistorSpec(double r, double t) : resistance(r), temperature(t) {
    require_positive(r, "resistance");
    require_positive(t, "temperature");
}

RcCircuit::RcCircuit(double r, double c, double t) : resistance(r), capacitance(c), temperature(t) {
    require_positive(r, "resistance");
    require_positive(c, "capacitance");
    require_positive(t, "temperature");
}

double RcCircuit::stationary_variance() const { return kBoltzmann * temperature / capacitance; }

LangevinParticle::LangevinParticle(double m, double g, double t)
    : mass(m), gamma(g), diffusion(0.0), temperature(t) {
    require_positive(m, "mass");
    require_positive(g, "gamma");
    require_positive(t, "temperature");
    diffusion = gamma * kBoltzmann * temperature / mass;
}

LangevinParticle::LangevinParticle(double m, double g, double d, double t)
    : LangevinParticle(m, g, t) {
    require_positive(d, "diffusion constant");
    if (std::abs(d - diffusion) > 1e-9 * diffusion)
        detail::fail(kModule, "diffusion constant inconsistent with D = gamma k_B T / m");
    diffusion = d;
}

double LangevinParticle::noise_strength() const {
    return 2.0 * mass * gamma * kBoltzmann * temperature;
}

double bose_einstein(double omega, double temperature) {
    require_positive(omega, "angular frequency");
    require_positive(temperature, "temperature");
    return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

double psd_nyquist_quantum(double f, const ResistorSpec& spec) {
    require_positive(f, "frequency");
    const double hf = kPlanck * f;
    return 4.0 * spec.resistance * hf / std::expm1(hf / (kBoltzmann * spec.temperature));
}

double psd_white_classical(const ResistorSpec& spec) {
    return 4.0 * spec.resistance * kBoltzmann * spec.temperature;
}

double variance_quantum_total(const ResistorSpec& spec) {
    const double pkt = std::numbers::pi * kBoltzmann * spec.temperature;
    return 2.0 * spec.resistance * pkt * pkt / (3.0 * kPlanck);
}

double variance_band_limited(const ResistorSpec& spec, double df, BandConvention convention) {
    if (!(df >= 0.0)) detail::fail(kModule, "bandwidth must be >= 0");
    const double factor = convention == BandConvention::Nyquist ? 4.0 : 2.0;
    return factor * spec.resistance * kBoltzmann * spec.temperature * df;
}

TimeSeries simulate_rc(const RcCircuit& circuit, double dt, std::size_t steps, Rng& rng) {
    const double tau = circuit.tau();
    require_positive(dt, "time step");
    if (dt > tau / 100.0) detail::fail(kModule, "timestep exceeds RC/100");
    if (static_cast<double>(steps) < 10.0 * tau / dt)
        detail::fail(kModule, "run shorter than 10 RC: need steps >= 10 RC/dt");

    // dV = (-V + xi) dt / RC, <xi xi'> = 2 R k_B T delta
    const double kick = std::sqrt(2.0 * circuit.resistance * kBoltzmann * circuit.temperature * dt) / tau;
    const double decay = dt / tau;
    std::vector<double> v(steps);
    double state = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        state += -state * decay + kick * rng.normal();
        v[i] = state;
    }
    return TimeSeries(dt, std::move(v));
}

double psd_rc_lorentzian(double omega, const RcCircuit& circuit) {
    const double x = circuit.tau() * omega;
    return 2.0 * circuit.resistance * kBoltzmann * circuit.temperature / (1.0 + x * x);
}

BrownianTrajectory simulate_brownian_traced(const LangevinParticle& p, double v0, double dt,
                                            std::size_t steps, Rng& rng) {
    require_positive(dt, "time step");
    if (dt > 1.0 / (100.0 * p.gamma)) detail::fail(kModule, "timestep exceeds 1/(100 gamma)");
    if (steps == 0) detail::fail(kModule, "steps must be >= 1");

    const double force_sigma = std::sqrt(p.noise_strength() / dt);
    std::vector<double> v(steps + 1), xi(steps);
    v[0] = v0;
    double state = v0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double f = force_sigma * rng.normal();
        xi[i] = f;
        state += (-p.gamma * state + f / p.mass) * dt;
        v[i + 1] = state;
    }
    return {TimeSeries(dt, std::move(v)), TimeSeries(dt, std::move(xi))};
}

TimeSeries simulate_brownian(const LangevinParticle& p, double v0, double dt, std::size_t steps,
                             Rng& rng) {
    return simulate_brownian_traced(p, v0, dt, steps, rng).velocity;
}

double brownian_mean(const LangevinParticle& p, double v0, double t) {
    return v0 * std::exp(-p.gamma * t);
}

double brownian_variance(const LangevinParticle& p, double t) {
    return p.stationary_variance() * -std::expm1(-2.0 * p.gamma * t);
}

double fdt_gamma_from_autocorrelation(double xi_autocorr_integral, double mass,
                                      double temperature) {
    require_positive(xi_autocorr_integral, "autocorrelation integral");
    require_positive(mass, "mass");
    require_positive(temperature, "temperature");
    return xi_autocorr_integral / (2.0 * mass * kBoltzmann * temperature);
}

double qfdt_current_psd(double omega, double re_admittance, double temperature) {
    if (!(re_admittance >= 0.0)) detail::fail(kModule, "Re Y must be >= 0");
    require_positive(temperature, "temperature");
    const double kt = kBoltzmann * temperature;
    const double x = kHbar * omega / (2.0 * kt);
    // hbar w coth(hbar w / 2kT) = 2kT x coth(x)
    return 2.0 * kt * x_coth_x(x) * re_admittance;
}

double qfdt_current_psd_occupation(double omega, double re_admittance, double temperature) {
    if (!(re_admittance >= 0.0)) detail::fail(kModule, "Re Y must be >= 0");
    if (omega == 0.0) return qfdt_current_psd(0.0, re_admittance, temperature);
    const double w = std::abs(omega);
    return 2.0 * (bose_einstein(w, temperature) + 0.5) * kHbar * w * re_admittance;
}

double psd_transmission_line(double omega, double resistance, double temperature) {
    require_positive(omega, "angular frequency");
    return psd_transmission_line_signed(omega, resistance, temperature);
}

double psd_transmission_line_signed(double omega, double resistance, double temperature) {
    require_positive(resistance, "resistance");
    require_positive(temperature, "temperature");
    const double kt = kBoltzmann * temperature;
    if (omega == 0.0) return 2.0 * resistance * kt;
    const double x = kHbar * omega / kt;
    // 2R hbar w / (1 - e^{-x}) = 2R kT x / -expm1(-x)
    return 2.0 * resistance * kt * x / -std::expm1(-x);
}

double psd_transmission_line_symmetrized(double omega, double resistance, double temperature) {
    require_positive(resistance, "resistance");
    require_positive(temperature, "temperature");
    const double kt = kBoltzmann * temperature;
    // 2R hbar w coth(hbar w / 2kT) = 4 R kT y coth(y), y = hbar w / 2kT
    return 4.0 * resistance * kt * x_coth_x(kHbar * omega / (2.0 * kt));
}

double mean_mode_energy(double omega, double temperature) {
    return (bose_einstein(omega, temperature) + 0.5) * kHbar * omega;
}

double mean_mode_energy_thermal(double omega, double temperature) {
    return bose_einstein(omega, temperature) * kHbar * omega;
}

double density_of_states(int dimension, double polarizations, double group_velocity,
                         double length, double omega) {
    if (dimension < 1 || dimension > 3)
        detail::fail(kModule, "dimension must be 1, 2 or 3");
    require_positive(polarizations, "polarization count");
    require_positive(group_velocity, "group velocity");
    require_positive(length, "system length");
    require_positive(omega, "angular frequency");
    const double d = dimension;
    const double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
    return polarizations * std::pow(length / (2.0 * std::numbers::pi), d) / group_velocity *
           sphere * std::pow(omega / group_velocity, d - 1.0);
}

}  // namespace qsc::noise
