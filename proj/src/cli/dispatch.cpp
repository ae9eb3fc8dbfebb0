#include "qsc/cli/dispatch.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "qsc/cli/csv.hpp"
#include "qsc/entropy.hpp"
#include "qsc/error.hpp"
#include "qsc/noisephys.hpp"
#include "qsc/prbs.hpp"
#include "qsc/qkd.hpp"
#include "qsc/rng.hpp"
#include "qsc/spread.hpp"

namespace qsc::cli {

namespace {

using I64 = std::int64_t;

const std::vector<SubcommandSpec> kSubcommands = {
    {"mls",
     "one period of a maximum-length sequence and its circular autocorrelation "
     "(the global --seed is the LFSR register seed)",
     {{"order", "9", "polynomial degree, 1..15 (built-in table)"}}},
    {"dsss roundtrip",
     "spread random messages, add white noise, despread, report the bit error rate per trial",
     {{"order", "9", "code polynomial degree"},
      {"bits", "1000", "message bits per trial"},
      {"sigma", "0.3", "per-chip noise standard deviation"},
      {"trials", "10", "independent trials"}}},
    {"dsss identify",
     "identify an FIR channel from its response to a repeated MLS probe",
     {{"order", "9", "probe polynomial degree"},
      {"taps", "0.9,0.3,-0.2", "true channel taps, comma separated"},
      {"sigma", "0", "additive noise standard deviation"},
      {"periods", "2", "probe periods transmitted (>= 2)"},
      {"max-taps", "0", "taps to estimate (0: number of true taps)"}}},
    {"noise psd",
     "evaluate a thermal-noise spectral law on a frequency grid (column f in Hz)",
     {{"model", "nyquist-quantum",
       "nyquist-quantum | white | lorentzian | tline | tline-sym | qfdt | bose | mode-energy"},
      {"R", "50", "resistance (ohm)"},
      {"T", "300", "temperature (K)"},
      {"C", "1e-9", "capacitance for the lorentzian model (F)"},
      {"reY", "0.02", "real admittance for the qfdt model (S)"},
      {"fmin", "1e6", "lowest frequency (Hz)"},
      {"fmax", "1e14", "highest frequency (Hz)"},
      {"points", "200", "grid points"},
      {"spacing", "log", "log | linear"}}},
    {"noise dos",
     "density of states over an angular-frequency grid",
     {{"dim", "3", "dimension 1..3"},
      {"np", "2", "polarizations"},
      {"vg", "299792458", "group velocity (m/s)"},
      {"ell", "1", "system length (m)"},
      {"wmin", "1e9", "lowest angular frequency (rad/s)"},
      {"wmax", "1e12", "highest angular frequency (rad/s)"},
      {"points", "100", "grid points"}}},
    {"noise sim",
     "Langevin simulation of an RC circuit voltage or a Brownian particle velocity",
     {{"model", "rc", "rc | brownian"},
      {"R", "1000", "rc: resistance (ohm)"},
      {"C", "1e-9", "rc: capacitance (F)"},
      {"T", "300", "temperature (K)"},
      {"mass", "1e-18", "brownian: particle mass (kg)"},
      {"gamma", "1e6", "brownian: damping rate (1/s)"},
      {"v0", "0", "brownian: initial velocity (m/s)"},
      {"dt", "0", "time step (0: relaxation time / 200)"},
      {"steps", "200000", "integration steps"},
      {"stride", "1", "write every stride-th sample"},
      {"psd-out", "", "optional path for the averaged periodogram (f,S,S_model)"}}},
    {"noise colored",
     "Gaussian 1/f^n noise synthesized in the frequency domain",
     {{"n", "1", "spectral exponent: -1 blue, 0 white, 1 pink, 2 brown, 3 black"},
      {"len", "65536", "samples (power of two >= 256)"},
      {"dt", "1", "sample interval (s)"},
      {"psd-out", "", "optional path for the periodogram (f,S)"}}},
    {"qkd bb84",
     "BB84 exchange with sifting; summary of key statistics",
     {{"n", "100000", "symbols sent"}, {"eve", "none", "none | intercept"}}},
    {"qkd bbm92",
     "entangled-pair exchange: empirical joint frequencies against the Born table",
     {{"n", "100000", "pairs"}, {"state", "psi+", "psi+ | psi- | phi+ | phi-"}}},
    {"qkd curves",
     "attenuation, QBER and key-rate curves versus fiber length",
     {{"lmax", "150", "largest distance (km)"},
      {"step", "1", "distance step (km)"},
      {"ed", "0.01,0.1,0.2,0.4", "detector error rates, comma separated"},
      {"alpha0", "0.2", "fiber attenuation (dB/km)"},
      {"pe", "8.5e-7", "error probability per clock cycle"},
      {"mu", "0.1", "mean photons per pulse"},
      {"eta", "0.045", "detection efficiency"},
      {"omega", "1", "single-photon fraction of detections"},
      {"e1", "", "fixed single-photon QBER (default: composed from e_D and Q_e)"},
      {"gain", "", "fixed gain G_mu (default: 0.5 A(L) mu eta)"}}},
    {"qkd rotate",
     "apply the qubit rotation to |0> or |1>",
     {{"theta", "1.0471975511965976", "polar angle (rad)"},
      {"phi", "0.5", "azimuthal angle (rad)"},
      {"input", "0", "basis state 0 or 1"}}},
    {"entropy dist",
     "Shannon, Renyi and min-entropy of a distribution, with the hierarchy check",
     {{"probs", "", "file of probabilities (comma or newline separated)"},
      {"q", "2", "Renyi orders > 1, comma separated"},
      {"qprime", "0.5", "Renyi orders in (0,1), comma separated"}}},
    {"entropy poisson",
     "Shannon and min-entropy of Poisson photon counts",
     {{"mean", "20000", "mean count per symbol"},
      {"bits-per-symbol", "16", "detector bits per symbol"}}},
    {"entropy extract",
     "mod-2 matrix extractor driven by a PRBS matrix (the global --seed seeds the LFSR)",
     {{"l", "2000", "input bits per block"},
      {"k", "400", "output bits per block"},
      {"poly", "9", "matrix PRBS polynomial degree"},
      {"s", "0.529", "input min-entropy per bit"},
      {"sprime", "1", "target output entropy per bit"},
      {"in", "", "input bit file of 0/1 characters (default: one block of pseudo-random bits)"},
      {"bits-out", "", "optional path for the extracted bits"}}},
};

const std::vector<OperationCoverage> kCoverage = {
    {"prbs", "lfsr_step", "mls"},
    {"prbs", "generate_prbs", "mls"},
    {"prbs", "mls_from_prbs", "mls"},
    {"prbs", "circular_autocorrelation", "mls"},
    {"prbs", "polynomial_table", "mls"},
    {"prbs", "crest_factor", "mls"},
    {"spread", "spread", "dsss roundtrip"},
    {"spread", "despread", "dsss roundtrip"},
    {"spread", "add_awgn", "dsss roundtrip"},
    {"spread", "convolve", "dsss identify"},
    {"spread", "identify_impulse_response", "dsss identify"},
    {"noisephys", "bose_einstein", "noise psd"},
    {"noisephys", "psd_nyquist_quantum", "noise psd"},
    {"noisephys", "psd_white_classical", "noise psd"},
    {"noisephys", "variance_quantum_total", "noise psd"},
    {"noisephys", "variance_band_limited", "noise psd"},
    {"noisephys", "psd_rc_lorentzian", "noise psd"},
    {"noisephys", "qfdt_current_psd", "noise psd"},
    {"noisephys", "psd_transmission_line", "noise psd"},
    {"noisephys", "mean_mode_energy", "noise psd"},
    {"noisephys", "simulate_rc", "noise sim"},
    {"noisephys", "simulate_brownian", "noise sim"},
    {"noisephys", "fdt_gamma_from_autocorrelation", "noise sim"},
    {"noisephys", "periodogram", "noise colored"},
    {"noisephys", "colored_noise", "noise colored"},
    {"noisephys", "density_of_states", "noise dos"},
    {"qkd", "qubit_rotate", "qkd rotate"},
    {"qkd", "bb84_session", "qkd bb84"},
    {"qkd", "bbm92_measure", "qkd bbm92"},
    {"qkd", "attenuation", "qkd curves"},
    {"qkd", "optimal_distance", "qkd curves"},
    {"qkd", "qber", "qkd curves"},
    {"qkd", "binary_entropy", "qkd curves"},
    {"qkd", "key_rate", "qkd curves"},
    {"entropy", "shannon_entropy", "entropy dist"},
    {"entropy", "renyi_entropy", "entropy dist"},
    {"entropy", "min_entropy", "entropy dist"},
    {"entropy", "hierarchy_check", "entropy dist"},
    {"entropy", "poisson_entropies", "entropy poisson"},
    {"entropy", "extract", "entropy extract"},
    {"entropy", "generate_extractor_matrix", "entropy extract"},
    {"entropy", "extractor_epsilon_log2", "entropy extract"},
};

std::vector<std::string> split_path(const std::string& path) {
    std::istringstream in(path);
    std::vector<std::string> parts;
    for (std::string p; in >> p;) parts.push_back(p);
    return parts;
}

std::string short_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint32_t register_seed(const RunConfig& cfg, int degree) {
    const std::uint64_t mask =
        degree >= 32 ? 0xFFFFFFFFULL : ((std::uint64_t{1} << degree) - 1);
    return static_cast<std::uint32_t>(cfg.seed & mask);
}

std::size_t count_param(const RunConfig& cfg, const std::string& key, I64 min_value) {
    const I64 v = cfg.integer(key);
    if (v < min_value)
        throw UsageError("--" + key + " must be >= " + std::to_string(min_value));
    return static_cast<std::size_t>(v);
}

void add_metadata(CsvTable& t, const RunConfig& cfg) {
    t.add_comment(std::string("qsc ") + kVersion);
    t.add_comment("command: " + cfg.subcommand);
    t.add_comment("seed=" + std::to_string(cfg.seed));
    for (const auto& [k, v] : cfg.parameters) {
        if (k.size() > 4 && k.compare(k.size() - 4, 4, "-out") == 0) continue;
        t.add_comment("param " + k + "=" + v);
    }
}

std::ofstream open_side_file(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + path);
    return f;
}

// ---------------------------------------------------------------- prbs

CsvTable run_mls(const RunConfig& cfg) {
    const int order = static_cast<int>(cfg.integer("order"));
    const auto& table = prbs::polynomial_table();
    if (order < 1 || order > static_cast<int>(table.size()))
        throw ContractError("prbs", "no table polynomial of degree " + std::to_string(order));
    const auto& poly = table[static_cast<std::size_t>(order - 1)];
    const std::size_t period = (std::size_t{1} << order) - 1;

    prbs::LfsrState state(poly, register_seed(cfg, order));
    prbs::BitSequence bits;
    bits.reserve(period);
    for (std::size_t i = 0; i < period; ++i) {
        auto [bit, next] = prbs::lfsr_step(state);
        bits.push_back(bit);
        state = next;
    }
    // cross-check the stepwise stream against the bulk generator
    if (bits != prbs::generate_prbs(poly, register_seed(cfg, order), period))
        throw ContractError("prbs", "LFSR stream mismatch");

    const auto seq = prbs::mls_from_prbs(bits);
    const auto r = prbs::circular_autocorrelation(seq);
    const auto rn = prbs::normalized_autocorrelation(seq);

    CsvTable t({"n", "chip", "R", "R_norm"});
    add_metadata(t, cfg);
    std::string taps;
    for (int tap : poly.taps()) taps += (taps.empty() ? "" : ",") + std::to_string(tap);
    t.add_comment("polynomial taps (" + taps + ") period=" + std::to_string(period));
    I64 sum = 0;
    for (int c : seq.chips()) sum += c;
    t.add_comment("chip_sum=" + std::to_string(sum) +
                  " crest_factor=" + format_double(prbs::crest_factor(seq)));
    for (std::size_t n = 0; n < period; ++n)
        t.add_row({static_cast<I64>(n), static_cast<I64>(seq[n]), r[n], rn[n]});
    return t;
}

// ---------------------------------------------------------------- spread

CsvTable run_dsss_roundtrip(const RunConfig& cfg) {
    const auto poly = prbs::GaloisPolynomial::from_table(static_cast<int>(cfg.integer("order")));
    const auto code = prbs::mls(poly);
    const std::size_t nbits = count_param(cfg, "bits", 1);
    const double sigma = cfg.number("sigma");
    if (!(sigma >= 0.0)) throw ContractError("spread", "noise sigma must be >= 0");
    const std::size_t trials = count_param(cfg, "trials", 1);

    struct Outcome {
        double ber = 0;
        std::size_t erasures = 0;
    };
    std::vector<Outcome> results(trials);
    auto run_trial = [&](std::size_t i) {
        Rng rng(derive_seed(cfg.seed, "dsss.roundtrip", i));
        spread::Message msg(nbits);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng.coin());
        const auto rx = spread::add_awgn(spread::spread(msg, code), sigma, rng);
        const auto dec = spread::despread(rx, code);
        std::size_t errors = 0;
        for (std::size_t j = 0; j < nbits; ++j) errors += dec.bits[j] != msg[j];
        results[i] = {static_cast<double>(errors) / static_cast<double>(nbits), dec.erasures.size()};
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(trials)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < trials; ++i) run_trial(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (unsigned w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < trials; i += jobs) run_trial(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    CsvTable t({"trial", "ber", "erasures"});
    add_metadata(t, cfg);
    double mean = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        t.add_row({static_cast<I64>(i), results[i].ber, static_cast<I64>(results[i].erasures)});
        mean += results[i].ber;
    }
    t.add_comment("code period=" + std::to_string(code.period()) +
                  " mean_ber=" + format_double(mean / static_cast<double>(trials)));
    return t;
}

CsvTable run_dsss_identify(const RunConfig& cfg) {
    const auto poly = prbs::GaloisPolynomial::from_table(static_cast<int>(cfg.integer("order")));
    const auto probe = prbs::mls(poly);
    const spread::ChannelImpulseResponse h(cfg.number_list("taps"));
    const double sigma = cfg.number("sigma");
    const std::size_t periods = count_param(cfg, "periods", 1);
    std::size_t max_taps = count_param(cfg, "max-taps", 0);
    if (max_taps == 0) max_taps = h.size();

    Rng rng(derive_seed(cfg.seed, "dsss.identify"));
    const auto y = spread::add_awgn(spread::convolve(h, spread::periodic_probe(probe, periods)),
                                    sigma, rng);
    const auto est = spread::identify_impulse_response(probe, y, max_taps);

    CsvTable t({"m", "h_true", "h_est"});
    add_metadata(t, cfg);
    double worst = 0;
    for (std::size_t m = 0; m < max_taps; ++m) {
        const double truth = m < h.size() ? h.taps()[m] : 0.0;
        worst = std::max(worst, std::abs(truth - est.taps()[m]));
        t.add_row({static_cast<I64>(m), truth, est.taps()[m]});
    }
    t.add_comment("max_abs_error=" + format_double(worst));
    return t;
}

// ---------------------------------------------------------------- noise

std::vector<double> grid(double lo, double hi, std::size_t points, bool log_spacing) {
    if (points < 2) throw UsageError("--points must be >= 2");
    if (!(hi > lo)) throw UsageError("grid upper bound must exceed the lower bound");
    if (log_spacing && !(lo > 0.0)) throw UsageError("log spacing needs a positive lower bound");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(points - 1);
        g[i] = log_spacing ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    return g;
}

CsvTable run_noise_psd(const RunConfig& cfg) {
    const std::string model = cfg.text("model");
    const noise::ResistorSpec spec(cfg.number("R"), cfg.number("T"));
    const std::string spacing = cfg.text("spacing");
    if (spacing != "log" && spacing != "linear") throw UsageError("--spacing must be log or linear");
    const auto freqs = grid(cfg.number("fmin"), cfg.number("fmax"),
                            count_param(cfg, "points", 2), spacing == "log");

    std::function<double(double)> eval;
    std::string unit;
    if (model == "nyquist-quantum") {
        eval = [&](double f) { return noise::psd_nyquist_quantum(f, spec); };
        unit = "V^2/Hz one-sided";
    } else if (model == "white") {
        eval = [&](double) { return noise::psd_white_classical(spec); };
        unit = "V^2/Hz one-sided";
    } else if (model == "lorentzian") {
        const noise::RcCircuit rc(spec.resistance, cfg.number("C"), spec.temperature);
        eval = [rc](double f) { return noise::psd_rc_lorentzian(2 * std::numbers::pi * f, rc); };
        unit = "V^2 per d(omega)/2pi two-sided, omega = 2 pi f";
    } else if (model == "tline") {
        eval = [&](double f) {
            return noise::psd_transmission_line(2 * std::numbers::pi * f, spec.resistance, spec.temperature);
        };
        unit = "V^2 per d(omega)/2pi emission branch, omega = 2 pi f";
    } else if (model == "tline-sym") {
        eval = [&](double f) {
            return noise::psd_transmission_line_symmetrized(2 * std::numbers::pi * f, spec.resistance,
                                                            spec.temperature);
        };
        unit = "V^2 per d(omega)/2pi symmetrized, omega = 2 pi f";
    } else if (model == "qfdt") {
        const double re_y = cfg.number("reY");
        eval = [&, re_y](double f) {
            return noise::qfdt_current_psd(2 * std::numbers::pi * f, re_y, spec.temperature);
        };
        unit = "A^2 per d(omega)/2pi, omega = 2 pi f";
    } else if (model == "bose") {
        eval = [&](double f) { return noise::bose_einstein(2 * std::numbers::pi * f, spec.temperature); };
        unit = "mean occupation, omega = 2 pi f";
    } else if (model == "mode-energy") {
        eval = [&](double f) { return noise::mean_mode_energy(2 * std::numbers::pi * f, spec.temperature); };
        unit = "J per mode including zero point, omega = 2 pi f";
    } else {
        throw UsageError("unknown --model " + model);
    }

    CsvTable t({"f", "S"});
    add_metadata(t, cfg);
    t.add_comment("units: " + unit);
    t.add_comment("white_level_4RkT=" + format_double(noise::psd_white_classical(spec)));
    t.add_comment("variance_quantum_total=" + format_double(noise::variance_quantum_total(spec)));
    const double band = freqs.back();
    t.add_comment("variance_band_limited(df=fmax) nyquist=" +
                  format_double(noise::variance_band_limited(spec, band)) + " einstein=" +
                  format_double(noise::variance_band_limited(spec, band, noise::BandConvention::Einstein)));
    for (double f : freqs) t.add_row({f, eval(f)});
    return t;
}

CsvTable run_noise_dos(const RunConfig& cfg) {
    const int d = static_cast<int>(cfg.integer("dim"));
    const auto omegas = grid(cfg.number("wmin"), cfg.number("wmax"), count_param(cfg, "points", 2), true);
    CsvTable t({"omega", "g"});
    add_metadata(t, cfg);
    for (double w : omegas)
        t.add_row({w, noise::density_of_states(d, cfg.number("np"), cfg.number("vg"),
                                               cfg.number("ell"), w)});
    return t;
}

void write_psd(const std::string& path, const noise::SpectralDensity& psd,
               const std::function<double(double)>& model) {
    CsvTable t(model ? std::vector<std::string>{"f", "S", "S_model"} : std::vector<std::string>{"f", "S"});
    t.add_comment("one-sided periodogram, per Hz");
    for (std::size_t k = 1; k < psd.size(); ++k) {
        const double f = psd.frequencies()[k];
        if (model)
            t.add_row({f, psd.values()[k], model(f)});
        else
            t.add_row({f, psd.values()[k]});
    }
    auto out = open_side_file(path);
    t.write(out);
}

CsvTable run_noise_sim(const RunConfig& cfg) {
    const std::string model = cfg.text("model");
    const std::size_t steps = count_param(cfg, "steps", 1);
    const std::size_t stride = count_param(cfg, "stride", 1);
    double dt = cfg.number("dt");
    Rng rng(derive_seed(cfg.seed, "noise.sim." + model));

    CsvTable t({"t", "value"});
    add_metadata(t, cfg);
    std::optional<noise::TimeSeries> series;

    if (model == "rc") {
        const noise::RcCircuit rc(cfg.number("R"), cfg.number("C"), cfg.number("T"));
        if (dt == 0.0) dt = rc.tau() / 200.0;
        series = noise::simulate_rc(rc, dt, steps, rng);
        const std::size_t skip = std::min(series->size() - 1, static_cast<std::size_t>(10.0 * rc.tau() / dt));
        const noise::TimeSeries tail(dt, std::vector<double>(series->samples().begin() + static_cast<std::ptrdiff_t>(skip),
                                                             series->samples().end()));
        t.add_comment("summary stationary_variance=" + format_double(tail.variance()) +
                      " expected_kT_over_C=" + format_double(rc.stationary_variance()));
        if (cfg.has("psd-out")) {
            const std::size_t segments = std::max<std::size_t>(1, tail.size() / 4096);
            write_psd(cfg.text("psd-out"), noise::averaged_periodogram(tail, segments), [rc](double f) {
                return 2.0 * noise::psd_rc_lorentzian(2 * std::numbers::pi * f, rc);
            });
        }
    } else if (model == "brownian") {
        const noise::LangevinParticle p(cfg.number("mass"), cfg.number("gamma"), cfg.number("T"));
        if (dt == 0.0) dt = 1.0 / (200.0 * p.gamma);
        auto traj = noise::simulate_brownian_traced(p, cfg.number("v0"), dt, steps, rng);
        const std::size_t skip = std::min(traj.velocity.size() - 1, static_cast<std::size_t>(10.0 / (p.gamma * dt)));
        const noise::TimeSeries tail(dt, std::vector<double>(traj.velocity.samples().begin() + static_cast<std::ptrdiff_t>(skip),
                                                             traj.velocity.samples().end()));
        const double integral = noise::autocorrelation_integral(traj.forcing, 5);
        t.add_comment("summary stationary_variance=" + format_double(tail.variance()) +
                      " expected_kT_over_m=" + format_double(p.stationary_variance()));
        t.add_comment("summary fdt_gamma=" +
                      format_double(noise::fdt_gamma_from_autocorrelation(integral, p.mass, p.temperature)) +
                      " configured_gamma=" + format_double(p.gamma));
        if (cfg.has("psd-out")) {
            const std::size_t segments = std::max<std::size_t>(1, tail.size() / 4096);
            write_psd(cfg.text("psd-out"), noise::averaged_periodogram(tail, segments), {});
        }
        series = std::move(traj.velocity);
    } else {
        throw UsageError("unknown --model " + model);
    }
    for (std::size_t i = 0; i < series->size(); i += stride)
        t.add_row({static_cast<double>(i) * dt, (*series)[i]});
    return t;
}

CsvTable run_noise_colored(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("n"));
    const double dt = cfg.number("dt");
    Rng rng(derive_seed(cfg.seed, "noise.colored"));
    const auto ts = noise::colored_noise(n, count_param(cfg, "len", 1), dt, rng);
    const auto psd = noise::periodogram(ts);
    // central decade of the positive-frequency band
    const double fny = 0.5 / dt;
    const double centre = std::sqrt(psd.frequencies()[1] * fny);
    const double slope = noise::loglog_slope(psd, centre / std::sqrt(10.0), centre * std::sqrt(10.0));

    CsvTable t({"t", "value"});
    add_metadata(t, cfg);
    t.add_comment("summary loglog_slope=" + format_double(slope) + " target=" + std::to_string(-n));
    for (std::size_t i = 0; i < ts.size(); ++i) t.add_row({static_cast<double>(i) * dt, ts[i]});
    if (cfg.has("psd-out")) write_psd(cfg.text("psd-out"), psd, {});
    return t;
}

// ---------------------------------------------------------------- qkd

CsvTable run_qkd_bb84(const RunConfig& cfg) {
    const std::string eve = cfg.text("eve");
    qkd::Eavesdropper mode;
    if (eve == "none")
        mode = qkd::Eavesdropper::None;
    else if (eve == "intercept")
        mode = qkd::Eavesdropper::InterceptResend;
    else
        throw UsageError("--eve must be none or intercept");
    Rng rng(derive_seed(cfg.seed, "qkd.bb84"));
    const auto r = qkd::bb84_session(count_param(cfg, "n", 1), mode, rng);
    const bool identical = r.key_alice == r.key_bob;

    CsvTable t({"sent", "sifted", "matched_basis_fraction", "error_fraction", "keys_identical"});
    add_metadata(t, cfg);
    t.add_row({static_cast<I64>(r.sent), static_cast<I64>(r.sifted()), r.matched_basis_fraction,
               r.error_fraction, static_cast<I64>(identical)});
    return t;
}

qkd::BellState parse_bell(const std::string& s) {
    if (s == "psi+") return qkd::BellState::PsiPlus;
    if (s == "psi-") return qkd::BellState::PsiMinus;
    if (s == "phi+") return qkd::BellState::PhiPlus;
    if (s == "phi-") return qkd::BellState::PhiMinus;
    throw UsageError("--state must be psi+, psi-, phi+ or phi-");
}

CsvTable run_qkd_bbm92(const RunConfig& cfg) {
    const auto state = parse_bell(cfg.text("state"));
    const std::size_t n = count_param(cfg, "n", 1);
    Rng rng(derive_seed(cfg.seed, "qkd.bbm92"));

    CsvTable t({"basis_a", "basis_b", "bit_a", "bit_b", "count", "frequency", "born"});
    add_metadata(t, cfg);
    t.add_comment("basis 0 = plus (0/90 deg), 1 = cross (+/-45 deg); n pairs per basis pair");
    for (int ba = 0; ba < 2; ++ba)
        for (int bb = 0; bb < 2; ++bb) {
            const auto a_basis = static_cast<qkd::Basis>(ba);
            const auto b_basis = static_cast<qkd::Basis>(bb);
            std::array<std::array<I64, 2>, 2> counts{};
            for (std::size_t i = 0; i < n; ++i) {
                const auto [a, b] = qkd::bbm92_measure(state, a_basis, b_basis, rng);
                ++counts[a][b];
            }
            const auto born = qkd::born_probabilities(state, a_basis, b_basis);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    t.add_row({static_cast<I64>(ba), static_cast<I64>(bb), static_cast<I64>(a),
                               static_cast<I64>(b), counts[a][b],
                               static_cast<double>(counts[a][b]) / static_cast<double>(n), born[a][b]});
        }
    const auto session = qkd::bbm92_session(n, state, rng);
    t.add_comment("summary sifted=" + std::to_string(session.sifted()) + " matched_basis_fraction=" +
                  format_double(session.matched_basis_fraction) +
                  " error_fraction=" + format_double(session.error_fraction));
    return t;
}

CsvTable run_qkd_curves(const RunConfig& cfg) {
    qkd::LinkParams link{cfg.number("alpha0"), cfg.number("pe"), cfg.number("mu"), cfg.number("eta")};
    link.validate();
    const double lmax = cfg.number("lmax");
    const double step = cfg.number("step");
    if (!(lmax >= 0.0)) throw ContractError("qkd", "distance must be >= 0");
    if (!(step > 0.0)) throw UsageError("--step must be positive");
    const auto eds = cfg.number_list("ed");

    std::vector<qkd::KeyRateParams> params;
    std::vector<std::string> header = {"L", "A", "QBER", "h2_QBER"};
    for (double ed : eds) {
        qkd::KeyRateParams kp;
        kp.omega = cfg.number("omega");
        kp.e_detector = ed;
        if (cfg.has("e1")) kp.e1 = cfg.number("e1");
        if (cfg.has("gain")) kp.gain = qkd::ConstantGain{cfg.number("gain")};
        kp.validate();
        params.push_back(kp);
        header.push_back("K_ed" + short_number(ed));
    }

    CsvTable t(header);
    add_metadata(t, cfg);
    for (int n : {1, 2, 4})
        t.add_comment("L_opt(n=" + std::to_string(n) + ")=" +
                      format_double(qkd::optimal_distance(n, link.alpha0)) + " km");
    for (std::size_t i = 0; i < eds.size(); ++i) {
        const auto cut = qkd::key_rate_cutoff(link, params[i]);
        t.add_comment("cutoff(e_D=" + short_number(eds[i]) + ")=" +
                      (cut ? format_double(*cut) + " km" : std::string("none below 1000 km")));
    }
    const auto points = static_cast<std::size_t>(std::floor(lmax / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < points; ++i) {
        const double l = static_cast<double>(i) * step;
        const double q = qkd::qber(l, link);
        std::vector<Cell> row = {l, qkd::attenuation(l, link.alpha0), q, qkd::binary_entropy(q)};
        for (const auto& kp : params) row.emplace_back(qkd::key_rate(l, link, kp).rate);
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable run_qkd_rotate(const RunConfig& cfg) {
    const I64 input = cfg.integer("input");
    if (input != 0 && input != 1) throw UsageError("--input must be 0 or 1");
    const qkd::Qubit basis = input == 0 ? qkd::Qubit{1.0, 0.0} : qkd::Qubit{0.0, 1.0};
    const auto out = qkd::qubit_rotate(cfg.number("theta"), cfg.number("phi"), basis);
    CsvTable t({"component", "re", "im", "probability"});
    add_metadata(t, cfg);
    for (int i = 0; i < 2; ++i)
        t.add_row({static_cast<I64>(i), out[i].real(), out[i].imag(), std::norm(out[i])});
    return t;
}

// ---------------------------------------------------------------- entropy

std::vector<double> read_numbers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        for (std::string tok; ls >> tok;) out.push_back(parse_number("probs", tok));
    }
    return out;
}

CsvTable run_entropy_dist(const RunConfig& cfg) {
    if (!cfg.has("probs")) throw UsageError("--probs is required");
    const entropy::Distribution d(read_numbers(cfg.text("probs")));
    const auto qs = cfg.number_list("q");
    const auto qps = cfg.number_list("qprime");

    CsvTable t({"quantity", "order", "bits"});
    add_metadata(t, cfg);
    t.add_row({std::string("shannon"), 1.0, entropy::shannon_entropy(d)});
    for (double q : qs) t.add_row({std::string("renyi"), q, entropy::renyi_entropy(d, q)});
    for (double q : qps) t.add_row({std::string("renyi"), q, entropy::renyi_entropy(d, q)});
    t.add_row({std::string("min"), std::numeric_limits<double>::infinity(), entropy::min_entropy(d)});
    const auto report = entropy::hierarchy_check(d, qs, qps);
    for (const auto& c : report.checks)
        t.add_comment("hierarchy " + c.description + " slack=" + format_double(c.slack) +
                      (c.pass ? " pass" : " FAIL"));
    t.add_comment(std::string("hierarchy ") + (report.all_pass() ? "all pass" : "violated"));
    return t;
}

CsvTable run_entropy_poisson(const RunConfig& cfg) {
    const double mean = cfg.number("mean");
    const double bits = cfg.number("bits-per-symbol");
    if (!(bits > 0.0)) throw UsageError("--bits-per-symbol must be positive");
    const auto e = entropy::poisson_entropies(mean);
    CsvTable t({"quantity", "per_symbol_bits", "per_bit"});
    add_metadata(t, cfg);
    t.add_row({std::string("shannon"), e.shannon, e.shannon / bits});
    t.add_row({std::string("min"), e.min, e.min / bits});
    return t;
}

entropy::BitString read_bits(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    entropy::BitString bits;
    for (char c; in.get(c);) {
        if (c == '0' || c == '1')
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw ContractError("entropy", "input bit file may contain only 0, 1 and whitespace");
    }
    return bits;
}

CsvTable run_entropy_extract(const RunConfig& cfg) {
    const std::size_t l = count_param(cfg, "l", 1);
    const std::size_t k = count_param(cfg, "k", 1);
    const int degree = static_cast<int>(cfg.integer("poly"));
    const auto poly = prbs::GaloisPolynomial::from_table(degree);
    const auto m = entropy::generate_extractor_matrix(poly, register_seed(cfg, degree), k, l);

    entropy::BitString input;
    if (cfg.has("in")) {
        input = read_bits(cfg.text("in"));
    } else {
        Rng rng(derive_seed(cfg.seed, "entropy.extract.input"));
        input.resize(l);
        for (auto& b : input) b = static_cast<std::uint8_t>(rng.coin());
    }
    if (input.size() < l) throw ContractError("entropy", "input shorter than one block of l bits");
    const std::size_t blocks = input.size() / l;
    entropy::BitString output;
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto y = entropy::extract(m, std::span(input).subspan(b * l, l));
        output.insert(output.end(), y.begin(), y.end());
    }
    const auto bound = entropy::extractor_epsilon_log2(static_cast<double>(l), static_cast<double>(k),
                                                       cfg.number("s"), cfg.number("sprime"));

    CsvTable t({"quantity", "value"});
    add_metadata(t, cfg);
    if (!bound.has_margin) t.add_comment("warning: no security margin (l s < k s')");
    if (m.rank() < k)
        t.add_comment("warning: matrix rank " + std::to_string(m.rank()) + " < k; a single LFSR stream spans at most " +
                      std::to_string(degree) + " independent rows");
    t.add_row({std::string("blocks"), static_cast<I64>(blocks)});
    t.add_row({std::string("output_bits"), static_cast<I64>(output.size())});
    t.add_row({std::string("matrix_rank"), static_cast<I64>(m.rank())});
    t.add_row({std::string("log2_epsilon"), bound.log2_epsilon});
    t.add_row({std::string("epsilon"), bound.epsilon ? *bound.epsilon : 0.0});
    I64 ones = 0;
    for (auto b : output) ones += b;
    t.add_row({std::string("output_ones_fraction"),
               output.empty() ? 0.0 : static_cast<double>(ones) / static_cast<double>(output.size())});
    if (cfg.has("bits-out")) {
        auto f = open_side_file(cfg.text("bits-out"));
        for (std::size_t i = 0; i < output.size(); ++i) {
            f << static_cast<char>('0' + output[i]);
            if ((i + 1) % 64 == 0) f << '\n';
        }
        if (output.size() % 64) f << '\n';
    }
    return t;
}

using Handler = CsvTable (*)(const RunConfig&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"mls", run_mls},
        {"dsss roundtrip", run_dsss_roundtrip},
        {"dsss identify", run_dsss_identify},
        {"noise psd", run_noise_psd},
        {"noise dos", run_noise_dos},
        {"noise sim", run_noise_sim},
        {"noise colored", run_noise_colored},
        {"qkd bb84", run_qkd_bb84},
        {"qkd bbm92", run_qkd_bbm92},
        {"qkd curves", run_qkd_curves},
        {"qkd rotate", run_qkd_rotate},
        {"entropy dist", run_entropy_dist},
        {"entropy poisson", run_entropy_poisson},
        {"entropy extract", run_entropy_extract},
    };
    return h;
}

}  // namespace

const std::vector<SubcommandSpec>& subcommands() { return kSubcommands; }

const std::vector<OperationCoverage>& operation_coverage() { return kCoverage; }

void dispatch(const RunConfig& cfg, std::ostream& out) {
    const auto it = handlers().find(cfg.subcommand);
    if (it == handlers().end()) throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
    it->second(cfg).write(out);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spread-spectrum, thermal-noise, QKD and randomness-extraction toolkit", "qsc"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::uint64_t seed = 1;
    std::string out_path, config_path;
    unsigned jobs = 1;
    app.add_option("--seed", seed, "64-bit root seed")->capture_default_str();
    app.add_option("--out", out_path, "output CSV path (default: stdout)");
    app.add_option("--config", config_path, "key = value parameter file; flags override it");
    app.add_option("--jobs", jobs, "worker threads for Monte-Carlo trials")
        ->capture_default_str()
        ->check(CLI::Range(1u, 256u));

    struct Leaf {
        const SubcommandSpec* spec;
        CLI::App* app;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<std::unique_ptr<Leaf>> leaves;
    std::map<std::string, CLI::App*> groups;
    for (const auto& spec : kSubcommands) {
        const auto parts = split_path(spec.path);
        CLI::App* parent = &app;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            auto& g = groups[parts[i]];
            if (!g) {
                g = parent->add_subcommand(parts[i], parts[i] + " pipelines");
                g->fallthrough();
                g->require_subcommand(1);
            }
            parent = g;
        }
        auto leaf = std::make_unique<Leaf>();
        leaf->spec = &spec;
        leaf->app = parent->add_subcommand(parts.back(), spec.description);
        leaf->app->fallthrough();
        for (const auto& opt : spec.options) {
            std::string& slot = leaf->values[opt.name];
            slot = opt.default_value;
            auto* o = leaf->app->add_option("--" + opt.name, slot, opt.help);
            if (!opt.default_value.empty()) o->capture_default_str();
            leaf->options[opt.name] = o;
        }
        leaves.push_back(std::move(leaf));
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Leaf* active = nullptr;
    for (const auto& l : leaves)
        if (l->app->parsed()) active = l.get();
    if (!active) {
        err << "error: no subcommand given\n" << app.help();
        return 2;
    }

    RunConfig cfg;
    cfg.subcommand = active->spec->path;
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.output = out_path;
    for (const auto& [name, value] : active->values) {
        const bool given = active->options.at(name)->count() > 0;
        if (given || !value.empty()) cfg.parameters[name] = value;
    }

    try {
        if (!config_path.empty()) {
            for (const auto& [key, value] : load_config(config_path)) {
                if (key == "seed") {
                    if (app.get_option("--seed")->count() == 0)
                        cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
                } else if (key == "jobs") {
                    if (app.get_option("--jobs")->count() == 0)
                        cfg.jobs = static_cast<unsigned>(parse_integer(key, value));
                } else if (key == "out") {
                    if (out_path.empty()) cfg.output = value;
                } else if (auto it = active->options.find(key); it != active->options.end()) {
                    if (it->second->count() == 0) cfg.parameters[key] = value;
                } else {
                    cfg.warnings.push_back("unknown config key '" + key + "' ignored");
                }
            }
        }
        for (const auto& w : cfg.warnings) err << "warning: " << w << '\n';

        if (cfg.output.empty()) {
            dispatch(cfg, out);
        } else {
            std::ostringstream buffer;
            dispatch(cfg, buffer);
            std::ofstream f(cfg.output, std::ios::binary);
            if (!f) throw UsageError("cannot open output file " + cfg.output.string());
            f << buffer.str();
        }
    } catch (const ContractError& e) {
        err << "error: " << e.module() << " contract violated: " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace qsc::cli
