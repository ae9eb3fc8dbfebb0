#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qsc/cli/config.hpp"
#include "qsc/cli/csv.hpp"
#include "qsc/cli/dispatch.hpp"

using namespace qsc::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "qsc_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> w;
    for (std::string t; in >> t;) w.push_back(t);
    return w;
}

// First data row value of `column` in a CSV emitted by the CLI.
std::string first_value(const std::string& csv, const std::string& column) {
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        if (header.empty()) {
            header = cells;
            continue;
        }
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == column) return cells[i];
    }
    return {};
}

}  // namespace

TEST(Cli, MlsIsByteIdenticalAcrossRuns) {
    const auto a = invoke({"mls", "--order", "9", "--seed", "1"});
    const auto b = invoke({"mls", "--order", "9", "--seed", "1"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("n,chip,R,R_norm"), std::string::npos);
    EXPECT_NE(a.out.find("\n0,"), std::string::npos);
    EXPECT_NE(a.out.find(",511,1\n"), std::string::npos);
}

TEST(Cli, OutFileMatchesStdout) {
    const auto path = scratch("mls.csv");
    const auto a = invoke({"mls", "--order", "5", "--out", path.string()});
    ASSERT_EQ(a.code, 0);
    EXPECT_TRUE(a.out.empty());
    EXPECT_EQ(read_file(path), invoke({"mls", "--order", "5"}).out);
}

TEST(Cli, CurvesQberAtZero) {
    const auto r = invoke({"qkd", "curves", "--lmax", "150"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(first_value(r.out, "QBER")), 1.888e-4, 1e-7);
    EXPECT_NE(r.out.find("K_ed0.01,K_ed0.1,K_ed0.2,K_ed0.4"), std::string::npos);
    EXPECT_NE(r.out.find("L_opt(n=1)=21.7"), std::string::npos);
}

TEST(Cli, HelpOnEverySubcommandExitsZero) {
    EXPECT_EQ(invoke({"--help"}).code, 0);
    for (const auto& spec : subcommands()) {
        auto args = split_words(spec.path);
        args.push_back("--help");
        const auto r = invoke(args);
        EXPECT_EQ(r.code, 0) << spec.path;
        EXPECT_NE(r.out.find(spec.description.substr(0, 20)), std::string::npos) << spec.path;
        for (const auto& opt : spec.options) EXPECT_NE(r.out.find("--" + opt.name), std::string::npos) << opt.name;
    }
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"qkd"}).code, 2);
    EXPECT_EQ(invoke({"mls", "--bogus", "1"}).code, 2);
    EXPECT_EQ(invoke({"mls", "--order", "nine"}).code, 2);
    EXPECT_EQ(invoke({"noise", "psd", "--model", "purple"}).code, 2);
    EXPECT_THROW(dispatch(RunConfig{"no such thing", {}, 1, {}, 1, {}}, std::cout), UsageError);
}

TEST(Cli, ContractViolationsExitOneAndNameModule) {
    auto r = invoke({"mls", "--order", "0"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("prbs"), std::string::npos);
    r = invoke({"noise", "sim", "--model", "rc", "--dt", "1e-7"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("noisephys"), std::string::npos);
    EXPECT_NE(r.err.find("timestep exceeds RC/100"), std::string::npos);
    r = invoke({"qkd", "curves", "--mu", "-1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("qkd"), std::string::npos);
    r = invoke({"entropy", "extract", "--l", "10", "--k", "20"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("entropy"), std::string::npos);
    r = invoke({"dsss", "identify", "--periods", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("spread"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
    const std::string exe = QSC_CLI_PATH;
    const auto status = [&](const std::string& args) {
        const int s = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("mls --order 4"), 0);
    EXPECT_EQ(status("mls --order 99"), 1);
    EXPECT_EQ(status("nonsense"), 2);
    EXPECT_EQ(status("dsss roundtrip --help"), 0);
}

TEST(Config, EmptyFileAndFlags) {
    const auto cfg = scratch("empty.cfg");
    write_file(cfg, "");
    const auto a = invoke({"mls", "--config", cfg.string(), "--order", "6", "--seed", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, invoke({"mls", "--order", "6", "--seed", "3"}).out);
}

TEST(Config, FlagOverridesFileValue) {
    const auto cfg = scratch("order.cfg");
    write_file(cfg, "# comment\norder = 4\nseed = 2\n\n");
    const auto from_file = invoke({"mls", "--config", cfg.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(from_file.out, invoke({"mls", "--order", "4", "--seed", "2"}).out);
    const auto flag_wins = invoke({"mls", "--config", cfg.string(), "--order", "7"});
    EXPECT_EQ(flag_wins.out, invoke({"mls", "--order", "7", "--seed", "2"}).out);
    const auto seed_wins = invoke({"--seed", "9", "mls", "--config", cfg.string()});
    EXPECT_EQ(seed_wins.out, invoke({"mls", "--order", "4", "--seed", "9"}).out);
}

TEST(Config, UnknownKeyWarnsAndProceeds) {
    const auto cfg = scratch("unknown.cfg");
    write_file(cfg, "--order = 3\ncolour = blue\n");
    const auto r = invoke({"mls", "--config", cfg.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_NE(r.err.find("colour"), std::string::npos);
    EXPECT_NE(r.out.find("period=7"), std::string::npos);
}

TEST(Config, MalformedLineReportsLineNumber) {
    const auto cfg = scratch("bad.cfg");
    write_file(cfg, "order = 3\n\nthis line has no equals\n");
    const auto r = invoke({"mls", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(":3:"), std::string::npos);
    EXPECT_THROW(load_config(cfg), UsageError);
    EXPECT_EQ(invoke({"mls", "--config", scratch("missing.cfg").string()}).code, 2);
}

TEST(Config, NumericParsing) {
    EXPECT_EQ(parse_integer("n", "2e6"), 2000000);
    EXPECT_EQ(parse_integer("n", " 42 "), 42);
    EXPECT_THROW(parse_integer("n", "2.5"), UsageError);
    EXPECT_THROW(parse_number("x", "1.0abc"), UsageError);
    EXPECT_EQ(parse_number_list("x", "0.01,0.1"), (std::vector<double>{0.01, 0.1}));
    EXPECT_THROW(parse_number_list("x", "0.01,,0.1"), UsageError);
}

TEST(Csv, FormattingAndShape) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(1.888e-4), "0.00018880000000000001");
    EXPECT_EQ(format_cell(Cell{std::int64_t{-3}}), "-3");
    CsvTable t({"a", "b"});
    t.add_comment("hello");
    t.add_row({std::int64_t{1}, 2.5});
    EXPECT_THROW(t.add_row({std::int64_t{1}}), std::invalid_argument);
    std::ostringstream os;
    t.write(os);
    EXPECT_EQ(os.str(), "# hello\na,b\n1,2.5\n");
}

TEST(Cli, JobsDoNotChangeOutput) {
    const std::vector<std::string> base = {"dsss", "roundtrip", "--order", "3", "--trials", "8", "--bits", "200", "--sigma", "3"};
    auto one = base, four = base;
    one.insert(one.end(), {"--jobs", "1"});
    four.insert(four.end(), {"--jobs", "4"});
    const auto a = invoke(one), b = invoke(four);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(first_value(a.out, "ber"), "0");
}

TEST(Cli, SeedChangesStochasticOutput) {
    const auto a = invoke({"--seed", "1", "qkd", "bb84", "--n", "1000"});
    const auto b = invoke({"--seed", "2", "qkd", "bb84", "--n", "1000"});
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(a.out, b.out);
}

TEST(Coverage, EveryPublicOperationIsReachable) {
    const std::map<std::string, std::vector<std::string>> api = {
        {"prbs", {"lfsr_step", "generate_prbs", "mls_from_prbs", "circular_autocorrelation", "polynomial_table",
                  "crest_factor"}},
        {"spread", {"spread", "despread", "convolve", "identify_impulse_response", "add_awgn"}},
        {"noisephys",
         {"bose_einstein", "psd_nyquist_quantum", "psd_white_classical", "variance_quantum_total",
          "variance_band_limited", "simulate_rc", "psd_rc_lorentzian", "simulate_brownian",
          "fdt_gamma_from_autocorrelation", "qfdt_current_psd", "psd_transmission_line", "mean_mode_energy",
          "colored_noise", "periodogram", "density_of_states"}},
        {"qkd", {"qubit_rotate", "bb84_session", "bbm92_measure", "attenuation", "optimal_distance", "qber",
                 "binary_entropy", "key_rate"}},
        {"entropy", {"shannon_entropy", "renyi_entropy", "min_entropy", "poisson_entropies", "extract",
                     "generate_extractor_matrix", "extractor_epsilon_log2", "hierarchy_check"}},
    };
    std::set<std::string> paths;
    for (const auto& s : subcommands()) paths.insert(s.path);
    std::set<std::pair<std::string, std::string>> covered;
    for (const auto& c : operation_coverage()) {
        EXPECT_TRUE(paths.count(c.subcommand)) << c.subcommand;
        covered.insert({c.module, c.operation});
    }
    for (const auto& [module, ops] : api)
        for (const auto& op : ops) EXPECT_TRUE(covered.count({module, op})) << module << "::" << op;
}

TEST(Coverage, EverySubcommandRunsWithDefaults) {
    const auto probs = scratch("probs.txt");
    write_file(probs, "0.5,0.25\n0.125\n0.125\n");
    for (const auto& spec : subcommands()) {
        auto args = split_words(spec.path);
        if (spec.path == "entropy dist") args.insert(args.end(), {"--probs", probs.string()});
        if (spec.path == "noise sim") args.insert(args.end(), {"--steps", "5000"});
        if (spec.path == "noise colored") args.insert(args.end(), {"--len", "1024"});
        if (spec.path == "qkd bb84" || spec.path == "qkd bbm92") args.insert(args.end(), {"--n", "2000"});
        const auto r = invoke(args);
        EXPECT_EQ(r.code, 0) << spec.path << ": " << r.err;
        EXPECT_NE(r.out.find("# command: " + spec.path), std::string::npos);
    }
}
