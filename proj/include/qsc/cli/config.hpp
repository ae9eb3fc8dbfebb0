#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsc::cli {

/// Malformed command line or config file (exit status 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved invocation: which pipeline to run and its parameters as
/// text, after merging config-file values under command-line flags.
struct RunConfig {
    std::string subcommand;  // e.g. "dsss roundtrip"
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 1;
    std::filesystem::path output;  // empty: stdout
    unsigned jobs = 1;
    std::vector<std::string> warnings;

    bool has(const std::string& key) const { return parameters.count(key) != 0; }
    const std::string& text(const std::string& key) const;
    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::vector<double> number_list(const std::string& key) const;
};

/// Plain `key = value` lines; blank lines and lines starting with `#` are
/// skipped. Keys may be written with or without a leading `--`.
/// Throws UsageError naming the line number of a malformed line.
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

/// Strict numeric parsing used for parameters and config values.
double parse_number(const std::string& key, const std::string& text);
std::int64_t parse_integer(const std::string& key, const std::string& text);
std::vector<double> parse_number_list(const std::string& key, const std::string& text);

}  // namespace qsc::cli
