#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qsc/cli/config.hpp"

namespace qsc::cli {

inline constexpr const char* kVersion = "1.0.0";

struct OptionSpec {
    std::string name;           // without leading dashes
    std::string default_value;  // empty: optional, absent unless given
    std::string help;
};

struct SubcommandSpec {
    std::string path;  // "mls", "dsss roundtrip", ...
    std::string description;
    std::vector<OptionSpec> options;
};

/// Every runnable pipeline and its parameters.
const std::vector<SubcommandSpec>& subcommands();

struct OperationCoverage {
    std::string module;
    std::string operation;
    std::string subcommand;
};

/// Which subcommand exercises each public library operation.
const std::vector<OperationCoverage>& operation_coverage();

/// Runs one pipeline and writes its CSV to `out`. Throws ContractError on a
/// module precondition violation and UsageError on unparsable parameters.
void dispatch(const RunConfig& cfg, std::ostream& out);

/// Full command-line entry point. Returns the process exit status:
/// 0 success, 1 contract violation, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsc::cli
