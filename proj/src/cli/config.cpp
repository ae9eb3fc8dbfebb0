#include "qsc/cli/config.hpp"

#include <charconv>
#include <fstream>

namespace qsc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

const std::string& RunConfig::text(const std::string& key) const {
    const auto it = parameters.find(key);
    if (it == parameters.end()) throw UsageError("missing parameter --" + key);
    return it->second;
}

double RunConfig::number(const std::string& key) const { return parse_number(key, text(key)); }

std::int64_t RunConfig::integer(const std::string& key) const {
    return parse_integer(key, text(key));
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
    return parse_number_list(key, text(key));
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw UsageError("--" + key + ": expected a number, got '" + text + "'");
    return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        // accept integral values written in floating notation, e.g. 2e6
        const double d = parse_number(key, text);
        if (d != static_cast<double>(static_cast<std::int64_t>(d)))
            throw UsageError("--" + key + ": expected an integer, got '" + text + "'");
        return static_cast<std::int64_t>(d);
    }
    return v;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_number(key, piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    std::map<std::string, std::string> values;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(lineno) +
                             ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty() || key.find_first_of(" \t") != std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": malformed key");
        values[key] = value;
    }
    return values;
}

}  // namespace qsc::cli
