#pragma once

#include <stdexcept>
#include <string>

namespace qsc {

/// Raised when an operation's precondition is violated. `module()` names the
/// module whose contract was broken so the CLI can report it.
class ContractError : public std::invalid_argument {
public:
    ContractError(std::string module, const std::string& what)
        : std::invalid_argument(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

namespace detail {
[[noreturn]] inline void fail(const char* module, const std::string& what) {
    throw ContractError(module, what);
}
}  // namespace detail

}  // namespace qsc
