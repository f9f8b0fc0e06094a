#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sightwarp {

enum class ErrorCode {
    Domain,
    DegenerateInput,
    Sequencing,
    Consistency,
    Parse,
    IncompleteTrial,
    MalformedLog,
    Config,
    Schema,
};

/// Stable kebab-case name used in diagnostics and on the wire.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sightwarp
