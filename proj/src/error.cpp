#include "sightwarp/error.hpp"

namespace sightwarp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::Sequencing: return "sequencing";
    case ErrorCode::Consistency: return "consistency";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::IncompleteTrial: return "incomplete-trial";
    case ErrorCode::MalformedLog: return "malformed-log";
    case ErrorCode::Config: return "config";
    case ErrorCode::Schema: return "schema";
    }
    return "unknown";
}

} // namespace sightwarp
