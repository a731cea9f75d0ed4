#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fatoulab {

// Contract violations are thrown; numerical outcomes (zero hits, exhausted
// precision, searches that find nothing) are reported through status fields.
enum class Errc {
    invalid_argument,
    parameter_violation,
    not_enough_radii,
    truncation_too_short,
    range_too_small,
    even_exponent,
    precondition,
    config,
};

[[nodiscard]] std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::parameter_violation: return "ParameterViolation";
        case Errc::not_enough_radii: return "NotEnoughRadii";
        case Errc::truncation_too_short: return "TruncationTooShort";
        case Errc::range_too_small: return "RangeTooSmall";
        case Errc::even_exponent: return "EvenExponent";
        case Errc::precondition: return "PreconditionViolated";
        case Errc::config: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace fatoulab
