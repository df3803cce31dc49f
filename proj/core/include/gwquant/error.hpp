#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gwquant {

/// Coarse error category, stable across releases so that tools can map
/// failures onto exit codes and machine-parsable messages.
enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    parse,
    schema,
    degenerate_signal,
    division_by_zero,
    missing_baseline,
    not_positive_definite,
    optimizer_failure,
    degenerate_denominator,
    empty_grid,
    covariate_mismatch,
    io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace gwquant
