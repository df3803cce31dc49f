#include "gwquant/error.hpp"

namespace gwquant {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::parse: return "parse";
        case ErrorKind::schema: return "schema";
        case ErrorKind::degenerate_signal: return "degenerate-signal";
        case ErrorKind::division_by_zero: return "division-by-zero";
        case ErrorKind::missing_baseline: return "missing-baseline";
        case ErrorKind::not_positive_definite: return "not-positive-definite";
        case ErrorKind::optimizer_failure: return "optimizer-failure";
        case ErrorKind::degenerate_denominator: return "degenerate-denominator";
        case ErrorKind::empty_grid: return "empty-grid";
        case ErrorKind::covariate_mismatch: return "covariate-mismatch";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace gwquant
