#pragma once

#include <stdexcept>
#include <string>

namespace robustmean {

// Bad argument values: out-of-range parameters, dimension mismatches,
// malformed configurations.
struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A BlockPartition that does not match the sample set it is applied to.
struct corrupt_partition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid enumeration larger than the configured point budget.
struct budget_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejected input file; `line` is 1-based, 0 when no line applies.
struct parse_error : std::runtime_error {
    parse_error(const std::string& msg, std::size_t line_no = 0)
        : std::runtime_error(msg), line(line_no) {}

    std::size_t line;
};

}  // namespace robustmean
