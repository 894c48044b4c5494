#pragma once

#include <stdexcept>
#include <string>

namespace kdvbbm {

// Bad user-supplied configuration or malformed input file.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural violation of an operation's preconditions (mismatched
// truncation orders, non-Hermitian coefficient data, bad parameters).
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure modes surfaced to callers by name.
struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDamping : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularCluster : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoContraction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnergyLedgerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kdvbbm
