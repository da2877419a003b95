#pragma once

#include <stdexcept>
#include <string>

namespace mgsched {

// Input file does not follow the expected layout (missing column, bad hour index).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value is outside its physical or economic domain (negative load, positive elasticity).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension mismatches, numerical breakdown, instances outside the solver's envelope.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mgsched
