#pragma once

#include <stdexcept>
#include <string>

namespace supt {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible Grassmann contexts, dimension mismatches, bad parities.
struct algebra_error : error {
    using error::error;
};

// ODE integration failed to converge or blew up.
struct divergence_error : error {
    divergence_error(const std::string& msg, double last_valid_time)
        : error(msg), last_valid_time(last_valid_time) {}
    double last_valid_time;
};

// A flow generator outside the supported families.
struct unsupported_generator : error {
    using error::error;
};

// A derivative oracle was asked beyond its declared order, or outside its domain.
struct oracle_error : error {
    using error::error;
};

// Transport functor gave inconsistent answers for two representations of the
// same derivation.
struct consistency_error : error {
    using error::error;
};

// Malformed JSON input or schema violation.
struct schema_error : error {
    using error::error;
};

}  // namespace supt
