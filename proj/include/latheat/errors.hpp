#pragma once

#include <stdexcept>
#include <string>

namespace latheat {

// Input array contains NaN/Inf, or a scalar argument is outside its admissible range.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two objects that must share a lattice (or a grid) do not.
struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A diffusion coefficient failed the positive-minimum gate.
struct positivity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric sanity bound was violated (quadrature symmetry, aliasing, overflow).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace latheat
