#pragma once

#include <stdexcept>
#include <string>

namespace catsim {

// Mode-count mismatch between two states.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Norm below the singular tolerance; the state cannot be normalized.
// In a heralding context this marks an impossible detection branch.
struct degenerate_state_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Out-of-range or duplicate mode index handed to a gate or detector.
struct wiring_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Violated call contract (e.g. unnormalized state where a normalized
// one is required).
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Class heralding requires every measured mode's labels to sit on a
// {+g, -g, 0} grid; otherwise the conditional state depends on the
// exact photon count and the class collapse is ill-defined.
struct heterogeneous_class_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A heralded state expected to factor across a mode split does not.
struct factorization_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No local correction is defined for this detection pattern.
struct no_correction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fock-space truncation too small for the requested state or gate.
struct cutoff_error : std::runtime_error {
    cutoff_error(const std::string& what, int suggested)
        : std::runtime_error(what), suggested_cutoff(suggested) {}
    int suggested_cutoff;
};

}  // namespace catsim
