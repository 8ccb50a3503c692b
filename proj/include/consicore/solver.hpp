#pragma once

// Bounded constraint solver. Integers are searched in [-B, B] by increasing
// total magnitude; strings by structural candidates plus short exhaustive
// enumeration. Anything outside that fragment is reported as Unknown.

#include "consicore/symbolic.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace consicore::sym {

enum class Nonlinear { Reject, Enumerate };

struct SolverConfig {
    std::int64_t int_bound = 1000;
    int str_maxlen = 16;
    std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789' =-";
    Nonlinear nonlinear = Nonlinear::Reject;
    /// Upper limit on search steps for one solve; exceeding it yields Unknown.
    std::uint64_t max_effort = 2'000'000;
};

/// Throws std::invalid_argument for negative bounds or an empty alphabet.
void validate(const SolverConfig &cfg);

enum class SolveStatus { Sat, Unsat, Unknown };

std::string_view to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    Model model;          // Sat only
    bool bounded = false; // Unsat established by exhausting the search bounds
    std::string reason;   // why the result is Unknown or Unsat
};

class SortError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws SortError for ill-sorted constraints. A Sat model covers every
/// variable in the input and satisfies every constraint.
SolveResult solve(const std::vector<Constraint> &constraints, const SolverConfig &cfg = {});

/// Reason an individual constraint lies outside the solvable fragment, or "".
std::string unsupported_reason(const Constraint &c, const SolverConfig &cfg);

} // namespace consicore::sym
