#pragma once

#include <string>
#include <string_view>

#include "lbm/normal_form.hpp"

namespace lbm {

/// Reads DIMACS CNF ("p cnf V C") or WCNF ("p wcnf V C TOP"). Variable i maps
/// to index i-1; a WCNF clause's leading weight is stored in Cnf::weights.
/// Throws ParseError on a malformed header, out-of-range literal, missing
/// terminating 0, clause-count mismatch, or non-positive weight.
Cnf parse_dimacs(std::string_view text);

/// Inverse of parse_dimacs: weighted CNFs are written as WCNF with
/// TOP = total weight + 1.
std::string render_dimacs(const Cnf& cnf);

}  // namespace lbm
