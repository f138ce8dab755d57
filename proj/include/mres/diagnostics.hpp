#pragma once

#include <optional>
#include <set>
#include <vector>

#include "mres/proof.hpp"

namespace mres {

// True iff every line feeds at most one resolution (out-degree <= 1 in the
// derivation graph).
bool is_tree_like(const Proof& proof);

// False iff two resolutions on the same pivot from `pivots` lie on a common
// source-to-sink path (one an ancestor of the other).
bool is_regular(const Proof& proof, const std::set<Var>& pivots);

// Used-clause index of a line: the group labels of the axioms in its minimal
// sub-derivation, under a per-clause grouping (0-based over the matrix;
// nullopt = clause belongs to no group). Throws when line_id is absent.
std::set<int> uci(const Proof& proof, LineId line_id,
                  const std::vector<std::optional<int>>& grouping);

struct BoundaryReport {
  std::set<LineId> s_prime;  // lines avoiding the vars with an avoiding path to the sink
  std::set<LineId> s;        // entry boundary of s_prime
};

// s_prime: lines whose clause avoids every variable in `vars` and that reach
// the sink through lines whose clauses also avoid them. s: members of s_prime
// with an antecedent outside s_prime, or with no antecedents in it.
BoundaryReport boundary_sets(const Proof& proof, const std::set<Var>& vars);

}  // namespace mres
