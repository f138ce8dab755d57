#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mres/merge_map.hpp"
#include "mres/qbf.hpp"
#include "mres/truth_table.hpp"

namespace mres {

// One universal's response function, totalized over the existentials to its
// left (table vars = left_of(prefix, owner), prefix order).
struct UniversalTable {
  Var owner = 0;
  TruthTable table;
};

// Tables for every universal, in prefix order.
using TableStrategy = std::vector<UniversalTable>;

struct EnumResult {
  uint64_t candidates = 0;               // size of the searched space
  std::vector<TableStrategy> winners;    // enumeration order
  std::vector<uint64_t> winner_indices;  // candidate index of each winner
};

// Exhaustively enumerates every assignment of one truth table per universal
// and keeps those under which all existential assignments falsify the matrix.
//
// The candidate space is the product over universals u of 2^(2^|left_of(u)|)
// tables; it must not exceed `cap`. Candidate k is decoded chunk-wise with
// the first universal's table in the most significant position; within one
// table, bit t (LSB = t = 0) is the output on table index t. Winners are
// reported in ascending candidate order regardless of `threads` (<= 0 picks
// the hardware parallelism).
EnumResult enumerate_countermodels(const QBF& qbf, uint64_t cap = 1ull << 24,
                                   int threads = 1);

// Reference check used to cross-validate the enumeration: plays the tables
// against every existential assignment and requires a falsified matrix
// clause each time.
bool table_strategy_wins(const QBF& qbf, const TableStrategy& strategy);

// First failure of the alternating-assignment forcing property, if any: for
// each i in [n] and each a in {0,1}^i, setting d_j = a_j and e_j = 1 - a_j
// for j <= i must make the response for the i-th universal equal a_i.
// Variable layout (d_j, e_j, x_j, f_j) = (3j-2, 3j-1, 3j, 3n+j).
struct AntisymViolation {
  int i = 0;              // 1-based universal position
  uint32_t prefix = 0;    // bit j-1 = a_j
  char got = '?';         // '0', '1', or '*' for an unset response
};

std::optional<AntisymViolation> antisym_violation(const TableStrategy& s, int n);
std::optional<AntisymViolation> antisym_violation(const Strategy& s, int n);

inline bool check_antisymmetric_property(const TableStrategy& s, int n) {
  return !antisym_violation(s, n).has_value();
}
inline bool check_antisymmetric_property(const Strategy& s, int n) {
  return !antisym_violation(s, n).has_value();
}

}  // namespace mres
