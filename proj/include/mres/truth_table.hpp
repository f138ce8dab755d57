#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mres/merge_map.hpp"
#include "mres/qbf.hpp"

namespace mres {

// Total Boolean function over an ordered variable list. Entry i holds the
// value at the assignment whose bit j (LSB first) sets vars()[j].
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(std::vector<Var> vars);  // zero-filled; at most 24 vars
  const std::vector<Var>& vars() const { return vars_; }
  int arity() const { return (int)vars_.size(); }
  uint32_t entries() const { return 1u << vars_.size(); }
  bool bit(uint32_t idx) const { return (words_[idx >> 6] >> (idx & 63)) & 1; }
  void set_bit(uint32_t idx, bool b) {
    uint64_t m = 1ull << (idx & 63);
    if (b) words_[idx >> 6] |= m;
    else words_[idx >> 6] &= ~m;
  }
  std::string bit_string() const;  // entries in index order
  bool operator==(const TruthTable&) const = default;

 private:
  std::vector<Var> vars_;
  std::vector<uint64_t> words_;
};

// Parity of vars 1..n (value 1 iff an odd number of inputs is set).
TruthTable parity_table(int n);

// Totalizes a merge map over an explicit domain ordering. Throws when the map
// has a Star outcome on some input, queries outside the domain, or the domain
// exceeds 24 variables.
TruthTable table_from_map(const MergeMap& m, const std::vector<Var>& domain);

// Binary decision tree with 0/1 leaves.
struct DecisionTree {
  struct Node {
    Var query = 0;        // 0 for leaves
    int if0 = -1, if1 = -1;
    int leaf = -1;        // 0/1 for leaves
  };
  std::vector<Node> nodes;
  int root = -1;

  int leaf_count() const;
  // Fewest queries on any root-to-leaf path.
  int min_path_queries() const;
  // True iff some root-to-leaf path queries a variable twice.
  bool repeats_a_variable() const;
  // Value on the table-index assignment, resolving queries via `vars`.
  bool evaluate(uint32_t idx, const std::vector<Var>& vars) const;
  // True iff the tree computes f on every assignment.
  bool computes(const TruthTable& f) const;
};

struct DtResult {
  int size = 0;  // leaf count of a smallest tree
  DecisionTree witness;
};

// Exact minimal decision-tree size (in leaves) by memoized restriction
// search. Arity capped at 12.
DtResult min_dt_size(const TruthTable& f);

// Text format: "t <m> <var...>" header, then 2^m characters of 0/1 (most
// whitespace is ignored) in index order.
TruthTable parse_truth_table(std::istream& in);
std::vector<TruthTable> parse_truth_tables(std::istream& in);  // until EOF
void emit_truth_table(const TruthTable& t, std::ostream& out);

}  // namespace mres
