#pragma once

#include <map>
#include <set>
#include <string>

#include "mres/qbf.hpp"

namespace mres {

using InstrId = int;

// Three-valued merge-map output: Star means "leave the variable unset".
enum class Tri : int8_t { Star = -1, Zero = 0, One = 1 };

inline char tri_char(Tri t) { return t == Tri::Star ? '*' : (t == Tri::Zero ? '0' : '1'); }

struct Instruction {
  Var query = 0;  // 0 for leaves
  InstrId if0 = 0, if1 = 0;
  Tri value = Tri::Star;  // leaf payload
  bool is_leaf() const { return query == 0; }
  static Instruction leaf(Tri b) { return Instruction{0, 0, 0, b}; }
  static Instruction node(Var q, InstrId l0, InstrId l1) { return Instruction{q, l0, l1, Tri::Star}; }
  bool operator==(const Instruction&) const = default;
};

struct MergeMapError : Error {
  using Error::Error;
};

// Deterministic branching program for one universal variable. Instructions
// are keyed by id; each Node's branch targets have strictly smaller ids, and
// evaluation starts from the largest id (the leading instruction). Stores are
// kept normalized: every instruction is reachable from the leading one.
class MergeMap {
 public:
  MergeMap() = default;

  static MergeMap leaf(Var owner, InstrId id, Tri b);

  // New leading Node(pivot, if0 -> zero_side's program, if1 -> one_side's).
  // Stores must agree on shared ids and id must exceed every stored id.
  static MergeMap merge(Var owner, InstrId id, Var pivot,
                        const MergeMap& zero_side, const MergeMap& one_side);

  // Validates branch targets, then drops instructions unreachable from the
  // largest id. Throws MergeMapError on dangling/non-descending targets.
  static MergeMap from_instructions(Var owner, std::map<InstrId, Instruction> instrs);

  Var owner() const { return owner_; }
  bool empty() const { return instrs_.empty(); }
  InstrId leading_id() const;
  const Instruction& leading() const;
  const std::map<InstrId, Instruction>& instructions() const { return instrs_; }
  int size() const { return (int)instrs_.size(); }

  bool trivial() const;  // single Leaf(*)
  bool simple() const;   // single Leaf

  // Walks from the leading instruction. Throws MergeMapError when a queried
  // variable is unbound.
  Tri evaluate(const Assignment& a) const;

  bool operator==(const MergeMap&) const = default;

 private:
  Var owner_ = 0;
  std::map<InstrId, Instruction> instrs_;
};

// True iff the stores agree on every shared instruction id. Owners must match.
bool consistent(const MergeMap& a, const MergeMap& b);

// Sharing-aware code from a first-visit DFS (if0 before if1) with ids replaced
// by visit ranks. Two maps get equal codes iff some bijection between their
// instruction ids turns one store into the other.
std::string canonical_code(const MergeMap& m);

bool isomorphic(const MergeMap& a, const MergeMap& b);

struct MapShape {
  bool is_tree = false;       // every non-leading instruction has in-degree 1
  bool is_read_once = false;  // no root-to-leaf path queries a variable twice
  std::set<Var> queried_vars;
  int size = 0;
};

MapShape classify(const MergeMap& m);

// One merge map per universal variable.
using Strategy = std::map<Var, MergeMap>;

}  // namespace mres
