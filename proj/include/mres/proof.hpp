#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mres/merge_map.hpp"
#include "mres/qbf.hpp"

namespace mres {

using LineId = int;

enum class Choice : uint8_t { SelectLeft, SelectRight, Merge };

inline char choice_char(Choice c) {
  return c == Choice::SelectLeft ? 'L' : (c == Choice::SelectRight ? 'R' : 'M');
}

struct AxiomJust {
  int clause_index = 0;  // 1-based matrix index
  bool operator==(const AxiomJust&) const = default;
};

struct ResolutionJust {
  LineId left = 0;   // antecedent holding the pivot positively
  LineId right = 0;  // antecedent holding the pivot negatively
  Var pivot = 0;
  // Per-universal choices. Built proofs carry one entry per universal;
  // parsed proofs may carry fewer (strict checking falls back to inference
  // for the missing ones).
  std::map<Var, Choice> choices;
  bool operator==(const ResolutionJust&) const = default;
};

using Justification = std::variant<AxiomJust, ResolutionJust>;

struct ProofLine {
  LineId id = 0;
  Justification just;
  // Clause and maps are derived content: present on lines produced by the
  // rule functions or filled in by check_proof; absent (derived == false) on
  // freshly parsed lines.
  Clause clause;
  std::map<Var, MergeMap> maps;
  bool derived = false;

  bool is_axiom() const { return std::holds_alternative<AxiomJust>(just); }
  const ResolutionJust& resolution() const { return std::get<ResolutionJust>(just); }
  const AxiomJust& axiom() const { return std::get<AxiomJust>(just); }
};

struct Proof {
  std::vector<ProofLine> lines;  // ids strictly increasing
  bool checked = false;          // set by a fully successful check_proof

  const ProofLine& sink() const;
  const ProofLine* find(LineId id) const;
  std::optional<size_t> index_of(LineId id) const;
};

enum class CheckError : uint8_t {
  PivotMissing,
  TautologicalResolvent,
  MergeBlocked,
  IsomorphismFailure,
  InconsistentStores,
  PivotNotExistential,
  NonEmptySink,
  BadAxiomIndex,
  UniversalInClause,
  DanglingReference,
  ForwardReference,
  IdOrder,
  ClauseMismatch,
  MapMismatch,
  MissingMap,
  BadChoice,
  EmptyProof,
  SoundnessViolation,
};

std::string_view check_error_name(CheckError e);

struct CheckFailure {
  LineId line = 0;
  CheckError kind = CheckError::EmptyProof;
  std::string message;
};

struct CheckStats {
  int line_count = 0;
  int axiom_count = 0;
  std::map<Var, int> resolutions_by_pivot;
};

struct CheckReport {
  std::vector<CheckFailure> failures;
  CheckStats stats;
  bool ok() const { return failures.empty(); }
};

enum class CheckMode : uint8_t { InferChoices, StrictChoices };

struct RuleError {
  CheckError kind = CheckError::EmptyProof;
  std::string message;
};
using RuleResult = std::variant<ProofLine, RuleError>;

// Axiom download of matrix clause clause_index: the line clause keeps the
// existential literals; each universal u gets a single leaf with the value u
// must take to falsify the clause (Star when u does not occur), stored at
// instruction id `id`.
RuleResult axiom_line(const QBF& qbf, int clause_index, LineId id);

// Resolution over an existential pivot with per-universal merge-map choices.
// choices == nullptr infers every choice (both trivial -> fresh trivial leaf
// kept as SelectLeft; one trivial -> select the other side; isomorphic ->
// SelectLeft; pivot left of u -> Merge; otherwise blocked). The returned
// line's justification records the complete choice map actually applied.
RuleResult resolve_lines(const QBF& qbf, const ProofLine& left, const ProofLine& right,
                         Var pivot, const std::map<Var, Choice>* choices, LineId new_id);

// Re-derives every line from its justification and compares against any
// stored content (clause equality, per-universal merge-map isomorphism);
// validates id order, references, and that the sink clause is empty. Fills in
// derived content on success. All violations are reported, never thrown.
CheckReport check_proof(const QBF& qbf, Proof& proof,
                        CheckMode mode = CheckMode::InferChoices);

// Sink maps of a checked refutation.
Strategy extract_strategy(const Proof& proof);

struct VerifyResult {
  bool winning = false;
  std::optional<Assignment> witness;  // first existential assignment that escapes
};

// Exhaustively plays every total existential assignment against the strategy
// (Star leaves the universal unset) and demands a falsified matrix clause
// each time. Throws Error when the existential count exceeds cap.
VerifyResult verify_countermodel(const QBF& qbf, const Strategy& strategy, int cap = 24);

// For every line L and every total existential assignment falsifying L's
// clause, the line's maps must direct the universals onto some matrix clause
// used as an axiom in L's sub-derivation. Violations come back as failures.
CheckReport check_soundness_invariant(const QBF& qbf, const Proof& proof, int cap = 20);

// Sorted 1-based matrix indices of the axioms in each line's minimal
// sub-derivation, per line position. Antecedents must resolve to earlier
// lines (true for any proof that parses or checks).
std::vector<std::vector<int>> axiom_leaves_per_line(const Proof& proof);

// The 4n+1-line refutation of equality_n whose extracted strategy is
// u_i = x_i. Pair with gen_family(Family::Equality, n).
Proof generate_equality_refutation(int n);

struct SearchCaps {
  int max_lines = 10000;
  int max_clause_width = 32;
  int max_map_size = 64;
};

// Deterministic breadth-first saturation: all axioms, then every legal
// resolution of existing lines (inferred choices), deduplicated by clause +
// per-universal canonical codes. Returns the renumbered minimal
// sub-derivation of the first empty clause, or nullopt when the closure (or a
// cap) is exhausted first.
std::optional<Proof> saturation_search(const QBF& qbf, const SearchCaps& caps);

// --- text formats ---

struct ProofParseError : ParseError {
  ProofParseError(const std::string& msg, int line_no, int col_no = 0,
                  std::optional<CheckError> k = std::nullopt)
      : ParseError(msg, line_no, col_no), kind(k) {}
  std::optional<CheckError> kind;
};

Proof parse_proof(std::istream& in);
Proof parse_proof(const std::string& text);
void emit_proof(const Proof& proof, std::ostream& out);
std::string emit_proof(const Proof& proof);

Strategy parse_strategy(std::istream& in);
Strategy parse_strategy(const std::string& text);
void emit_strategy(const Strategy& strategy, std::ostream& out);
std::string emit_strategy(const Strategy& strategy);

}  // namespace mres
