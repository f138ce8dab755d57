#pragma once

#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mres {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failure with 1-based position info.
struct ParseError : Error {
  ParseError(const std::string& msg, int line_no, int col_no = 0)
      : Error(msg), line(line_no), col(col_no) {}
  int line = 0;
  int col = 0;
};

using Var = int;  // 1-based

struct Lit {
  int code = 0;  // DIMACS encoding: +v positive, -v negated
  Lit() = default;
  explicit Lit(int c) : code(c) {}
  static Lit pos(Var v) { return Lit(v); }
  static Lit neg(Var v) { return Lit(-v); }
  Var var() const { return std::abs(code); }
  bool positive() const { return code > 0; }
  Lit negated() const { return Lit(-code); }
  auto operator<=>(const Lit&) const = default;
};

// Literals kept sorted by variable index; at most one literal per variable.
class Clause {
 public:
  Clause() = default;
  // Sorts and dedupes; nullopt iff some variable occurs with both signs.
  static std::optional<Clause> normalized(std::vector<Lit> lits);
  const std::vector<Lit>& lits() const { return lits_; }
  bool empty() const { return lits_.empty(); }
  size_t size() const { return lits_.size(); }
  bool contains(Lit l) const;
  bool has_var(Var v) const;
  bool operator==(const Clause&) const = default;
  std::string str() const;

 private:
  explicit Clause(std::vector<Lit> sorted) : lits_(std::move(sorted)) {}
  std::vector<Lit> lits_;
};

// Propositional resolution on clause contents. Pivot must occur positively in
// pos_side and negatively in neg_side (caller's responsibility); returns
// nullopt iff the resolvent is tautological.
std::optional<Clause> resolve_clauses(const Clause& pos_side,
                                      const Clause& neg_side, Var pivot);

enum class Quant : uint8_t { Exists, Forall };

struct Block {
  Quant quant;
  std::vector<Var> vars;  // prefix order
  bool operator==(const Block&) const = default;
};

// Quantifier prefix. Adjacent same-quantifier blocks are merged on
// construction, so block quantifiers always alternate.
class Prefix {
 public:
  Prefix() = default;
  static Prefix from_blocks(std::vector<Block> blocks);  // throws on dup vars
  const std::vector<Block>& blocks() const { return blocks_; }
  bool declared(Var v) const;
  Quant quantifier(Var v) const;  // throws if not declared
  bool existential(Var v) const { return quantifier(v) == Quant::Exists; }
  bool universal(Var v) const { return quantifier(v) == Quant::Forall; }
  int block_index(Var v) const;  // throws if not declared
  std::vector<Var> existentials() const;  // prefix order
  std::vector<Var> universals() const;    // prefix order
  Var max_var() const { return max_var_; }
  bool operator==(const Prefix& o) const { return blocks_ == o.blocks_; }

 private:
  std::vector<Block> blocks_;
  std::vector<int> block_of_;  // var -> block index + 1, 0 = undeclared
  Var max_var_ = 0;
};

// Existential variables strictly left of universal u, in prefix order.
std::vector<Var> left_of(const Prefix& prefix, Var u);

struct QBF {
  Prefix prefix;
  std::vector<Clause> matrix;
  std::vector<std::string> comments;  // parse-time comment payloads, in order
  bool operator==(const QBF& o) const {
    return prefix == o.prefix && matrix == o.matrix;
  }
};

// Partial truth assignment, indexed by variable.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(Var capacity) : vals_(capacity + 1, -1) {}
  std::optional<bool> get(Var v) const {
    if (v <= 0 || v >= (Var)vals_.size() || vals_[v] < 0) return std::nullopt;
    return vals_[v] != 0;
  }
  void set(Var v, bool b) {
    if (v >= (Var)vals_.size()) vals_.resize(v + 1, -1);
    vals_[v] = b ? 1 : 0;
  }
  void unset(Var v) {
    if (v < (Var)vals_.size()) vals_[v] = -1;
  }
  std::string str() const;  // "1=0 3=1" for bound vars, ascending

 private:
  std::vector<int8_t> vals_;
};

enum class ClauseStatus : uint8_t { Satisfied, Falsified, Undetermined };

// Falsified iff every literal is assigned and false; satisfied iff some
// literal is assigned true; undetermined otherwise. Empty clause: falsified.
ClauseStatus clause_status(const Clause& c, const Assignment& a);

// Lowest 1-based index of a falsified matrix clause, if any.
std::optional<int> matrix_falsified(const QBF& qbf, const Assignment& a);

QBF parse_qdimacs(std::istream& in);
QBF parse_qdimacs(const std::string& text);
QBF parse_qdimacs_file(const std::string& path);
void emit_qdimacs(const QBF& qbf, std::ostream& out);  // comments not emitted
std::string emit_qdimacs(const QBF& qbf);

}  // namespace mres
