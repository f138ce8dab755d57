#include "mres/qbf.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mres {

std::optional<Clause> Clause::normalized(std::vector<Lit> lits) {
  for (const Lit& l : lits)
    if (l.code == 0) throw Error("literal with variable 0");
  std::sort(lits.begin(), lits.end(),
            [](Lit a, Lit b) { return a.var() < b.var() || (a.var() == b.var() && a.code < b.code); });
  std::vector<Lit> out;
  out.reserve(lits.size());
  for (const Lit& l : lits) {
    if (!out.empty() && out.back().var() == l.var()) {
      if (out.back().code != l.code) return std::nullopt;  // tautological
      continue;                                            // duplicate
    }
    out.push_back(l);
  }
  return Clause(std::move(out));
}

bool Clause::contains(Lit l) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), l.var(),
                             [](Lit a, Var v) { return a.var() < v; });
  return it != lits_.end() && it->code == l.code;
}

bool Clause::has_var(Var v) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), v,
                             [](Lit a, Var w) { return a.var() < w; });
  return it != lits_.end() && it->var() == v;
}

std::string Clause::str() const {
  std::string s = "{";
  for (size_t i = 0; i < lits_.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(lits_[i].code);
  }
  return s + "}";
}

std::optional<Clause> resolve_clauses(const Clause& pos_side,
                                      const Clause& neg_side, Var pivot) {
  std::vector<Lit> lits;
  lits.reserve(pos_side.size() + neg_side.size());
  for (Lit l : pos_side.lits())
    if (l.var() != pivot) lits.push_back(l);
  for (Lit l : neg_side.lits())
    if (l.var() != pivot) lits.push_back(l);
  return Clause::normalized(std::move(lits));
}

Prefix Prefix::from_blocks(std::vector<Block> blocks) {
  Prefix p;
  for (Block& b : blocks) {
    if (b.vars.empty()) continue;
    if (!p.blocks_.empty() && p.blocks_.back().quant == b.quant) {
      auto& back = p.blocks_.back().vars;
      back.insert(back.end(), b.vars.begin(), b.vars.end());
    } else {
      p.blocks_.push_back(std::move(b));
    }
  }
  for (size_t i = 0; i < p.blocks_.size(); ++i) {
    for (Var v : p.blocks_[i].vars) {
      if (v <= 0) throw Error("nonpositive variable in prefix");
      if (v >= (Var)p.block_of_.size()) p.block_of_.resize(v + 1, 0);
      if (p.block_of_[v] != 0)
        throw Error("variable " + std::to_string(v) + " quantified twice");
      p.block_of_[v] = (int)i + 1;
      p.max_var_ = std::max(p.max_var_, v);
    }
  }
  return p;
}

bool Prefix::declared(Var v) const {
  return v > 0 && v < (Var)block_of_.size() && block_of_[v] != 0;
}

Quant Prefix::quantifier(Var v) const {
  if (!declared(v)) throw Error("variable " + std::to_string(v) + " not in prefix");
  return blocks_[block_of_[v] - 1].quant;
}

int Prefix::block_index(Var v) const {
  if (!declared(v)) throw Error("variable " + std::to_string(v) + " not in prefix");
  return block_of_[v] - 1;
}

std::vector<Var> Prefix::existentials() const {
  std::vector<Var> out;
  for (const Block& b : blocks_)
    if (b.quant == Quant::Exists) out.insert(out.end(), b.vars.begin(), b.vars.end());
  return out;
}

std::vector<Var> Prefix::universals() const {
  std::vector<Var> out;
  for (const Block& b : blocks_)
    if (b.quant == Quant::Forall) out.insert(out.end(), b.vars.begin(), b.vars.end());
  return out;
}

std::vector<Var> left_of(const Prefix& prefix, Var u) {
  if (!prefix.universal(u)) throw Error("left_of: variable " + std::to_string(u) + " is not universal");
  int ub = prefix.block_index(u);
  std::vector<Var> out;
  for (int i = 0; i < ub; ++i) {
    const Block& b = prefix.blocks()[i];
    if (b.quant == Quant::Exists) out.insert(out.end(), b.vars.begin(), b.vars.end());
  }
  return out;
}

std::string Assignment::str() const {
  std::string s;
  for (Var v = 1; v < (Var)vals_.size(); ++v) {
    if (vals_[v] < 0) continue;
    if (!s.empty()) s += ' ';
    s += std::to_string(v) + "=" + (vals_[v] ? "1" : "0");
  }
  return s;
}

ClauseStatus clause_status(const Clause& c, const Assignment& a) {
  bool all_false = true;
  for (Lit l : c.lits()) {
    auto v = a.get(l.var());
    if (!v) {
      all_false = false;
      continue;
    }
    if (*v == l.positive()) return ClauseStatus::Satisfied;
  }
  return all_false ? ClauseStatus::Falsified : ClauseStatus::Undetermined;
}

std::optional<int> matrix_falsified(const QBF& qbf, const Assignment& a) {
  for (size_t i = 0; i < qbf.matrix.size(); ++i)
    if (clause_status(qbf.matrix[i], a) == ClauseStatus::Falsified)
      return (int)i + 1;
  return std::nullopt;
}

namespace {

// Splits a line into whitespace-separated tokens, recording 1-based columns.
struct LineTokens {
  std::vector<std::pair<std::string, int>> toks;
  void split(const std::string& line) {
    toks.clear();
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
      size_t start = i;
      while (i < line.size() && !std::isspace((unsigned char)line[i])) ++i;
      if (i > start) toks.emplace_back(line.substr(start, i - start), (int)start + 1);
    }
  }
};

long parse_int(const std::string& tok, int line_no, int col) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected integer, got '" + tok + "'", line_no, col);
  }
  if (pos != tok.size())
    throw ParseError("expected integer, got '" + tok + "'", line_no, col);
  return v;
}

}  // namespace

QBF parse_qdimacs(std::istream& in) {
  std::vector<std::string> comments;
  std::vector<Block> blocks;
  std::vector<Clause> matrix;
  std::vector<Lit> pending;  // current clause, may span lines
  long declared_vars = -1, declared_clauses = -1;
  bool in_matrix = false;
  int pending_line = 0;

  std::string line;
  LineTokens lt;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lt.split(line);
    if (lt.toks.empty()) continue;
    const std::string& head = lt.toks[0].first;
    if (head == "c") {
      // keep payload after "c " (or empty for a bare "c")
      size_t p = line.find('c');
      std::string payload = line.substr(p + 1);
      if (!payload.empty() && payload[0] == ' ') payload.erase(0, 1);
      comments.push_back(payload);
      continue;
    }
    if (head == "p") {
      if (declared_vars >= 0) throw ParseError("duplicate header", line_no, lt.toks[0].second);
      if (lt.toks.size() != 4 || lt.toks[1].first != "cnf")
        throw ParseError("malformed header, expected 'p cnf <vars> <clauses>'", line_no, lt.toks[0].second);
      declared_vars = parse_int(lt.toks[2].first, line_no, lt.toks[2].second);
      declared_clauses = parse_int(lt.toks[3].first, line_no, lt.toks[3].second);
      if (declared_vars < 0 || declared_clauses < 0)
        throw ParseError("negative header counts", line_no, lt.toks[0].second);
      continue;
    }
    if (declared_vars < 0)
      throw ParseError("content before 'p cnf' header", line_no, lt.toks[0].second);
    if (head == "e" || head == "a") {
      if (in_matrix)
        throw ParseError("quantifier line after matrix started", line_no, lt.toks[0].second);
      Block b{head == "e" ? Quant::Exists : Quant::Forall, {}};
      bool terminated = false;
      for (size_t i = 1; i < lt.toks.size(); ++i) {
        long v = parse_int(lt.toks[i].first, line_no, lt.toks[i].second);
        if (v == 0) {
          if (i + 1 != lt.toks.size())
            throw ParseError("tokens after block terminator", line_no, lt.toks[i + 1].second);
          terminated = true;
          break;
        }
        if (v < 0) throw ParseError("negative variable in prefix", line_no, lt.toks[i].second);
        if (v > declared_vars)
          throw ParseError("variable " + std::to_string(v) + " outside declared range", line_no, lt.toks[i].second);
        b.vars.push_back((Var)v);
      }
      if (!terminated) throw ParseError("quantifier line missing terminating 0", line_no, lt.toks[0].second);
      blocks.push_back(std::move(b));
      continue;
    }
    // clause tokens
    in_matrix = true;
    for (auto& [tok, col] : lt.toks) {
      long v = parse_int(tok, line_no, col);
      if (v == 0) {
        auto cl = Clause::normalized(std::move(pending));
        pending.clear();
        if (!cl) throw ParseError("tautological clause", line_no, col);
        matrix.push_back(std::move(*cl));
      } else {
        if (std::labs(v) > declared_vars)
          throw ParseError("variable " + std::to_string(std::labs(v)) + " outside declared range", line_no, col);
        if (pending.empty()) pending_line = line_no;
        pending.push_back(Lit((int)v));
      }
    }
  }
  if (declared_vars < 0) throw ParseError("missing 'p cnf' header", line_no ? line_no : 1);
  if (!pending.empty()) throw ParseError("unterminated clause", pending_line);
  if ((long)matrix.size() != declared_clauses)
    throw ParseError("clause count " + std::to_string(matrix.size()) +
                         " does not match header " + std::to_string(declared_clauses),
                     line_no ? line_no : 1);

  QBF qbf;
  try {
    qbf.prefix = Prefix::from_blocks(std::move(blocks));
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no ? line_no : 1);
  }
  for (size_t i = 0; i < matrix.size(); ++i)
    for (Lit l : matrix[i].lits())
      if (!qbf.prefix.declared(l.var()))
        throw ParseError("variable " + std::to_string(l.var()) + " in clause " +
                             std::to_string(i + 1) + " is not quantified",
                         line_no ? line_no : 1);
  qbf.matrix = std::move(matrix);
  qbf.comments = std::move(comments);
  return qbf;
}

QBF parse_qdimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_qdimacs(in);
}

QBF parse_qdimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_qdimacs(in);
}

void emit_qdimacs(const QBF& qbf, std::ostream& out) {
  out << "p cnf " << qbf.prefix.max_var() << ' ' << qbf.matrix.size() << '\n';
  for (const Block& b : qbf.prefix.blocks()) {
    out << (b.quant == Quant::Exists ? 'e' : 'a');
    for (Var v : b.vars) out << ' ' << v;
    out << " 0\n";
  }
  for (const Clause& c : qbf.matrix) {
    for (Lit l : c.lits()) out << l.code << ' ';
    out << "0\n";
  }
}

std::string emit_qdimacs(const QBF& qbf) {
  std::ostringstream out;
  emit_qdimacs(qbf, out);
  return out.str();
}

}  // namespace mres
