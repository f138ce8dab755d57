#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mres/proof.hpp"

namespace mres {

namespace {

std::vector<std::pair<std::string, int>> tokens_of(const std::string& line) {
  std::vector<std::pair<std::string, int>> toks;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace((unsigned char)line[i])) ++i;
    if (i > start) toks.emplace_back(line.substr(start, i - start), (int)start + 1);
  }
  return toks;
}

long int_tok(const std::pair<std::string, int>& tok, int line_no) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok.first, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != tok.first.size())
    throw ProofParseError("expected integer, got '" + tok.first + "'", line_no, tok.second);
  return v;
}

}  // namespace

Proof parse_proof(std::istream& in) {
  Proof proof;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  struct Ref {  // for forward/dangling classification after the full read
    size_t record;
    LineId target;
    int line_no;
    int col;
  };
  std::vector<Ref> refs;
  std::vector<int> record_lines;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0].first;
    if (head == "c") continue;
    if (!have_header) {
      if (head != "p" || toks.size() != 2 || toks[1].first != "mres")
        throw ProofParseError("expected 'p mres' header", line_no, toks[0].second);
      have_header = true;
      continue;
    }
    if (head == "a") {
      if (toks.size() != 3)
        throw ProofParseError("axiom record needs '<id> <clauseIndex>'", line_no, toks[0].second);
      ProofLine pl;
      pl.id = (LineId)int_tok(toks[1], line_no);
      long ci = int_tok(toks[2], line_no);
      if (ci < 1)
        throw ProofParseError("clause index must be positive", line_no, toks[2].second);
      pl.just = AxiomJust{(int)ci};
      record_lines.push_back(line_no);
      proof.lines.push_back(std::move(pl));
    } else if (head == "r") {
      if (toks.size() < 5)
        throw ProofParseError("resolution record needs '<id> <left> <right> <pivot>'",
                              line_no, toks[0].second);
      ProofLine pl;
      pl.id = (LineId)int_tok(toks[1], line_no);
      ResolutionJust res;
      res.left = (LineId)int_tok(toks[2], line_no);
      res.right = (LineId)int_tok(toks[3], line_no);
      long pv = int_tok(toks[4], line_no);
      if (pv < 1) throw ProofParseError("pivot must be positive", line_no, toks[4].second);
      res.pivot = (Var)pv;
      for (size_t i = 5; i < toks.size(); ++i) {
        const std::string& t = toks[i].first;
        size_t eq = t.find('=');
        if (t.size() < 4 || t[0] != 'u' || eq == std::string::npos || eq + 2 != t.size())
          throw ProofParseError("malformed choice token '" + t + "', expected u<var>=<L|R|M>",
                                line_no, toks[i].second);
        long uv = 0;
        try {
          size_t pos = 0;
          uv = std::stol(t.substr(1, eq - 1), &pos);
          if (pos != eq - 1) uv = 0;
        } catch (const std::exception&) {
          uv = 0;
        }
        if (uv < 1)
          throw ProofParseError("malformed choice token '" + t + "'", line_no, toks[i].second);
        Choice ch;
        switch (t[eq + 1]) {
          case 'L': ch = Choice::SelectLeft; break;
          case 'R': ch = Choice::SelectRight; break;
          case 'M': ch = Choice::Merge; break;
          default:
            throw ProofParseError("choice must be L, R or M in '" + t + "'", line_no,
                                  toks[i].second);
        }
        if (!res.choices.emplace((Var)uv, ch).second)
          throw ProofParseError("duplicate choice for variable " + std::to_string(uv),
                                line_no, toks[i].second);
      }
      refs.push_back({proof.lines.size(), res.left, line_no, toks[2].second});
      refs.push_back({proof.lines.size(), res.right, line_no, toks[3].second});
      pl.just = std::move(res);
      record_lines.push_back(line_no);
      proof.lines.push_back(std::move(pl));
    } else {
      throw ProofParseError("unknown record '" + head + "'", line_no, toks[0].second);
    }
  }
  if (!have_header) throw ProofParseError("missing 'p mres' header", line_no ? line_no : 1);
  if (proof.lines.empty())
    throw ProofParseError("proof has no records", line_no ? line_no : 1, 0,
                          CheckError::EmptyProof);
  for (size_t k = 1; k < proof.lines.size(); ++k)
    if (proof.lines[k].id <= proof.lines[k - 1].id)
      throw ProofParseError("line ids must be strictly increasing (line id " +
                                std::to_string(proof.lines[k].id) + ")",
                            record_lines[k], 0, CheckError::IdOrder);
  for (const Ref& r : refs) {
    // the record's antecedent must name a strictly earlier line
    bool earlier = false, later = false;
    for (size_t k = 0; k < proof.lines.size(); ++k) {
      if (proof.lines[k].id != r.target) continue;
      (k < r.record ? earlier : later) = true;
      break;
    }
    if (earlier) continue;
    if (later)
      throw ProofParseError("antecedent " + std::to_string(r.target) +
                                " references a future line",
                            r.line_no, r.col, CheckError::ForwardReference);
    throw ProofParseError("antecedent " + std::to_string(r.target) + " does not exist",
                          r.line_no, r.col, CheckError::DanglingReference);
  }
  return proof;
}

Proof parse_proof(const std::string& text) {
  std::istringstream in(text);
  return parse_proof(in);
}

void emit_proof(const Proof& proof, std::ostream& out) {
  out << "p mres\n";
  for (const ProofLine& l : proof.lines) {
    if (l.is_axiom()) {
      out << "a " << l.id << ' ' << l.axiom().clause_index << '\n';
    } else {
      const ResolutionJust& res = l.resolution();
      out << "r " << l.id << ' ' << res.left << ' ' << res.right << ' ' << res.pivot;
      for (const auto& [u, ch] : res.choices)
        out << " u" << u << '=' << choice_char(ch);
      out << '\n';
    }
  }
}

std::string emit_proof(const Proof& proof) {
  std::ostringstream out;
  emit_proof(proof, out);
  return out.str();
}

Strategy parse_strategy(std::istream& in) {
  Strategy strategy;
  std::string line;
  int line_no = 0;
  std::optional<Var> owner;
  std::map<InstrId, Instruction> instrs;
  int block_start = 0;

  auto close_block = [&]() {
    if (instrs.empty())
      throw ParseError("strategy block for variable " + std::to_string(*owner) +
                           " has no instructions",
                       block_start);
    try {
      strategy.emplace(*owner, MergeMap::from_instructions(*owner, std::move(instrs)));
    } catch (const MergeMapError& e) {
      throw ParseError(e.what(), block_start);
    }
    instrs.clear();
    owner.reset();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0].first;
    if (head == "c") continue;
    if (head == "s") {
      if (owner) throw ParseError("unterminated strategy block", line_no, toks[0].second);
      if (toks.size() != 2) throw ParseError("'s' needs one variable", line_no, toks[0].second);
      long v = int_tok(toks[1], line_no);
      if (v < 1) throw ParseError("owner must be positive", line_no, toks[1].second);
      if (strategy.count((Var)v))
        throw ParseError("duplicate strategy block for variable " + std::to_string(v),
                         line_no, toks[1].second);
      owner = (Var)v;
      block_start = line_no;
      continue;
    }
    if (!owner)
      throw ParseError("record outside a strategy block", line_no, toks[0].second);
    if (head == "e") {
      if (toks.size() != 1) throw ParseError("'e' takes no arguments", line_no, toks[0].second);
      close_block();
      continue;
    }
    if (head == "l") {
      if (toks.size() != 3)
        throw ParseError("leaf record needs '<id> <*|0|1>'", line_no, toks[0].second);
      long id = int_tok(toks[1], line_no);
      if (!instrs.empty() && id <= instrs.rbegin()->first)
        throw ParseError("instruction ids must ascend", line_no, toks[1].second);
      const std::string& v = toks[2].first;
      Tri b;
      if (v == "*") b = Tri::Star;
      else if (v == "0") b = Tri::Zero;
      else if (v == "1") b = Tri::One;
      else throw ParseError("leaf value must be *, 0 or 1", line_no, toks[2].second);
      instrs[(InstrId)id] = Instruction::leaf(b);
      continue;
    }
    if (head == "n") {
      if (toks.size() != 5)
        throw ParseError("node record needs '<id> <queryVar> <id0> <id1>'", line_no,
                         toks[0].second);
      long id = int_tok(toks[1], line_no);
      if (!instrs.empty() && id <= instrs.rbegin()->first)
        throw ParseError("instruction ids must ascend", line_no, toks[1].second);
      long q = int_tok(toks[2], line_no);
      if (q < 1) throw ParseError("query variable must be positive", line_no, toks[2].second);
      long l0 = int_tok(toks[3], line_no);
      long l1 = int_tok(toks[4], line_no);
      for (long child : {l0, l1})
        if (!instrs.count((InstrId)child))
          throw ParseError("branch target " + std::to_string(child) + " is not defined yet",
                           line_no, toks[0].second);
      instrs[(InstrId)id] = Instruction::node((Var)q, (InstrId)l0, (InstrId)l1);
      continue;
    }
    throw ParseError("unknown record '" + head + "'", line_no, toks[0].second);
  }
  if (owner) throw ParseError("unterminated strategy block", line_no ? line_no : 1);
  return strategy;
}

Strategy parse_strategy(const std::string& text) {
  std::istringstream in(text);
  return parse_strategy(in);
}

void emit_strategy(const Strategy& strategy, std::ostream& out) {
  for (const auto& [owner, mm] : strategy) {
    out << "s " << owner << '\n';
    for (const auto& [id, ins] : mm.instructions()) {
      if (ins.is_leaf())
        out << "l " << id << ' ' << tri_char(ins.value) << '\n';
      else
        out << "n " << id << ' ' << ins.query << ' ' << ins.if0 << ' ' << ins.if1 << '\n';
    }
    out << "e\n";
  }
}

std::string emit_strategy(const Strategy& strategy) {
  std::ostringstream out;
  emit_strategy(strategy, out);
  return out.str();
}

}  // namespace mres
