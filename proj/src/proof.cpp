#include "mres/proof.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "mres/families.hpp"

namespace mres {

const ProofLine& Proof::sink() const {
  if (lines.empty()) throw Error("empty proof has no sink");
  return lines.back();
}

const ProofLine* Proof::find(LineId id) const {
  auto idx = index_of(id);
  return idx ? &lines[*idx] : nullptr;
}

std::optional<size_t> Proof::index_of(LineId id) const {
  auto it = std::lower_bound(lines.begin(), lines.end(), id,
                             [](const ProofLine& l, LineId v) { return l.id < v; });
  if (it == lines.end() || it->id != id) return std::nullopt;
  return (size_t)(it - lines.begin());
}

std::string_view check_error_name(CheckError e) {
  switch (e) {
    case CheckError::PivotMissing: return "pivot-missing";
    case CheckError::TautologicalResolvent: return "tautological-resolvent";
    case CheckError::MergeBlocked: return "merge-blocked";
    case CheckError::IsomorphismFailure: return "isomorphism-failure";
    case CheckError::InconsistentStores: return "inconsistent-stores";
    case CheckError::PivotNotExistential: return "pivot-not-existential";
    case CheckError::NonEmptySink: return "non-empty-sink";
    case CheckError::BadAxiomIndex: return "bad-axiom-index";
    case CheckError::UniversalInClause: return "universal-in-clause";
    case CheckError::DanglingReference: return "dangling-reference";
    case CheckError::ForwardReference: return "forward-reference";
    case CheckError::IdOrder: return "id-order";
    case CheckError::ClauseMismatch: return "clause-mismatch";
    case CheckError::MapMismatch: return "map-mismatch";
    case CheckError::MissingMap: return "missing-map";
    case CheckError::BadChoice: return "bad-choice";
    case CheckError::EmptyProof: return "empty-proof";
    case CheckError::SoundnessViolation: return "soundness-violation";
  }
  return "?";
}

RuleResult axiom_line(const QBF& qbf, int clause_index, LineId id) {
  if (clause_index < 1 || clause_index > (int)qbf.matrix.size())
    return RuleError{CheckError::BadAxiomIndex,
                     "axiom clause index " + std::to_string(clause_index) + " out of range"};
  const Clause& c = qbf.matrix[clause_index - 1];
  std::vector<Lit> exis;
  for (Lit l : c.lits())
    if (qbf.prefix.existential(l.var())) exis.push_back(l);
  ProofLine line;
  line.id = id;
  line.just = AxiomJust{clause_index};
  line.clause = *Clause::normalized(std::move(exis));
  for (Var u : qbf.prefix.universals()) {
    // the value u must take for the downloaded clause to go false
    Tri b = Tri::Star;
    if (c.contains(Lit::neg(u))) b = Tri::One;
    else if (c.contains(Lit::pos(u))) b = Tri::Zero;
    line.maps.emplace(u, MergeMap::leaf(u, id, b));
  }
  line.derived = true;
  return line;
}

namespace {

bool precedes(const Prefix& prefix, Var x, Var u) {
  return prefix.block_index(x) < prefix.block_index(u);
}

}  // namespace

RuleResult resolve_lines(const QBF& qbf, const ProofLine& left, const ProofLine& right,
                         Var pivot, const std::map<Var, Choice>* choices, LineId new_id) {
  if (!qbf.prefix.declared(pivot) || !qbf.prefix.existential(pivot))
    return RuleError{CheckError::PivotNotExistential,
                     "pivot " + std::to_string(pivot) + " is not an existential variable"};
  if (choices)
    for (const auto& [v, ch] : *choices) {
      (void)ch;
      if (!qbf.prefix.declared(v) || !qbf.prefix.universal(v))
        return RuleError{CheckError::BadChoice,
                         "choice recorded for non-universal variable " + std::to_string(v)};
    }
  if (!left.clause.contains(Lit::pos(pivot)))
    return RuleError{CheckError::PivotMissing, "pivot " + std::to_string(pivot) +
                                                   " not positive in left clause " +
                                                   left.clause.str()};
  if (!right.clause.contains(Lit::neg(pivot)))
    return RuleError{CheckError::PivotMissing, "pivot " + std::to_string(pivot) +
                                                   " not negative in right clause " +
                                                   right.clause.str()};
  auto resolvent = resolve_clauses(left.clause, right.clause, pivot);
  if (!resolvent)
    return RuleError{CheckError::TautologicalResolvent,
                     "resolvent of " + left.clause.str() + " and " + right.clause.str() +
                         " on " + std::to_string(pivot) + " is tautological"};

  ProofLine out;
  out.id = new_id;
  out.clause = *resolvent;
  ResolutionJust just{left.id, right.id, pivot, {}};

  for (Var u : qbf.prefix.universals()) {
    auto li = left.maps.find(u);
    auto ri = right.maps.find(u);
    if (li == left.maps.end() || ri == right.maps.end())
      return RuleError{CheckError::MissingMap,
                       "antecedent lacks a merge map for universal " + std::to_string(u)};
    const MergeMap& ml = li->second;
    const MergeMap& mr = ri->second;

    Choice ch;
    bool given = false;
    if (choices) {
      auto it = choices->find(u);
      if (it != choices->end()) {
        ch = it->second;
        given = true;
      }
    }
    if (!given) {
      if (ml.trivial() && mr.trivial()) ch = Choice::SelectLeft;
      else if (mr.trivial()) ch = Choice::SelectLeft;
      else if (ml.trivial()) ch = Choice::SelectRight;
      else if (isomorphic(ml, mr)) ch = Choice::SelectLeft;
      else if (precedes(qbf.prefix, pivot, u)) ch = Choice::Merge;
      else
        return RuleError{CheckError::MergeBlocked,
                         "universal " + std::to_string(u) +
                             ": maps are non-trivial and non-isomorphic, and pivot " +
                             std::to_string(pivot) + " does not precede it"};
    }

    switch (ch) {
      case Choice::SelectLeft:
        if (!(mr.trivial() || isomorphic(ml, mr)))
          return RuleError{CheckError::IsomorphismFailure,
                           "universal " + std::to_string(u) +
                               ": left map selected but right map is neither trivial nor "
                               "isomorphic to it"};
        if (!given && ml.trivial() && mr.trivial())
          out.maps.emplace(u, MergeMap::leaf(u, new_id, Tri::Star));
        else
          out.maps.emplace(u, ml);
        break;
      case Choice::SelectRight:
        if (!(ml.trivial() || isomorphic(ml, mr)))
          return RuleError{CheckError::IsomorphismFailure,
                           "universal " + std::to_string(u) +
                               ": right map selected but left map is neither trivial nor "
                               "isomorphic to it"};
        out.maps.emplace(u, mr);
        break;
      case Choice::Merge: {
        if (ml.trivial() && mr.trivial())
          return RuleError{CheckError::MergeBlocked,
                           "universal " + std::to_string(u) +
                               ": merge of two trivial maps (selection suffices)"};
        if (!precedes(qbf.prefix, pivot, u))
          return RuleError{CheckError::MergeBlocked,
                           "universal " + std::to_string(u) + ": pivot " +
                               std::to_string(pivot) + " does not precede it"};
        if (!consistent(ml, mr))
          return RuleError{CheckError::InconsistentStores,
                           "universal " + std::to_string(u) +
                               ": antecedent stores disagree on a shared instruction id"};
        if (new_id <= std::max(ml.leading_id(), mr.leading_id()))
          return RuleError{CheckError::InconsistentStores,
                           "universal " + std::to_string(u) + ": merged instruction id " +
                               std::to_string(new_id) + " is not fresh"};
        out.maps.emplace(u, MergeMap::merge(u, new_id, pivot, ml, mr));
        break;
      }
    }
    just.choices[u] = ch;
  }
  out.just = std::move(just);
  out.derived = true;
  return out;
}

CheckReport check_proof(const QBF& qbf, Proof& proof, CheckMode mode) {
  CheckReport rep;
  proof.checked = false;
  auto fail = [&](LineId id, CheckError k, std::string msg) {
    rep.failures.push_back({id, k, std::move(msg)});
  };
  if (proof.lines.empty()) {
    fail(0, CheckError::EmptyProof, "proof has no lines");
    return rep;
  }

  rep.stats.line_count = (int)proof.lines.size();
  std::map<LineId, ProofLine*> derived_by_id;
  std::set<LineId> failed_ids;
  std::vector<Var> universals = qbf.prefix.universals();

  for (size_t k = 0; k < proof.lines.size(); ++k) {
    ProofLine& line = proof.lines[k];
    size_t failures_before = rep.failures.size();
    if (k > 0 && line.id <= proof.lines[k - 1].id)
      fail(line.id, CheckError::IdOrder,
           "line id " + std::to_string(line.id) + " does not increase");

    std::optional<ProofLine> fresh;
    if (line.is_axiom()) {
      ++rep.stats.axiom_count;
      RuleResult r = axiom_line(qbf, line.axiom().clause_index, line.id);
      if (auto* err = std::get_if<RuleError>(&r)) {
        fail(line.id, err->kind, err->message);
      } else {
        fresh = std::get<ProofLine>(std::move(r));
      }
    } else {
      const ResolutionJust& res = line.resolution();
      ++rep.stats.resolutions_by_pivot[res.pivot];
      const ProofLine* ants[2] = {nullptr, nullptr};
      LineId ids[2] = {res.left, res.right};
      bool refs_ok = true;
      for (int s = 0; s < 2; ++s) {
        auto it = derived_by_id.find(ids[s]);
        if (it != derived_by_id.end()) {
          ants[s] = it->second;
          continue;
        }
        refs_ok = false;
        if (failed_ids.count(ids[s])) continue;  // root cause already reported
        bool later = false;
        for (size_t k2 = k; k2 < proof.lines.size() && !later; ++k2)
          later = proof.lines[k2].id == ids[s];
        fail(line.id,
             later ? CheckError::ForwardReference : CheckError::DanglingReference,
             "antecedent " + std::to_string(ids[s]) +
                 (later ? " appears only later in the proof" : " does not exist"));
      }
      if (refs_ok) {
        RuleResult r = resolve_lines(qbf, *ants[0], *ants[1], res.pivot,
                                     mode == CheckMode::StrictChoices ? &res.choices : nullptr,
                                     line.id);
        if (auto* err = std::get_if<RuleError>(&r)) {
          fail(line.id, err->kind, err->message);
        } else {
          fresh = std::get<ProofLine>(std::move(r));
        }
      }
    }

    if (fresh && line.derived) {
      // the line arrived with content: hold it against the re-derivation
      for (Lit l : line.clause.lits())
        if (qbf.prefix.declared(l.var()) && qbf.prefix.universal(l.var()))
          fail(line.id, CheckError::UniversalInClause,
               "stored clause " + line.clause.str() + " contains universal variable " +
                   std::to_string(l.var()));
      if (!(line.clause == fresh->clause))
        fail(line.id, CheckError::ClauseMismatch,
             "stored clause " + line.clause.str() + " differs from derived " +
                 fresh->clause.str());
      for (Var u : universals) {
        auto it = line.maps.find(u);
        if (it == line.maps.end()) {
          fail(line.id, CheckError::MissingMap,
               "no stored merge map for universal " + std::to_string(u));
          continue;
        }
        if (!isomorphic(it->second, fresh->maps.at(u)))
          fail(line.id, CheckError::MapMismatch,
               "stored merge map for universal " + std::to_string(u) +
                   " is not isomorphic to the derived one");
      }
    }
    if (!fresh || rep.failures.size() > failures_before) {
      failed_ids.insert(line.id);
      continue;
    }
    if (!line.derived) {
      line.clause = fresh->clause;
      line.maps = fresh->maps;
      line.derived = true;
    }
    derived_by_id[line.id] = &line;
  }

  ProofLine& sink = proof.lines.back();
  if (derived_by_id.count(sink.id) && !sink.clause.empty())
    fail(sink.id, CheckError::NonEmptySink,
         "final clause " + sink.clause.str() + " is not empty");

  proof.checked = rep.ok();
  return rep;
}

Strategy extract_strategy(const Proof& proof) {
  if (!proof.checked) throw Error("extract_strategy: proof has not been checked");
  return proof.sink().maps;
}

VerifyResult verify_countermodel(const QBF& qbf, const Strategy& strategy, int cap) {
  std::vector<Var> evars = qbf.prefix.existentials();
  int m = (int)evars.size();
  if (m > cap)
    throw Error("verify_countermodel: " + std::to_string(m) +
                " existential variables exceed cap " + std::to_string(cap));
  for (const auto& [u, mm] : strategy) {
    if (!qbf.prefix.declared(u) || !qbf.prefix.universal(u))
      throw Error("strategy maps non-universal variable " + std::to_string(u));
    if (mm.owner() != u)
      throw Error("strategy map for " + std::to_string(u) + " has owner " +
                  std::to_string(mm.owner()));
    std::vector<Var> lo = left_of(qbf.prefix, u);
    std::set<Var> loset(lo.begin(), lo.end());
    for (Var q : classify(mm).queried_vars)
      if (!loset.count(q))
        throw Error("map for universal " + std::to_string(u) + " queries variable " +
                    std::to_string(q) + " that is not to its left");
  }
  Assignment a(qbf.prefix.max_var());
  uint64_t total = 1ull << m;
  for (uint64_t idx = 0; idx < total; ++idx) {
    for (int j = 0; j < m; ++j) a.set(evars[j], (idx >> j) & 1);
    for (const auto& [u, mm] : strategy) {
      Tri v = mm.evaluate(a);
      if (v == Tri::Star) a.unset(u);
      else a.set(u, v == Tri::One);
    }
    if (!matrix_falsified(qbf, a)) {
      VerifyResult r;
      r.winning = false;
      Assignment w(qbf.prefix.max_var());
      for (int j = 0; j < m; ++j) w.set(evars[j], (idx >> j) & 1);
      r.witness = std::move(w);
      return r;
    }
  }
  return {true, std::nullopt};
}

std::vector<std::vector<int>> axiom_leaves_per_line(const Proof& proof) {
  std::map<LineId, size_t> pos;
  for (size_t k = 0; k < proof.lines.size(); ++k) pos[proof.lines[k].id] = k;
  std::vector<std::vector<int>> leaves(proof.lines.size());
  for (size_t k = 0; k < proof.lines.size(); ++k) {
    const ProofLine& line = proof.lines[k];
    if (line.is_axiom()) {
      leaves[k] = {line.axiom().clause_index};
      continue;
    }
    const ResolutionJust& res = line.resolution();
    for (LineId ant : {res.left, res.right}) {
      auto it = pos.find(ant);
      if (it == pos.end() || it->second >= k)
        throw Error("axiom_leaves_per_line: unresolved antecedent " + std::to_string(ant));
      const std::vector<int>& src = leaves[it->second];
      std::vector<int> merged;
      merged.reserve(leaves[k].size() + src.size());
      std::set_union(leaves[k].begin(), leaves[k].end(), src.begin(), src.end(),
                     std::back_inserter(merged));
      leaves[k] = std::move(merged);
    }
  }
  return leaves;
}

CheckReport check_soundness_invariant(const QBF& qbf, const Proof& proof, int cap) {
  if (!proof.checked)
    throw Error("check_soundness_invariant: proof has not been checked");
  CheckReport rep;
  std::vector<Var> evars = qbf.prefix.existentials();
  std::vector<Var> uvars = qbf.prefix.universals();
  int m = (int)evars.size();
  if (m > cap)
    throw Error("check_soundness_invariant: " + std::to_string(m) +
                " existential variables exceed cap " + std::to_string(cap));
  std::vector<std::vector<int>> leaves = axiom_leaves_per_line(proof);
  rep.stats.line_count = (int)proof.lines.size();

  Assignment a(qbf.prefix.max_var());
  uint64_t total = 1ull << m;
  for (size_t k = 0; k < proof.lines.size(); ++k) {
    const ProofLine& line = proof.lines[k];
    for (uint64_t idx = 0; idx < total; ++idx) {
      for (int j = 0; j < m; ++j) a.set(evars[j], (idx >> j) & 1);
      for (Var u : uvars) a.unset(u);
      if (clause_status(line.clause, a) != ClauseStatus::Falsified) continue;
      for (const auto& [u, mm] : line.maps) {
        Tri v = mm.evaluate(a);
        if (v != Tri::Star) a.set(u, v == Tri::One);
      }
      bool covered = false;
      for (int ci : leaves[k])
        if (clause_status(qbf.matrix[ci - 1], a) == ClauseStatus::Falsified) {
          covered = true;
          break;
        }
      if (!covered)
        rep.failures.push_back(
            {line.id, CheckError::SoundnessViolation,
             "assignment " + a.str() + " falsifies the line clause but no axiom of its "
                                       "sub-derivation"});
    }
  }
  return rep;
}

Proof generate_equality_refutation(int n) {
  if (n < 1) throw Error("generate_equality_refutation: n must be >= 1");
  FamilyInstance inst = gen_family(Family::Equality, n);
  const QBF& qbf = inst.qbf;
  auto u = [&](int i) { return n + i; };
  auto t = [&](int i) { return 2 * n + i; };

  Proof p;
  auto add = [&](RuleResult r) {
    if (auto* err = std::get_if<RuleError>(&r))
      throw Error("equality refutation builder: " + err->message);
    p.lines.push_back(std::get<ProofLine>(std::move(r)));
  };

  // line 0: the long clause; lines 2i-1, 2i: the pair clauses for x_i
  add(axiom_line(qbf, 2 * n + 1, 0));
  for (int i = 1; i <= n; ++i) {
    add(axiom_line(qbf, 2 * i - 1, 2 * i - 1));
    add(axiom_line(qbf, 2 * i, 2 * i));
  }
  // line 2n+i: merge the pair on pivot x_i, building the u_i = x_i map
  for (int i = 1; i <= n; ++i) {
    std::map<Var, Choice> ch;
    for (int j = 1; j <= n; ++j) ch[u(j)] = j == i ? Choice::Merge : Choice::SelectLeft;
    add(resolve_lines(qbf, *p.find(2 * i - 1), *p.find(2 * i), i, &ch, 2 * n + i));
  }
  // line 3n+i: chain {t_i} against the shrinking long clause on pivot t_i
  for (int i = 1; i <= n; ++i) {
    std::map<Var, Choice> ch;
    for (int j = 1; j <= n; ++j) ch[u(j)] = j < i ? Choice::SelectRight : Choice::SelectLeft;
    const ProofLine& right = i == 1 ? *p.find(0) : *p.find(3 * n + i - 1);
    add(resolve_lines(qbf, *p.find(2 * n + i), right, t(i), &ch, 3 * n + i));
  }
  return p;
}

std::optional<Proof> saturation_search(const QBF& qbf, const SearchCaps& caps) {
  std::vector<Var> universals = qbf.prefix.universals();
  std::vector<ProofLine> lines;
  std::unordered_set<std::string> seen;
  int sink_idx = -1;

  auto key_of = [&](const ProofLine& l) {
    std::string k = l.clause.str();
    for (Var u : universals) {
      k += '|';
      k += canonical_code(l.maps.at(u));
    }
    return k;
  };
  auto try_add = [&](RuleResult r) {
    if (std::holds_alternative<RuleError>(r)) return;
    ProofLine line = std::get<ProofLine>(std::move(r));
    if ((int)line.clause.size() > caps.max_clause_width) return;
    for (const auto& [u, mm] : line.maps)
      if (mm.size() > caps.max_map_size) return;
    if (!seen.insert(key_of(line)).second) return;
    bool empty = line.clause.empty();
    lines.push_back(std::move(line));
    if (empty && sink_idx < 0) sink_idx = (int)lines.size() - 1;
  };

  for (int ci = 1; ci <= (int)qbf.matrix.size() && sink_idx < 0; ++ci)
    try_add(axiom_line(qbf, ci, (LineId)lines.size() + 1));

  for (size_t k = 0; k < lines.size() && sink_idx < 0; ++k) {
    for (size_t j = 0; j < k && sink_idx < 0; ++j) {
      for (auto [a, b] : {std::pair{j, k}, std::pair{k, j}}) {
        if (sink_idx >= 0 || (int)lines.size() >= caps.max_lines) break;
        // candidate pivots: positive in a, negative in b (clause order)
        for (Lit l : lines[a].clause.lits()) {
          if (!l.positive()) continue;
          if (!lines[b].clause.contains(l.negated())) continue;
          if ((int)lines.size() >= caps.max_lines) break;
          try_add(resolve_lines(qbf, lines[a], lines[b], l.var(), nullptr,
                                (LineId)lines.size() + 1));
          if (sink_idx >= 0) break;
        }
      }
    }
    if ((int)lines.size() >= caps.max_lines && sink_idx < 0) break;
  }
  if (sink_idx < 0) return std::nullopt;

  // minimal sub-derivation of the empty clause, re-derived with dense ids
  std::vector<char> need(lines.size(), 0);
  std::vector<size_t> stack{(size_t)sink_idx};
  while (!stack.empty()) {
    size_t i = stack.back();
    stack.pop_back();
    if (need[i]) continue;
    need[i] = 1;
    if (!lines[i].is_axiom()) {
      const ResolutionJust& res = lines[i].resolution();
      stack.push_back((size_t)res.left - 1);  // search ids are index + 1
      stack.push_back((size_t)res.right - 1);
    }
  }
  std::vector<LineId> new_id(lines.size(), 0);
  Proof p;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (!need[i]) continue;
    new_id[i] = (LineId)p.lines.size() + 1;
    RuleResult r;
    if (lines[i].is_axiom()) {
      r = axiom_line(qbf, lines[i].axiom().clause_index, new_id[i]);
    } else {
      const ResolutionJust& res = lines[i].resolution();
      const ProofLine& la = p.lines[new_id[(size_t)res.left - 1] - 1];
      const ProofLine& lb = p.lines[new_id[(size_t)res.right - 1] - 1];
      r = resolve_lines(qbf, la, lb, res.pivot, nullptr, new_id[i]);
    }
    if (std::holds_alternative<RuleError>(r))
      throw Error("saturation_search: re-derivation failed unexpectedly");
    p.lines.push_back(std::get<ProofLine>(std::move(r)));
  }
  return p;
}

}  // namespace mres
