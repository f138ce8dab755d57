#include "mres/diagnostics.hpp"

#include <map>

namespace mres {

namespace {

// consumers[k] = indexes of resolutions that use line k as an antecedent
std::vector<std::vector<size_t>> consumer_graph(const Proof& proof) {
  std::map<LineId, size_t> pos;
  for (size_t k = 0; k < proof.lines.size(); ++k) pos[proof.lines[k].id] = k;
  std::vector<std::vector<size_t>> consumers(proof.lines.size());
  for (size_t k = 0; k < proof.lines.size(); ++k) {
    const ProofLine& l = proof.lines[k];
    if (l.is_axiom()) continue;
    const ResolutionJust& res = l.resolution();
    for (LineId ant : {res.left, res.right}) {
      auto it = pos.find(ant);
      if (it == pos.end() || it->second >= k)
        throw Error("diagnostics: unresolved antecedent " + std::to_string(ant));
      consumers[it->second].push_back(k);
    }
  }
  return consumers;
}

}  // namespace

bool is_tree_like(const Proof& proof) {
  for (const auto& uses : consumer_graph(proof))
    if (uses.size() > 1) return false;
  return true;
}

bool is_regular(const Proof& proof, const std::set<Var>& pivots) {
  auto consumers = consumer_graph(proof);
  std::map<Var, std::vector<size_t>> occs;
  for (size_t k = 0; k < proof.lines.size(); ++k) {
    const ProofLine& l = proof.lines[k];
    if (!l.is_axiom() && pivots.count(l.resolution().pivot))
      occs[l.resolution().pivot].push_back(k);
  }
  for (const auto& [pivot, at] : occs) {
    (void)pivot;
    if (at.size() < 2) continue;
    // forward reachability from each occurrence; quadratic is fine here
    std::set<size_t> targets(at.begin(), at.end());
    for (size_t start : at) {
      std::vector<size_t> stack(consumers[start].begin(), consumers[start].end());
      std::vector<char> seen(proof.lines.size(), 0);
      while (!stack.empty()) {
        size_t i = stack.back();
        stack.pop_back();
        if (seen[i]) continue;
        seen[i] = 1;
        if (targets.count(i)) return false;
        stack.insert(stack.end(), consumers[i].begin(), consumers[i].end());
      }
    }
  }
  return true;
}

std::set<int> uci(const Proof& proof, LineId line_id,
                  const std::vector<std::optional<int>>& grouping) {
  auto idx = proof.index_of(line_id);
  if (!idx) throw Error("uci: no line with id " + std::to_string(line_id));
  std::vector<std::vector<int>> leaves = axiom_leaves_per_line(proof);
  std::set<int> out;
  for (int ci : leaves[*idx]) {
    if (ci < 1 || ci > (int)grouping.size())
      throw Error("uci: clause index " + std::to_string(ci) + " outside grouping");
    if (grouping[ci - 1]) out.insert(*grouping[ci - 1]);
  }
  return out;
}

BoundaryReport boundary_sets(const Proof& proof, const std::set<Var>& vars) {
  auto consumers = consumer_graph(proof);
  size_t n = proof.lines.size();
  std::vector<char> avoids(n, 0), member(n, 0);
  for (size_t k = 0; k < n; ++k) {
    bool ok = true;
    for (Var v : vars)
      if (proof.lines[k].clause.has_var(v)) {
        ok = false;
        break;
      }
    avoids[k] = ok;
  }
  // walk backwards: a line is in s_prime iff it avoids the vars and either is
  // the sink or feeds some s_prime member
  for (size_t k = n; k-- > 0;) {
    if (!avoids[k]) continue;
    if (k == n - 1) {
      member[k] = 1;
      continue;
    }
    for (size_t c : consumers[k])
      if (member[c]) {
        member[k] = 1;
        break;
      }
  }
  BoundaryReport rep;
  std::map<LineId, size_t> pos;
  for (size_t k = 0; k < n; ++k) pos[proof.lines[k].id] = k;
  for (size_t k = 0; k < n; ++k) {
    if (!member[k]) continue;
    rep.s_prime.insert(proof.lines[k].id);
    const ProofLine& l = proof.lines[k];
    if (l.is_axiom()) {
      rep.s.insert(l.id);  // no antecedents at all
      continue;
    }
    const ResolutionJust& res = l.resolution();
    bool outside = false, inside = false;
    for (LineId ant : {res.left, res.right})
      (member[pos.at(ant)] ? inside : outside) = true;
    if (outside || !inside) rep.s.insert(l.id);
  }
  return rep;
}

}  // namespace mres
