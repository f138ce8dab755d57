#include "mres/merge_map.hpp"

#include <algorithm>
#include <vector>

namespace mres {

MergeMap MergeMap::leaf(Var owner, InstrId id, Tri b) {
  if (owner <= 0) throw MergeMapError("merge map owner must be positive");
  MergeMap m;
  m.owner_ = owner;
  m.instrs_[id] = Instruction::leaf(b);
  return m;
}

MergeMap MergeMap::merge(Var owner, InstrId id, Var pivot,
                         const MergeMap& zero_side, const MergeMap& one_side) {
  if (zero_side.owner_ != owner || one_side.owner_ != owner)
    throw MergeMapError("merge: owner mismatch");
  if (zero_side.empty() || one_side.empty()) throw MergeMapError("merge: empty side");
  MergeMap m;
  m.owner_ = owner;
  m.instrs_ = zero_side.instrs_;
  for (const auto& [i, ins] : one_side.instrs_) {
    auto [it, inserted] = m.instrs_.emplace(i, ins);
    if (!inserted && !(it->second == ins))
      throw MergeMapError("merge: inconsistent stores at id " + std::to_string(i));
  }
  if (!m.instrs_.empty() && id <= m.instrs_.rbegin()->first)
    throw MergeMapError("merge: id " + std::to_string(id) + " not fresh");
  m.instrs_[id] = Instruction::node(pivot, zero_side.leading_id(), one_side.leading_id());
  return m;
}

MergeMap MergeMap::from_instructions(Var owner, std::map<InstrId, Instruction> instrs) {
  if (owner <= 0) throw MergeMapError("merge map owner must be positive");
  if (instrs.empty()) throw MergeMapError("empty instruction store");
  for (const auto& [i, ins] : instrs) {
    if (ins.is_leaf()) continue;
    for (InstrId child : {ins.if0, ins.if1}) {
      if (child >= i)
        throw MergeMapError("instruction " + std::to_string(i) + " branches to id " +
                            std::to_string(child) + " that is not smaller");
      if (!instrs.count(child))
        throw MergeMapError("instruction " + std::to_string(i) + " branches to missing id " +
                            std::to_string(child));
    }
  }
  // keep the reachable core only
  std::set<InstrId> keep;
  std::vector<InstrId> stack{instrs.rbegin()->first};
  while (!stack.empty()) {
    InstrId i = stack.back();
    stack.pop_back();
    if (!keep.insert(i).second) continue;
    const Instruction& ins = instrs.at(i);
    if (!ins.is_leaf()) {
      stack.push_back(ins.if0);
      stack.push_back(ins.if1);
    }
  }
  MergeMap m;
  m.owner_ = owner;
  for (InstrId i : keep) m.instrs_[i] = instrs.at(i);
  return m;
}

InstrId MergeMap::leading_id() const {
  if (instrs_.empty()) throw MergeMapError("empty merge map");
  return instrs_.rbegin()->first;
}

const Instruction& MergeMap::leading() const {
  if (instrs_.empty()) throw MergeMapError("empty merge map");
  return instrs_.rbegin()->second;
}

bool MergeMap::trivial() const {
  return instrs_.size() == 1 && leading().is_leaf() && leading().value == Tri::Star;
}

bool MergeMap::simple() const { return instrs_.size() == 1 && leading().is_leaf(); }

Tri MergeMap::evaluate(const Assignment& a) const {
  const Instruction* ins = &leading();
  for (;;) {
    if (ins->is_leaf()) return ins->value;
    auto v = a.get(ins->query);
    if (!v)
      throw MergeMapError("evaluate: variable " + std::to_string(ins->query) + " unbound");
    ins = &instrs_.at(*v ? ins->if1 : ins->if0);
  }
}

bool consistent(const MergeMap& a, const MergeMap& b) {
  if (a.owner() != b.owner()) throw MergeMapError("consistent: owner mismatch");
  const auto& small = a.size() <= b.size() ? a.instructions() : b.instructions();
  const auto& large = a.size() <= b.size() ? b.instructions() : a.instructions();
  for (const auto& [i, ins] : small) {
    auto it = large.find(i);
    if (it != large.end() && !(it->second == ins)) return false;
  }
  return true;
}

std::string canonical_code(const MergeMap& m) {
  // Iterative DFS, if0 before if1. First visit of an id assigns the next rank
  // and prints the instruction; revisits print a back-reference to the rank.
  std::string code;
  std::map<InstrId, int> rank;
  struct Frame {
    InstrId id;
    int phase;  // 0 = enter, 1 = between children, 2 = exit
  };
  std::vector<Frame> stack{{m.leading_id(), 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Instruction& ins = m.instructions().at(f.id);
    if (f.phase == 0) {
      auto it = rank.find(f.id);
      if (it != rank.end()) {
        code += '#';
        code += std::to_string(it->second);
        stack.pop_back();
        continue;
      }
      rank[f.id] = (int)rank.size();
      if (ins.is_leaf()) {
        code += 'L';
        code += tri_char(ins.value);
        stack.pop_back();
        continue;
      }
      code += 'N';
      code += std::to_string(ins.query);
      code += '(';
      f.phase = 1;
      stack.push_back({ins.if0, 0});
    } else if (f.phase == 1) {
      code += ',';
      f.phase = 2;
      stack.push_back({ins.if1, 0});
    } else {
      code += ')';
      stack.pop_back();
    }
  }
  return code;
}

bool isomorphic(const MergeMap& a, const MergeMap& b) {
  if (a.owner() != b.owner()) throw MergeMapError("isomorphic: owner mismatch");
  if (a.size() != b.size()) return false;
  return canonical_code(a) == canonical_code(b);
}

MapShape classify(const MergeMap& m) {
  MapShape shape;
  shape.size = m.size();
  std::map<InstrId, int> in_deg;
  for (const auto& [i, ins] : m.instructions()) {
    (void)i;
    if (ins.is_leaf()) continue;
    shape.queried_vars.insert(ins.query);
    ++in_deg[ins.if0];
    ++in_deg[ins.if1];  // both branches count, even when equal
  }
  shape.is_tree = true;
  for (const auto& [i, ins] : m.instructions()) {
    (void)ins;
    int d = in_deg.count(i) ? in_deg[i] : 0;
    if (i == m.leading_id() ? d != 0 : d != 1) {
      shape.is_tree = false;
      break;
    }
  }
  // Vars queried on some path strictly above each instruction; walk ids
  // descending so parents are finished first.
  std::map<InstrId, std::set<Var>> above;
  shape.is_read_once = true;
  for (auto it = m.instructions().rbegin(); it != m.instructions().rend(); ++it) {
    const auto& [i, ins] = *it;
    if (ins.is_leaf()) continue;
    const std::set<Var>& here = above[i];
    if (here.count(ins.query)) shape.is_read_once = false;
    for (InstrId child : {ins.if0, ins.if1}) {
      auto& dst = above[child];
      dst.insert(here.begin(), here.end());
      dst.insert(ins.query);
    }
  }
  return shape;
}

}  // namespace mres
