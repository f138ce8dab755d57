#include "mres/truth_table.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mres {

TruthTable::TruthTable(std::vector<Var> vars) : vars_(std::move(vars)) {
  if (vars_.size() > 24)
    throw Error("truth table arity " + std::to_string(vars_.size()) +
                " exceeds the 24-variable limit");
  words_.assign(((size_t)1 << vars_.size()) / 64 + 1, 0);
}

std::string TruthTable::bit_string() const {
  std::string s(entries(), '0');
  for (uint32_t i = 0; i < entries(); ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

TruthTable parity_table(int n) {
  if (n < 0 || n > 24) throw Error("parity arity out of range: " + std::to_string(n));
  std::vector<Var> vars(n);
  for (int i = 0; i < n; ++i) vars[i] = i + 1;
  TruthTable t(std::move(vars));
  for (uint32_t i = 0; i < t.entries(); ++i)
    t.set_bit(i, std::popcount(i) & 1);
  return t;
}

TruthTable table_from_map(const MergeMap& m, const std::vector<Var>& domain) {
  if (domain.size() > 24)
    throw Error("domain of " + std::to_string(domain.size()) +
                " variables exceeds the 24-variable limit");
  std::set<Var> dom(domain.begin(), domain.end());
  if (dom.size() != domain.size()) throw Error("duplicate variable in domain");
  for (const auto& [id, ins] : m.instructions()) {
    (void)id;
    if (!ins.is_leaf() && !dom.count(ins.query))
      throw Error("map queries variable " + std::to_string(ins.query) +
                  " outside its domain");
  }
  TruthTable t(domain);
  Var maxv = domain.empty() ? 0 : *std::max_element(domain.begin(), domain.end());
  Assignment a(maxv);
  for (uint32_t i = 0; i < t.entries(); ++i) {
    for (size_t j = 0; j < domain.size(); ++j) a.set(domain[j], (i >> j) & 1);
    Tri v = m.evaluate(a);
    if (v == Tri::Star)
      throw Error("map is partial: no output on assignment index " +
                  std::to_string(i));
    t.set_bit(i, v == Tri::One);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Minimal decision-tree size
// ---------------------------------------------------------------------------

int DecisionTree::leaf_count() const {
  int k = 0;
  for (const auto& n : nodes)
    if (n.query == 0) ++k;
  return k;
}

namespace {

int min_depth_below(const DecisionTree& t, int at) {
  const auto& n = t.nodes[at];
  if (n.query == 0) return 0;
  return 1 + std::min(min_depth_below(t, n.if0), min_depth_below(t, n.if1));
}

bool repeats_below(const DecisionTree& t, int at, std::set<Var>& on_path) {
  const auto& n = t.nodes[at];
  if (n.query == 0) return false;
  if (on_path.count(n.query)) return true;
  on_path.insert(n.query);
  bool r = repeats_below(t, n.if0, on_path) || repeats_below(t, n.if1, on_path);
  on_path.erase(n.query);
  return r;
}

}  // namespace

int DecisionTree::min_path_queries() const {
  if (root < 0) throw Error("empty decision tree");
  return min_depth_below(*this, root);
}

bool DecisionTree::repeats_a_variable() const {
  if (root < 0) throw Error("empty decision tree");
  std::set<Var> on_path;
  return repeats_below(*this, root, on_path);
}

bool DecisionTree::evaluate(uint32_t idx, const std::vector<Var>& vars) const {
  if (root < 0) throw Error("empty decision tree");
  int at = root;
  while (nodes[at].query != 0) {
    const auto& n = nodes[at];
    auto it = std::find(vars.begin(), vars.end(), n.query);
    if (it == vars.end())
      throw Error("tree queries variable " + std::to_string(n.query) +
                  " outside the table domain");
    bool b = (idx >> (it - vars.begin())) & 1;
    at = b ? n.if1 : n.if0;
  }
  return nodes[at].leaf != 0;
}

bool DecisionTree::computes(const TruthTable& f) const {
  for (uint32_t i = 0; i < f.entries(); ++i)
    if (evaluate(i, f.vars()) != f.bit(i)) return false;
  return true;
}

namespace {

// Search state for one table. Restrictions are identified by the set of still
// -free variable positions plus the values chosen for the fixed ones, and
// memoized by (free mask, restricted sub-table) so restrictions inducing the
// same sub-function share one entry.
struct DtSearch {
  const TruthTable& f;
  int m;
  struct Entry {
    int size = 0;
    int var_pos = -1;  // -1: constant sub-function
    bool leaf_val = false;
  };
  std::unordered_map<std::string, Entry> memo;

  explicit DtSearch(const TruthTable& table) : f(table), m(table.arity()) {}

  std::string key_of(uint32_t free_mask, uint32_t fixed_vals,
                     std::vector<uint64_t>* bits_out) const {
    int k = std::popcount(free_mask);
    std::vector<uint64_t> bits(((size_t)1 << k) / 64 + 1, 0);
    std::vector<int> free_pos;
    for (int p = 0; p < m; ++p)
      if (free_mask >> p & 1) free_pos.push_back(p);
    for (uint32_t s = 0; s < (1u << k); ++s) {
      uint32_t idx = fixed_vals;
      for (int j = 0; j < k; ++j)
        if (s >> j & 1) idx |= 1u << free_pos[j];
      if (f.bit(idx)) bits[s >> 6] |= 1ull << (s & 63);
    }
    std::string key(sizeof(uint32_t) + bits.size() * sizeof(uint64_t), '\0');
    std::memcpy(key.data(), &free_mask, sizeof(uint32_t));
    std::memcpy(key.data() + sizeof(uint32_t), bits.data(),
                bits.size() * sizeof(uint64_t));
    if (bits_out) *bits_out = std::move(bits);
    return key;
  }

  const Entry& solve(uint32_t free_mask, uint32_t fixed_vals) {
    std::vector<uint64_t> bits;
    std::string key = key_of(free_mask, fixed_vals, &bits);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    int k = std::popcount(free_mask);
    uint32_t n_entries = 1u << k;
    bool any0 = false, any1 = false;
    for (uint32_t s = 0; s < n_entries && !(any0 && any1); ++s)
      ((bits[s >> 6] >> (s & 63)) & 1 ? any1 : any0) = true;

    Entry e;
    if (!(any0 && any1)) {
      e.size = 1;
      e.leaf_val = any1;
    } else {
      e.size = -1;
      for (int p = 0; p < m; ++p) {
        if (!(free_mask >> p & 1)) continue;
        uint32_t child_mask = free_mask & ~(1u << p);
        int s0 = solve(child_mask, fixed_vals).size;
        int s1 = solve(child_mask, fixed_vals | (1u << p)).size;
        if (e.size < 0 || s0 + s1 < e.size) {
          e.size = s0 + s1;
          e.var_pos = p;
        }
      }
    }
    return memo.emplace(std::move(key), e).first->second;
  }

  int build(uint32_t free_mask, uint32_t fixed_vals, DecisionTree& out) {
    const Entry e = solve(free_mask, fixed_vals);
    DecisionTree::Node node;
    if (e.var_pos < 0) {
      node.leaf = e.leaf_val ? 1 : 0;
    } else {
      uint32_t child_mask = free_mask & ~(1u << e.var_pos);
      node.query = f.vars()[e.var_pos];
      node.if0 = build(child_mask, fixed_vals, out);
      node.if1 = build(child_mask, fixed_vals | (1u << e.var_pos), out);
      node.leaf = -1;
    }
    out.nodes.push_back(node);
    return (int)out.nodes.size() - 1;
  }
};

}  // namespace

DtResult min_dt_size(const TruthTable& f) {
  if (f.arity() > 12)
    throw Error("decision-tree minimization supports at most 12 variables, got " +
                std::to_string(f.arity()));
  DtSearch search(f);
  uint32_t all_free = (1u << f.arity()) - 1;
  DtResult r;
  r.size = search.solve(all_free, 0).size;
  r.witness.root = search.build(all_free, 0, r.witness);
  return r;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

// Skips whitespace and 'c'-prefixed comment lines; false at EOF.
bool skip_to_token(std::istream& in, int& line_no) {
  for (;;) {
    int c = in.peek();
    if (c == EOF) return false;
    if (c == '\n') {
      ++line_no;
      in.get();
    } else if (std::isspace(c)) {
      in.get();
    } else if (c == 'c') {
      std::string rest;
      std::getline(in, rest);
      ++line_no;
    } else {
      return true;
    }
  }
}

}  // namespace

TruthTable parse_truth_table(std::istream& in) {
  int line_no = 1;
  if (!skip_to_token(in, line_no)) throw ParseError("empty truth-table input", line_no);
  std::string tag;
  in >> tag;
  if (tag != "t") throw ParseError("expected 't' header, got '" + tag + "'", line_no);
  int m = -1;
  if (!(in >> m) || m < 0 || m > 24)
    throw ParseError("bad truth-table arity", line_no);
  std::vector<Var> vars(m);
  std::set<Var> seen;
  for (int i = 0; i < m; ++i) {
    if (!(in >> vars[i]) || vars[i] <= 0)
      throw ParseError("bad variable id in truth-table header", line_no);
    if (!seen.insert(vars[i]).second)
      throw ParseError("duplicate variable in truth-table header", line_no);
  }
  TruthTable t(vars);
  uint32_t got = 0;
  while (got < t.entries()) {
    int c = in.get();
    if (c == EOF) throw ParseError("truth table ends early: expected " +
                                   std::to_string(t.entries()) + " bits, got " +
                                   std::to_string(got), line_no);
    if (c == '\n') { ++line_no; continue; }
    if (std::isspace(c)) continue;
    if (c != '0' && c != '1')
      throw ParseError(std::string("bad truth-table bit character '") + (char)c + "'",
                       line_no);
    t.set_bit(got++, c == '1');
  }
  return t;
}

std::vector<TruthTable> parse_truth_tables(std::istream& in) {
  std::vector<TruthTable> out;
  int line_no = 1;
  while (skip_to_token(in, line_no)) out.push_back(parse_truth_table(in));
  return out;
}

void emit_truth_table(const TruthTable& t, std::ostream& out) {
  out << "t " << t.arity();
  for (Var v : t.vars()) out << ' ' << v;
  out << '\n';
  std::string bits = t.bit_string();
  for (size_t i = 0; i < bits.size(); i += 64)
    out << bits.substr(i, 64) << '\n';
}

}  // namespace mres
