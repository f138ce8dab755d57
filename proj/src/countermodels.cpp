#include "mres/countermodels.hpp"

#include <algorithm>
#include <thread>

namespace mres {

namespace {

// Fixed-width bitset over existential-assignment indices.
struct Bits {
  std::vector<uint64_t> w;
  explicit Bits(size_t words = 0) : w(words, 0) {}
  void set(uint32_t i) { w[i >> 6] |= 1ull << (i & 63); }
};

Bits and_bits(const Bits& a, const Bits& b) {
  Bits r(a.w.size());
  for (size_t i = 0; i < a.w.size(); ++i) r.w[i] = a.w[i] & b.w[i];
  return r;
}

Bits andnot_bits(const Bits& a, const Bits& b) {  // a & ~b
  Bits r(a.w.size());
  for (size_t i = 0; i < a.w.size(); ++i) r.w[i] = a.w[i] & ~b.w[i];
  return r;
}

bool intersects(const Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.w.size(); ++i)
    if (a.w[i] & b.w[i]) return true;
  return false;
}

struct EnumSpace {
  std::vector<Var> existentials;  // prefix order; index bit j = value of [j]
  std::vector<Var> universals;    // prefix order
  std::vector<std::vector<Var>> left_vars;  // per universal, its table domain
  // Per universal, per table index t: the existential assignments that
  // project onto t.
  std::vector<std::vector<Bits>> expansion;
  // Per universal valuation (bit i = value of universals[i]): existential
  // assignments that do NOT falsify the matrix.
  std::vector<Bits> not_falsified;
  size_t words = 0;
  uint32_t n_alpha = 0;
  uint64_t candidates = 0;

  int arity(int i) const { return (int)left_vars[i].size(); }
  uint64_t tables_of(int i) const { return 1ull << (1u << arity(i)); }
};

EnumSpace build_space(const QBF& qbf, uint64_t cap) {
  EnumSpace sp;
  sp.existentials = qbf.prefix.existentials();
  sp.universals = qbf.prefix.universals();
  int m = (int)sp.existentials.size();
  int nu = (int)sp.universals.size();
  if (m > 20)
    throw Error("countermodel enumeration supports at most 20 existential "
                "variables, got " + std::to_string(m));
  if (nu > 16)
    throw Error("countermodel enumeration supports at most 16 universal "
                "variables, got " + std::to_string(nu));

  uint64_t table_bits = 0;
  for (Var u : sp.universals) {
    size_t k = left_of(qbf.prefix, u).size();
    if (k > 16)
      throw Error("table over " + std::to_string(k) + " variables is too large");
    table_bits += 1ull << k;
  }
  if (table_bits > 62 || (1ull << table_bits) > cap)
    throw Error("candidate space of 2^" + std::to_string(table_bits) +
                " strategies exceeds the cap of " + std::to_string(cap));
  sp.candidates = 1ull << table_bits;

  sp.n_alpha = 1u << m;
  sp.words = sp.n_alpha / 64 + 1;
  uint64_t table_bytes = (1ull << nu) * sp.words * 8;
  if (table_bytes > (1ull << 30))
    throw Error("enumeration tables would need " + std::to_string(table_bytes) +
                " bytes; reduce the instance");

  // Projection of each existential assignment onto each universal's table.
  sp.left_vars.resize(nu);
  sp.expansion.resize(nu);
  std::vector<std::vector<int>> left_pos(nu);  // positions into existentials
  for (int i = 0; i < nu; ++i) {
    sp.left_vars[i] = left_of(qbf.prefix, sp.universals[i]);
    for (Var v : sp.left_vars[i]) {
      auto it = std::find(sp.existentials.begin(), sp.existentials.end(), v);
      left_pos[i].push_back((int)(it - sp.existentials.begin()));
    }
    sp.expansion[i].assign((size_t)1 << sp.arity(i), Bits(sp.words));
  }
  for (uint32_t a = 0; a < sp.n_alpha; ++a) {
    for (int i = 0; i < nu; ++i) {
      uint32_t t = 0;
      for (size_t j = 0; j < left_pos[i].size(); ++j)
        if (a >> left_pos[i][j] & 1) t |= 1u << j;
      sp.expansion[i][t].set(a);
    }
  }

  // Matrix falsification per (existential, universal) assignment pair.
  sp.not_falsified.assign((size_t)1 << nu, Bits(sp.words));
  Assignment asg(qbf.prefix.max_var());
  for (uint32_t b = 0; b < (1u << nu); ++b) {
    for (int i = 0; i < nu; ++i) asg.set(sp.universals[i], b >> i & 1);
    for (uint32_t a = 0; a < sp.n_alpha; ++a) {
      for (int j = 0; j < m; ++j) asg.set(sp.existentials[j], a >> j & 1);
      if (!matrix_falsified(qbf, asg)) sp.not_falsified[b].set(a);
    }
  }
  return sp;
}

// Depth-first walk over table choices, one universal per level. Restricted to
// a sub-range of the first universal's tables so ranges can run in parallel.
struct Walker {
  const EnumSpace& sp;
  uint64_t first_lo = 0, first_hi = 0;
  std::vector<TableStrategy> winners;
  std::vector<uint64_t> winner_indices;

  void run() {
    std::vector<Bits> match{Bits(sp.words)};
    for (uint32_t a = 0; a < sp.n_alpha; ++a) match[0].set(a);
    std::vector<uint64_t> tables;
    descend(0, 0, match, tables);
  }

  // match[p]: existential assignments routed to universal-valuation prefix p
  // (bit i of p = value chosen for universals[i], i < lvl) by the tables
  // fixed so far. `index` accumulates the candidate number, first universal
  // in the most significant chunk.
  void descend(int lvl, uint64_t index, const std::vector<Bits>& match,
               std::vector<uint64_t>& tables) {
    int nu = (int)sp.universals.size();
    if (lvl == nu) {
      for (size_t p = 0; p < match.size(); ++p)
        if (intersects(match[p], sp.not_falsified[p])) return;
      winner_indices.push_back(index);
      winners.push_back(decode(tables));
      return;
    }
    uint64_t lo = lvl == 0 ? first_lo : 0;
    uint64_t hi = lvl == 0 ? first_hi : sp.tables_of(lvl);
    uint64_t chunk = 1;
    for (int j = lvl + 1; j < nu; ++j) chunk *= sp.tables_of(j);
    uint32_t n_idx = 1u << sp.arity(lvl);
    tables.push_back(0);
    for (uint64_t b = lo; b < hi; ++b) {
      tables.back() = b;
      Bits ones(sp.words);  // assignments this table answers 1 on
      for (uint32_t t = 0; t < n_idx; ++t)
        if (b >> t & 1)
          for (size_t i = 0; i < sp.words; ++i)
            ones.w[i] |= sp.expansion[lvl][t].w[i];
      std::vector<Bits> next(match.size() * 2, Bits(0));
      for (size_t p = 0; p < match.size(); ++p) {
        next[p] = andnot_bits(match[p], ones);
        next[p | match.size()] = and_bits(match[p], ones);
      }
      descend(lvl + 1, index + b * chunk, next, tables);
    }
    tables.pop_back();
  }

  TableStrategy decode(const std::vector<uint64_t>& tables) const {
    TableStrategy s;
    for (size_t i = 0; i < tables.size(); ++i) {
      UniversalTable ut;
      ut.owner = sp.universals[i];
      ut.table = TruthTable(sp.left_vars[i]);
      for (uint32_t t = 0; t < ut.table.entries(); ++t)
        ut.table.set_bit(t, tables[i] >> t & 1);
      s.push_back(std::move(ut));
    }
    return s;
  }
};

}  // namespace

EnumResult enumerate_countermodels(const QBF& qbf, uint64_t cap, int threads) {
  EnumSpace sp = build_space(qbf, cap);
  EnumResult res;
  res.candidates = sp.candidates;

  if (threads <= 0) threads = (int)std::thread::hardware_concurrency();
  if (threads <= 0) threads = 1;
  uint64_t first_range = sp.universals.empty() ? 1 : sp.tables_of(0);
  threads = (int)std::min<uint64_t>(threads, first_range);

  std::vector<Walker> walkers;
  walkers.reserve(threads);
  for (int i = 0; i < threads; ++i) {
    uint64_t lo = first_range * i / threads;
    uint64_t hi = first_range * (i + 1) / threads;
    walkers.push_back(Walker{sp, lo, hi, {}, {}});
  }
  if (threads == 1) {
    walkers[0].run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (auto& w : walkers) pool.emplace_back([&w] { w.run(); });
    for (auto& t : pool) t.join();
  }
  for (auto& w : walkers) {
    for (auto& s : w.winners) res.winners.push_back(std::move(s));
    for (uint64_t ix : w.winner_indices) res.winner_indices.push_back(ix);
  }
  return res;
}

bool table_strategy_wins(const QBF& qbf, const TableStrategy& strategy) {
  std::vector<Var> ex = qbf.prefix.existentials();
  std::vector<Var> un = qbf.prefix.universals();
  if ((int)ex.size() > 20)
    throw Error("reference check supports at most 20 existential variables");
  if (strategy.size() != un.size())
    throw Error("strategy has " + std::to_string(strategy.size()) +
                " tables for " + std::to_string(un.size()) + " universals");
  for (size_t i = 0; i < un.size(); ++i) {
    if (strategy[i].owner != un[i])
      throw Error("table " + std::to_string(i) + " owned by variable " +
                  std::to_string(strategy[i].owner) + ", expected " +
                  std::to_string(un[i]));
    std::vector<Var> lo = left_of(qbf.prefix, un[i]);
    for (Var v : strategy[i].table.vars())
      if (std::find(lo.begin(), lo.end(), v) == lo.end())
        throw Error("table for variable " + std::to_string(un[i]) +
                    " reads variable " + std::to_string(v) +
                    ", which is not an existential to its left");
  }

  Assignment asg(qbf.prefix.max_var());
  for (uint32_t a = 0; a < (1u << ex.size()); ++a) {
    for (size_t j = 0; j < ex.size(); ++j) asg.set(ex[j], a >> j & 1);
    for (const UniversalTable& ut : strategy) {
      uint32_t t = 0;
      const auto& vars = ut.table.vars();
      for (size_t j = 0; j < vars.size(); ++j)
        if (*asg.get(vars[j])) t |= 1u << j;
      asg.set(ut.owner, ut.table.bit(t));
    }
    if (!matrix_falsified(qbf, asg)) return false;
  }
  return true;
}

namespace {

// Variable layout of the alternating-block family: d_j = 3j-2, e_j = 3j-1,
// universal x_j = 3j.
Var layout_d(int j) { return 3 * j - 2; }
Var layout_e(int j) { return 3 * j - 1; }
Var layout_x(int j) { return 3 * j; }

std::vector<Var> layout_left(int i) {
  std::vector<Var> vars;
  for (int j = 1; j <= i; ++j) {
    vars.push_back(layout_d(j));
    vars.push_back(layout_e(j));
  }
  return vars;
}

}  // namespace

std::optional<AntisymViolation> antisym_violation(const TableStrategy& s, int n) {
  if ((int)s.size() != n)
    throw Error("expected " + std::to_string(n) + " tables, got " +
                std::to_string(s.size()));
  for (int i = 1; i <= n; ++i) {
    const UniversalTable& ut = s[i - 1];
    if (ut.owner != layout_x(i))
      throw Error("table " + std::to_string(i) + " owned by variable " +
                  std::to_string(ut.owner) + ", expected " +
                  std::to_string(layout_x(i)));
    if (ut.table.vars() != layout_left(i))
      throw Error("table for variable " + std::to_string(layout_x(i)) +
                  " has an unexpected domain");
    for (uint32_t a = 0; a < (1u << i); ++a) {
      uint32_t idx = 0;
      for (int j = 1; j <= i; ++j) {
        if (a >> (j - 1) & 1) idx |= 1u << (2 * (j - 1));      // d_j = a_j
        else idx |= 1u << (2 * (j - 1) + 1);                   // e_j = 1 - a_j
      }
      bool want = a >> (i - 1) & 1;
      if (ut.table.bit(idx) != want)
        return AntisymViolation{i, a, ut.table.bit(idx) ? '1' : '0'};
    }
  }
  return std::nullopt;
}

std::optional<AntisymViolation> antisym_violation(const Strategy& s, int n) {
  if ((int)s.size() != n)
    throw Error("expected " + std::to_string(n) + " maps, got " +
                std::to_string(s.size()));
  for (int i = 1; i <= n; ++i) {
    auto it = s.find(layout_x(i));
    if (it == s.end())
      throw Error("no response map for variable " + std::to_string(layout_x(i)));
    const MergeMap& m = it->second;
    std::vector<Var> allowed = layout_left(i);
    for (Var v : classify(m).queried_vars)
      if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
        throw Error("response for variable " + std::to_string(layout_x(i)) +
                    " queries variable " + std::to_string(v) +
                    " outside its scope");
    Assignment asg(layout_x(n));
    for (uint32_t a = 0; a < (1u << i); ++a) {
      for (int j = 1; j <= i; ++j) {
        asg.set(layout_d(j), a >> (j - 1) & 1);
        asg.set(layout_e(j), !(a >> (j - 1) & 1));
      }
      Tri got = m.evaluate(asg);
      bool want = a >> (i - 1) & 1;
      if (got == Tri::Star || (got == Tri::One) != want)
        return AntisymViolation{i, a, tri_char(got)};
    }
  }
  return std::nullopt;
}

}  // namespace mres
