#include "mres/families.hpp"

#include <sstream>

#include "mres/proof.hpp"

namespace mres {

namespace {

Clause cl(std::vector<int> codes) {
  std::vector<Lit> lits;
  lits.reserve(codes.size());
  for (int c : codes) lits.push_back(Lit(c));
  auto r = Clause::normalized(std::move(lits));
  if (!r) throw Error("family generator produced a tautological clause");
  return *r;
}

// One clause per odd-size subset of ys (ascending bitmask order), negating the
// chosen variables: the CNF of "ys sums to 0 mod 2". Extra literals are
// appended verbatim to every clause.
std::vector<std::vector<int>> parity_block(const std::vector<Var>& ys) {
  std::vector<std::vector<int>> out;
  int k = (int)ys.size();
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    std::vector<int> codes;
    for (int j = 0; j < k; ++j) codes.push_back((mask >> j) & 1 ? -ys[j] : ys[j]);
    out.push_back(std::move(codes));
  }
  return out;
}

void require_n(int n, int lo, Family f) {
  if (n < lo)
    throw Error(family_name(f) + " needs n >= " + std::to_string(lo) + ", got " +
                std::to_string(n));
}

FamilyInstance gen_equality(int n) {
  FamilyInstance inst{Family::Equality, n, {}, {}, {}};
  auto x = [&](int i) { return i; };
  auto u = [&](int i) { return n + i; };
  auto t = [&](int i) { return 2 * n + i; };
  std::vector<Var> xs, us, ts;
  for (int i = 1; i <= n; ++i) xs.push_back(x(i)), us.push_back(u(i)), ts.push_back(t(i));
  inst.qbf.prefix = Prefix::from_blocks(
      {{Quant::Exists, xs}, {Quant::Forall, us}, {Quant::Exists, ts}});
  for (int i = 1; i <= n; ++i) {
    inst.qbf.matrix.push_back(cl({x(i), u(i), t(i)}));
    inst.qbf.matrix.push_back(cl({-x(i), -u(i), t(i)}));
    inst.clause_groups.push_back({"pair_" + std::to_string(i), {2 * i - 1, 2 * i}});
  }
  std::vector<int> longc;
  for (int i = 1; i <= n; ++i) longc.push_back(-t(i));
  inst.qbf.matrix.push_back(cl(longc));
  inst.clause_groups.push_back({"long", {2 * n + 1}});
  inst.var_roles = {{"X", xs}, {"U", us}, {"T", ts}};
  return inst;
}

FamilyInstance gen_qparity(int n, bool doubled) {
  FamilyInstance inst{doubled ? Family::LQParity : Family::QParity, n, {}, {}, {}};
  int z = n + 1;
  auto t = [&](int i) { return n + 1 + i; };
  std::vector<Var> xs, ts;
  for (int i = 1; i <= n; ++i) xs.push_back(i), ts.push_back(t(i));
  inst.qbf.prefix =
      Prefix::from_blocks({{Quant::Exists, xs}, {Quant::Forall, {z}}, {Quant::Exists, ts}});
  auto push_block = [&](int label, const std::vector<std::vector<int>>& block) {
    std::vector<int> idxs;
    for (const std::vector<int>& codes : block) {
      if (doubled) {
        std::vector<int> with_z = codes, with_nz = codes;
        with_z.push_back(z);
        with_nz.push_back(-z);
        inst.qbf.matrix.push_back(cl(with_z));
        inst.qbf.matrix.push_back(cl(with_nz));
        idxs.push_back((int)inst.qbf.matrix.size() - 1);
        idxs.push_back((int)inst.qbf.matrix.size());
      } else {
        inst.qbf.matrix.push_back(cl(codes));
        idxs.push_back((int)inst.qbf.matrix.size());
      }
    }
    inst.clause_groups.push_back({"phi_" + std::to_string(label), idxs});
  };
  push_block(1, parity_block({1, t(1)}));
  for (int i = 2; i <= n; ++i) push_block(i, parity_block({t(i - 1), i, t(i)}));
  // the closing block already mentions z and is never doubled
  inst.qbf.matrix.push_back(cl({t(n), z}));
  inst.qbf.matrix.push_back(cl({-t(n), -z}));
  inst.clause_groups.push_back({"phi_" + std::to_string(n + 1),
                                {(int)inst.qbf.matrix.size() - 1, (int)inst.qbf.matrix.size()}});
  inst.var_roles = {{"X", xs}, {"Z", {z}}, {"T", ts}};
  return inst;
}

FamilyInstance gen_cr(int n) {
  FamilyInstance inst{Family::CR, n, {}, {}, {}};
  auto x = [&](int i, int j) { return (i - 1) * n + j; };
  int z = n * n + 1;
  auto a = [&](int i) { return n * n + 1 + i; };
  auto b = [&](int j) { return n * n + n + 1 + j; };
  std::vector<Var> xs, abs_;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) xs.push_back(x(i, j));
  std::vector<Var> as, bs;
  for (int i = 1; i <= n; ++i) as.push_back(a(i));
  for (int j = 1; j <= n; ++j) bs.push_back(b(j));
  abs_ = as;
  abs_.insert(abs_.end(), bs.begin(), bs.end());
  inst.qbf.prefix =
      Prefix::from_blocks({{Quant::Exists, xs}, {Quant::Forall, {z}}, {Quant::Exists, abs_}});
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      inst.qbf.matrix.push_back(cl({x(i, j), z, a(i)}));
      inst.clause_groups.push_back(
          {"A_" + std::to_string(i) + "_" + std::to_string(j), {(int)inst.qbf.matrix.size()}});
    }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      inst.qbf.matrix.push_back(cl({-x(i, j), -z, b(j)}));
      inst.clause_groups.push_back(
          {"B_" + std::to_string(i) + "_" + std::to_string(j), {(int)inst.qbf.matrix.size()}});
    }
  std::vector<int> la, lb;
  for (int i = 1; i <= n; ++i) la.push_back(-a(i));
  for (int j = 1; j <= n; ++j) lb.push_back(-b(j));
  inst.qbf.matrix.push_back(cl(la));
  inst.clause_groups.push_back({"L_A", {(int)inst.qbf.matrix.size()}});
  inst.qbf.matrix.push_back(cl(lb));
  inst.clause_groups.push_back({"L_B", {(int)inst.qbf.matrix.size()}});
  inst.var_roles = {{"X", xs}, {"Z", {z}}, {"A", as}, {"B", bs}};
  return inst;
}

FamilyInstance gen_kbkf_lq(int n) {
  FamilyInstance inst{Family::KbkfLq, n, {}, {}, {}};
  auto d = [&](int i) { return 3 * (i - 1) + 1; };
  auto e = [&](int i) { return 3 * (i - 1) + 2; };
  auto x = [&](int i) { return 3 * i; };
  auto f = [&](int i) { return 3 * n + i; };
  std::vector<Block> blocks;
  for (int i = 1; i <= n; ++i) {
    blocks.push_back({Quant::Exists, {d(i), e(i)}});
    blocks.push_back({Quant::Forall, {x(i)}});
  }
  std::vector<Var> fs;
  for (int i = 1; i <= n; ++i) fs.push_back(f(i));
  blocks.push_back({Quant::Exists, fs});
  inst.qbf.prefix = Prefix::from_blocks(std::move(blocks));

  auto with_neg_f = [&](std::vector<int> base, int lo) {
    for (int j = lo; j <= n; ++j) base.push_back(-f(j));
    return base;
  };
  inst.qbf.matrix.push_back(cl(with_neg_f({-d(1), -e(1)}, 1)));
  inst.clause_groups.push_back({"A_0", {1}});
  for (int i = 1; i <= n; ++i) {
    std::vector<int> cd{d(i), x(i)}, ce{e(i), -x(i)};
    if (i < n) {
      for (int lit : {-d(i + 1), -e(i + 1)}) cd.push_back(lit), ce.push_back(lit);
    }
    inst.qbf.matrix.push_back(cl(with_neg_f(cd, 1)));
    inst.clause_groups.push_back({"Ad_" + std::to_string(i), {(int)inst.qbf.matrix.size()}});
    inst.qbf.matrix.push_back(cl(with_neg_f(ce, 1)));
    inst.clause_groups.push_back({"Ae_" + std::to_string(i), {(int)inst.qbf.matrix.size()}});
  }
  for (int i = 1; i <= n; ++i) {
    inst.qbf.matrix.push_back(cl(with_neg_f({x(i), f(i)}, i + 1)));
    inst.clause_groups.push_back({"B0_" + std::to_string(i), {(int)inst.qbf.matrix.size()}});
    inst.qbf.matrix.push_back(cl(with_neg_f({-x(i), f(i)}, i + 1)));
    inst.clause_groups.push_back({"B1_" + std::to_string(i), {(int)inst.qbf.matrix.size()}});
  }
  std::vector<Var> ds, es, xsv;
  for (int i = 1; i <= n; ++i) ds.push_back(d(i)), es.push_back(e(i)), xsv.push_back(x(i));
  inst.var_roles = {{"D", ds}, {"E", es}, {"X", xsv}, {"F", fs}};
  return inst;
}

}  // namespace

std::optional<Family> family_from_name(std::string_view name) {
  if (name == "equality") return Family::Equality;
  if (name == "qparity") return Family::QParity;
  if (name == "lqparity") return Family::LQParity;
  if (name == "cr") return Family::CR;
  if (name == "kbkf_lq") return Family::KbkfLq;
  return std::nullopt;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Equality: return "equality";
    case Family::QParity: return "qparity";
    case Family::LQParity: return "lqparity";
    case Family::CR: return "cr";
    case Family::KbkfLq: return "kbkf_lq";
  }
  return "?";
}

const std::vector<Var>* FamilyInstance::role(std::string_view name) const {
  for (const auto& [r, vars] : var_roles)
    if (r == name) return &vars;
  return nullptr;
}

std::optional<std::string> FamilyInstance::group_of_clause(int clause_index) const {
  for (const auto& [label, idxs] : clause_groups)
    for (int i : idxs)
      if (i == clause_index) return label;
  return std::nullopt;
}

std::string FamilyInstance::qdimacs() const {
  std::ostringstream out;
  out << "c family: " << family_name(family) << " n=" << n << '\n';
  for (const auto& [r, vars] : var_roles) {
    out << "c role: " << r;
    for (Var v : vars) out << ' ' << v;
    out << '\n';
  }
  for (const auto& [label, idxs] : clause_groups) {
    out << "c group: " << label;
    for (int i : idxs) out << ' ' << i;
    out << '\n';
  }
  emit_qdimacs(qbf, out);
  return out.str();
}

FamilyInstance gen_family(Family f, int n) {
  switch (f) {
    case Family::Equality: require_n(n, 1, f); return gen_equality(n);
    case Family::QParity: require_n(n, 1, f); return gen_qparity(n, false);
    case Family::LQParity: require_n(n, 1, f); return gen_qparity(n, true);
    case Family::CR: require_n(n, 1, f); return gen_cr(n);
    case Family::KbkfLq: require_n(n, 2, f); return gen_kbkf_lq(n);
  }
  throw Error("unknown family");
}

std::optional<FamilyInstance> instance_from_comments(const QBF& qbf) {
  FamilyInstance inst;
  bool have_family = false;
  for (const std::string& c : qbf.comments) {
    std::istringstream in(c);
    std::string tag;
    in >> tag;
    if (tag == "family:") {
      std::string name, npart;
      in >> name >> npart;
      auto f = family_from_name(name);
      if (!f || npart.rfind("n=", 0) != 0) continue;
      inst.family = *f;
      inst.n = std::atoi(npart.c_str() + 2);
      have_family = true;
    } else if (tag == "role:") {
      std::string r;
      in >> r;
      std::vector<Var> vars;
      for (Var v; in >> v;) vars.push_back(v);
      inst.var_roles.push_back({r, std::move(vars)});
    } else if (tag == "group:") {
      std::string label;
      in >> label;
      std::vector<int> idxs;
      for (int i; in >> i;) idxs.push_back(i);
      inst.clause_groups.push_back({label, std::move(idxs)});
    }
  }
  if (!have_family) return std::nullopt;
  inst.qbf = qbf;
  return inst;
}

std::vector<std::optional<int>> phi_grouping(const FamilyInstance& inst) {
  if (inst.family != Family::QParity && inst.family != Family::LQParity)
    throw Error("phi grouping only applies to the parity families");
  std::vector<std::optional<int>> g(inst.qbf.matrix.size());
  for (const auto& [label, idxs] : inst.clause_groups) {
    if (label.rfind("phi_", 0) != 0) continue;
    int block = std::atoi(label.c_str() + 4);
    for (int i : idxs) g.at(i - 1) = block;
  }
  return g;
}

std::vector<std::optional<int>> a_grouping(const FamilyInstance& inst) {
  if (inst.family != Family::KbkfLq) throw Error("A grouping only applies to kbkf_lq");
  std::vector<std::optional<int>> g(inst.qbf.matrix.size());
  for (const auto& [label, idxs] : inst.clause_groups) {
    int block = -1;
    if (label == "A_0") block = 0;
    else if (label.rfind("Ad_", 0) == 0 || label.rfind("Ae_", 0) == 0)
      block = std::atoi(label.c_str() + 3);
    else continue;
    for (int i : idxs) g.at(i - 1) = block;
  }
  return g;
}

bool truth_assignment_check(const FamilyInstance& inst, const Strategy& strategy, int cap) {
  return verify_countermodel(inst.qbf, strategy, cap).winning;
}

}  // namespace mres
