#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mres/merge_map.hpp"
#include "mres/qbf.hpp"

namespace mres {

enum class Family { Equality, QParity, LQParity, CR, KbkfLq };

std::optional<Family> family_from_name(std::string_view name);
std::string family_name(Family f);

// A generated benchmark instance plus its bookkeeping: named variable roles
// and named clause groups (1-based matrix indices). Both are emitted as
// "c role:" / "c group:" comments so they survive a QDIMACS round trip.
struct FamilyInstance {
  Family family = Family::Equality;
  int n = 0;
  QBF qbf;
  std::vector<std::pair<std::string, std::vector<Var>>> var_roles;
  std::vector<std::pair<std::string, std::vector<int>>> clause_groups;

  const std::vector<Var>* role(std::string_view name) const;
  std::optional<std::string> group_of_clause(int clause_index) const;
  std::string qdimacs() const;  // metadata comments + formula
};

// Throws Error on out-of-range n (n >= 1; kbkf_lq needs n >= 2).
FamilyInstance gen_family(Family f, int n);

// Rebuilds an instance from the metadata comments of a parsed file; nullopt
// when the comments carry no family header.
std::optional<FamilyInstance> instance_from_comments(const QBF& qbf);

// Group index per clause (0-based over the matrix), for interval probes:
// parity families map every clause of block i to i (1..n+1); kbkf_lq maps
// A_0 to 0 and Ad_i/Ae_i to i, leaving B clauses unmapped.
std::vector<std::optional<int>> phi_grouping(const FamilyInstance& inst);
std::vector<std::optional<int>> a_grouping(const FamilyInstance& inst);

// True iff the strategy wins the instance (delegates to verify_countermodel).
bool truth_assignment_check(const FamilyInstance& inst, const Strategy& strategy,
                            int cap = 24);

}  // namespace mres
