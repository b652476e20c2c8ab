#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ecostitch/model.hpp"

namespace ecostitch {

enum class Strategy { newest, oldest, minimal_products };

/// Everything besides the root that influences a resolution: the candidate
/// preference and an optional snapshot timestamp. Revisions released after
/// the snapshot are invisible; revisions without a timestamp are always
/// visible.
struct ResolutionContext {
  Strategy strategy = Strategy::newest;
  std::optional<std::int64_t> snapshot;
};

/// Raised when no acceptable revision set exists. Carries the clause the
/// search could not satisfy and the chain of revisions (starting at the root)
/// whose requirements led to it.
struct UnsatisfiableError : Error {
  UnsatisfiableError(DependencyClause failing, std::vector<RevisionId> chain);
  DependencyClause clause;
  std::vector<RevisionId> requirement_chain;
};

/// Outcome of a resolution: the chosen members and the dependency arcs among
/// them (the global-graph arcs restricted to the member set).
struct ResolvedSet {
  RevisionId root;
  std::set<RevisionId> members;
  std::vector<std::pair<RevisionId, RevisionId>> arcs;  // sorted, unique
};

/// Picks a revision set for `root`: the root belongs to it, every member's
/// clauses are satisfied inside it, no product appears twice, and no proper
/// subset containing the root would do as well. Deterministic for a given
/// (ecosystem, root, context). Throws UnknownRevisionError,
/// SnapshotExcludesRootError or UnsatisfiableError.
ResolvedSet resolve(const Ecosystem& eco, const RevisionId& root, const ResolutionContext& ctx = {});

/// Per-condition verdicts for a candidate resolution, with witnesses for
/// failures. Minimality is checked exactly (every proper subset enumerated)
/// for sets of up to 17 members and by a removal cascade above that;
/// `minimality_exact` records which check ran.
struct ConditionReport {
  bool root_present = false;
  bool closed = false;
  std::optional<std::pair<RevisionId, DependencyClause>> unsatisfied_witness;
  bool one_per_product = false;
  std::optional<std::pair<RevisionId, RevisionId>> product_collision;
  bool minimal = false;
  bool minimality_exact = false;
  std::optional<std::set<RevisionId>> smaller_valid_subset;

  bool all_conditions_hold() const {
    return root_present && closed && one_per_product && minimal;
  }
};

/// Checks the four acceptance conditions for an arbitrary member set. All
/// members must belong to the ecosystem (UnknownRevisionError otherwise).
ConditionReport verify_resolution(const Ecosystem& eco, const RevisionId& root,
                                  const std::set<RevisionId>& members);

}  // namespace ecostitch
