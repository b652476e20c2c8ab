#include "ecostitch/resolver.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace ecostitch {

namespace {

// Exact minimality checks enumerate every proper subset; beyond this size a
// removal cascade is used instead.
constexpr std::size_t kExactMinimalityLimit = 17;

bool visible_under(const Revision& rev, const std::optional<std::int64_t>& snapshot) {
  return !snapshot || !rev.timestamp || *rev.timestamp <= *snapshot;
}

bool clause_satisfied_by(const std::vector<const Revision*>& members,
                         const DependencyClause& clause) {
  for (const Dependency& dep : clause.alternatives)
    for (const Revision* m : members)
      if (dep.target == m->id.product && dep.constraint.matches(m->id.version)) return true;
  return false;
}

bool closed_members(const std::vector<const Revision*>& members) {
  for (const Revision* m : members)
    for (const DependencyClause& clause : m->depspec.clauses)
      if (!clause_satisfied_by(members, clause)) return false;
  return true;
}

bool unique_products(const std::vector<const Revision*>& members) {
  std::set<ProductId> seen;
  for (const Revision* m : members)
    if (!seen.insert(m->id.product).second) return false;
  return true;
}

std::vector<const Revision*> member_pointers(const Ecosystem& eco,
                                             const std::set<RevisionId>& members) {
  std::vector<const Revision*> out;
  out.reserve(members.size());
  for (const RevisionId& r : members) out.push_back(&eco.at(r));
  return out;
}

// True when `a` should be tried before `b` under the strategy. The
// minimal-products estimate only exists during the search, so for ordering
// members after the fact that strategy falls back to its own tie-break
// (newest first).
bool prefer(Strategy strategy, const RevisionId& a, const RevisionId& b) {
  auto c = compare_versions(a.version, b.version);
  if (strategy == Strategy::oldest) {
    if (c != 0) return c < 0;
  } else {
    if (c != 0) return c > 0;
  }
  return a.product < b.product;
}

// First proper subset (by size, then enumeration order) of `members` that
// contains the root, is dependency-closed and keeps one revision per product.
// std::nullopt when none exists, i.e. when `members` is minimal.
std::optional<std::set<RevisionId>> first_valid_proper_subset(const Ecosystem& eco,
                                                              const RevisionId& root,
                                                              const std::set<RevisionId>& members) {
  const Revision* root_rev = &eco.at(root);
  std::vector<const Revision*> nonroot;
  for (const RevisionId& r : members)
    if (!(r == root)) nonroot.push_back(&eco.at(r));
  std::size_t k = nonroot.size();
  if (k == 0) return std::nullopt;

  std::vector<const Revision*> subset;
  for (std::size_t size = 0; size < k; ++size) {
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
      subset.clear();
      subset.push_back(root_rev);
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) subset.push_back(nonroot[i]);
      if (!unique_products(subset)) continue;
      if (!closed_members(subset)) continue;
      std::set<RevisionId> out;
      for (const Revision* m : subset) out.insert(m->id);
      return out;
    }
  }
  return std::nullopt;
}

// Members that witness no satisfied clause of any other member. Removing the
// whole group at once can succeed where single removals fail.
std::set<RevisionId> unreferenced_members(const Ecosystem& eco, const RevisionId& root,
                                          const std::set<RevisionId>& members) {
  std::set<RevisionId> referenced;
  for (const RevisionId& owner : members)
    for (const DependencyClause& clause : eco.at(owner).depspec.clauses)
      for (const Dependency& dep : clause.alternatives)
        for (const RevisionId& m : members)
          if (dep.target == m.product && dep.constraint.matches(m.version)) referenced.insert(m);
  std::set<RevisionId> out;
  for (const RevisionId& m : members)
    if (!(m == root) && !referenced.contains(m)) out.insert(m);
  return out;
}

struct ClauseRef {
  RevisionId owner;
  std::size_t index;
};

class Search {
 public:
  Search(const Ecosystem& eco, const RevisionId& root, const ResolutionContext& ctx)
      : eco_(eco), root_(root), ctx_(ctx) {}

  // Backtracking over a worklist of still-unsatisfied clauses of the chosen
  // revisions. Each decision picks a revision for the front clause (ordered
  // by strategy), enqueues that revision's own clauses, and recurses; running
  // out of candidates backtracks. A clause already satisfied by the current
  // assignment is skipped, so a product never receives two revisions.
  std::vector<RevisionId> run() {
    push_revision(root_, root_);
    if (search(0)) {
      if (first_dead_end_)
        throw UnsatisfiableError(clause_of(first_dead_end_->first), first_dead_end_->second);
      const auto& clauses = eco_.at(root_).depspec.clauses;
      throw UnsatisfiableError(clauses.empty() ? DependencyClause{} : clauses.front(), {root_});
    }
    return chosen_;
  }

 private:
  const DependencyClause& clause_of(const ClauseRef& ref) const {
    return eco_.at(ref.owner).depspec.clauses[ref.index];
  }

  bool clause_satisfied(const DependencyClause& clause) const {
    for (const Dependency& dep : clause.alternatives) {
      auto it = assigned_.find(dep.target);
      if (it != assigned_.end() && dep.constraint.matches(it->second.version)) return true;
    }
    return false;
  }

  void push_revision(const RevisionId& rid, const RevisionId& introducer) {
    chosen_.push_back(rid);
    assigned_.emplace(rid.product, rid);
    introduced_by_.emplace(rid, introducer);
    const auto& clauses = eco_.at(rid).depspec.clauses;
    for (std::size_t i = 0; i < clauses.size(); ++i) worklist_.push_back({rid, i});
  }

  void pop_to(std::size_t chosen_mark, std::size_t worklist_mark) {
    for (std::size_t i = chosen_mark; i < chosen_.size(); ++i) {
      assigned_.erase(chosen_[i].product);
      introduced_by_.erase(chosen_[i]);
    }
    chosen_.resize(chosen_mark);
    worklist_.resize(worklist_mark);
  }

  std::vector<RevisionId> candidates_for(const DependencyClause& clause) const {
    std::set<RevisionId> found;
    for (const Dependency& dep : clause.alternatives) {
      // A product that already has a different revision assigned would
      // collide; the equal-revision case never reaches here because the
      // clause would have been satisfied.
      if (assigned_.contains(dep.target)) continue;
      for (const RevisionId& rid : eco_.revisions_of(dep.target))
        if (dep.constraint.matches(rid.version) && visible_under(eco_.at(rid), ctx_.snapshot))
          found.insert(rid);
    }
    return {found.begin(), found.end()};
  }

  // Estimate of how many products choosing `cand` will pull in: the
  // candidate's own product plus, for every clause that would still be
  // unsatisfied (pending worklist entries and the candidate's own clauses),
  // the alphabetically least product among its not-yet-assigned alternatives.
  std::size_t estimate_new_products(const RevisionId& cand, std::size_t cursor) const {
    std::set<ProductId> newly;
    newly.insert(cand.product);
    auto satisfied_with_cand = [&](const DependencyClause& clause) {
      for (const Dependency& dep : clause.alternatives) {
        if (dep.target == cand.product) {
          if (dep.constraint.matches(cand.version)) return true;
          continue;
        }
        auto it = assigned_.find(dep.target);
        if (it != assigned_.end() && dep.constraint.matches(it->second.version)) return true;
      }
      return false;
    };
    auto charge = [&](const DependencyClause& clause) {
      if (satisfied_with_cand(clause)) return;
      const ProductId* least = nullptr;
      for (const Dependency& dep : clause.alternatives) {
        if (dep.target == cand.product || assigned_.contains(dep.target)) continue;
        if (!least || dep.target < *least) least = &dep.target;
      }
      if (least) newly.insert(*least);
    };
    for (std::size_t i = cursor + 1; i < worklist_.size(); ++i) charge(clause_of(worklist_[i]));
    for (const DependencyClause& clause : eco_.at(cand).depspec.clauses) charge(clause);
    return newly.size();
  }

  void order_candidates(std::vector<RevisionId>& cands, std::size_t cursor) const {
    if (ctx_.strategy == Strategy::minimal_products) {
      std::map<RevisionId, std::size_t> estimate;
      for (const RevisionId& c : cands) estimate.emplace(c, estimate_new_products(c, cursor));
      std::sort(cands.begin(), cands.end(), [&](const RevisionId& a, const RevisionId& b) {
        std::size_t ea = estimate.at(a), eb = estimate.at(b);
        if (ea != eb) return ea < eb;
        return prefer(Strategy::newest, a, b);
      });
    } else {
      std::sort(cands.begin(), cands.end(), [&](const RevisionId& a, const RevisionId& b) {
        return prefer(ctx_.strategy, a, b);
      });
    }
  }

  // On failure returns the set of products whose current assignments the
  // failure depends on: the owner that introduced the clause, the already
  // assigned alternatives that ruled candidates out, and whatever the failed
  // subtrees reported. A decision whose product is absent from a subtree's
  // set cannot repair it, so its remaining candidates are skipped and the
  // set propagates to a decision that can (conflict-directed backjumping).
  std::optional<std::set<ProductId>> search(std::size_t cursor) {
    while (cursor < worklist_.size() && clause_satisfied(clause_of(worklist_[cursor]))) ++cursor;
    if (cursor == worklist_.size()) return std::nullopt;

    const ClauseRef ref = worklist_[cursor];
    const DependencyClause& clause = clause_of(ref);
    std::set<ProductId> conflict{ref.owner.product};
    for (const Dependency& dep : clause.alternatives)
      if (assigned_.contains(dep.target)) conflict.insert(dep.target);

    std::vector<RevisionId> cands = candidates_for(clause);
    if (cands.empty()) {
      if (!first_dead_end_) first_dead_end_.emplace(ref, chain_to(ref.owner));
      return conflict;
    }
    order_candidates(cands, cursor);
    for (const RevisionId& cand : cands) {
      std::size_t cm = chosen_.size(), wm = worklist_.size();
      push_revision(cand, ref.owner);
      auto sub = search(cursor + 1);
      if (!sub) return std::nullopt;
      pop_to(cm, wm);
      if (!sub->contains(cand.product)) return sub;
      sub->erase(cand.product);
      conflict.merge(*sub);
    }
    return conflict;
  }

  std::vector<RevisionId> chain_to(const RevisionId& owner) const {
    std::vector<RevisionId> chain;
    RevisionId cur = owner;
    while (!(cur == root_)) {
      chain.push_back(cur);
      cur = introduced_by_.at(cur);
    }
    chain.push_back(root_);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  const Ecosystem& eco_;
  RevisionId root_;
  const ResolutionContext& ctx_;
  std::vector<RevisionId> chosen_;
  std::map<ProductId, RevisionId> assigned_;
  std::vector<ClauseRef> worklist_;
  std::map<RevisionId, RevisionId> introduced_by_;
  std::optional<std::pair<ClauseRef, std::vector<RevisionId>>> first_dead_end_;
};

// Shrinks a closed assignment to a minimal one. First a removal sweep over
// single members, least preferred first, repeated until it sticks; then, for
// small sets, an exact pass that enumerates proper subsets (mutually
// supporting members can hide behind single-removal checks). Large sets get
// the group-removal cascade instead.
std::set<RevisionId> minimize(const Ecosystem& eco, const RevisionId& root,
                              const ResolutionContext& ctx, const std::vector<RevisionId>& chosen) {
  std::set<RevisionId> members(chosen.begin(), chosen.end());

  auto sweep = [&] {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<RevisionId> order;
      for (const RevisionId& m : members)
        if (!(m == root)) order.push_back(m);
      std::sort(order.begin(), order.end(), [&](const RevisionId& a, const RevisionId& b) {
        return prefer(ctx.strategy, a, b);
      });
      std::reverse(order.begin(), order.end());
      for (const RevisionId& m : order) {
        members.erase(m);
        if (closed_members(member_pointers(eco, members)))
          changed = true;
        else
          members.insert(m);
      }
    }
  };

  sweep();
  if (members.size() <= kExactMinimalityLimit) {
    if (auto smaller = first_valid_proper_subset(eco, root, members)) members = *smaller;
  } else {
    bool changed = true;
    while (changed) {
      changed = false;
      std::set<RevisionId> group = unreferenced_members(eco, root, members);
      if (!group.empty()) {
        std::set<RevisionId> trimmed;
        for (const RevisionId& m : members)
          if (!group.contains(m)) trimmed.insert(m);
        if (closed_members(member_pointers(eco, trimmed))) {
          members = std::move(trimmed);
          sweep();
          changed = true;
        }
      }
    }
  }
  return members;
}

std::vector<std::pair<RevisionId, RevisionId>> induced_arcs(const Ecosystem& eco,
                                                            const std::set<RevisionId>& members) {
  std::set<std::pair<RevisionId, RevisionId>> arcs;
  for (const RevisionId& a : members)
    for (const DependencyClause& clause : eco.at(a).depspec.clauses)
      for (const Dependency& dep : clause.alternatives)
        for (const RevisionId& b : members)
          if (dep.target == b.product && dep.constraint.matches(b.version)) arcs.emplace(a, b);
  return {arcs.begin(), arcs.end()};
}

}  // namespace

UnsatisfiableError::UnsatisfiableError(DependencyClause failing, std::vector<RevisionId> chain)
    : Error([&] {
        std::string msg = "no satisfiable choice for clause " + failing.str();
        if (!chain.empty()) {
          msg += "; required via ";
          for (std::size_t i = 0; i < chain.size(); ++i) {
            if (i) msg += " -> ";
            msg += chain[i].str();
          }
        }
        return msg;
      }()),
      clause(std::move(failing)),
      requirement_chain(std::move(chain)) {}

ResolvedSet resolve(const Ecosystem& eco, const RevisionId& root, const ResolutionContext& ctx) {
  const Revision& root_rev = eco.at(root);
  if (!visible_under(root_rev, ctx.snapshot))
    throw SnapshotExcludesRootError("root " + root.str() + " is newer than the snapshot");

  Search search(eco, root, ctx);
  std::vector<RevisionId> chosen = search.run();
  ResolvedSet out;
  out.root = root;
  out.members = minimize(eco, root, ctx, chosen);
  out.arcs = induced_arcs(eco, out.members);
  return out;
}

ConditionReport verify_resolution(const Ecosystem& eco, const RevisionId& root,
                                  const std::set<RevisionId>& members) {
  std::vector<const Revision*> ptrs = member_pointers(eco, members);

  ConditionReport rep;
  rep.root_present = members.contains(root);

  rep.closed = true;
  for (const Revision* m : ptrs) {
    for (const DependencyClause& clause : m->depspec.clauses)
      if (!clause_satisfied_by(ptrs, clause)) {
        rep.closed = false;
        rep.unsatisfied_witness.emplace(m->id, clause);
        break;
      }
    if (!rep.closed) break;
  }

  rep.one_per_product = true;
  {
    std::map<ProductId, RevisionId> seen;
    for (const RevisionId& r : members) {
      auto [it, fresh] = seen.emplace(r.product, r);
      if (!fresh) {
        rep.one_per_product = false;
        rep.product_collision.emplace(it->second, r);
        break;
      }
    }
  }

  if (members.size() <= kExactMinimalityLimit) {
    rep.minimality_exact = true;
    if (!rep.root_present) {
      // No subset can contain the root either, so nothing can beat this set.
      rep.minimal = true;
    } else if (auto smaller = first_valid_proper_subset(eco, root, members)) {
      rep.minimal = false;
      rep.smaller_valid_subset = std::move(smaller);
    } else {
      rep.minimal = true;
    }
  } else {
    rep.minimality_exact = false;
    rep.minimal = true;
    if (rep.root_present) {
      for (const RevisionId& m : members) {
        if (m == root) continue;
        std::set<RevisionId> rest = members;
        rest.erase(m);
        std::vector<const Revision*> rest_ptrs = member_pointers(eco, rest);
        if (unique_products(rest_ptrs) && closed_members(rest_ptrs)) {
          rep.minimal = false;
          rep.smaller_valid_subset = std::move(rest);
          break;
        }
      }
      if (rep.minimal) {
        std::set<RevisionId> group = unreferenced_members(eco, root, members);
        if (!group.empty()) {
          std::set<RevisionId> rest;
          for (const RevisionId& m : members)
            if (!group.contains(m)) rest.insert(m);
          std::vector<const Revision*> rest_ptrs = member_pointers(eco, rest);
          if (unique_products(rest_ptrs) && closed_members(rest_ptrs)) {
            rep.minimal = false;
            rep.smaller_valid_subset = std::move(rest);
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace ecostitch
