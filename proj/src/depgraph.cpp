#include "ecostitch/depgraph.hpp"

#include <queue>

namespace ecostitch {

GlobalDepGraph build_global_graph(const Ecosystem& eco) {
  std::set<RevisionId> nodes;
  std::set<std::pair<RevisionId, RevisionId>> arcs;
  for (const auto& [rid, rev] : eco.revisions()) {
    nodes.insert(rid);
    for (const DependencyClause& clause : rev.depspec.clauses)
      for (const Dependency& dep : clause.alternatives)
        for (const RevisionId& cand : eco.revisions_of(dep.target))
          if (dep.constraint.matches(cand.version)) arcs.emplace(rid, cand);
  }
  return GlobalDepGraph(nodes, arcs);
}

GlobalDepGraph source_dep_graph(const GlobalDepGraph& g, const RevisionId& root) {
  auto start = g.try_index(root);
  if (!start) throw UnknownRevisionError("unknown revision " + root.str());

  std::vector<bool> seen(g.size(), false);
  std::queue<std::size_t> queue;
  seen[*start] = true;
  queue.push(*start);
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop();
    for (std::size_t j : g.out(i))
      if (!seen[j]) {
        seen[j] = true;
        queue.push(j);
      }
  }

  std::set<RevisionId> nodes;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (seen[i]) nodes.insert(g.node(i));
  std::set<std::pair<RevisionId, RevisionId>> arcs;
  for (const auto& [i, j] : g.arcs())
    if (seen[i] && seen[j]) arcs.emplace(g.node(i), g.node(j));
  return GlobalDepGraph(nodes, arcs);
}

bool revision_satisfies_dependency(const Ecosystem& eco, const RevisionId& rev,
                                   const Dependency& dep) {
  eco.at(rev);
  return dep.target == rev.product && dep.constraint.matches(rev.version);
}

bool set_satisfies_spec(const Ecosystem& eco, const std::set<RevisionId>& revs,
                        const DependencySpec& spec) {
  for (const RevisionId& r : revs) eco.at(r);
  for (const DependencyClause& clause : spec.clauses) {
    bool satisfied = false;
    for (const Dependency& dep : clause.alternatives) {
      for (const RevisionId& r : revs)
        if (dep.target == r.product && dep.constraint.matches(r.version)) {
          satisfied = true;
          break;
        }
      if (satisfied) break;
    }
    if (!satisfied) return false;
  }
  return true;
}

bool is_dependency_closed(const Ecosystem& eco, const std::set<RevisionId>& revs) {
  for (const RevisionId& r : revs)
    if (!set_satisfies_spec(eco, revs, eco.at(r).depspec)) return false;
  return true;
}

}  // namespace ecostitch
