#pragma once

#include <set>

#include "ecostitch/digraph.hpp"
#include "ecostitch/model.hpp"

namespace ecostitch {

/// Revision-level dependency graph: an arc r -> r' means r' satisfies at
/// least one dependency in one of r's clauses. Out-neighbors of r are the
/// revisions r could draw on; in-neighbors are the revisions that could draw
/// on r.
using GlobalDepGraph = Digraph<RevisionId>;

/// Builds the dependency graph over every revision of the ecosystem.
GlobalDepGraph build_global_graph(const Ecosystem& eco);

/// The smallest subgraph containing `root` and, transitively, everything any
/// contained revision could depend on. Throws UnknownRevisionError when the
/// root is not a node of `g`.
GlobalDepGraph source_dep_graph(const GlobalDepGraph& g, const RevisionId& root);

/// True when `rev` is a revision of the dependency's product and its version
/// matches the constraint. `rev` must belong to the ecosystem.
bool revision_satisfies_dependency(const Ecosystem& eco, const RevisionId& rev,
                                   const Dependency& dep);

/// True when every clause has at least one alternative met by some member of
/// `revs`. The empty spec is satisfied by any set, including the empty one.
bool set_satisfies_spec(const Ecosystem& eco, const std::set<RevisionId>& revs,
                        const DependencySpec& spec);

/// True when `revs` satisfies the depspec of each of its own members.
bool is_dependency_closed(const Ecosystem& eco, const std::set<RevisionId>& revs);

}  // namespace ecostitch
