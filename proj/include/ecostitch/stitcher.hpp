#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ecostitch/depgraph.hpp"
#include "ecostitch/errors.hpp"

namespace ecostitch {

// A function-level node owned by one revision. Internal nodes are functions
// the revision declares; external nodes are its call sites into dependencies.
struct CallNode {
  RevisionId revision;
  std::string name;
  bool external = false;

  std::string str() const;
  FunctionId function_id() const;

  friend std::weak_ordering operator<=>(const CallNode& a, const CallNode& b);
  friend bool operator==(const CallNode& a, const CallNode& b) { return (a <=> b) == 0; }
};

enum class StitchMode { strict, lenient };

struct DanglingExternalError : Error {
  DanglingExternalError(RevisionId owner_rev, ExternalNode external_node);

  RevisionId owner;
  ExternalNode node;
};

// Call graph of a resolved set after identifying each external call site with
// the internal functions it binds to. Classes are sorted by label; a phantom
// class is an external that bound to nothing (lenient mode only).
struct StitchedGraph {
  struct NodeClass {
    CallNode label;
    std::vector<CallNode> members;
    bool phantom = false;
  };

  std::vector<NodeClass> classes;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::map<CallNode, std::size_t> index;

  std::size_t class_of(const CallNode& node) const;
  std::size_t class_of_function(const FunctionId& fn) const;
  Digraph<std::size_t> class_digraph() const;
  bool has_phantom() const;
};

// Functions an external call site can bind to: internal functions matched by
// one of its target patterns in revisions adjacent to the owner in the
// dependency graph.
std::vector<FunctionId> sigma(const Ecosystem& eco, const GlobalDepGraph& global,
                              const RevisionId& owner, const ExternalNode& node);

StitchedGraph stitch(const Ecosystem& eco, const GlobalDepGraph& global,
                     const std::set<RevisionId>& members, StitchMode mode = StitchMode::strict);

// Call graph over every revision at once: all internal and external nodes,
// intra-revision arcs, and an arc from each external to every function it can
// bind to anywhere in the dependency graph.
Digraph<CallNode> build_universe_graph(const Ecosystem& eco, const GlobalDepGraph& global);

}  // namespace ecostitch
