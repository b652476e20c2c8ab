#include "ecostitch/stitcher.hpp"

#include <algorithm>

namespace ecostitch {

namespace {

CallNode internal_node(const RevisionId& rev, const std::string& name) {
  return CallNode{rev, name, false};
}

CallNode external_node(const RevisionId& rev, const std::string& id) {
  return CallNode{rev, id, true};
}

// Arc targets may be internal functions or external call sites of the same
// revision; validation guarantees one of the two holds.
CallNode arc_target(const Revision& rev, const std::string& name) {
  if (rev.callgraph.has_internal(name)) return internal_node(rev.id, name);
  return external_node(rev.id, name);
}

void collect_revision_nodes(const Revision& rev, std::set<CallNode>& nodes,
                            std::set<std::pair<CallNode, CallNode>>& arcs) {
  for (const std::string& fn : rev.callgraph.internal) nodes.insert(internal_node(rev.id, fn));
  for (const ExternalNode& ext : rev.callgraph.external)
    nodes.insert(external_node(rev.id, ext.local_id));
  for (const CallArc& arc : rev.callgraph.arcs)
    arcs.emplace(internal_node(rev.id, arc.from), arc_target(rev, arc.to));
}

}  // namespace

std::string CallNode::str() const {
  if (external) return revision.str() + ":<" + name + ">";
  return revision.str() + ":" + name;
}

FunctionId CallNode::function_id() const { return FunctionId{revision, name}; }

std::weak_ordering operator<=>(const CallNode& a, const CallNode& b) {
  if (auto c = a.revision <=> b.revision; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  return a.external <=> b.external;
}

DanglingExternalError::DanglingExternalError(RevisionId owner_rev, ExternalNode external_node)
    : Error("external call site '" + external_node.local_id + "' of " + owner_rev.str() +
            " binds to no function in the resolved set"),
      owner(std::move(owner_rev)),
      node(std::move(external_node)) {}

std::size_t StitchedGraph::class_of(const CallNode& node) const {
  auto it = index.find(node);
  if (it == index.end())
    throw UnknownNodeError("node " + node.str() + " is not part of the stitched graph");
  return it->second;
}

std::size_t StitchedGraph::class_of_function(const FunctionId& fn) const {
  auto it = index.find(internal_node(fn.revision, fn.function));
  if (it == index.end())
    throw UnknownFunctionError("function " + fn.str() + " is not part of the stitched graph");
  return it->second;
}

Digraph<std::size_t> StitchedGraph::class_digraph() const {
  std::set<std::size_t> nodes;
  for (std::size_t i = 0; i < classes.size(); ++i) nodes.insert(i);
  return Digraph<std::size_t>(nodes, {arcs.begin(), arcs.end()});
}

bool StitchedGraph::has_phantom() const {
  return std::any_of(classes.begin(), classes.end(),
                     [](const NodeClass& c) { return c.phantom; });
}

std::vector<FunctionId> sigma(const Ecosystem& eco, const GlobalDepGraph& global,
                              const RevisionId& owner, const ExternalNode& node) {
  if (!eco.contains(owner))
    throw UnknownRevisionError("unknown revision " + owner.str());
  std::set<FunctionId> out;
  for (const RevisionId& nb : out_neighbors(global, owner)) {
    const Revision& dep = eco.at(nb);
    for (const TargetPattern& pat : node.targets)
      if (pat.product == nb.product && pat.constraint.matches(nb.version) &&
          dep.callgraph.has_internal(pat.function))
        out.insert(FunctionId{nb, pat.function});
  }
  return {out.begin(), out.end()};
}

StitchedGraph stitch(const Ecosystem& eco, const GlobalDepGraph& global,
                     const std::set<RevisionId>& members, StitchMode mode) {
  std::set<CallNode> nodes;
  std::set<std::pair<CallNode, CallNode>> arcs;
  for (const RevisionId& r : members) collect_revision_nodes(eco.at(r), nodes, arcs);

  std::vector<std::pair<CallNode, CallNode>> pairs;
  for (const RevisionId& r : members) {
    for (const ExternalNode& ext : eco.at(r).callgraph.external) {
      bool bound = false;
      for (const FunctionId& target : sigma(eco, global, r, ext)) {
        if (!members.contains(target.revision)) continue;
        pairs.emplace_back(external_node(r, ext.local_id),
                           internal_node(target.revision, target.function));
        bound = true;
      }
      if (!bound && mode == StitchMode::strict) throw DanglingExternalError(r, ext);
    }
  }

  Digraph<CallNode> flat(nodes, arcs);
  QuotientGraph<CallNode> quo = quotient(flat, pairs);

  StitchedGraph out;
  out.classes.reserve(quo.classes.size());
  for (std::vector<CallNode>& cls : quo.classes) {
    StitchedGraph::NodeClass nc;
    nc.members = std::move(cls);
    auto first_internal = std::find_if(nc.members.begin(), nc.members.end(),
                                       [](const CallNode& n) { return !n.external; });
    nc.phantom = first_internal == nc.members.end();
    nc.label = nc.phantom ? nc.members.front() : *first_internal;
    out.classes.push_back(std::move(nc));
  }

  std::vector<std::size_t> order(out.classes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.classes[a].label < out.classes[b].label;
  });
  std::vector<std::size_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  std::vector<StitchedGraph::NodeClass> sorted;
  sorted.reserve(out.classes.size());
  for (std::size_t i : order) sorted.push_back(std::move(out.classes[i]));
  out.classes = std::move(sorted);

  std::set<std::pair<std::size_t, std::size_t>> remapped;
  for (const auto& [from, to] : quo.arcs) remapped.emplace(position[from], position[to]);
  out.arcs.assign(remapped.begin(), remapped.end());

  for (std::size_t i = 0; i < out.classes.size(); ++i)
    for (const CallNode& member : out.classes[i].members) out.index.emplace(member, i);
  return out;
}

Digraph<CallNode> build_universe_graph(const Ecosystem& eco, const GlobalDepGraph& global) {
  std::set<CallNode> nodes;
  std::set<std::pair<CallNode, CallNode>> arcs;
  for (const auto& [rid, rev] : eco.revisions()) {
    collect_revision_nodes(rev, nodes, arcs);
    for (const ExternalNode& ext : rev.callgraph.external)
      for (const FunctionId& target : sigma(eco, global, rid, ext))
        arcs.emplace(external_node(rid, ext.local_id),
                     internal_node(target.revision, target.function));
  }
  return Digraph<CallNode>(nodes, arcs);
}

}  // namespace ecostitch
