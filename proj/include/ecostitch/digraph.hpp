#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ecostitch/errors.hpp"

namespace ecostitch {

/// Immutable directed graph over an ordered node type. Nodes are stored
/// ascending so index assignment is a pure function of the node set, which
/// keeps every traversal and output deterministic.
template <typename Node>
class Digraph {
 public:
  Digraph() = default;

  Digraph(const std::set<Node>& nodes, const std::set<std::pair<Node, Node>>& arcs)
      : nodes_(nodes.begin(), nodes.end()),
        out_(nodes.size()),
        in_(nodes.size()) {
    arcs_.reserve(arcs.size());
    for (const auto& [a, b] : arcs) {
      std::size_t i = index_of(a);
      std::size_t j = index_of(b);
      arcs_.emplace_back(i, j);
      out_[i].push_back(j);
      in_[j].push_back(i);
    }
    std::sort(arcs_.begin(), arcs_.end());
    for (auto& v : in_) std::sort(v.begin(), v.end());
    // out_ lists are already ascending: the arc set iterates in node order.
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<std::pair<std::size_t, std::size_t>>& arcs() const { return arcs_; }
  const std::vector<std::size_t>& out(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& in(std::size_t i) const { return in_[i]; }

  std::optional<std::size_t> try_index(const Node& n) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end() || !(*it == n)) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::size_t index_of(const Node& n) const {
    if (auto i = try_index(n)) return *i;
    throw UnknownNodeError("node is not part of the graph");
  }

  bool has_node(const Node& n) const { return try_index(n).has_value(); }

  bool has_arc(const Node& a, const Node& b) const {
    auto i = try_index(a), j = try_index(b);
    if (!i || !j) return false;
    return std::binary_search(out_[*i].begin(), out_[*i].end(), *j);
  }

 private:
  std::vector<Node> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

template <typename Node>
std::vector<Node> out_neighbors(const Digraph<Node>& g, const Node& n) {
  std::vector<Node> result;
  for (std::size_t j : g.out(g.index_of(n))) result.push_back(g.node(j));
  return result;
}

template <typename Node>
std::vector<Node> in_neighbors(const Digraph<Node>& g, const Node& n) {
  std::vector<Node> result;
  for (std::size_t j : g.in(g.index_of(n))) result.push_back(g.node(j));
  return result;
}

/// Result of contracting a graph along an equivalence: the classes (each a
/// sorted member list, classes ordered by their least member) and the
/// projected arcs between class positions. Self-loops survive contraction.
template <typename Node>
struct QuotientGraph {
  std::vector<std::vector<Node>> classes;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::map<Node, std::size_t> class_of;
};

/// Contracts `g` by the smallest equivalence relating both ends of every
/// pair. An arc [x] -> [y] exists in the result exactly when some member of
/// [x] had an arc to some member of [y]. Throws UnknownNodeError when a pair
/// endpoint is not a node of `g`.
template <typename Node>
QuotientGraph<Node> quotient(const Digraph<Node>& g,
                             const std::vector<std::pair<Node, Node>>& pairs) {
  std::vector<std::size_t> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [a, b] : pairs) {
    std::size_t ra = find(g.index_of(a));
    std::size_t rb = find(g.index_of(b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  // With min-root union the representative of each class is its least member,
  // so sorting roots orders classes by least member directly.
  std::map<std::size_t, std::size_t> root_to_class;
  std::vector<std::vector<std::size_t>> member_idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t r = find(i);
    auto [it, fresh] = root_to_class.emplace(r, member_idx.size());
    if (fresh) member_idx.emplace_back();
    member_idx[it->second].push_back(i);
  }
  std::vector<std::size_t> order(member_idx.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return member_idx[a].front() < member_idx[b].front();
  });
  std::vector<std::size_t> position(member_idx.size());
  for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = p;

  QuotientGraph<Node> q;
  q.classes.resize(member_idx.size());
  for (std::size_t c = 0; c < member_idx.size(); ++c) {
    std::size_t p = position[c];
    for (std::size_t i : member_idx[c]) {
      q.classes[p].push_back(g.node(i));
      q.class_of.emplace(g.node(i), p);
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> arc_set;
  for (const auto& [i, j] : g.arcs())
    arc_set.emplace(position[root_to_class.at(find(i))], position[root_to_class.at(find(j))]);
  q.arcs.assign(arc_set.begin(), arc_set.end());
  return q;
}

}  // namespace ecostitch
