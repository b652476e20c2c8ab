#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ecostitch/resolver.hpp"
#include "ecostitch/stitcher.hpp"

namespace ecostitch {

enum class Direction { in, out };

/// Indices of nodes reachable from `start` (inclusive) following arcs forward
/// (Direction::out) or backwards (Direction::in). Sorted ascending.
template <typename Node>
std::vector<std::size_t> reach_indices(const Digraph<Node>& g, std::size_t start, Direction dir) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> frontier{start};
  seen[start] = true;
  while (!frontier.empty()) {
    std::size_t cur = frontier.back();
    frontier.pop_back();
    for (std::size_t nb : dir == Direction::out ? g.out(cur) : g.in(cur))
      if (!seen[nb]) {
        seen[nb] = true;
        frontier.push_back(nb);
      }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

/// Everything `start` can reach, itself included.
template <typename Node>
std::set<Node> forward_reach(const Digraph<Node>& g, const Node& start) {
  std::set<Node> out;
  for (std::size_t i : reach_indices(g, g.index_of(start), Direction::out)) out.insert(g.node(i));
  return out;
}

/// Everything that can reach `start`, itself included: the nodes affected by
/// a change to `start`.
template <typename Node>
std::set<Node> impact_set(const Digraph<Node>& g, const Node& start) {
  std::set<Node> out;
  for (std::size_t i : reach_indices(g, g.index_of(start), Direction::in)) out.insert(g.node(i));
  return out;
}

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-9;
  std::size_t max_iterations = 200;
  Direction direction = Direction::in;
};

struct PageRankResult {
  std::vector<double> scores;  // indexed like Digraph::nodes()
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration with uniform teleport. Direction::in distributes each
/// node's score along its outgoing arcs, ranking heavily-called nodes high;
/// Direction::out does the same on reversed arcs. Mass of sink nodes is
/// spread uniformly, so scores always sum to one. Stops when the L1 change
/// drops to the tolerance or the iteration cap is hit.
template <typename Node>
PageRankResult pagerank(const Digraph<Node>& g, const PageRankOptions& opts = {}) {
  if (g.empty()) throw EmptyGraphError("pagerank needs a non-empty graph");
  if (opts.damping < 0.0 || opts.damping >= 1.0)
    throw InvalidParamsError("damping must lie in [0, 1)");
  if (opts.tolerance <= 0.0) throw InvalidParamsError("tolerance must be positive");
  if (opts.max_iterations == 0) throw InvalidParamsError("max_iterations must be positive");

  const std::size_t n = g.size();
  const bool incoming = opts.direction == Direction::in;
  std::vector<std::size_t> push_degree(n);
  for (std::size_t i = 0; i < n; ++i)
    push_degree[i] = incoming ? g.out(i).size() : g.in(i).size();

  PageRankResult res;
  res.scores.assign(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    double sink_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (push_degree[i] == 0) sink_mass += res.scores[i];
    const double base =
        (1.0 - opts.damping + opts.damping * sink_mass) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double pulled = 0.0;
      for (std::size_t j : incoming ? g.in(i) : g.out(i))
        pulled += res.scores[j] / static_cast<double>(push_degree[j]);
      next[i] = base + opts.damping * pulled;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - res.scores[i]);
    res.scores.swap(next);
    res.iterations = iter + 1;
    if (delta <= opts.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/// Harmonic centrality of every node: the sum of reciprocal shortest-path
/// distances from all other nodes (Direction::in) or to them (Direction::out).
/// Unreachable pairs contribute nothing. Per-distance counts are accumulated
/// first and summed in one pass, which keeps the floating-point result
/// independent of node numbering.
template <typename Node>
std::vector<double> harmonic_centrality(const Digraph<Node>& g, Direction dir = Direction::in) {
  if (g.empty()) throw EmptyGraphError("harmonic centrality needs a non-empty graph");
  const std::size_t n = g.size();
  std::vector<double> scores(n, 0.0);
  std::vector<std::size_t> dist(n);
  for (std::size_t start = 0; start < n; ++start) {
    std::fill(dist.begin(), dist.end(), static_cast<std::size_t>(-1));
    dist[start] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(start);
    std::vector<std::size_t> level_counts;
    while (!frontier.empty()) {
      std::size_t cur = frontier.front();
      frontier.pop();
      for (std::size_t nb : dir == Direction::in ? g.in(cur) : g.out(cur))
        if (dist[nb] == static_cast<std::size_t>(-1)) {
          dist[nb] = dist[cur] + 1;
          if (level_counts.size() < dist[nb]) level_counts.resize(dist[nb], 0);
          ++level_counts[dist[nb] - 1];
          frontier.push(nb);
        }
    }
    double total = 0.0;
    for (std::size_t level = 0; level < level_counts.size(); ++level)
      total += static_cast<double>(level_counts[level]) / static_cast<double>(level + 1);
    scores[start] = total;
  }
  return scores;
}

/// Functions affected by a change to `seed`, rolled up to the revisions and
/// products that declare them.
struct ImpactReport {
  FunctionId seed;
  std::set<FunctionId> functions;
  std::set<RevisionId> revisions;
  std::set<ProductId> products;
};

/// Impact within one stitched resolution: every internal function belonging
/// to a class from which the seed's class is reachable.
ImpactReport stitched_impact(const StitchedGraph& g, const FunctionId& seed);

/// Revisions that execute the seed function, directly or through
/// intermediaries, inside one stitched resolution.
std::set<RevisionId> vulnerable_revisions(const StitchedGraph& g, const FunctionId& seed);

/// Impact across the whole ecosystem at once, over the universe call graph.
/// External call sites count as functions of the revision that contains them.
ImpactReport ecosystem_change_impact(const Digraph<CallNode>& universe, const FunctionId& seed);

/// The dependency graph induced on a resolved set's members.
Digraph<RevisionId> resolved_digraph(const ResolvedSet& rs);

enum class UnknownPolicy { flag, ignore };

/// Which license pairings are acceptable. `allowed` holds (callee license,
/// caller license) pairs; a call is a violation when its pair is absent.
/// Functions without any license information get the pseudo-license UNKNOWN,
/// and `unknown_policy` decides whether such calls are reported or skipped.
struct LicenseMatrix {
  std::set<std::pair<std::string, std::string>> allowed;
  UnknownPolicy unknown_policy = UnknownPolicy::flag;
};

struct LicenseViolation {
  FunctionId caller;
  FunctionId callee;
  std::string caller_license;
  std::string callee_license;

  std::weak_ordering operator<=>(const LicenseViolation& other) const {
    if (auto c = caller <=> other.caller; c != 0) return c;
    if (auto c = callee <=> other.callee; c != 0) return c;
    if (auto c = caller_license <=> other.caller_license; c != 0) return c;
    return callee_license <=> other.callee_license;
  }
  bool operator==(const LicenseViolation& other) const {
    return (*this <=> other) == std::weak_ordering::equivalent;
  }
};

/// License of one function: per-function override, else the revision-wide
/// license, else UNKNOWN.
std::string effective_license(const Revision& rev, const std::string& function);

/// Checks every call between internal functions of a stitched resolution
/// against the matrix. Sorted by caller, callee, then licenses.
std::vector<LicenseViolation> license_violations(const StitchedGraph& g, const Ecosystem& eco,
                                                 const LicenseMatrix& matrix);

/// Reads a matrix from JSON: {"allowed": [{"callee": L, "caller": L}, ...],
/// "unknownPolicy": "flag" | "ignore"}. Throws ParseError on anything else.
LicenseMatrix parse_license_matrix(std::string_view json_text);

}  // namespace ecostitch
