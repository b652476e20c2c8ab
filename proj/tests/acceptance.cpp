// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected values come from independent oracles, never from
// the code under test.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ecostitch/analysis.hpp"
#include "ecostitch/corpus.hpp"
#include "ecostitch/depgraph.hpp"
#include "ecostitch/resolver.hpp"
#include "ecostitch/stitcher.hpp"
#include "oracles.hpp"

using namespace ecostitch;

namespace {

constexpr double kMassTolerance = 1e-6;
constexpr double kCycleTolerance = 1e-9;

int failures = 0;
int criteria = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  ++criteria;
  if (ok) {
    std::printf("PASS: %s\n", name.c_str());
  } else {
    std::printf("FAIL: %s%s\n", name.c_str(),
                detail.empty() ? "" : (" (" + detail + ")").c_str());
    ++failures;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RevisionId rid(const char* product, const char* version) {
  return {ProductId{product}, parse_version(version)};
}

FunctionId fid(const char* product, const char* version, const char* function) {
  return {rid(product, version), function};
}

// The fixed expectations for the demo corpus, spelled out once.
const std::set<RevisionId> kDemoNewest{rid("A", "1.1"), rid("B", "1.3"), rid("C", "1.4"),
                                       rid("D", "1.0"), rid("E", "1.0")};
const std::set<RevisionId> kDemoMinimalProducts{rid("A", "1.0"), rid("B", "1.3"),
                                                rid("D", "1.0"), rid("E", "1.0")};

void check_demo_newest_resolution(const Ecosystem& eco) {
  auto start = std::chrono::steady_clock::now();
  ResolvedSet rs = resolve(eco, rid("D", "1.0"));
  ConditionReport conditions = verify_resolution(eco, rs.root, rs.members);
  double elapsed = seconds_since(start);

  bool ok = rs.members == kDemoNewest && conditions.root_present && conditions.closed &&
            conditions.one_per_product && conditions.minimal && conditions.minimality_exact &&
            elapsed < 1.0;
  report("newest-strategy resolution of the demo root is exact and passes all four conditions",
         ok, rs.members != kDemoNewest ? "wrong member set" : "condition or time budget missed");
}

void check_demo_minimal_products_resolution(const Ecosystem& eco) {
  auto start = std::chrono::steady_clock::now();
  ResolutionContext ctx;
  ctx.strategy = Strategy::minimal_products;
  ResolvedSet rs = resolve(eco, rid("D", "1.0"), ctx);
  double elapsed = seconds_since(start);

  report("minimal-products resolution of the demo root is exactly the four-revision set",
         rs.members == kDemoMinimalProducts && elapsed < 1.0);
}

void check_function_impact_is_exact(const StitchedGraph& stitched) {
  ImpactReport impact = stitched_impact(stitched, fid("B", "1.3", "f2"));
  bool ok = impact.functions ==
                std::set<FunctionId>{fid("B", "1.3", "f2"), fid("C", "1.4", "f1")} &&
            impact.revisions == std::set<RevisionId>{rid("B", "1.3"), rid("C", "1.4")} &&
            !impact.revisions.contains(rid("D", "1.0"));
  report("function-level impact of the shared B callee is exactly its two callers", ok);
}

void check_vulnerability_rollup(const StitchedGraph& stitched) {
  ImpactReport impact = stitched_impact(stitched, fid("A", "1.1", "f2"));
  bool no_e_functions = true;
  for (const FunctionId& fn : impact.functions)
    if (fn.revision.product.name == "E") no_e_functions = false;
  bool ok = impact.functions.contains(fid("C", "1.4", "f3")) && no_e_functions &&
            vulnerable_revisions(stitched, fid("A", "1.1", "f2")) ==
                std::set<RevisionId>{rid("A", "1.1"), rid("C", "1.4")};
  report("a vulnerability in the shared A helper flags exactly the two dependent revisions", ok);
}

void check_revision_level_overapproximates(const Ecosystem& eco, const StitchedGraph& stitched) {
  ResolvedSet rs = resolve(eco, rid("D", "1.0"));
  std::set<RevisionId> coarse = impact_set(resolved_digraph(rs), rid("B", "1.3"));
  std::set<RevisionId> fine = stitched_impact(stitched, fid("B", "1.3", "f2")).revisions;

  bool superset = std::includes(coarse.begin(), coarse.end(), fine.begin(), fine.end());
  bool ok = coarse == std::set<RevisionId>{rid("B", "1.3"), rid("C", "1.4"), rid("D", "1.0")} &&
            superset && coarse.size() > fine.size();
  report("revision-level impact strictly contains the function-level rollup", ok);
}

void check_binding_candidates(const Ecosystem& eco, const GlobalDepGraph& global) {
  const Revision& c10 = eco.at(rid("C", "1.0"));
  const ExternalNode* y1 = c10.callgraph.find_external("y1");
  const ExternalNode* y2 = c10.callgraph.find_external("y2");
  bool ok = y1 && y2 &&
            sigma(eco, global, c10.id, *y1) ==
                std::vector<FunctionId>{fid("B", "1.0", "f3"), fid("B", "1.3", "f1")} &&
            sigma(eco, global, c10.id, *y2) == std::vector<FunctionId>{fid("A", "1.1", "f3")};
  report("external call sites bind to exactly the matching internal functions", ok);
}

// Brute-force restatements of the resolution conditions, independent of the
// resolver's own verification helpers.
bool brute_clause_satisfied(const DependencyClause& clause, const std::set<RevisionId>& members) {
  for (const Dependency& alt : clause.alternatives)
    for (const RevisionId& m : members)
      if (m.product == alt.target && alt.constraint.matches(m.version)) return true;
  return false;
}

bool brute_closed(const Ecosystem& eco, const std::set<RevisionId>& members) {
  for (const RevisionId& m : members)
    for (const DependencyClause& clause : eco.at(m).depspec.clauses)
      if (!brute_clause_satisfied(clause, members)) return false;
  return true;
}

bool brute_unique_products(const std::set<RevisionId>& members) {
  std::set<ProductId> seen;
  for (const RevisionId& m : members)
    if (!seen.insert(m.product).second) return false;
  return true;
}

bool visible_under(const Revision& rev, std::optional<std::int64_t> snapshot) {
  return !snapshot || !rev.timestamp || *rev.timestamp <= *snapshot;
}

// True when some proper subset of `members` that keeps the root is itself
// closed with unique products, i.e. when `members` is not minimal.
bool brute_has_smaller_valid_subset(const Ecosystem& eco, const RevisionId& root,
                                    const std::set<RevisionId>& members) {
  std::vector<RevisionId> others;
  for (const RevisionId& m : members)
    if (!(m == root)) others.push_back(m);
  const std::size_t n = others.size();
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t(1) << n); ++mask) {
    std::set<RevisionId> subset{root};
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t(1) << i)) subset.insert(others[i]);
    if (brute_unique_products(subset) && brute_closed(eco, subset)) return true;
  }
  return false;
}

// True when any subset of the visible revisions keeps the root, stays closed
// and uses one revision per product, i.e. when the root is satisfiable.
bool brute_any_valid_set(const Ecosystem& eco, const RevisionId& root,
                         std::optional<std::int64_t> snapshot) {
  std::vector<RevisionId> others;
  for (const auto& [id, rev] : eco.revisions())
    if (!(id == root) && visible_under(rev, snapshot)) others.push_back(id);
  const std::size_t n = others.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    std::set<RevisionId> subset{root};
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t(1) << i)) subset.insert(others[i]);
    if (brute_unique_products(subset) && brute_closed(eco, subset)) return true;
  }
  return false;
}

void check_resolver_against_enumeration() {
  auto start = std::chrono::steady_clock::now();

  struct Shape {
    std::size_t products;
    std::size_t revisions;
  };
  const std::vector<Shape> shapes{{4, 3}, {6, 2}, {3, 3}, {5, 2}, {12, 1}, {2, 3}};
  const std::vector<Strategy> strategies{Strategy::newest, Strategy::oldest,
                                         Strategy::minimal_products};

  std::size_t checked = 0;
  std::string failure;
  for (std::uint64_t seed = 0; seed < 200 && failure.empty(); ++seed) {
    const Shape& shape = shapes[seed % shapes.size()];
    GeneratorParams params;
    params.products = shape.products;
    params.revisions_per_product = shape.revisions;
    params.clauses_per_revision = 1.5;
    params.disjunction_probability = 0.35;
    params.product_dag = seed % 2 == 0;
    params.seed = seed;
    Ecosystem eco = generate_synthetic(params);

    std::optional<std::int64_t> snapshot;
    if (seed % 3 == 2) snapshot = 1000 + 10 * static_cast<std::int64_t>(eco.size() / 2);

    std::size_t root_index = 0;
    for (const auto& [root, rev] : eco.revisions()) {
      ResolutionContext ctx;
      ctx.strategy = strategies[root_index++ % strategies.size()];
      ctx.snapshot = snapshot;
      ++checked;
      try {
        ResolvedSet rs = resolve(eco, root, ctx);
        bool members_visible = true;
        for (const RevisionId& m : rs.members)
          if (!visible_under(eco.at(m), snapshot)) members_visible = false;
        if (!rs.members.contains(root))
          failure = "result of " + root.str() + " lost its root";
        else if (!members_visible)
          failure = "result of " + root.str() + " uses revisions beyond the snapshot";
        else if (!brute_closed(eco, rs.members))
          failure = "result of " + root.str() + " is not dependency closed";
        else if (!brute_unique_products(rs.members))
          failure = "result of " + root.str() + " repeats a product";
        else if (brute_has_smaller_valid_subset(eco, root, rs.members))
          failure = "result of " + root.str() + " is not minimal";
      } catch (const UnsatisfiableError&) {
        if (brute_any_valid_set(eco, root, snapshot))
          failure = root.str() + " was reported unsatisfiable but a valid set exists";
      } catch (const SnapshotExcludesRootError&) {
        const Revision& rev_ref = eco.at(root);
        if (visible_under(rev_ref, snapshot))
          failure = root.str() + " was rejected by the snapshot while visible";
      }
      if (!failure.empty()) break;
    }
  }

  double elapsed = seconds_since(start);
  if (failure.empty() && elapsed >= 60.0) failure = "enumeration exceeded the minute budget";
  report("resolver verdicts agree with exhaustive enumeration on 200 seeded ecosystems",
         failure.empty(), failure + " after " + std::to_string(checked) + " resolutions");
}

void check_quotient_against_block_merging() {
  oracles::TestRng rng(11);
  std::string failure;
  for (std::size_t round = 0; round < 500 && failure.empty(); ++round) {
    oracles::RandomGraph raw = oracles::random_graph(rng, 50, 0.06);
    std::set<std::size_t> nodes;
    for (std::size_t i = 0; i < raw.nodes; ++i) nodes.insert(i);
    Digraph<std::size_t> g(nodes, {raw.arcs.begin(), raw.arcs.end()});

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t pair_count = rng.bounded(raw.nodes + 1);
    for (std::size_t p = 0; p < pair_count; ++p)
      pairs.emplace_back(rng.bounded(raw.nodes), rng.bounded(raw.nodes));

    QuotientGraph<std::size_t> quo = quotient(g, pairs);
    oracles::QuotientOracle expected = oracles::quotient_oracle(raw, pairs);

    if (quo.classes != expected.classes) {
      failure = "class partition differs in round " + std::to_string(round);
      break;
    }
    std::set<std::pair<std::size_t, std::size_t>> arcs;
    for (const auto& [from, to] : quo.arcs)
      arcs.emplace(quo.classes[from].front(), quo.classes[to].front());
    if (arcs != expected.arcs)
      failure = "quotient arcs differ in round " + std::to_string(round);
  }
  report("stitching quotients match naive block merging on 500 random graphs", failure.empty(),
         failure);
}

void check_reachability_against_closure() {
  oracles::TestRng rng(23);
  std::string failure;
  std::size_t duality_samples = 0;
  for (std::size_t round = 0; round < 200 && failure.empty(); ++round) {
    oracles::RandomGraph raw = oracles::random_graph(rng, 100, 0.03);
    std::set<std::size_t> nodes;
    for (std::size_t i = 0; i < raw.nodes; ++i) nodes.insert(i);
    Digraph<std::size_t> g(nodes, {raw.arcs.begin(), raw.arcs.end()});
    std::vector<std::vector<bool>> closure = oracles::reach_closure(raw);

    for (std::size_t i = 0; i < raw.nodes && failure.empty(); ++i) {
      std::vector<std::size_t> reached = reach_indices(g, i, Direction::out);
      std::set<std::size_t> reached_set(reached.begin(), reached.end());
      for (std::size_t j = 0; j < raw.nodes; ++j)
        if (closure[i][j] != reached_set.contains(j)) {
          failure = "forward reach differs from the closure in round " + std::to_string(round);
          break;
        }
    }

    for (std::size_t sample = 0; sample < 5 && failure.empty(); ++sample) {
      std::size_t i = rng.bounded(raw.nodes);
      std::size_t j = rng.bounded(raw.nodes);
      ++duality_samples;
      std::vector<std::size_t> backward = reach_indices(g, j, Direction::in);
      bool backward_hit = std::binary_search(backward.begin(), backward.end(), i);
      if (closure[i][j] != backward_hit)
        failure = "reachability duality broken in round " + std::to_string(round);
    }
  }
  if (failure.empty() && duality_samples < 1000)
    failure = "too few duality samples: " + std::to_string(duality_samples);
  report("reachability matches the transitive closure and its duality on sampled pairs",
         failure.empty(), failure);
}

void check_centrality_invariants(const StitchedGraph& stitched) {
  std::string failure;

  PageRankResult demo_rank = pagerank(stitched.class_digraph());
  double mass = 0.0;
  for (double score : demo_rank.scores) mass += score;
  if (!demo_rank.converged || std::abs(mass - 1.0) > kMassTolerance)
    failure = "stitched pagerank mass " + std::to_string(mass);

  oracles::TestRng rng(37);
  for (std::size_t round = 0; round < 50 && failure.empty(); ++round) {
    oracles::RandomGraph raw = oracles::random_graph(rng, 40, 0.08);
    std::set<std::size_t> nodes;
    for (std::size_t i = 0; i < raw.nodes; ++i) nodes.insert(i);
    Digraph<std::size_t> g(nodes, {raw.arcs.begin(), raw.arcs.end()});

    PageRankResult pr = pagerank(g);
    double sum = 0.0;
    for (double score : pr.scores) sum += score;
    if (std::abs(sum - 1.0) > kMassTolerance) {
      failure = "pagerank mass " + std::to_string(sum) + " in round " + std::to_string(round);
      break;
    }

    if (harmonic_centrality(g, Direction::in) != oracles::harmonic_oracle(raw, true) ||
        harmonic_centrality(g, Direction::out) != oracles::harmonic_oracle(raw, false))
      failure = "harmonic centrality differs from the all-pairs search in round " +
                std::to_string(round);
  }

  if (failure.empty()) {
    const std::size_t cycle_len = 7;
    std::set<std::size_t> nodes;
    std::set<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t i = 0; i < cycle_len; ++i) {
      nodes.insert(i);
      arcs.emplace(i, (i + 1) % cycle_len);
    }
    PageRankResult pr = pagerank(Digraph<std::size_t>(nodes, arcs));
    for (double score : pr.scores)
      if (std::abs(score - 1.0 / static_cast<double>(cycle_len)) > kCycleTolerance)
        failure = "cycle pagerank score " + std::to_string(score);
  }

  if (failure.empty()) {
    std::set<std::size_t> nodes{0, 1, 2};
    std::set<std::pair<std::size_t, std::size_t>> arcs{{0, 1}, {1, 2}};
    std::vector<double> scores = harmonic_centrality(Digraph<std::size_t>(nodes, arcs));
    if (scores != std::vector<double>{0.0, 1.0, 1.5})
      failure = "three-node chain scored " + std::to_string(scores[2]);
  }

  report("centrality invariants hold: unit mass, uniform cycles, exact harmonic counts",
         failure.empty(), failure);
}

std::string oracle_license(const Revision& rev, const std::string& function) {
  auto it = rev.function_licenses.find(function);
  if (it != rev.function_licenses.end()) return it->second;
  if (rev.license) return *rev.license;
  return "UNKNOWN";
}

Ecosystem relicense(const Ecosystem& eco, std::uint64_t seed) {
  const std::vector<std::optional<std::string>> rotation{std::nullopt, "MIT", "GPL-3.0",
                                                         "Apache-2.0"};
  oracles::TestRng rng(seed);
  Ecosystem out;
  for (const auto& [id, rev] : eco.revisions()) {
    Revision copy = rev;
    copy.license = rotation[rng.bounded(rotation.size())];
    copy.function_licenses.clear();
    for (const std::string& fn : copy.callgraph.internal)
      if (rng.unit() < 0.3) {
        const std::optional<std::string>& pick = rotation[1 + rng.bounded(rotation.size() - 1)];
        copy.function_licenses[fn] = *pick;
      }
    out.add(std::move(copy));
  }
  return out;
}

void check_license_oracle() {
  const std::vector<std::string> licenses{"MIT", "GPL-3.0", "Apache-2.0", "UNKNOWN"};
  oracles::TestRng rng(53);
  std::string failure;
  std::size_t compared = 0;

  for (std::uint64_t seed = 0; seed < 40 && failure.empty(); ++seed) {
    GeneratorParams params;
    params.products = 4 + seed % 3;
    params.revisions_per_product = 2;
    params.functions_per_revision = 3;
    params.external_ratio = 0.5;
    params.seed = 900 + seed;
    Ecosystem eco = relicense(generate_synthetic(params), seed);
    GlobalDepGraph global = build_global_graph(eco);

    const RevisionId root = eco.revisions().begin()->first;
    StitchedGraph stitched;
    try {
      stitched = stitch(eco, global, resolve(eco, root).members, StitchMode::lenient);
    } catch (const UnsatisfiableError&) {
      continue;
    }

    LicenseMatrix matrix;
    matrix.unknown_policy = seed % 2 == 0 ? UnknownPolicy::flag : UnknownPolicy::ignore;
    for (const std::string& callee : licenses)
      for (const std::string& caller : licenses)
        if (rng.unit() < 0.5) matrix.allowed.emplace(callee, caller);

    using Record = std::tuple<FunctionId, FunctionId, std::string, std::string>;
    std::vector<Record> expected;
    for (const auto& [from, to] : stitched.arcs)
      for (const CallNode& caller : stitched.classes[from].members) {
        if (caller.external) continue;
        for (const CallNode& callee : stitched.classes[to].members) {
          if (callee.external) continue;
          std::string caller_lic = oracle_license(eco.at(caller.revision), caller.name);
          std::string callee_lic = oracle_license(eco.at(callee.revision), callee.name);
          if (matrix.unknown_policy == UnknownPolicy::ignore &&
              (caller_lic == "UNKNOWN" || callee_lic == "UNKNOWN"))
            continue;
          if (!matrix.allowed.contains({callee_lic, caller_lic}))
            expected.emplace_back(caller.function_id(), callee.function_id(), caller_lic,
                                  callee_lic);
        }
      }
    std::sort(expected.begin(), expected.end());

    std::vector<Record> actual;
    for (const LicenseViolation& v : license_violations(stitched, eco, matrix))
      actual.emplace_back(v.caller, v.callee, v.caller_license, v.callee_license);
    compared += expected.size();

    if (actual != expected) {
      failure = "violation lists differ for seed " + std::to_string(seed);
      break;
    }

    LicenseMatrix everything;
    for (const std::string& callee : licenses)
      for (const std::string& caller : licenses) everything.allowed.emplace(callee, caller);
    if (!license_violations(stitched, eco, everything).empty())
      failure = "an all-pairs matrix still produced violations for seed " + std::to_string(seed);
  }

  report("license violations equal the exhaustive pairwise check", failure.empty(),
         failure + " (" + std::to_string(compared) + " violations compared)");
}

void check_large_corpus_budget() {
  auto start = std::chrono::steady_clock::now();

  GeneratorParams params;
  params.products = 200;
  params.revisions_per_product = 10;
  params.functions_per_revision = 50;
  params.seed = 7;
  Ecosystem eco = generate_synthetic(params);
  GlobalDepGraph global = build_global_graph(eco);

  std::string failure;
  if (eco.size() != 2000) failure = "generator produced " + std::to_string(eco.size());

  std::set<RevisionId> largest;
  RevisionId chosen_root;
  for (const char* product : {"p000", "p050", "p100", "p150", "p199"}) {
    RevisionId root = rid(product, "1.9");
    try {
      ResolvedSet rs = resolve(eco, root);
      if (rs.members.size() > largest.size()) {
        largest = rs.members;
        chosen_root = root;
      }
    } catch (const UnsatisfiableError&) {
    }
  }
  if (failure.empty() && largest.empty()) failure = "no sampled root resolved";

  if (failure.empty()) {
    StitchedGraph stitched = stitch(eco, global, largest, StitchMode::lenient);
    ImpactReport impact =
        stitched_impact(stitched, FunctionId{chosen_root, "f0"});
    if (impact.functions.empty()) failure = "impact of the root function came back empty";
  }

  double elapsed = seconds_since(start);
  struct rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const long rss_limit_kb = 2L * 1024 * 1024;

  if (failure.empty() && elapsed >= 30.0)
    failure = "took " + std::to_string(elapsed) + "s";
  if (failure.empty() && usage.ru_maxrss >= rss_limit_kb)
    failure = "used " + std::to_string(usage.ru_maxrss) + " KB";
  report("a two-thousand-revision corpus is resolved, stitched and analyzed inside the budget",
         failure.empty(), failure);
}

void check_corpus_round_trips(const Ecosystem& demo) {
  std::string failure;

  std::string demo_saved = save_ecosystem(demo);
  if (save_ecosystem(load_ecosystem(demo_saved)) != demo_saved)
    failure = "demo corpus did not round trip";

  for (std::uint64_t seed = 0; seed < 100 && failure.empty(); ++seed) {
    GeneratorParams params;
    params.products = 1 + seed % 9;
    params.revisions_per_product = 1 + seed % 4;
    params.external_ratio = 0.4;
    params.product_dag = seed % 2 == 0;
    params.seed = seed;
    std::string saved = save_ecosystem(generate_synthetic(params));
    if (save_ecosystem(load_ecosystem(saved)) != saved)
      failure = "generated corpus for seed " + std::to_string(seed) + " did not round trip";
  }

  report("corpus serialization round trips byte-identically for the demo and 100 generated "
         "corpora",
         failure.empty(), failure);
}

}  // namespace

int main() {
  Ecosystem demo = demo_ecosystem();
  GlobalDepGraph demo_global = build_global_graph(demo);
  StitchedGraph demo_stitched =
      stitch(demo, demo_global, resolve(demo, rid("D", "1.0")).members);

  check_demo_newest_resolution(demo);
  check_demo_minimal_products_resolution(demo);
  check_function_impact_is_exact(demo_stitched);
  check_vulnerability_rollup(demo_stitched);
  check_revision_level_overapproximates(demo, demo_stitched);
  check_binding_candidates(demo, demo_global);
  check_resolver_against_enumeration();
  check_quotient_against_block_merging();
  check_reachability_against_closure();
  check_centrality_invariants(demo_stitched);
  check_license_oracle();
  check_large_corpus_budget();
  check_corpus_round_trips(demo);

  if (failures == 0)
    std::printf("all %d acceptance criteria hold\n", criteria);
  else
    std::printf("%d of %d acceptance criteria failed\n", failures, criteria);
  return failures;
}
