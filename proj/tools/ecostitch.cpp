#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecostitch/analysis.hpp"
#include "ecostitch/corpus.hpp"

using namespace ecostitch;
using nlohmann::ordered_json;

namespace {

struct Palette {
  const char* bold = "";
  const char* red = "";
  const char* green = "";
  const char* reset = "";
};

Palette palette_for(int fd) {
  if (!isatty(fd) || std::getenv("ECOSTITCH_NO_COLOR")) return {};
  return {"\033[1m", "\033[31m", "\033[32m", "\033[0m"};
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 9);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RevisionId parse_revision_ref(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw InvalidParamsError("'" + text + "' is not of the PRODUCT:VERSION form");
  try {
    return {ProductId{text.substr(0, colon)}, parse_version(text.substr(colon + 1))};
  } catch (const ParseError& e) {
    throw InvalidParamsError("invalid version in '" + text + "': " + e.what());
  }
}

FunctionId parse_function_ref(const std::string& text) {
  auto c1 = text.find(':');
  auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos || c1 == 0 || c2 == c1 + 1 ||
      c2 + 1 == text.size())
    throw InvalidParamsError("'" + text + "' is not of the PRODUCT:VERSION:FUNCTION form");
  try {
    return {{ProductId{text.substr(0, c1)}, parse_version(text.substr(c1 + 1, c2 - c1 - 1))},
            text.substr(c2 + 1)};
  } catch (const ParseError& e) {
    throw InvalidParamsError("invalid version in '" + text + "': " + e.what());
  }
}

Strategy parse_strategy(const std::string& name) {
  if (name == "oldest") return Strategy::oldest;
  if (name == "minimal-products") return Strategy::minimal_products;
  return Strategy::newest;
}

std::string dot_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void print_dot(const std::string& graph_name, const std::vector<std::string>& nodes,
               const std::vector<std::pair<std::string, std::string>>& arcs,
               const std::set<std::string>& dashed) {
  std::cout << "digraph " << graph_name << " {\n";
  for (const std::string& node : nodes) {
    std::cout << "  \"" << dot_escape(node) << "\"";
    if (dashed.contains(node)) std::cout << " [style=dashed]";
    std::cout << ";\n";
  }
  for (const auto& [from, to] : arcs)
    std::cout << "  \"" << dot_escape(from) << "\" -> \"" << dot_escape(to) << "\";\n";
  std::cout << "}\n";
}

struct CommonOpts {
  std::string corpus;
  std::string format = "text";

  bool structured() const { return format == "structured"; }
};

struct ResolveOpts {
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  bool verify = false;
  bool dot = false;
};

ResolutionContext make_context(const std::string& strategy, bool has_snapshot,
                               std::int64_t snapshot) {
  ResolutionContext ctx;
  ctx.strategy = parse_strategy(strategy);
  if (has_snapshot) ctx.snapshot = snapshot;
  return ctx;
}

ordered_json verification_record(const RevisionId& root, const ConditionReport& report) {
  ordered_json rec;
  rec["record"] = "verification";
  rec["root"] = root.str();
  rec["rootPresent"] = report.root_present;
  rec["dependencyClosed"] = report.closed;
  if (report.unsatisfied_witness) {
    rec["unsatisfied"] = ordered_json{{"owner", report.unsatisfied_witness->first.str()},
                                      {"clause", report.unsatisfied_witness->second.str()}};
  }
  rec["onePerProduct"] = report.one_per_product;
  if (report.product_collision)
    rec["collision"] = ordered_json::array(
        {report.product_collision->first.str(), report.product_collision->second.str()});
  rec["minimal"] = report.minimal;
  rec["minimalityExact"] = report.minimality_exact;
  if (report.smaller_valid_subset) {
    ordered_json subset = ordered_json::array();
    for (const RevisionId& r : *report.smaller_valid_subset) subset.push_back(r.str());
    rec["smallerSubset"] = std::move(subset);
  }
  return rec;
}

void print_verification_text(const ConditionReport& report) {
  Palette p = palette_for(STDOUT_FILENO);
  auto verdict = [&](bool ok) {
    return std::string(ok ? p.green : p.red) + (ok ? "yes" : "no") + p.reset;
  };
  std::cout << "verification:\n";
  std::cout << "  root present: " << verdict(report.root_present) << "\n";
  std::cout << "  dependency closed: " << verdict(report.closed);
  if (report.unsatisfied_witness)
    std::cout << " (" << report.unsatisfied_witness->first.str() << " cannot satisfy "
              << report.unsatisfied_witness->second.str() << ")";
  std::cout << "\n";
  std::cout << "  one revision per product: " << verdict(report.one_per_product);
  if (report.product_collision)
    std::cout << " (" << report.product_collision->first.str() << " vs "
              << report.product_collision->second.str() << ")";
  std::cout << "\n";
  std::cout << "  minimal: " << verdict(report.minimal) << " ("
            << (report.minimality_exact ? "exact" : "heuristic") << ")";
  if (report.smaller_valid_subset) {
    std::cout << " smaller set:";
    for (const RevisionId& r : *report.smaller_valid_subset) std::cout << " " << r.str();
  }
  std::cout << "\n";
}

int run_resolve(const CommonOpts& common, const ResolveOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  RevisionId root = parse_revision_ref(opts.root);
  ResolvedSet rs = resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot));

  if (opts.dot) {
    std::vector<std::string> nodes;
    for (const RevisionId& r : rs.members) nodes.push_back(r.str());
    std::vector<std::pair<std::string, std::string>> arcs;
    for (const auto& [from, to] : rs.arcs) arcs.emplace_back(from.str(), to.str());
    print_dot("resolution", nodes, arcs, {});
    return 0;
  }

  std::optional<ConditionReport> report;
  if (opts.verify) report = verify_resolution(eco, root, rs.members);

  if (common.structured()) {
    ordered_json rec;
    rec["record"] = "resolution";
    rec["root"] = root.str();
    rec["strategy"] = opts.strategy;
    ordered_json members = ordered_json::array();
    for (const RevisionId& r : rs.members) members.push_back(r.str());
    rec["members"] = std::move(members);
    ordered_json arcs = ordered_json::array();
    for (const auto& [from, to] : rs.arcs)
      arcs.push_back(ordered_json::array({from.str(), to.str()}));
    rec["arcs"] = std::move(arcs);
    std::cout << rec.dump() << "\n";
    if (report) std::cout << verification_record(root, *report).dump() << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << "resolved " << root.str() << " (" << opts.strategy << "): "
              << rs.members.size() << " revisions" << p.reset << "\n";
    std::cout << "members:\n";
    for (const RevisionId& r : rs.members) std::cout << "  " << r.str() << "\n";
    if (!rs.arcs.empty()) {
      std::cout << "arcs:\n";
      for (const auto& [from, to] : rs.arcs)
        std::cout << "  " << from.str() << " -> " << to.str() << "\n";
    }
    if (report) print_verification_text(*report);
  }
  return 0;
}

struct VerifyOpts {
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  std::vector<std::string> members;
  bool fail_on_findings = false;
};

int run_verify(const CommonOpts& common, const VerifyOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  RevisionId root = parse_revision_ref(opts.root);

  std::set<RevisionId> members;
  if (opts.members.empty()) {
    members =
        resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot)).members;
  } else {
    for (const std::string& text : opts.members) members.insert(parse_revision_ref(text));
  }
  ConditionReport report = verify_resolution(eco, root, members);

  if (common.structured()) {
    std::cout << verification_record(root, report).dump() << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << "verify " << root.str() << ": " << members.size() << " members"
              << p.reset << "\n";
    print_verification_text(report);
    if (report.all_conditions_hold())
      std::cout << p.green << "all conditions hold" << p.reset << "\n";
    else
      std::cout << p.red << "not a valid resolution" << p.reset << "\n";
  }
  return !report.all_conditions_hold() && opts.fail_on_findings ? 1 : 0;
}

struct ImpactOpts {
  std::string vuln;
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  std::string level = "function";
  bool ecosystem_wide = false;
  bool lenient = false;
  bool fail_on_findings = false;
};

void print_impact_sets(const std::set<FunctionId>* functions, const std::set<RevisionId>& revisions,
                       const std::set<ProductId>& products) {
  if (functions) {
    std::cout << "functions (" << functions->size() << "):\n";
    for (const FunctionId& f : *functions) std::cout << "  " << f.str() << "\n";
  }
  std::cout << "revisions (" << revisions.size() << "):\n";
  for (const RevisionId& r : revisions) std::cout << "  " << r.str() << "\n";
  std::cout << "products (" << products.size() << "):\n";
  for (const ProductId& pr : products) std::cout << "  " << pr.name << "\n";
}

ordered_json impact_record(const FunctionId& seed, const std::string& level,
                           const std::string& scope, const std::string& root,
                           const std::set<FunctionId>* functions,
                           const std::set<RevisionId>& revisions,
                           const std::set<ProductId>& products, bool findings) {
  ordered_json rec;
  rec["record"] = "impact";
  rec["seed"] = level == "function" ? seed.str() : seed.revision.str();
  rec["level"] = level;
  rec["scope"] = scope;
  if (!root.empty()) rec["root"] = root;
  if (functions) {
    ordered_json fns = ordered_json::array();
    for (const FunctionId& f : *functions) fns.push_back(f.str());
    rec["functions"] = std::move(fns);
  }
  ordered_json revs = ordered_json::array();
  for (const RevisionId& r : revisions) revs.push_back(r.str());
  rec["revisions"] = std::move(revs);
  ordered_json prods = ordered_json::array();
  for (const ProductId& pr : products) prods.push_back(pr.name);
  rec["products"] = std::move(prods);
  rec["findings"] = findings;
  return rec;
}

int run_impact(const CommonOpts& common, const ImpactOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  FunctionId seed = parse_function_ref(opts.vuln);
  const bool function_level = opts.level == "function";

  if (opts.ecosystem_wide && !opts.root.empty())
    throw InvalidParamsError("--root cannot be combined with --ecosystem-wide");
  if (!opts.ecosystem_wide && opts.root.empty())
    throw InvalidParamsError("--root is required unless --ecosystem-wide is given");

  std::set<FunctionId> functions;
  std::set<RevisionId> revisions;
  std::set<ProductId> products;
  std::string scope = opts.ecosystem_wide ? "ecosystem" : "resolution";
  RevisionId root;

  if (opts.ecosystem_wide) {
    GlobalDepGraph global = build_global_graph(eco);
    if (function_level) {
      ImpactReport report = ecosystem_change_impact(build_universe_graph(eco, global), seed);
      functions = std::move(report.functions);
      revisions = std::move(report.revisions);
      products = std::move(report.products);
    } else {
      if (!eco.at(seed.revision).callgraph.has_internal(seed.function))
        throw UnknownFunctionError("function " + seed.str() + " is not part of the graph");
      revisions = impact_set(global, seed.revision);
      for (const RevisionId& r : revisions) products.insert(r.product);
    }
  } else {
    root = parse_revision_ref(opts.root);
    ResolvedSet rs =
        resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot));
    if (function_level) {
      StitchedGraph stitched = stitch(eco, build_global_graph(eco), rs.members,
                                      opts.lenient ? StitchMode::lenient : StitchMode::strict);
      ImpactReport report = stitched_impact(stitched, seed);
      functions = std::move(report.functions);
      revisions = std::move(report.revisions);
      products = std::move(report.products);
    } else {
      if (!eco.at(seed.revision).callgraph.has_internal(seed.function))
        throw UnknownFunctionError("function " + seed.str() + " is not part of the graph");
      revisions = impact_set(resolved_digraph(rs), seed.revision);
      for (const RevisionId& r : revisions) products.insert(r.product);
    }
  }

  bool findings = function_level ? functions.size() > 1 : revisions.size() > 1;

  if (common.structured()) {
    std::cout << impact_record(seed, opts.level, scope, root.product.name.empty() ? "" : root.str(),
                               function_level ? &functions : nullptr, revisions, products, findings)
                     .dump()
              << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << "impact of "
              << (function_level ? seed.str() : seed.revision.str());
    if (opts.ecosystem_wide)
      std::cout << " across the ecosystem";
    else
      std::cout << " within resolution of " << root.str() << " (" << opts.strategy << ")";
    std::cout << p.reset << "\n";
    print_impact_sets(function_level ? &functions : nullptr, revisions, products);
    if (findings)
      std::cout << p.red << "impact extends beyond the seed" << p.reset << "\n";
    else
      std::cout << p.green << "impact confined to the seed" << p.reset << "\n";
  }
  return findings && opts.fail_on_findings ? 1 : 0;
}

struct StitchOpts {
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  bool lenient = false;
  bool dot = false;
};

int run_stitch(const CommonOpts& common, const StitchOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  RevisionId root = parse_revision_ref(opts.root);
  ResolvedSet rs =
      resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot));
  StitchedGraph stitched = stitch(eco, build_global_graph(eco), rs.members,
                                  opts.lenient ? StitchMode::lenient : StitchMode::strict);

  if (opts.dot) {
    std::vector<std::string> nodes;
    std::set<std::string> dashed;
    for (const auto& cls : stitched.classes) {
      nodes.push_back(cls.label.str());
      if (cls.phantom) dashed.insert(cls.label.str());
    }
    std::vector<std::pair<std::string, std::string>> arcs;
    for (const auto& [from, to] : stitched.arcs)
      arcs.emplace_back(stitched.classes[from].label.str(), stitched.classes[to].label.str());
    print_dot("stitched", nodes, arcs, dashed);
    return 0;
  }

  if (common.structured()) {
    ordered_json rec;
    rec["record"] = "stitched";
    rec["root"] = root.str();
    rec["strategy"] = opts.strategy;
    rec["mode"] = opts.lenient ? "lenient" : "strict";
    ordered_json members = ordered_json::array();
    for (const RevisionId& r : rs.members) members.push_back(r.str());
    rec["members"] = std::move(members);
    ordered_json classes = ordered_json::array();
    for (const auto& cls : stitched.classes) {
      ordered_json entry;
      entry["label"] = cls.label.str();
      ordered_json cl_members = ordered_json::array();
      for (const CallNode& node : cls.members) cl_members.push_back(node.str());
      entry["members"] = std::move(cl_members);
      entry["phantom"] = cls.phantom;
      classes.push_back(std::move(entry));
    }
    rec["classes"] = std::move(classes);
    ordered_json arcs = ordered_json::array();
    for (const auto& [from, to] : stitched.arcs)
      arcs.push_back(ordered_json::array(
          {stitched.classes[from].label.str(), stitched.classes[to].label.str()}));
    rec["arcs"] = std::move(arcs);
    std::cout << rec.dump() << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << "stitched " << root.str() << " (" << opts.strategy << ", "
              << (opts.lenient ? "lenient" : "strict") << "): " << rs.members.size()
              << " revisions, " << stitched.classes.size() << " classes, "
              << stitched.arcs.size() << " arcs" << p.reset << "\n";
    std::cout << "classes:\n";
    for (const auto& cls : stitched.classes) {
      std::cout << "  " << cls.label.str() << " = {";
      for (std::size_t i = 0; i < cls.members.size(); ++i)
        std::cout << (i ? ", " : " ") << cls.members[i].str();
      std::cout << " }";
      if (cls.phantom) std::cout << " (phantom)";
      std::cout << "\n";
    }
    if (!stitched.arcs.empty()) {
      std::cout << "arcs:\n";
      for (const auto& [from, to] : stitched.arcs)
        std::cout << "  " << stitched.classes[from].label.str() << " -> "
                  << stitched.classes[to].label.str() << "\n";
    }
  }
  return 0;
}

struct CentralityOpts {
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  bool ecosystem_wide = false;
  bool lenient = false;
  std::string measure = "pagerank";
  std::string direction = "in";
  double damping = 0.85;
  double tolerance = 1e-9;
  std::size_t max_iterations = 200;
  std::size_t top = 0;
};

int run_centrality(const CommonOpts& common, const CentralityOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  if (opts.ecosystem_wide && !opts.root.empty())
    throw InvalidParamsError("--root cannot be combined with --ecosystem-wide");
  if (!opts.ecosystem_wide && opts.root.empty())
    throw InvalidParamsError("--root is required unless --ecosystem-wide is given");

  Direction dir = opts.direction == "out" ? Direction::out : Direction::in;
  std::vector<std::string> labels;
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;
  std::string scope_text;
  RevisionId root;

  auto compute = [&](const auto& graph) {
    if (opts.measure == "pagerank") {
      PageRankOptions pr;
      pr.damping = opts.damping;
      pr.tolerance = opts.tolerance;
      pr.max_iterations = opts.max_iterations;
      pr.direction = dir;
      PageRankResult result = pagerank(graph, pr);
      scores = std::move(result.scores);
      iterations = result.iterations;
      converged = result.converged;
    } else {
      scores = harmonic_centrality(graph, dir);
    }
  };

  if (opts.ecosystem_wide) {
    Digraph<CallNode> universe = build_universe_graph(eco, build_global_graph(eco));
    for (const CallNode& node : universe.nodes()) labels.push_back(node.str());
    compute(universe);
    scope_text = "the ecosystem call graph";
  } else {
    root = parse_revision_ref(opts.root);
    ResolvedSet rs =
        resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot));
    StitchedGraph stitched = stitch(eco, build_global_graph(eco), rs.members,
                                    opts.lenient ? StitchMode::lenient : StitchMode::strict);
    for (const auto& cls : stitched.classes) labels.push_back(cls.label.str());
    compute(stitched.class_digraph());
    scope_text = "stitched resolution of " + root.str();
  }

  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return labels[a] < labels[b];
  });
  std::size_t shown = opts.top > 0 && opts.top < order.size() ? opts.top : order.size();

  if (common.structured()) {
    ordered_json rec;
    rec["record"] = "centrality";
    rec["measure"] = opts.measure;
    rec["direction"] = opts.direction;
    rec["scope"] = opts.ecosystem_wide ? "ecosystem" : "resolution";
    if (!opts.ecosystem_wide) rec["root"] = root.str();
    rec["nodes"] = labels.size();
    if (opts.measure == "pagerank") {
      rec["iterations"] = iterations;
      rec["converged"] = converged;
    }
    ordered_json entries = ordered_json::array();
    for (std::size_t i = 0; i < shown; ++i) {
      ordered_json entry;
      entry["node"] = labels[order[i]];
      entry["score"] = scores[order[i]];
      entries.push_back(std::move(entry));
    }
    rec["scores"] = std::move(entries);
    std::cout << rec.dump() << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << opts.measure << " (" << opts.direction << ") over " << scope_text
              << ": " << labels.size() << " nodes" << p.reset << "\n";
    if (opts.measure == "pagerank")
      std::cout << (converged ? "converged after " : "not converged after ") << iterations
                << " iterations\n";
    for (std::size_t i = 0; i < shown; ++i)
      std::cout << "  " << format_double(scores[order[i]]) << "  " << labels[order[i]] << "\n";
  }
  return 0;
}

struct LicenseOpts {
  std::string root;
  std::string strategy = "newest";
  std::int64_t snapshot = 0;
  bool has_snapshot = false;
  std::string matrix;
  bool lenient = false;
  bool fail_on_findings = false;
};

int run_license_check(const CommonOpts& common, const LicenseOpts& opts) {
  Ecosystem eco = load_ecosystem_file(common.corpus);
  RevisionId root = parse_revision_ref(opts.root);
  LicenseMatrix matrix = parse_license_matrix(read_file(opts.matrix));
  ResolvedSet rs =
      resolve(eco, root, make_context(opts.strategy, opts.has_snapshot, opts.snapshot));
  StitchedGraph stitched = stitch(eco, build_global_graph(eco), rs.members,
                                  opts.lenient ? StitchMode::lenient : StitchMode::strict);
  std::vector<LicenseViolation> violations = license_violations(stitched, eco, matrix);

  if (common.structured()) {
    ordered_json rec;
    rec["record"] = "license-check";
    rec["root"] = root.str();
    ordered_json entries = ordered_json::array();
    for (const LicenseViolation& v : violations) {
      ordered_json entry;
      entry["caller"] = v.caller.str();
      entry["callerLicense"] = v.caller_license;
      entry["callee"] = v.callee.str();
      entry["calleeLicense"] = v.callee_license;
      entries.push_back(std::move(entry));
    }
    rec["violations"] = std::move(entries);
    rec["findings"] = !violations.empty();
    std::cout << rec.dump() << "\n";
  } else {
    Palette p = palette_for(STDOUT_FILENO);
    std::cout << p.bold << "license check within resolution of " << root.str() << ": ";
    if (violations.empty())
      std::cout << p.green << "no violations" << p.reset << "\n";
    else
      std::cout << p.red << violations.size()
                << (violations.size() == 1 ? " violation" : " violations") << p.reset << "\n";
    for (const LicenseViolation& v : violations)
      std::cout << "  " << v.caller.str() << " (" << v.caller_license << ") -> "
                << v.callee.str() << " (" << v.callee_license << ")\n";
  }
  return !violations.empty() && opts.fail_on_findings ? 1 : 0;
}

struct GenerateOpts {
  std::string output;
  GeneratorParams params;
  bool no_dag = false;
};

int run_generate(const CommonOpts& common, GenerateOpts opts) {
  opts.params.product_dag = !opts.no_dag;
  Ecosystem eco = generate_synthetic(opts.params);
  if (opts.output.empty()) {
    std::cout << save_ecosystem(eco);
    return 0;
  }
  save_ecosystem_file(eco, opts.output);
  if (common.structured()) {
    ordered_json rec;
    rec["record"] = "generated";
    rec["revisions"] = eco.size();
    rec["path"] = opts.output;
    std::cout << rec.dump() << "\n";
  } else {
    std::cout << "generated " << eco.size() << " revisions to " << opts.output << "\n";
  }
  return 0;
}

void add_format_option(CLI::App* sub, CommonOpts& common) {
  sub->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}));
}

void add_corpus_option(CLI::App* sub, CommonOpts& common) {
  sub->add_option("--corpus", common.corpus, "Ecosystem corpus JSON file")->required();
}

void add_strategy_option(CLI::App* sub, std::string& strategy) {
  sub->add_option("--strategy", strategy, "Resolution strategy")
      ->check(CLI::IsMember({"newest", "oldest", "minimal-products"}));
}

CLI::Option* add_snapshot_option(CLI::App* sub, std::int64_t& snapshot) {
  return sub->add_option("--snapshot", snapshot,
                         "Only use revisions released at or before this timestamp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency resolution and function-level impact analysis for ecosystem corpora"};
  app.require_subcommand(1);

  CommonOpts resolve_common;
  ResolveOpts resolve_opts;
  CLI::App* resolve_cmd = app.add_subcommand("resolve", "Resolve a revision's dependencies");
  add_corpus_option(resolve_cmd, resolve_common);
  add_format_option(resolve_cmd, resolve_common);
  resolve_cmd->add_option("--root", resolve_opts.root, "Root revision, PRODUCT:VERSION")
      ->required();
  add_strategy_option(resolve_cmd, resolve_opts.strategy);
  CLI::Option* resolve_snapshot = add_snapshot_option(resolve_cmd, resolve_opts.snapshot);
  resolve_cmd->add_flag("--verify", resolve_opts.verify, "Check the result's conditions");
  resolve_cmd->add_flag("--dot", resolve_opts.dot, "Emit the resolved graph in DOT form");

  CommonOpts verify_common;
  VerifyOpts verify_opts;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Check resolution conditions for a revision set");
  add_corpus_option(verify_cmd, verify_common);
  add_format_option(verify_cmd, verify_common);
  verify_cmd->add_option("--root", verify_opts.root, "Root revision, PRODUCT:VERSION")->required();
  add_strategy_option(verify_cmd, verify_opts.strategy);
  CLI::Option* verify_snapshot = add_snapshot_option(verify_cmd, verify_opts.snapshot);
  verify_cmd
      ->add_option("--members", verify_opts.members,
                   "Explicit member set to check instead of resolving")
      ->delimiter(',');
  verify_cmd->add_flag("--fail-on-findings", verify_opts.fail_on_findings,
                       "Exit 1 when a condition fails");

  CommonOpts impact_common;
  ImpactOpts impact_opts;
  CLI::App* impact_cmd = app.add_subcommand("impact", "Compute the impact set of a function");
  add_corpus_option(impact_cmd, impact_common);
  add_format_option(impact_cmd, impact_common);
  impact_cmd->add_option("--vuln", impact_opts.vuln, "Seed function, PRODUCT:VERSION:FUNCTION")
      ->required();
  impact_cmd->add_option("--root", impact_opts.root, "Resolve this root and analyse its stitch");
  add_strategy_option(impact_cmd, impact_opts.strategy);
  CLI::Option* impact_snapshot = add_snapshot_option(impact_cmd, impact_opts.snapshot);
  impact_cmd->add_option("--level", impact_opts.level, "Report granularity")
      ->check(CLI::IsMember({"function", "revision"}));
  impact_cmd->add_flag("--ecosystem-wide", impact_opts.ecosystem_wide,
                       "Analyse across all revisions instead of one resolution");
  impact_cmd->add_flag("--lenient", impact_opts.lenient,
                       "Keep dangling external call sites instead of failing");
  impact_cmd->add_flag("--fail-on-findings", impact_opts.fail_on_findings,
                       "Exit 1 when the impact reaches beyond the seed");

  CommonOpts stitch_common;
  StitchOpts stitch_opts;
  CLI::App* stitch_cmd = app.add_subcommand("stitch", "Stitch the call graph of a resolution");
  add_corpus_option(stitch_cmd, stitch_common);
  add_format_option(stitch_cmd, stitch_common);
  stitch_cmd->add_option("--root", stitch_opts.root, "Root revision, PRODUCT:VERSION")->required();
  add_strategy_option(stitch_cmd, stitch_opts.strategy);
  CLI::Option* stitch_snapshot = add_snapshot_option(stitch_cmd, stitch_opts.snapshot);
  stitch_cmd->add_flag("--lenient", stitch_opts.lenient,
                       "Keep dangling external call sites instead of failing");
  stitch_cmd->add_flag("--dot", stitch_opts.dot, "Emit the stitched graph in DOT form");

  CommonOpts centrality_common;
  CentralityOpts centrality_opts;
  CLI::App* centrality_cmd =
      app.add_subcommand("centrality", "Rank call graph nodes by centrality");
  add_corpus_option(centrality_cmd, centrality_common);
  add_format_option(centrality_cmd, centrality_common);
  centrality_cmd->add_option("--root", centrality_opts.root,
                             "Rank within this root's stitched resolution");
  add_strategy_option(centrality_cmd, centrality_opts.strategy);
  CLI::Option* centrality_snapshot = add_snapshot_option(centrality_cmd, centrality_opts.snapshot);
  centrality_cmd->add_flag("--ecosystem-wide", centrality_opts.ecosystem_wide,
                           "Rank over the whole ecosystem call graph");
  centrality_cmd->add_flag("--lenient", centrality_opts.lenient,
                           "Keep dangling external call sites instead of failing");
  centrality_cmd->add_option("--measure", centrality_opts.measure, "Centrality measure")
      ->check(CLI::IsMember({"pagerank", "harmonic"}));
  centrality_cmd->add_option("--direction", centrality_opts.direction, "Arc direction to follow")
      ->check(CLI::IsMember({"in", "out"}));
  centrality_cmd->add_option("--damping", centrality_opts.damping, "Pagerank damping factor");
  centrality_cmd->add_option("--tolerance", centrality_opts.tolerance,
                             "Pagerank convergence tolerance");
  centrality_cmd->add_option("--max-iterations", centrality_opts.max_iterations,
                             "Pagerank iteration cap");
  centrality_cmd->add_option("--top", centrality_opts.top, "Show only the K best nodes");

  CommonOpts license_common;
  LicenseOpts license_opts;
  CLI::App* license_cmd =
      app.add_subcommand("license-check", "Check calls of a resolution against a license matrix");
  add_corpus_option(license_cmd, license_common);
  add_format_option(license_cmd, license_common);
  license_cmd->add_option("--root", license_opts.root, "Root revision, PRODUCT:VERSION")
      ->required();
  add_strategy_option(license_cmd, license_opts.strategy);
  CLI::Option* license_snapshot = add_snapshot_option(license_cmd, license_opts.snapshot);
  license_cmd->add_option("--matrix", license_opts.matrix, "Allowed license pairs, JSON file")
      ->required();
  license_cmd->add_flag("--lenient", license_opts.lenient,
                        "Keep dangling external call sites instead of failing");
  license_cmd->add_flag("--fail-on-findings", license_opts.fail_on_findings,
                        "Exit 1 when violations are found");

  CommonOpts generate_common;
  GenerateOpts generate_opts;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Generate a synthetic corpus");
  add_format_option(generate_cmd, generate_common);
  generate_cmd->add_option("--output", generate_opts.output,
                           "Write the corpus here instead of stdout");
  generate_cmd->add_option("--products", generate_opts.params.products, "Number of products");
  generate_cmd->add_option("--revisions-per-product", generate_opts.params.revisions_per_product,
                           "Revisions per product");
  generate_cmd->add_option("--functions", generate_opts.params.functions_per_revision,
                           "Functions per revision");
  generate_cmd->add_option("--clauses", generate_opts.params.clauses_per_revision,
                           "Mean dependency clauses per revision");
  generate_cmd->add_option("--disjunction", generate_opts.params.disjunction_probability,
                           "Chance a clause gets a second alternative");
  generate_cmd->add_option("--call-arcs", generate_opts.params.call_arcs_per_function,
                           "Mean outgoing calls per function");
  generate_cmd->add_option("--external-ratio", generate_opts.params.external_ratio,
                           "Chance a call targets a dependency");
  generate_cmd->add_flag("--no-dag", generate_opts.no_dag,
                         "Allow cyclic product dependencies");
  generate_cmd->add_option("--seed", generate_opts.params.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  resolve_opts.has_snapshot = resolve_snapshot->count() > 0;
  verify_opts.has_snapshot = verify_snapshot->count() > 0;
  impact_opts.has_snapshot = impact_snapshot->count() > 0;
  stitch_opts.has_snapshot = stitch_snapshot->count() > 0;
  centrality_opts.has_snapshot = centrality_snapshot->count() > 0;
  license_opts.has_snapshot = license_snapshot->count() > 0;

  Palette err = palette_for(STDERR_FILENO);
  try {
    if (*resolve_cmd) return run_resolve(resolve_common, resolve_opts);
    if (*verify_cmd) return run_verify(verify_common, verify_opts);
    if (*impact_cmd) return run_impact(impact_common, impact_opts);
    if (*stitch_cmd) return run_stitch(stitch_common, stitch_opts);
    if (*centrality_cmd) return run_centrality(centrality_common, centrality_opts);
    if (*license_cmd) return run_license_check(license_common, license_opts);
    if (*generate_cmd) return run_generate(generate_common, generate_opts);
  } catch (const UnsatisfiableError& e) {
    std::cerr << err.red << "error: " << e.what() << err.reset << "\n";
    return 3;
  } catch (const DanglingExternalError& e) {
    std::cerr << err.red << "error: " << e.what() << err.reset << "\n";
    return 5;
  } catch (const InvalidParamsError& e) {
    std::cerr << err.red << "error: " << e.what() << err.reset << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << err.red << "error: " << e.what() << err.reset << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << err.red << "error: " << e.what() << err.reset << "\n";
    return 4;
  }
  return 0;
}
