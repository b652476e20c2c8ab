#include "ecostitch/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace ecostitch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ParseError(msg, 0); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* what) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) bad(std::string("unexpected key '") + item.key() + "' in " + what);
  }
}

std::string get_string(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key)) bad(std::string(what) + " is missing '" + key + "'");
  if (!obj[key].is_string()) bad(std::string("'") + key + "' of " + what + " must be a string");
  return obj[key].get<std::string>();
}

const json& get_array(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key)) bad(std::string(what) + " is missing '" + key + "'");
  if (!obj[key].is_array()) bad(std::string("'") + key + "' of " + what + " must be an array");
  return obj[key];
}

TargetPattern default_target_pattern(const std::string& id) {
  auto slash = id.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == id.size() ||
      id.find('/', slash + 1) != std::string::npos)
    bad("external '" + id +
        "' has no targets and its id is not of the PRODUCT/FUNCTION form");
  return {ProductId{id.substr(0, slash)}, VersionConstraint::any(), id.substr(slash + 1)};
}

Revision parse_revision(const json& r) {
  if (!r.is_object()) bad("revision entries must be objects");
  check_keys(r, {"product", "version", "timestamp", "license", "depspec", "callgraph"},
             "revision");

  Revision rev;
  rev.id.product.name = get_string(r, "product", "revision");
  rev.id.version = parse_version(get_string(r, "version", "revision"));
  if (r.contains("timestamp")) {
    if (!r["timestamp"].is_number_integer()) bad("'timestamp' must be an integer");
    rev.timestamp = r["timestamp"].get<std::int64_t>();
  }
  if (r.contains("license")) rev.license = get_string(r, "license", "revision");

  for (const json& clause : get_array(r, "depspec", "revision")) {
    if (!clause.is_array()) bad("each depspec clause must be an array of alternatives");
    DependencyClause parsed;
    for (const json& alt : clause) {
      if (!alt.is_object()) bad("each dependency alternative must be an object");
      check_keys(alt, {"product", "constraint"}, "dependency alternative");
      parsed.alternatives.push_back(
          {ProductId{get_string(alt, "product", "dependency alternative")},
           parse_constraint(get_string(alt, "constraint", "dependency alternative"))});
    }
    rev.depspec.clauses.push_back(std::move(parsed));
  }

  if (!r.contains("callgraph") || !r["callgraph"].is_object())
    bad("revision needs a 'callgraph' object");
  const json& cg = r["callgraph"];
  check_keys(cg, {"internal", "external", "arcs"}, "callgraph");

  for (const json& fn : get_array(cg, "internal", "callgraph")) {
    if (!fn.is_object()) bad("each internal function must be an object");
    check_keys(fn, {"name", "license"}, "internal function");
    std::string name = get_string(fn, "name", "internal function");
    if (fn.contains("license"))
      rev.function_licenses[name] = get_string(fn, "license", "internal function");
    rev.callgraph.internal.push_back(std::move(name));
  }

  for (const json& ext : get_array(cg, "external", "callgraph")) {
    if (!ext.is_object()) bad("each external node must be an object");
    check_keys(ext, {"id", "targets"}, "external node");
    ExternalNode node;
    node.local_id = get_string(ext, "id", "external node");
    if (ext.contains("targets")) {
      const json& targets = get_array(ext, "targets", "external node");
      if (targets.empty()) bad("external '" + node.local_id + "' has an empty targets array");
      for (const json& t : targets) {
        if (!t.is_object()) bad("each target pattern must be an object");
        check_keys(t, {"product", "constraint", "function"}, "target pattern");
        node.targets.push_back({ProductId{get_string(t, "product", "target pattern")},
                                parse_constraint(get_string(t, "constraint", "target pattern")),
                                get_string(t, "function", "target pattern")});
      }
    } else {
      node.targets.push_back(default_target_pattern(node.local_id));
    }
    rev.callgraph.external.push_back(std::move(node));
  }

  for (const json& arc : get_array(cg, "arcs", "callgraph")) {
    if (!arc.is_object()) bad("each call arc must be an object");
    check_keys(arc, {"from", "to"}, "call arc");
    rev.callgraph.arcs.push_back(
        {get_string(arc, "from", "call arc"), get_string(arc, "to", "call arc")});
  }
  return rev;
}

}  // namespace

Ecosystem load_ecosystem(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid corpus JSON: ") + e.what(),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_object()) bad("corpus document must be a JSON object");
  check_keys(doc, {"revisions"}, "corpus document");
  const json& revs = get_array(doc, "revisions", "corpus document");

  Ecosystem eco;
  for (const json& r : revs) eco.add(parse_revision(r));
  return eco;
}

Ecosystem load_ecosystem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_ecosystem(buffer.str());
}

std::string save_ecosystem(const Ecosystem& eco) {
  ordered_json revs = ordered_json::array();
  for (const auto& [rid, rev] : eco.revisions()) {
    ordered_json r;
    r["product"] = rid.product.name;
    r["version"] = rid.version.str();
    if (rev.timestamp) r["timestamp"] = *rev.timestamp;
    if (rev.license) r["license"] = *rev.license;

    ordered_json spec = ordered_json::array();
    for (const DependencyClause& clause : rev.depspec.clauses) {
      ordered_json alts = ordered_json::array();
      for (const Dependency& alt : clause.alternatives) {
        ordered_json a;
        a["product"] = alt.target.name;
        a["constraint"] = alt.constraint.str();
        alts.push_back(std::move(a));
      }
      spec.push_back(std::move(alts));
    }
    r["depspec"] = std::move(spec);

    ordered_json cg;
    ordered_json internal = ordered_json::array();
    for (const std::string& fn : rev.callgraph.internal) {
      ordered_json entry;
      entry["name"] = fn;
      auto lic = rev.function_licenses.find(fn);
      if (lic != rev.function_licenses.end()) entry["license"] = lic->second;
      internal.push_back(std::move(entry));
    }
    cg["internal"] = std::move(internal);

    ordered_json external = ordered_json::array();
    for (const ExternalNode& ext : rev.callgraph.external) {
      ordered_json entry;
      entry["id"] = ext.local_id;
      ordered_json targets = ordered_json::array();
      for (const TargetPattern& t : ext.targets) {
        ordered_json pattern;
        pattern["product"] = t.product.name;
        pattern["constraint"] = t.constraint.str();
        pattern["function"] = t.function;
        targets.push_back(std::move(pattern));
      }
      entry["targets"] = std::move(targets);
      external.push_back(std::move(entry));
    }
    cg["external"] = std::move(external);

    ordered_json arcs = ordered_json::array();
    for (const CallArc& arc : rev.callgraph.arcs) {
      ordered_json entry;
      entry["from"] = arc.from;
      entry["to"] = arc.to;
      arcs.push_back(std::move(entry));
    }
    cg["arcs"] = std::move(arcs);
    r["callgraph"] = std::move(cg);

    revs.push_back(std::move(r));
  }

  ordered_json doc;
  doc["revisions"] = std::move(revs);
  return doc.dump(2) + "\n";
}

void save_ecosystem_file(const Ecosystem& eco, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << save_ecosystem(eco);
  if (!out) throw Error("cannot write file '" + path + "'");
}

namespace {

// All sampling goes through the raw engine so results are identical across
// platforms and standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::size_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= unit();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded_name(std::size_t index, std::size_t width) {
  std::string digits = std::to_string(index);
  std::string out = "p";
  out.append(width > digits.size() ? width - digits.size() : 0, '0');
  out += digits;
  return out;
}

void check_probability(double value, const char* name) {
  if (value < 0.0 || value > 1.0)
    throw InvalidParamsError(std::string(name) + " must lie in [0, 1]");
}

void check_mean(double value, const char* name) {
  if (value < 0.0 || !std::isfinite(value))
    throw InvalidParamsError(std::string(name) + " must be a non-negative finite number");
}

}  // namespace

Ecosystem generate_synthetic(const GeneratorParams& params) {
  check_probability(params.disjunction_probability, "disjunction_probability");
  check_probability(params.external_ratio, "external_ratio");
  check_mean(params.clauses_per_revision, "clauses_per_revision");
  check_mean(params.call_arcs_per_function, "call_arcs_per_function");

  Ecosystem eco;
  if (params.products == 0 || params.revisions_per_product == 0) return eco;

  Rng rng(params.seed);

  const std::size_t width = std::max<std::size_t>(
      2, std::to_string(params.products - 1).size());
  std::vector<std::string> names(params.products);
  for (std::size_t i = 0; i < params.products; ++i) names[i] = padded_name(i, width);

  // In DAG mode a random topological order caps which products each product
  // may depend on; self-dependencies are never generated.
  std::vector<std::size_t> position(params.products);
  for (std::size_t i = 0; i < params.products; ++i) position[i] = i;
  if (params.product_dag) {
    std::vector<std::size_t> perm(params.products);
    for (std::size_t i = 0; i < params.products; ++i) perm[i] = i;
    for (std::size_t i = params.products; i > 1; --i)
      std::swap(perm[i - 1], perm[rng.bounded(i)]);
    for (std::size_t rank = 0; rank < params.products; ++rank) position[perm[rank]] = rank;
  }
  std::vector<std::vector<std::size_t>> eligible(params.products);
  for (std::size_t i = 0; i < params.products; ++i)
    for (std::size_t j = 0; j < params.products; ++j) {
      if (i == j) continue;
      if (params.product_dag && position[j] <= position[i]) continue;
      eligible[i].push_back(j);
    }

  auto random_dependency = [&](std::size_t owner) {
    const std::vector<std::size_t>& pool = eligible[owner];
    std::size_t target = pool[rng.bounded(pool.size())];
    Version anchor{{1, rng.bounded(params.revisions_per_product)}, ""};
    double roll = rng.unit();
    VersionConstraint constraint;
    if (roll < 0.35)
      constraint = VersionConstraint::any();
    else if (roll < 0.55)
      constraint = {{VersionInterval::at_least(anchor, true)}};
    else if (roll < 0.75)
      constraint = {{VersionInterval::at_most(anchor, true)}};
    else
      constraint = {{VersionInterval::exactly(anchor)}};
    return Dependency{ProductId{names[target]}, std::move(constraint)};
  };

  std::size_t global_index = 0;
  for (std::size_t prod = 0; prod < params.products; ++prod) {
    for (std::size_t v = 0; v < params.revisions_per_product; ++v) {
      Revision rev;
      rev.id.product.name = names[prod];
      rev.id.version = Version{{1, v}, ""};
      rev.timestamp = 1000 + static_cast<std::int64_t>(global_index) * 10;
      ++global_index;

      std::vector<Dependency> alternatives;
      if (!eligible[prod].empty()) {
        std::size_t clause_count = rng.poisson(params.clauses_per_revision);
        for (std::size_t c = 0; c < clause_count; ++c) {
          DependencyClause clause;
          clause.alternatives.push_back(random_dependency(prod));
          if (rng.unit() < params.disjunction_probability)
            clause.alternatives.push_back(random_dependency(prod));
          for (const Dependency& alt : clause.alternatives) alternatives.push_back(alt);
          rev.depspec.clauses.push_back(std::move(clause));
        }
      }

      for (std::size_t f = 0; f < params.functions_per_revision; ++f)
        rev.callgraph.internal.push_back("f" + std::to_string(f));

      std::size_t external_counter = 0;
      for (std::size_t f = 0; f < params.functions_per_revision; ++f) {
        std::string from = "f" + std::to_string(f);
        std::size_t arc_count = rng.poisson(params.call_arcs_per_function);
        for (std::size_t a = 0; a < arc_count; ++a) {
          bool external = !alternatives.empty() && rng.unit() < params.external_ratio;
          if (external) {
            const Dependency& alt = alternatives[rng.bounded(alternatives.size())];
            // Ghost targets exist in no revision, which leaves the call site
            // dangling; a small share keeps that path exercised.
            std::string target_fn =
                rng.unit() < 0.95
                    ? "f" + std::to_string(rng.bounded(params.functions_per_revision))
                    : "ghost";
            std::string id = "x" + std::to_string(external_counter++);
            rev.callgraph.external.push_back(
                {id, {TargetPattern{alt.target, alt.constraint, target_fn}}});
            rev.callgraph.arcs.push_back({from, id});
          } else {
            rev.callgraph.arcs.push_back(
                {from, "f" + std::to_string(rng.bounded(params.functions_per_revision))});
          }
        }
      }
      eco.add(std::move(rev));
    }
  }
  return eco;
}

namespace {

Dependency dep(const char* product, const char* constraint) {
  return {ProductId{product}, parse_constraint(constraint)};
}

TargetPattern pat(const char* product, const char* constraint, const char* function) {
  return {ProductId{product}, parse_constraint(constraint), function};
}

Revision plain_revision(const char* product, const char* version,
                        std::vector<std::string> functions) {
  Revision rev;
  rev.id.product.name = product;
  rev.id.version = parse_version(version);
  rev.callgraph.internal = std::move(functions);
  return rev;
}

}  // namespace

Ecosystem demo_ecosystem() {
  Ecosystem eco;

  eco.add(plain_revision("A", "1.0", {"f1"}));
  eco.add(plain_revision("A", "1.1", {"f1", "f2", "f3"}));
  eco.add(plain_revision("B", "1.0", {"f3"}));
  eco.add(plain_revision("B", "1.3", {"f1", "f2"}));

  {
    Revision c10 = plain_revision("C", "1.0", {"f1", "f2"});
    c10.depspec.clauses.push_back({{dep("A", "=1.1")}});
    c10.depspec.clauses.push_back({{dep("B", "<=1.0 || >=1.3")}});
    c10.callgraph.external.push_back({"y1", {pat("B", "<=1.0", "f3"), pat("B", ">=1.3", "f1")}});
    c10.callgraph.external.push_back({"y2", {pat("A", "=1.1", "f3")}});
    c10.callgraph.arcs = {{"f1", "y1"}, {"f2", "y2"}};
    eco.add(std::move(c10));
  }
  {
    Revision c14 = plain_revision("C", "1.4", {"f1", "f2", "f3"});
    c14.depspec.clauses.push_back({{dep("A", "=1.1"), dep("B", ">=1.3")}});
    c14.callgraph.external.push_back({"x1", {pat("B", ">=1.3", "f2")}});
    c14.callgraph.external.push_back({"x2", {pat("A", "=1.1", "f2")}});
    c14.callgraph.arcs = {{"f1", "x1"}, {"f3", "x2"}};
    eco.add(std::move(c14));
  }
  {
    Revision d10 = plain_revision("D", "1.0", {"f1"});
    d10.depspec.clauses.push_back({{dep("B", ">=1.1")}});
    d10.depspec.clauses.push_back({{dep("E", ">=1.0")}});
    d10.depspec.clauses.push_back({{dep("C", "*"), dep("A", "=1.0")}});
    d10.callgraph.external.push_back({"d1", {pat("C", "*", "f2")}});
    d10.callgraph.external.push_back({"d2", {pat("B", ">=1.1", "f1")}});
    d10.callgraph.external.push_back({"d3", {pat("E", ">=1.0", "f4")}});
    d10.callgraph.arcs = {{"f1", "d1"}, {"f1", "d2"}, {"f1", "d3"}};
    eco.add(std::move(d10));
  }
  {
    Revision e10 = plain_revision("E", "1.0", {"f4"});
    e10.depspec.clauses.push_back({{dep("A", "*")}});
    e10.callgraph.external.push_back({"e1", {pat("A", "*", "f1")}});
    e10.callgraph.arcs = {{"f4", "e1"}};
    eco.add(std::move(e10));
  }
  return eco;
}

}  // namespace ecostitch
