#include "ecostitch/analysis.hpp"

#include <json.hpp>

namespace ecostitch {

ImpactReport stitched_impact(const StitchedGraph& g, const FunctionId& seed) {
  ImpactReport report;
  report.seed = seed;
  Digraph<std::size_t> classes = g.class_digraph();
  std::size_t start = g.class_of_function(seed);
  for (std::size_t cls : reach_indices(classes, start, Direction::in))
    for (const CallNode& member : g.classes[cls].members) {
      if (member.external) continue;
      report.functions.insert(member.function_id());
      report.revisions.insert(member.revision);
      report.products.insert(member.revision.product);
    }
  return report;
}

std::set<RevisionId> vulnerable_revisions(const StitchedGraph& g, const FunctionId& seed) {
  return stitched_impact(g, seed).revisions;
}

ImpactReport ecosystem_change_impact(const Digraph<CallNode>& universe, const FunctionId& seed) {
  CallNode start{seed.revision, seed.function, false};
  if (!universe.has_node(start))
    throw UnknownFunctionError("function " + seed.str() + " is not part of the graph");
  ImpactReport report;
  report.seed = seed;
  for (std::size_t i : reach_indices(universe, universe.index_of(start), Direction::in)) {
    const CallNode& node = universe.node(i);
    report.functions.insert(node.function_id());
    report.revisions.insert(node.revision);
    report.products.insert(node.revision.product);
  }
  return report;
}

Digraph<RevisionId> resolved_digraph(const ResolvedSet& rs) {
  return Digraph<RevisionId>(rs.members, {rs.arcs.begin(), rs.arcs.end()});
}

std::string effective_license(const Revision& rev, const std::string& function) {
  auto it = rev.function_licenses.find(function);
  if (it != rev.function_licenses.end()) return it->second;
  if (rev.license) return *rev.license;
  return "UNKNOWN";
}

std::vector<LicenseViolation> license_violations(const StitchedGraph& g, const Ecosystem& eco,
                                                 const LicenseMatrix& matrix) {
  std::vector<LicenseViolation> out;
  for (const auto& [from, to] : g.arcs) {
    for (const CallNode& caller : g.classes[from].members) {
      if (caller.external) continue;
      std::string caller_license = effective_license(eco.at(caller.revision), caller.name);
      for (const CallNode& callee : g.classes[to].members) {
        if (callee.external) continue;
        std::string callee_license = effective_license(eco.at(callee.revision), callee.name);
        if (matrix.unknown_policy == UnknownPolicy::ignore &&
            (caller_license == "UNKNOWN" || callee_license == "UNKNOWN"))
          continue;
        if (matrix.allowed.contains({callee_license, caller_license})) continue;
        out.push_back({caller.function_id(), callee.function_id(), caller_license,
                       callee_license});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LicenseViolation& a, const LicenseViolation& b) { return (a <=> b) < 0; });
  return out;
}

LicenseMatrix parse_license_matrix(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid license matrix: ") + e.what(),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_object()) throw ParseError("license matrix must be a JSON object", 0);

  LicenseMatrix matrix;
  for (const auto& [key, value] : doc.items()) {
    if (key == "allowed") {
      if (!value.is_array()) throw ParseError("'allowed' must be an array", 0);
      for (const auto& entry : value) {
        if (!entry.is_object() || entry.size() != 2 || !entry.contains("callee") ||
            !entry.contains("caller") || !entry["callee"].is_string() ||
            !entry["caller"].is_string())
          throw ParseError("each allowed entry needs string fields 'callee' and 'caller'", 0);
        matrix.allowed.emplace(entry["callee"].get<std::string>(),
                               entry["caller"].get<std::string>());
      }
    } else if (key == "unknownPolicy") {
      if (value == "flag")
        matrix.unknown_policy = UnknownPolicy::flag;
      else if (value == "ignore")
        matrix.unknown_policy = UnknownPolicy::ignore;
      else
        throw ParseError("unknownPolicy must be 'flag' or 'ignore'", 0);
    } else {
      throw ParseError("unknown license matrix key '" + key + "'", 0);
    }
  }
  return matrix;
}

}  // namespace ecostitch
