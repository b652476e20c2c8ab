#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ecostitch/model.hpp"

namespace ecostitch {

/// Reads an ecosystem from its JSON form. The document is an object with one
/// key, "revisions", holding an array of revision objects; unknown or
/// mistyped keys raise ParseError. Dependency clauses and alternatives are
/// brought into canonical order while loading.
Ecosystem load_ecosystem(std::string_view json_text);

/// Same, reading from a file. Throws Error when the file cannot be read.
Ecosystem load_ecosystem_file(const std::string& path);

/// Canonical JSON form: revisions sorted by product then version, sorted call
/// graph members, normalized version text, explicit target patterns,
/// two-space indentation and a trailing newline. Loading the result gives
/// back an equal ecosystem, and saving is idempotent.
std::string save_ecosystem(const Ecosystem& eco);

void save_ecosystem_file(const Ecosystem& eco, const std::string& path);

struct GeneratorParams {
  std::size_t products = 10;
  std::size_t revisions_per_product = 3;
  std::size_t functions_per_revision = 5;
  double clauses_per_revision = 2.0;     // mean clauses per revision
  double disjunction_probability = 0.25; // chance a clause gets a second alternative
  double call_arcs_per_function = 1.5;   // mean outgoing calls per function
  double external_ratio = 0.3;           // chance a call targets a dependency
  bool product_dag = true;               // forbid cyclic product dependencies
  std::uint64_t seed = 0;
};

/// Deterministic random ecosystem: same params, same result, on every
/// platform. Products are named p00, p01, ... with versions 1.0, 1.1, ...;
/// constraints are anchored at versions that exist. A small share of external
/// call sites target a function no revision declares, which keeps dangling
/// externals reachable in tests. Throws InvalidParamsError when a probability
/// lies outside [0, 1] or a mean is negative.
Ecosystem generate_synthetic(const GeneratorParams& params);

/// Hand-built five-product ecosystem exercising every feature: disjunctive
/// clauses, version conflicts, multi-pattern external call sites and a
/// dangling binding or two. Used throughout the documentation and tests.
Ecosystem demo_ecosystem();

}  // namespace ecostitch
