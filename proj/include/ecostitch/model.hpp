#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecostitch/errors.hpp"

namespace ecostitch {

/// Name of a product (a package, library, module...). Case-sensitive, never
/// empty, and never contains ':' so that PRODUCT:VERSION command-line
/// references stay unambiguous.
struct ProductId {
  std::string name;
  auto operator<=>(const ProductId&) const = default;
};

struct Version;

/// Total order on versions. Numeric components are compared positionally with
/// missing trailing components treated as zero, so 1.0 and 1.0.0 are
/// equivalent. For equal numeric cores a version carrying a prerelease tag
/// orders below the plain one; two prerelease tags compare lexicographically.
std::weak_ordering compare_versions(const Version& a, const Version& b);

/// Dotted-integer version with an optional prerelease tag, e.g. "1.7.25" or
/// "2.0.0-alpha1".
struct Version {
  std::vector<std::uint64_t> components;  // at least one entry
  std::string prerelease;                 // empty when absent

  std::string str() const;
  std::weak_ordering operator<=>(const Version& other) const {
    return compare_versions(*this, other);
  }
  bool operator==(const Version& other) const {
    return compare_versions(*this, other) == std::weak_ordering::equivalent;
  }
};

/// Parses "2.0.0-alpha1" style text. Everything after the first '-' is the
/// prerelease tag. Throws ParseError on malformed input.
Version parse_version(std::string_view text);

struct VersionBound {
  Version version;
  bool inclusive = true;
};

/// Contiguous range of versions; an absent bound means unbounded on that side.
struct VersionInterval {
  std::optional<VersionBound> lower;
  std::optional<VersionBound> upper;

  bool contains(const Version& v) const;

  static VersionInterval any() { return {}; }
  static VersionInterval exactly(Version v);
  static VersionInterval at_least(Version v, bool inclusive);
  static VersionInterval at_most(Version v, bool inclusive);
};

/// Union of intervals; a version matches when any interval contains it.
struct VersionConstraint {
  std::vector<VersionInterval> intervals;  // never empty

  bool matches(const Version& v) const;
  std::string str() const;

  static VersionConstraint any() { return {{VersionInterval::any()}}; }
};

/// Parses the constraint grammar: "*", OP VERSION with OP one of = < <= > >=,
/// or several of those joined by "||". Throws ParseError with the offset of
/// the offending token.
VersionConstraint parse_constraint(std::string_view text);

/// One acceptable way to satisfy part of a requirement: any revision of
/// `target` whose version matches `constraint`.
struct Dependency {
  ProductId target;
  VersionConstraint constraint;
  std::string str() const;
};

/// Disjunction of dependencies; satisfied when any alternative is met.
struct DependencyClause {
  std::vector<Dependency> alternatives;  // never empty
  std::string str() const;
};

/// Conjunction of clauses. The empty spec is trivially satisfied.
struct DependencySpec {
  std::vector<DependencyClause> clauses;
  bool empty() const { return clauses.empty(); }
};

/// Clauses and alternatives are sets: bring them into a canonical order
/// (alternatives by product then constraint text, clauses by their rendered
/// form) and drop duplicates, so behaviour depends on the value alone and not
/// on the order a document happened to list things in.
void canonicalize(DependencySpec& spec);

/// A concrete released snapshot of a product, identified by product + version.
struct RevisionId {
  ProductId product;
  Version version;

  std::string str() const;  // "C-1.4"
  std::weak_ordering operator<=>(const RevisionId& other) const {
    if (auto c = product <=> other.product; c != 0) return c;
    return version <=> other.version;
  }
  bool operator==(const RevisionId& other) const {
    return (*this <=> other) == std::weak_ordering::equivalent;
  }
};

/// A function declared inside a particular revision.
struct FunctionId {
  RevisionId revision;
  std::string function;

  std::string str() const;  // "C-1.4:f2"
  std::weak_ordering operator<=>(const FunctionId& other) const {
    if (auto c = revision <=> other.revision; c != 0) return c;
    return function <=> other.function;
  }
  bool operator==(const FunctionId& other) const {
    return (*this <=> other) == std::weak_ordering::equivalent;
  }
};

/// Describes which concrete functions an external call site may bind to:
/// any function named `function` in a revision of `product` matching
/// `constraint`.
struct TargetPattern {
  ProductId product;
  VersionConstraint constraint;
  std::string function;
};

/// A call site whose target lives outside the owning revision. Identified by
/// a local id unique within the revision; carries one or more target patterns.
struct ExternalNode {
  std::string local_id;
  std::vector<TargetPattern> targets;
};

struct CallArc {
  std::string from;  // internal function name
  std::string to;    // internal function name or external local id
  auto operator<=>(const CallArc&) const = default;
};

/// Per-revision call graph. Arcs always originate at internal functions;
/// external nodes have no outgoing arcs. Internal names and external local
/// ids share one namespace per revision and never collide.
struct RevisionCallGraph {
  std::vector<std::string> internal;   // sorted, unique
  std::vector<ExternalNode> external;  // sorted by local_id, unique
  std::vector<CallArc> arcs;           // sorted, unique

  bool has_internal(std::string_view name) const;
  const ExternalNode* find_external(std::string_view id) const;
};

struct Revision {
  RevisionId id;
  std::optional<std::int64_t> timestamp;  // release time, seconds
  std::optional<std::string> license;     // revision-wide default
  std::map<std::string, std::string> function_licenses;  // overrides by name
  DependencySpec depspec;
  RevisionCallGraph callgraph;
};

/// The universe of revisions under analysis. Keyed by RevisionId, so two
/// versions that compare equivalent (1.0 vs 1.0.0) count as the same revision.
class Ecosystem {
 public:
  Ecosystem() = default;

  /// Validates the revision, normalizes it (canonical depspec, sorted call
  /// graph members) and inserts it. Throws DuplicateRevisionError,
  /// EmptyClauseError, UnknownArcEndpointError or Error on invariant breaks.
  void add(Revision rev);

  const Revision& at(const RevisionId& id) const;  // UnknownRevisionError
  const Revision* find(const RevisionId& id) const;
  bool contains(const RevisionId& id) const { return find(id) != nullptr; }

  /// Revisions of one product, version-ascending. Empty when unknown.
  const std::vector<RevisionId>& revisions_of(const ProductId& product) const;

  const std::map<RevisionId, Revision>& revisions() const { return revisions_; }
  std::size_t size() const { return revisions_.size(); }
  bool empty() const { return revisions_.empty(); }

 private:
  std::map<RevisionId, Revision> revisions_;
  std::map<ProductId, std::vector<RevisionId>> by_product_;
};

}  // namespace ecostitch
