#include "ecostitch/model.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace ecostitch {

namespace {

bool version_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c == '.' || c == '-' || c == '_' || c == '+';
}

}  // namespace

std::weak_ordering compare_versions(const Version& a, const Version& b) {
  std::size_t n = std::max(a.components.size(), b.components.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t x = i < a.components.size() ? a.components[i] : 0;
    std::uint64_t y = i < b.components.size() ? b.components[i] : 0;
    if (x != y) return x < y ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  bool ap = !a.prerelease.empty(), bp = !b.prerelease.empty();
  if (ap != bp) return ap ? std::weak_ordering::less : std::weak_ordering::greater;
  if (ap) {
    int c = a.prerelease.compare(b.prerelease);
    if (c != 0) return c < 0 ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  return std::weak_ordering::equivalent;
}

std::string Version::str() const {
  std::string out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(components[i]);
  }
  if (!prerelease.empty()) {
    out += '-';
    out += prerelease;
  }
  return out;
}

Version parse_version(std::string_view text) {
  if (text.empty()) throw ParseError("empty version", 0);
  for (std::size_t i = 0; i < text.size(); ++i)
    if (!version_char(text[i]))
      throw ParseError("invalid character in version", i);

  std::string_view core = text;
  std::string prerelease;
  if (auto dash = text.find('-'); dash != std::string_view::npos) {
    core = text.substr(0, dash);
    prerelease = std::string(text.substr(dash + 1));
    if (prerelease.empty()) throw ParseError("empty prerelease tag", dash + 1);
  }
  if (core.empty()) throw ParseError("missing numeric version core", 0);

  Version v;
  v.prerelease = std::move(prerelease);
  std::size_t pos = 0;
  while (pos <= core.size()) {
    std::size_t dot = core.find('.', pos);
    std::string_view part =
        core.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (part.empty()) throw ParseError("empty version component", pos);
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || end != part.data() + part.size())
      throw ParseError("version component is not a number", pos);
    v.components.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
    if (pos == core.size()) throw ParseError("empty version component", pos);
  }
  return v;
}

bool VersionInterval::contains(const Version& v) const {
  if (lower) {
    auto c = compare_versions(v, lower->version);
    if (c == std::weak_ordering::less) return false;
    if (c == std::weak_ordering::equivalent && !lower->inclusive) return false;
  }
  if (upper) {
    auto c = compare_versions(v, upper->version);
    if (c == std::weak_ordering::greater) return false;
    if (c == std::weak_ordering::equivalent && !upper->inclusive) return false;
  }
  return true;
}

VersionInterval VersionInterval::exactly(Version v) {
  VersionInterval i;
  i.lower = VersionBound{v, true};
  i.upper = VersionBound{std::move(v), true};
  return i;
}

VersionInterval VersionInterval::at_least(Version v, bool inclusive) {
  VersionInterval i;
  i.lower = VersionBound{std::move(v), inclusive};
  return i;
}

VersionInterval VersionInterval::at_most(Version v, bool inclusive) {
  VersionInterval i;
  i.upper = VersionBound{std::move(v), inclusive};
  return i;
}

bool VersionConstraint::matches(const Version& v) const {
  for (const VersionInterval& i : intervals)
    if (i.contains(v)) return true;
  return false;
}

namespace {

std::string interval_text(const VersionInterval& i) {
  if (!i.lower && !i.upper) return "*";
  if (i.lower && i.upper) {
    if (i.lower->inclusive && i.upper->inclusive &&
        compare_versions(i.lower->version, i.upper->version) == std::weak_ordering::equivalent)
      return "=" + i.lower->version.str();
    throw Error("version interval has no textual form");
  }
  if (i.lower) return (i.lower->inclusive ? ">=" : ">") + i.lower->version.str();
  return (i.upper->inclusive ? "<=" : "<") + i.upper->version.str();
}

}  // namespace

std::string VersionConstraint::str() const {
  std::string out;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (i) out += " || ";
    out += interval_text(intervals[i]);
  }
  return out;
}

VersionConstraint parse_constraint(std::string_view text) {
  VersionConstraint out;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };

  skip_ws();
  if (pos == text.size()) throw ParseError("empty constraint", pos);
  while (true) {
    if (text[pos] == '*') {
      out.intervals.push_back(VersionInterval::any());
      ++pos;
    } else {
      enum class Op { eq, lt, le, gt, ge } op;
      char c = text[pos];
      if (c == '=') {
        op = Op::eq;
        ++pos;
      } else if (c == '<' || c == '>') {
        ++pos;
        bool inclusive = pos < text.size() && text[pos] == '=';
        if (inclusive) ++pos;
        op = c == '<' ? (inclusive ? Op::le : Op::lt) : (inclusive ? Op::ge : Op::gt);
      } else {
        throw ParseError("expected '*' or comparison operator", pos);
      }
      std::size_t start = pos;
      while (pos < text.size() && version_char(text[pos])) ++pos;
      if (pos == start) throw ParseError("expected version after operator", start);
      Version v;
      try {
        v = parse_version(text.substr(start, pos - start));
      } catch (const ParseError& e) {
        throw ParseError("bad version in constraint", start + e.position);
      }
      switch (op) {
        case Op::eq: out.intervals.push_back(VersionInterval::exactly(std::move(v))); break;
        case Op::lt: out.intervals.push_back(VersionInterval::at_most(std::move(v), false)); break;
        case Op::le: out.intervals.push_back(VersionInterval::at_most(std::move(v), true)); break;
        case Op::gt: out.intervals.push_back(VersionInterval::at_least(std::move(v), false)); break;
        case Op::ge: out.intervals.push_back(VersionInterval::at_least(std::move(v), true)); break;
      }
    }
    skip_ws();
    if (pos == text.size()) break;
    if (text.compare(pos, 2, "||") != 0)
      throw ParseError("expected '||' between alternatives", pos);
    pos += 2;
    skip_ws();
    if (pos == text.size()) throw ParseError("dangling '||'", pos);
  }
  return out;
}

std::string Dependency::str() const { return target.name + " " + constraint.str(); }

std::string DependencyClause::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    if (i) out += " | ";
    out += alternatives[i].str();
  }
  out += ")";
  return out;
}

void canonicalize(DependencySpec& spec) {
  for (DependencyClause& clause : spec.clauses) {
    std::sort(clause.alternatives.begin(), clause.alternatives.end(),
              [](const Dependency& a, const Dependency& b) {
                if (a.target != b.target) return a.target < b.target;
                return a.constraint.str() < b.constraint.str();
              });
    clause.alternatives.erase(
        std::unique(clause.alternatives.begin(), clause.alternatives.end(),
                    [](const Dependency& a, const Dependency& b) {
                      return a.target == b.target && a.constraint.str() == b.constraint.str();
                    }),
        clause.alternatives.end());
  }
  std::sort(spec.clauses.begin(), spec.clauses.end(),
            [](const DependencyClause& a, const DependencyClause& b) { return a.str() < b.str(); });
  spec.clauses.erase(std::unique(spec.clauses.begin(), spec.clauses.end(),
                                 [](const DependencyClause& a, const DependencyClause& b) {
                                   return a.str() == b.str();
                                 }),
                     spec.clauses.end());
}

std::string RevisionId::str() const { return product.name + "-" + version.str(); }

std::string FunctionId::str() const { return revision.str() + ":" + function; }

bool RevisionCallGraph::has_internal(std::string_view name) const {
  return std::binary_search(internal.begin(), internal.end(), name);
}

const ExternalNode* RevisionCallGraph::find_external(std::string_view id) const {
  auto it = std::lower_bound(external.begin(), external.end(), id,
                             [](const ExternalNode& n, std::string_view v) { return n.local_id < v; });
  if (it == external.end() || it->local_id != id) return nullptr;
  return &*it;
}

namespace {

// Normalizes and checks one revision before it enters an ecosystem.
void validate_and_normalize(Revision& rev) {
  const std::string where = rev.id.str();
  if (rev.id.product.name.empty()) throw Error("revision with empty product name");
  if (rev.id.product.name.find(':') != std::string::npos)
    throw Error("product name must not contain ':': " + rev.id.product.name);
  if (rev.id.version.components.empty()) throw Error("revision with empty version: " + where);

  for (const DependencyClause& c : rev.depspec.clauses) {
    if (c.alternatives.empty()) throw EmptyClauseError("empty dependency clause in " + where);
    for (const Dependency& d : c.alternatives) {
      if (d.target.name.empty()) throw Error("dependency with empty product in " + where);
      if (d.constraint.intervals.empty()) throw Error("dependency with empty constraint in " + where);
    }
  }
  canonicalize(rev.depspec);

  RevisionCallGraph& cg = rev.callgraph;
  std::sort(cg.internal.begin(), cg.internal.end());
  for (const std::string& name : cg.internal)
    if (name.empty()) throw Error("empty function name in " + where);
  if (std::adjacent_find(cg.internal.begin(), cg.internal.end()) != cg.internal.end())
    throw Error("duplicate internal function name in " + where);

  std::sort(cg.external.begin(), cg.external.end(),
            [](const ExternalNode& a, const ExternalNode& b) { return a.local_id < b.local_id; });
  std::set<std::string> ids;
  for (const ExternalNode& x : cg.external) {
    if (x.local_id.empty()) throw Error("empty external node id in " + where);
    if (!ids.insert(x.local_id).second)
      throw Error("duplicate external node id '" + x.local_id + "' in " + where);
    if (cg.has_internal(x.local_id))
      throw Error("external id '" + x.local_id + "' collides with an internal name in " + where);
    if (x.targets.empty())
      throw Error("external node '" + x.local_id + "' has no targets in " + where);
    for (const TargetPattern& t : x.targets) {
      if (t.product.name.empty() || t.function.empty())
        throw Error("incomplete target pattern on '" + x.local_id + "' in " + where);
      if (t.constraint.intervals.empty())
        throw Error("empty target constraint on '" + x.local_id + "' in " + where);
    }
  }

  std::sort(cg.arcs.begin(), cg.arcs.end());
  cg.arcs.erase(std::unique(cg.arcs.begin(), cg.arcs.end()), cg.arcs.end());
  for (const CallArc& a : cg.arcs) {
    if (!cg.has_internal(a.from))
      throw UnknownArcEndpointError("arc origin '" + a.from + "' is not an internal function of " +
                                    where);
    if (!cg.has_internal(a.to) && cg.find_external(a.to) == nullptr)
      throw UnknownArcEndpointError("arc target '" + a.to + "' is not declared in " + where);
  }

  for (const auto& [fn, lic] : rev.function_licenses) {
    if (!cg.has_internal(fn))
      throw Error("license entry for undeclared function '" + fn + "' in " + where);
    if (lic.empty()) throw Error("empty license label on '" + fn + "' in " + where);
  }
}

}  // namespace

void Ecosystem::add(Revision rev) {
  validate_and_normalize(rev);
  RevisionId id = rev.id;
  auto [it, inserted] = revisions_.emplace(id, std::move(rev));
  if (!inserted) throw DuplicateRevisionError("duplicate revision " + id.str());
  auto& list = by_product_[id.product];
  list.insert(std::upper_bound(list.begin(), list.end(), id), id);
}

const Revision& Ecosystem::at(const RevisionId& id) const {
  auto it = revisions_.find(id);
  if (it == revisions_.end()) throw UnknownRevisionError("unknown revision " + id.str());
  return it->second;
}

const Revision* Ecosystem::find(const RevisionId& id) const {
  auto it = revisions_.find(id);
  return it == revisions_.end() ? nullptr : &it->second;
}

const std::vector<RevisionId>& Ecosystem::revisions_of(const ProductId& product) const {
  static const std::vector<RevisionId> none;
  auto it = by_product_.find(product);
  return it == by_product_.end() ? none : it->second;
}

}  // namespace ecostitch
