#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecostitch {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input: version strings, constraint expressions, corpus
// documents. `position` is a byte offset into the offending text when known,
// 0 for document-level problems.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

struct UnknownRevisionError : Error { using Error::Error; };
struct UnknownFunctionError : Error { using Error::Error; };
struct UnknownNodeError : Error { using Error::Error; };
struct DuplicateRevisionError : Error { using Error::Error; };
struct UnknownArcEndpointError : Error { using Error::Error; };
struct EmptyClauseError : Error { using Error::Error; };
struct EmptyGraphError : Error { using Error::Error; };
struct InvalidParamsError : Error { using Error::Error; };
struct SnapshotExcludesRootError : Error { using Error::Error; };

}  // namespace ecostitch
