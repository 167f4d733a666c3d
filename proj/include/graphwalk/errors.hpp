#pragma once

#include <stdexcept>
#include <string>

namespace graphwalk {

// Base for every failure this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph file could not be parsed as JSON or has the wrong shape.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Graph content contradicts its own schema (dangling edge, unknown node
// type, undeclared relation, searchable key not among declared features...).
class SchemaViolation : public Error {
 public:
  using Error::Error;
};

// A graph lookup failed in a way the acting model is expected to recover
// from.  These are caught at the action-execution boundary and turned into
// in-band error observations; they never abort an episode.
class QueryError : public Error {
 public:
  enum class Kind { UnknownNode, UnknownFeature, UnknownNeighborType, EmptyIndex };

  QueryError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* query_error_kind_name(QueryError::Kind kind);

// A sampled action string could not be turned into a call.
class ActionParseError : public Error {
 public:
  enum class Kind { Malformed, UnknownFunction, Arity };

  ActionParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Engine-side faults.  Unlike QueryError these escape the loop and end the
// episode with a BackendError termination.
class GatewayError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class TimeoutError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class MalformedResponse : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Prompt no longer fits the context budget even after eliding old steps.
class PromptOverflow : public Error {
 public:
  using Error::Error;
};

// Every sample in a voting batch was unparseable, twice in a row.
class AllSamplesMalformed : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// Embedding backend returned vectors of inconsistent width.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Score rows referenced a question id absent from the question set.
class UnknownQid : public Error {
 public:
  using Error::Error;
};

inline const char* query_error_kind_name(QueryError::Kind kind) {
  switch (kind) {
    case QueryError::Kind::UnknownNode: return "UnknownNode";
    case QueryError::Kind::UnknownFeature: return "UnknownFeature";
    case QueryError::Kind::UnknownNeighborType: return "UnknownNeighborType";
    case QueryError::Kind::EmptyIndex: return "EmptyIndex";
  }
  return "Unknown";
}

}  // namespace graphwalk
