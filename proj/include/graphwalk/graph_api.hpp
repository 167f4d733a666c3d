#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphwalk/graph.hpp"
#include "graphwalk/retrieval.hpp"

namespace graphwalk {

// The closed call surface the acting model may use.
enum class ActionKind { RetrieveNode, NodeFeature, NeighborCheck, NodeDegree, Finish };

const char* action_name(ActionKind kind);

struct Action {
  ActionKind kind;
  // RetrieveNode: query.  NodeFeature / NeighborCheck / NodeDegree: node id.
  // Finish: the final answer.
  std::string arg0;
  // NodeFeature: feature key.  NeighborCheck / NodeDegree: neighbor type.
  std::string arg1;
  // The surface text the call was parsed from, for audit logs.
  std::string raw;

  bool is_finish() const { return kind == ActionKind::Finish; }
};

bool operator==(const Action& a, const Action& b);

// Canonical call text, e.g. NodeFeature[3101448248, year].  parse_action of
// this string yields the same call back.
std::string action_surface(const Action& a);

// Extracts the first parseable call from sampled text.  Function names
// match case-insensitively and the spelling NeighbourCheck is accepted for
// NeighborCheck.  Finish captures everything inside its outermost brackets;
// two-argument calls split on the first top-level comma; arguments are
// trimmed.  Throws ActionParseError(Malformed | UnknownFunction | Arity).
Action parse_action(const std::string& text);

// Observation payloads.
struct NodeHit {
  std::string id;
  double score = 0.0;
};
struct FeatureValue {
  std::string value;
};
struct NeighborList {
  std::string node_id;
  std::string relation;
  std::vector<std::string> ids;
};
struct DegreeValue {
  std::uint64_t value = 0;
};
// A recoverable graph fault surfaced to the model in-band.
struct GraphFault {
  QueryError::Kind kind;
  std::string message;
};

using Observation = std::variant<NodeHit, FeatureValue, NeighborList, DegreeValue, GraphFault>;

const char* observation_kind_name(const Observation& o);

// Runs a non-Finish action against the graph.  Graph-side faults come back
// as GraphFault observations; engine faults (embedding backend down and the
// like) propagate as exceptions.  Calling with a Finish action is a logic
// error.  Never mutates the graph.
Observation execute(const Action& action, const KnowledgeGraph& graph,
                    const VectorIndex& index, EmbeddingBackend& backend);

// Feedback text exactly as the model sees it:
//   NodeHit      "The ID of this node is {id}."
//   FeatureValue the verbatim value
//   NeighborList "The {type} neighbors of {id} are: ['a', 'b']." with at
//                most list_cap ids, then ", ... and {m} more" inside the
//                brackets
//   DegreeValue  the bare number
//   GraphFault   a one-sentence description
std::string render_observation(const Observation& o, std::size_t list_cap = 50);

}  // namespace graphwalk
