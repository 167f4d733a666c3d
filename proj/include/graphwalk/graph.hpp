#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphwalk/errors.hpp"

namespace graphwalk {

using ojson = nlohmann::ordered_json;

// One traversable relation declared for a node type.  `inverse` names the
// relation under which the reverse direction is materialized on the target
// type; empty means the edge is one-way.
struct NeighborRelation {
  std::string name;
  std::string target_type;
  std::string inverse;
};

struct NodeTypeSchema {
  std::string name;
  std::vector<std::string> feature_keys;  // declared order, used for prompts
  std::string searchable_key;             // feature that retrieval indexes
  std::vector<NeighborRelation> neighbors;
};

// Schema for a typed property graph: node types, their feature keys, which
// feature is searchable, which relations exist, plus the prose block pasted
// into prompts as the graph definition.
struct GraphSchema {
  std::vector<NodeTypeSchema> node_types;
  std::string definition_text;

  const NodeTypeSchema* find_type(std::string_view name) const;
  const NeighborRelation* find_relation(std::string_view type_name,
                                        std::string_view relation) const;
  // True when any node type declares `relation`.
  bool relation_known(std::string_view relation) const;

  static GraphSchema from_json(const ojson& j);
  ojson to_json() const;
};

struct Node {
  std::string id;
  std::string type;
  // Insertion-ordered; feature keys are unique per node.
  std::vector<std::pair<std::string, std::string>> features;

  const std::string* feature(std::string_view key) const;
};

struct Edge {
  std::string src;
  std::string dst;
  std::string relation;
};

// Immutable in-memory knowledge graph.  Load once, then query from any
// number of threads.  Adjacency lists keep file order, are duplicate free,
// and include the declared inverse direction of every edge.
class KnowledgeGraph {
 public:
  // An empty graph: no types, no nodes.  Load one to get anything useful.
  KnowledgeGraph() = default;

  static KnowledgeGraph load(const std::filesystem::path& path);
  static KnowledgeGraph from_json(const ojson& j);

  const GraphSchema& schema() const { return schema_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const Node* find(std::string_view id) const;

  // Verbatim feature text.  Throws QueryError(UnknownNode | UnknownFeature).
  const std::string& node_feature(std::string_view id, std::string_view key) const;

  // Neighbor ids for one relation, in load order.  Returns an empty span for
  // a node that has no such neighbors.  Throws QueryError(UnknownNode) or
  // QueryError(UnknownNeighborType) when no node type declares the relation.
  std::span<const std::string> neighbors(std::string_view id,
                                         std::string_view relation) const;

  // Neighbor count; same error contract as neighbors().
  std::size_t degree(std::string_view id, std::string_view relation) const;

  // Search text for retrieval: the node's schema-designated searchable
  // feature, or empty when the node does not carry it.
  std::string_view search_text(const Node& node) const;

  // Prose graph description for prompts.  Uses the schema's definition text
  // when present, otherwise synthesizes one ("There are zero types of nodes
  // in the graph." for an empty schema).
  std::string render_schema() const;

  // Round-trips through the file format: from_json(to_json()) is identical.
  ojson to_json() const;

 private:
  GraphSchema schema_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> by_id_;
  // (node index, relation) -> neighbor ids in materialization order.
  std::unordered_map<std::string, std::vector<std::string>> adjacency_;

  static std::string adjacency_key(std::size_t node_index, std::string_view relation);
  void add_neighbor(std::size_t node_index, std::string_view relation,
                    const std::string& neighbor_id);
};

// Turns 0..12 into words, larger counts into digits; used when synthesizing
// a schema description.
std::string count_words(std::size_t n);

}  // namespace graphwalk
