#include "graphwalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace graphwalk {
namespace {

// Strict object reader: every key must be one of `allowed`.
void require_keys(const ojson& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) {
    throw ParseError(where + ": expected an object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError(where + ": unknown key \"" + it.key() + "\"");
    }
  }
}

const ojson& require_field(const ojson& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const ojson& obj, const char* key, const std::string& where) {
  const ojson& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw ParseError(where + ": key \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

const NodeTypeSchema* GraphSchema::find_type(std::string_view name) const {
  for (const auto& t : node_types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const NeighborRelation* GraphSchema::find_relation(std::string_view type_name,
                                                   std::string_view relation) const {
  const NodeTypeSchema* t = find_type(type_name);
  if (t == nullptr) return nullptr;
  for (const auto& r : t->neighbors) {
    if (r.name == relation) return &r;
  }
  return nullptr;
}

bool GraphSchema::relation_known(std::string_view relation) const {
  for (const auto& t : node_types) {
    for (const auto& r : t.neighbors) {
      if (r.name == relation) return true;
    }
  }
  return false;
}

GraphSchema GraphSchema::from_json(const ojson& j) {
  require_keys(j, {"node_types", "definition"}, "schema");
  GraphSchema schema;
  const ojson& types = require_field(j, "node_types", "schema");
  if (!types.is_array()) {
    throw ParseError("schema: \"node_types\" must be an array");
  }
  for (const ojson& tj : types) {
    require_keys(tj, {"name", "features", "searchable", "neighbors"}, "schema.node_types[]");
    NodeTypeSchema t;
    t.name = require_string(tj, "name", "schema.node_types[]");
    const ojson& feats = require_field(tj, "features", "schema.node_types[]");
    if (!feats.is_array()) {
      throw ParseError("schema type \"" + t.name + "\": \"features\" must be an array");
    }
    for (const ojson& f : feats) {
      if (!f.is_string()) {
        throw ParseError("schema type \"" + t.name + "\": feature keys must be strings");
      }
      t.feature_keys.push_back(f.get<std::string>());
    }
    t.searchable_key = require_string(tj, "searchable", "schema type \"" + t.name + "\"");
    if (auto it = tj.find("neighbors"); it != tj.end()) {
      if (!it->is_array()) {
        throw ParseError("schema type \"" + t.name + "\": \"neighbors\" must be an array");
      }
      for (const ojson& nj : *it) {
        require_keys(nj, {"relation", "target", "inverse"}, "schema neighbors");
        NeighborRelation r;
        r.name = require_string(nj, "relation", "schema neighbors");
        r.target_type = require_string(nj, "target", "schema neighbors");
        if (auto inv = nj.find("inverse"); inv != nj.end()) {
          if (!inv->is_string()) {
            throw ParseError("schema neighbors: \"inverse\" must be a string");
          }
          r.inverse = inv->get<std::string>();
        }
        t.neighbors.push_back(std::move(r));
      }
    }
    // Searchable key must be declared, except in the degenerate case of a
    // type with no features at all.
    if (!t.searchable_key.empty() &&
        std::find(t.feature_keys.begin(), t.feature_keys.end(), t.searchable_key) ==
            t.feature_keys.end()) {
      throw SchemaViolation("schema type \"" + t.name + "\": searchable feature \"" +
                            t.searchable_key + "\" is not among its declared features");
    }
    schema.node_types.push_back(std::move(t));
  }
  if (auto it = j.find("definition"); it != j.end()) {
    if (!it->is_string()) {
      throw ParseError("schema: \"definition\" must be a string");
    }
    schema.definition_text = it->get<std::string>();
  }

  // Cross-type consistency: relation targets exist, declared inverses exist
  // on the target type.
  for (const auto& t : schema.node_types) {
    for (const auto& r : t.neighbors) {
      const NodeTypeSchema* target = schema.find_type(r.target_type);
      if (target == nullptr) {
        throw SchemaViolation("schema type \"" + t.name + "\": relation \"" + r.name +
                              "\" targets unknown node type \"" + r.target_type + "\"");
      }
      if (!r.inverse.empty() &&
          schema.find_relation(r.target_type, r.inverse) == nullptr) {
        throw SchemaViolation("schema type \"" + t.name + "\": inverse \"" + r.inverse +
                              "\" of relation \"" + r.name +
                              "\" is not declared on type \"" + r.target_type + "\"");
      }
    }
  }
  return schema;
}

ojson GraphSchema::to_json() const {
  ojson types = ojson::array();
  for (const auto& t : node_types) {
    ojson neighbors = ojson::array();
    for (const auto& r : t.neighbors) {
      neighbors.push_back({{"relation", r.name}, {"target", r.target_type}, {"inverse", r.inverse}});
    }
    types.push_back({{"name", t.name},
                     {"features", t.feature_keys},
                     {"searchable", t.searchable_key},
                     {"neighbors", std::move(neighbors)}});
  }
  return {{"node_types", std::move(types)}, {"definition", definition_text}};
}

const std::string* Node::feature(std::string_view key) const {
  for (const auto& [k, v] : features) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string KnowledgeGraph::adjacency_key(std::size_t node_index, std::string_view relation) {
  return std::to_string(node_index) + "\x1f" + std::string(relation);
}

void KnowledgeGraph::add_neighbor(std::size_t node_index, std::string_view relation,
                                  const std::string& neighbor_id) {
  auto& list = adjacency_[adjacency_key(node_index, relation)];
  // Duplicate edges collapse; first occurrence fixes the position.
  if (std::find(list.begin(), list.end(), neighbor_id) == list.end()) {
    list.push_back(neighbor_id);
  }
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open graph file: " + path.string());
  }
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("graph file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

KnowledgeGraph KnowledgeGraph::from_json(const ojson& j) {
  require_keys(j, {"schema", "graph"}, "graph file");
  KnowledgeGraph g;
  g.schema_ = GraphSchema::from_json(require_field(j, "schema", "graph file"));

  const ojson& body = require_field(j, "graph", "graph file");
  require_keys(body, {"nodes", "edges"}, "graph");
  const ojson& nodes = require_field(body, "nodes", "graph");
  const ojson& edges = require_field(body, "edges", "graph");
  if (!nodes.is_array() || !edges.is_array()) {
    throw ParseError("graph: \"nodes\" and \"edges\" must be arrays");
  }

  for (const ojson& nj : nodes) {
    require_keys(nj, {"id", "type", "features"}, "graph.nodes[]");
    Node n;
    n.id = require_string(nj, "id", "graph.nodes[]");
    n.type = require_string(nj, "type", "graph.nodes[]");
    const NodeTypeSchema* t = g.schema_.find_type(n.type);
    if (t == nullptr) {
      throw SchemaViolation("node \"" + n.id + "\" has undeclared type \"" + n.type + "\"");
    }
    const ojson& feats = require_field(nj, "features", "graph.nodes[]");
    if (!feats.is_object()) {
      throw ParseError("node \"" + n.id + "\": \"features\" must be an object");
    }
    for (auto it = feats.begin(); it != feats.end(); ++it) {
      if (!it->is_string()) {
        throw ParseError("node \"" + n.id + "\": feature \"" + it.key() +
                         "\" must be a string");
      }
      n.features.emplace_back(it.key(), it->get<std::string>());
    }
    if (g.by_id_.count(n.id) != 0) {
      throw SchemaViolation("duplicate node id \"" + n.id + "\"");
    }
    g.by_id_.emplace(n.id, g.nodes_.size());
    g.nodes_.push_back(std::move(n));
  }

  for (const ojson& ej : edges) {
    require_keys(ej, {"src", "dst", "relation"}, "graph.edges[]");
    Edge e;
    e.src = require_string(ej, "src", "graph.edges[]");
    e.dst = require_string(ej, "dst", "graph.edges[]");
    e.relation = require_string(ej, "relation", "graph.edges[]");

    auto src_it = g.by_id_.find(e.src);
    auto dst_it = g.by_id_.find(e.dst);
    if (src_it == g.by_id_.end() || dst_it == g.by_id_.end()) {
      throw SchemaViolation("edge " + e.src + " -[" + e.relation + "]-> " + e.dst +
                            " references a missing node");
    }
    const Node& src = g.nodes_[src_it->second];
    const Node& dst = g.nodes_[dst_it->second];
    const NeighborRelation* rel = g.schema_.find_relation(src.type, e.relation);
    if (rel == nullptr) {
      throw SchemaViolation("edge relation \"" + e.relation +
                            "\" is not declared for node type \"" + src.type + "\"");
    }
    if (rel->target_type != dst.type) {
      throw SchemaViolation("edge " + e.src + " -[" + e.relation + "]-> " + e.dst +
                            " targets type \"" + dst.type + "\" but the schema declares \"" +
                            rel->target_type + "\"");
    }
    g.add_neighbor(src_it->second, e.relation, e.dst);
    if (!rel->inverse.empty()) {
      g.add_neighbor(dst_it->second, rel->inverse, e.src);
    }
    g.edges_.push_back(std::move(e));
  }
  return g;
}

const Node* KnowledgeGraph::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

const std::string& KnowledgeGraph::node_feature(std::string_view id,
                                                std::string_view key) const {
  const Node* n = find(id);
  if (n == nullptr) {
    throw QueryError(QueryError::Kind::UnknownNode,
                     "There is no node with id " + std::string(id) + " in the graph.");
  }
  const std::string* v = n->feature(key);
  if (v == nullptr) {
    throw QueryError(QueryError::Kind::UnknownFeature,
                     "Node " + std::string(id) + " has no feature " + std::string(key) + ".");
  }
  return *v;
}

std::span<const std::string> KnowledgeGraph::neighbors(std::string_view id,
                                                       std::string_view relation) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) {
    throw QueryError(QueryError::Kind::UnknownNode,
                     "There is no node with id " + std::string(id) + " in the graph.");
  }
  if (!schema_.relation_known(relation)) {
    throw QueryError(QueryError::Kind::UnknownNeighborType,
                     "Neighbor type " + std::string(relation) +
                         " is not part of the graph schema.");
  }
  auto adj = adjacency_.find(adjacency_key(it->second, relation));
  if (adj == adjacency_.end()) {
    return {};
  }
  return {adj->second.data(), adj->second.size()};
}

std::size_t KnowledgeGraph::degree(std::string_view id, std::string_view relation) const {
  return neighbors(id, relation).size();
}

std::string_view KnowledgeGraph::search_text(const Node& node) const {
  const NodeTypeSchema* t = schema_.find_type(node.type);
  if (t == nullptr || t->searchable_key.empty()) return {};
  const std::string* v = node.feature(t->searchable_key);
  return v == nullptr ? std::string_view{} : std::string_view(*v);
}

std::string count_words(std::size_t n) {
  static const char* words[] = {"zero", "one",  "two",   "three", "four",  "five", "six",
                                "seven", "eight", "nine", "ten",  "eleven", "twelve"};
  if (n < sizeof(words) / sizeof(words[0])) return words[n];
  return std::to_string(n);
}

std::string KnowledgeGraph::render_schema() const {
  if (!schema_.definition_text.empty()) {
    return schema_.definition_text;
  }
  if (schema_.node_types.empty()) {
    return "There are zero types of nodes in the graph.";
  }
  std::ostringstream out;
  out << "There are " << count_words(schema_.node_types.size())
      << (schema_.node_types.size() == 1 ? " type" : " types") << " of nodes in the graph: ";
  for (std::size_t i = 0; i < schema_.node_types.size(); ++i) {
    if (i > 0) {
      out << (i + 1 == schema_.node_types.size() ? " and " : ", ");
    }
    out << schema_.node_types[i].name;
  }
  out << ".";
  for (const auto& t : schema_.node_types) {
    out << "\n" << t.name << " nodes have features: ";
    if (t.feature_keys.empty()) {
      out << "none.";
    } else {
      for (std::size_t i = 0; i < t.feature_keys.size(); ++i) {
        if (i > 0) {
          out << (i + 1 == t.feature_keys.size() ? " and " : ", ");
        }
        out << t.feature_keys[i];
      }
      out << ".";
    }
  }
  return out.str();
}

ojson KnowledgeGraph::to_json() const {
  ojson nodes = ojson::array();
  for (const Node& n : nodes_) {
    ojson feats = ojson::object();
    for (const auto& [k, v] : n.features) {
      feats[k] = v;
    }
    nodes.push_back({{"id", n.id}, {"type", n.type}, {"features", std::move(feats)}});
  }
  ojson edges = ojson::array();
  for (const Edge& e : edges_) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"relation", e.relation}});
  }
  return {{"schema", schema_.to_json()},
          {"graph", {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}}};
}

}  // namespace graphwalk
