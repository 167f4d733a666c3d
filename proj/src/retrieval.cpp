#include "graphwalk/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "graphwalk/errors.hpp"
#include "graphwalk/hash.hpp"

namespace graphwalk {

void normalize_unit(std::vector<float>& v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  if (sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(x * inv);
}

std::vector<std::vector<float>> HashedTrigramEmbedder::embed(
    std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    std::vector<float> v(kDimension, 0.0f);
    if (text.size() >= 3) {
      for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
        std::uint64_t h = fnv1a64(std::string_view(text).substr(i, 3));
        v[h % kDimension] += 1.0f;
      }
    } else if (!text.empty()) {
      v[fnv1a64(text) % kDimension] += 1.0f;
    }
    normalize_unit(v);
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// Splits "http://host:port/prefix" into client root and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  auto scheme = base_url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = base_url.find('/', host_start);
  if (slash == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw ConfigError("remote embedder requires a base url");
  }
}

std::string RemoteEmbedder::identity() const {
  return "remote:" + config_.model + "@" + config_.base_url;
}

std::vector<std::vector<float>> RemoteEmbedder::embed(std::span<const std::string> texts) {
  auto [root, prefix] = split_base_url(config_.base_url);
  httplib::Client client(root);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    std::size_t stop = std::min(texts.size(), start + config_.batch_size);
    nlohmann::json body = {{"model", config_.model}, {"input", nlohmann::json::array()}};
    for (std::size_t i = start; i < stop; ++i) {
      body["input"].push_back(texts[i]);
    }
    auto res = client.Post(prefix + "/embeddings", headers, body.dump(), "application/json");
    if (!res) {
      throw BackendUnavailable("embedding endpoint unreachable: " + config_.base_url);
    }
    if (res->status != 200) {
      throw BackendUnavailable("embedding endpoint returned HTTP " +
                               std::to_string(res->status));
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedResponse(std::string("embedding response is not JSON: ") + e.what());
    }
    if (!parsed.contains("data") || !parsed["data"].is_array() ||
        parsed["data"].size() != stop - start) {
      throw MalformedResponse("embedding response has the wrong number of vectors");
    }
    for (const auto& item : parsed["data"]) {
      if (!item.contains("embedding") || !item["embedding"].is_array()) {
        throw MalformedResponse("embedding response entry lacks an \"embedding\" array");
      }
      std::vector<float> v;
      v.reserve(item["embedding"].size());
      for (const auto& x : item["embedding"]) {
        v.push_back(x.get<float>());
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

VectorIndex VectorIndex::build(const KnowledgeGraph& graph, EmbeddingBackend& backend) {
  VectorIndex index;
  index.backend_identity_ = backend.identity();

  std::vector<std::string> texts;
  for (const Node& n : graph.nodes()) {
    std::string_view text = graph.search_text(n);
    if (text.empty()) continue;
    index.ids_.push_back(n.id);
    texts.emplace_back(text);
  }
  if (texts.empty()) {
    return index;
  }
  index.vectors_ = backend.embed(texts);
  if (index.vectors_.size() != texts.size()) {
    throw DimensionMismatch("embedding backend returned a short batch");
  }
  index.dimension_ = index.vectors_.front().size();
  for (auto& v : index.vectors_) {
    if (v.size() != index.dimension_) {
      throw DimensionMismatch("embedding backend returned mixed vector widths");
    }
    normalize_unit(v);
  }
  return index;
}

std::vector<RetrievalHit> VectorIndex::retrieve_top(const std::string& query,
                                                    EmbeddingBackend& backend,
                                                    std::size_t k) const {
  if (ids_.empty()) {
    throw QueryError(QueryError::Kind::EmptyIndex, "The graph has no retrievable nodes.");
  }
  std::vector<std::string> one{query};
  std::vector<std::vector<float>> q = backend.embed(one);
  if (q.size() != 1) {
    throw DimensionMismatch("embedding backend returned a short batch");
  }
  std::vector<float>& qv = q.front();
  if (qv.size() != dimension_) {
    throw DimensionMismatch("query embedding width does not match the index");
  }
  normalize_unit(qv);

  std::vector<std::size_t> order(ids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> scores(ids_.size(), 0.0);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    double dot = 0.0;
    const std::vector<float>& v = vectors_[i];
    for (std::size_t d = 0; d < dimension_; ++d) {
      dot += static_cast<double>(v[d]) * qv[d];
    }
    scores[i] = dot;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  });
  std::vector<RetrievalHit> hits;
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    hits.push_back({ids_[order[i]], scores[order[i]]});
  }
  return hits;
}

RetrievalHit VectorIndex::retrieve(const std::string& query,
                                   EmbeddingBackend& backend) const {
  return retrieve_top(query, backend, 1).front();
}

namespace {

std::string node_block(const Node& n) {
  std::ostringstream out;
  out << "Node " << n.id << " (" << n.type << ")\n";
  for (const auto& [k, v] : n.features) {
    out << "  " << k << ": " << v << "\n";
  }
  return out.str();
}

}  // namespace

std::string one_hop_context(const KnowledgeGraph& graph, const VectorIndex& index,
                            EmbeddingBackend& backend, const std::string& query,
                            std::size_t k, std::size_t char_budget) {
  std::vector<RetrievalHit> hits = index.retrieve_top(query, backend, k);

  // Deterministic block order: each hit, then its neighbors per relation in
  // schema declaration order, skipping nodes already emitted.
  std::vector<std::string> blocks;
  std::unordered_set<std::string> seen;
  auto push_node = [&](const std::string& id) {
    if (!seen.insert(id).second) return;
    const Node* n = graph.find(id);
    if (n != nullptr) blocks.push_back(node_block(*n));
  };
  for (const RetrievalHit& hit : hits) {
    push_node(hit.id);
    const Node* n = graph.find(hit.id);
    if (n == nullptr) continue;
    const NodeTypeSchema* t = graph.schema().find_type(n->type);
    if (t == nullptr) continue;
    for (const NeighborRelation& rel : t->neighbors) {
      for (const std::string& neighbor : graph.neighbors(n->id, rel.name)) {
        push_node(neighbor);
      }
    }
  }

  // Whole blocks only; once the budget is hit everything after is dropped.
  std::string out;
  for (const std::string& block : blocks) {
    if (out.size() + block.size() > char_budget) break;
    out += block;
  }
  return out;
}

}  // namespace graphwalk
