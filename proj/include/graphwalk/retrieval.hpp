#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "graphwalk/graph.hpp"

namespace graphwalk {

// Text -> vector.  Implementations must be safe to call from several
// threads and must return one vector per input, in input order.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
  // Short stable label recorded with indexes built from this backend.
  virtual std::string identity() const = 0;
};

// Deterministic offline embedder: character trigrams feature-hashed into a
// fixed number of buckets, L2 normalized.  Identical text maps to an
// identical vector, so exact matches win retrieval with cosine 1.
class HashedTrigramEmbedder : public EmbeddingBackend {
 public:
  static constexpr std::size_t kDimension = 256;

  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;
  std::string identity() const override { return "hashed-trigram-256"; }
};

struct RemoteEmbedderConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;
  int timeout_ms = 120000;
  std::size_t batch_size = 64;
};

// POSTs {base_url}/embeddings with {"model", "input": [...]} and reads the
// vectors back from "data" in array order.
class RemoteEmbedder : public EmbeddingBackend {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;
  std::string identity() const override;

 private:
  RemoteEmbedderConfig config_;
};

struct RetrievalHit {
  std::string id;
  double score = 0.0;
};

// Exact brute-force cosine index over every node with nonempty search
// text.  Vectors are unit length; queries scan all entries.
class VectorIndex {
 public:
  static VectorIndex build(const KnowledgeGraph& graph, EmbeddingBackend& backend);

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::string& backend_identity() const { return backend_identity_; }

  // Best match for the query; exact cosine ties break toward the
  // lexicographically smallest node id.  Throws QueryError(EmptyIndex) when
  // the index holds no entries.
  RetrievalHit retrieve(const std::string& query, EmbeddingBackend& backend) const;

  // Top k matches, best first, same tie rule.
  std::vector<RetrievalHit> retrieve_top(const std::string& query,
                                         EmbeddingBackend& backend,
                                         std::size_t k) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<float>> vectors_;  // unit length
  std::size_t dimension_ = 0;
  std::string backend_identity_;
};

// Baseline context: the top k retrieved nodes plus their one-hop
// neighborhoods, serialized as feature blocks.  Deterministic for fixed
// inputs; whole node blocks are dropped newest-first once the character
// budget would be exceeded.
std::string one_hop_context(const KnowledgeGraph& graph, const VectorIndex& index,
                            EmbeddingBackend& backend, const std::string& query,
                            std::size_t k, std::size_t char_budget);

// Normalizes v to unit L2 length in place; zero vectors stay zero.
void normalize_unit(std::vector<float>& v);

}  // namespace graphwalk
