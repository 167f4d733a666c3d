#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "graphwalk/graph.hpp"
#include "graphwalk/retrieval.hpp"

namespace {

using namespace graphwalk;

const char* kFixture = GRAPHWALK_DATA_DIR "/fixtures/academic_replay.json";

const KnowledgeGraph& fixture() {
  static const KnowledgeGraph g = KnowledgeGraph::load(kFixture);
  return g;
}

HashedTrigramEmbedder& embedder() {
  static HashedTrigramEmbedder e;
  return e;
}

const VectorIndex& fixture_index() {
  static const VectorIndex index = VectorIndex::build(fixture(), embedder());
  return index;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return dot;
}

// Exhaustive scan over every node with search text: best cosine, ties to
// the smallest id.  Everything recomputed from scratch, nothing shared
// with VectorIndex.
RetrievalHit oracle_best(const KnowledgeGraph& g, const std::string& query) {
  std::vector<std::string> texts{query};
  std::vector<std::string> ids;
  for (const Node& n : g.nodes()) {
    if (!g.search_text(n).empty()) {
      ids.push_back(n.id);
      texts.emplace_back(g.search_text(n));
    }
  }
  std::vector<std::vector<float>> vecs = embedder().embed(texts);
  for (auto& v : vecs) normalize_unit(v);
  RetrievalHit best{"", -2.0};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double score = cosine(vecs[0], vecs[i + 1]);
    if (score > best.score || (score == best.score && ids[i] < best.id)) {
      best = {ids[i], score};
    }
  }
  return best;
}

KnowledgeGraph graph_with_titles(const std::vector<std::pair<std::string, std::string>>& nodes) {
  ojson doc = ojson::parse(R"({
    "schema": {
      "node_types": [
        {"name": "thing", "features": ["name"], "searchable": "name", "neighbors": []}
      ],
      "definition": ""
    },
    "graph": {"nodes": [], "edges": []}
  })");
  for (const auto& [id, name] : nodes) {
    doc["graph"]["nodes"].push_back(
        {{"id", id}, {"type", "thing"}, {"features", {{"name", name}}}});
  }
  return KnowledgeGraph::from_json(doc);
}

}  // namespace

TEST_CASE("trigram embedder is deterministic and unit length") {
  std::vector<std::string> texts = {"Strongly Interacting Higgs Sector", "a", "ab",
                                    "abc"};
  auto first = embedder().embed(texts);
  auto second = embedder().embed(texts);
  CHECK(first == second);
  REQUIRE(first.size() == 4);
  for (const auto& v : first) {
    CHECK(v.size() == HashedTrigramEmbedder::kDimension);
    double norm = std::sqrt(cosine(v, v));
    CHECK(norm == doctest::Approx(1.0));
  }
}

TEST_CASE("distinct short texts still embed distinctly") {
  std::vector<std::string> texts = {"a", "b"};
  auto vecs = embedder().embed(texts);
  CHECK(vecs[0] != vecs[1]);
}

TEST_CASE("index covers every node with search text") {
  // All 24 fixture nodes carry their searchable feature.
  CHECK(fixture_index().size() == 24);
  CHECK(fixture_index().dimension() == HashedTrigramEmbedder::kDimension);
  CHECK(fixture_index().backend_identity() == "hashed-trigram-256");
}

TEST_CASE("exact titles retrieve their node with cosine one") {
  const VectorIndex& index = fixture_index();
  RetrievalHit hit = index.retrieve(
      "Strongly Interacting Higgs Sector in the Minimal Standard Model", embedder());
  CHECK(hit.id == "3101448248");
  CHECK(hit.score == doctest::Approx(1.0));

  hit = index.retrieve("John F. Gunion", embedder());
  CHECK(hit.id == "98581309");
  CHECK(hit.score == doctest::Approx(1.0));
}

TEST_CASE("retrieval agrees with the exhaustive scan") {
  const VectorIndex& index = fixture_index();
  const char* queries[] = {
      "Mass Accretion Rates in Self-Regulated Disks of T Tauri Stars",
      "higgs sector",
      "accretion disks of young stars",
      "Physical Review",
      "machine learning big data",
      "gunion",
  };
  for (const char* query : queries) {
    CAPTURE(query);
    RetrievalHit got = index.retrieve(query, embedder());
    RetrievalHit want = oracle_best(fixture(), query);
    CHECK(got.id == want.id);
    CHECK(got.score == doctest::Approx(want.score).epsilon(1e-9));
  }
}

TEST_CASE("retrieve_top orders by score, then id") {
  const VectorIndex& index = fixture_index();
  auto hits = index.retrieve_top("higgs sector", embedder(), 5);
  REQUIRE(hits.size() == 5);
  for (std::size_t i = 1; i < hits.size(); ++i) {
    bool ordered = hits[i - 1].score > hits[i].score ||
                   (hits[i - 1].score == hits[i].score && hits[i - 1].id < hits[i].id);
    CHECK(ordered);
  }
  // k larger than the index comes back truncated, not padded.
  CHECK(index.retrieve_top("anything", embedder(), 100).size() == 24);
}

TEST_CASE("ties break toward the smallest id") {
  KnowledgeGraph g = graph_with_titles({{"zz", "identical name"},
                                        {"aa", "identical name"},
                                        {"mm", "identical name"}});
  VectorIndex index = VectorIndex::build(g, embedder());
  RetrievalHit hit = index.retrieve("identical name", embedder());
  CHECK(hit.id == "aa");
  CHECK(hit.score == doctest::Approx(1.0));
  auto top = index.retrieve_top("identical name", embedder(), 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].id == "aa");
  CHECK(top[1].id == "mm");
  CHECK(top[2].id == "zz");
}

TEST_CASE("an index with no searchable text rejects queries") {
  ojson doc = ojson::parse(R"({
    "schema": {
      "node_types": [
        {"name": "thing", "features": ["name"], "searchable": "name", "neighbors": []}
      ],
      "definition": ""
    },
    "graph": {
      "nodes": [{"id": "a", "type": "thing", "features": {}}],
      "edges": []
    }
  })");
  KnowledgeGraph g = KnowledgeGraph::from_json(doc);
  VectorIndex index = VectorIndex::build(g, embedder());
  CHECK(index.size() == 0);
  CHECK_THROWS_WITH_AS(index.retrieve("anything", embedder()),
                       "The graph has no retrievable nodes.", QueryError);
}

TEST_CASE("normalize_unit leaves zero vectors alone") {
  std::vector<float> zero(8, 0.0f);
  normalize_unit(zero);
  CHECK(zero == std::vector<float>(8, 0.0f));
  std::vector<float> v = {3.0f, 4.0f};
  normalize_unit(v);
  CHECK(v[0] == doctest::Approx(0.6f));
  CHECK(v[1] == doctest::Approx(0.8f));
}

TEST_CASE("one_hop_context lists the hit then its neighbors") {
  std::string context =
      one_hop_context(fixture(), fixture_index(), embedder(),
                      "Strongly Interacting Higgs Sector in the Minimal Standard Model",
                      1, 100000);
  std::size_t paper = context.find("Node 3101448248 (paper)");
  std::size_t author = context.find("Node 98581309 (author)");
  std::size_t venue = context.find("Node 1101010101 (venue)");
  CHECK(paper != std::string::npos);
  CHECK(author != std::string::npos);
  CHECK(venue != std::string::npos);
  CHECK(paper < author);   // hit block first
  CHECK(author < venue);   // neighbors follow relation declaration order
  CHECK(context.find("John F. Gunion") != std::string::npos);
}

TEST_CASE("one_hop_context respects the character budget with whole blocks") {
  std::string full =
      one_hop_context(fixture(), fixture_index(), embedder(),
                      "Strongly Interacting Higgs Sector in the Minimal Standard Model",
                      1, 100000);
  std::string clipped =
      one_hop_context(fixture(), fixture_index(), embedder(),
                      "Strongly Interacting Higgs Sector in the Minimal Standard Model",
                      1, 400);
  CHECK(clipped.size() <= 400);
  CHECK(clipped.size() < full.size());
  // Whatever survives is a prefix of the unclipped rendering.
  CHECK(full.rfind(clipped, 0) == 0);
}

TEST_CASE("one_hop_context deduplicates shared neighbors across hits") {
  std::string context = one_hop_context(fixture(), fixture_index(), embedder(),
                                        "higgs sector hidden symmetry", 24, 1000000);
  // Every node can appear at most once no matter how many hits touch it.
  std::size_t first = context.find("Node 3101448248 (paper)");
  REQUIRE(first != std::string::npos);
  CHECK(context.find("Node 3101448248 (paper)", first + 1) == std::string::npos);
}
