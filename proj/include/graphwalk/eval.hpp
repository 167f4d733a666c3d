#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphwalk/agent.hpp"
#include "graphwalk/retrieval.hpp"

namespace graphwalk {

// One benchmark question.  difficulty is one of easy | medium | hard.
struct QAItem {
  std::string qid;
  std::string question;
  std::vector<std::string> answers;  // accepted references; best one scores
  std::string difficulty = "easy";
  std::string domain;
  nlohmann::json meta;  // generator bookkeeping, carried through untouched
};

std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path);
void write_qa_jsonl(const std::filesystem::path& path, std::span<const QAItem> items);

// ASCII casefold, then split on runs of non-alphanumeric characters.
std::vector<std::string> tokenize(std::string_view text);

// Longest common subsequence length over token sequences.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// Token-level F1 of the longest common subsequence:
//   2 * LCS / (|candidate| + |reference|)
// Zero when either side has no tokens.
double rouge_l(const std::string& candidate, const std::string& reference);

// Soft token overlap: embed each token, greedily match every candidate
// token to its best-cosine reference token (precision) and vice versa
// (recall), then combine as F1.  Zero when either side has no tokens.
double embedding_f1(const std::string& candidate, const std::string& reference,
                    EmbeddingBackend& backend);

// Per-question score record.  max_steps and votes identify the
// configuration row the episode ran under; the runner fills them in.
struct ScoreRow {
  std::string qid;
  std::string domain;
  std::string difficulty;
  int max_steps = 0;
  int votes = 0;
  double rouge = 0.0;
  double embed = 0.0;
  std::string answer;
  std::string termination;
  int steps = 0;
  std::int64_t tokens = 0;
  std::int64_t wall_ms = 0;
};

// Scores one episode against its question: each metric takes the best
// value over the reference answers.
ScoreRow score_episode(const Episode& episode, const QAItem& item,
                       EmbeddingBackend& backend);

// One aggregated table row for a (max_steps, votes) configuration.
struct RunRow {
  int max_steps = 0;
  int votes = 0;
  std::map<std::string, double> rouge_by_domain;  // per-domain means
  std::map<std::string, double> embed_by_domain;
  double rouge_avg = 0.0;  // macro mean over domains
  double embed_avg = 0.0;
  double rouge_hard = 0.0;  // mean over medium + hard questions
  double embed_hard = 0.0;
  int episodes = 0;
  int backend_errors = 0;
  std::int64_t tokens = 0;
  std::int64_t wall_ms = 0;
};

RunRow aggregate_rows(std::span<const ScoreRow> rows, int max_steps, int votes);

// results.json: run_config verbatim, one entry per configuration row, and
// the per-question records.  Keys are emitted sorted, so equal inputs give
// equal bytes.
nlohmann::json results_to_json(const nlohmann::json& run_config,
                               std::span<const RunRow> rows,
                               std::span<const ScoreRow> per_question);
void write_results_json(const std::filesystem::path& path, const nlohmann::json& results);

// Plain-text table: one block per metric with a row per configuration and
// a column per domain plus the macro average, then the medium+hard slice.
// Scores are x100 with two decimals.
std::string render_results_table(std::span<const RunRow> rows);
void write_results_txt(const std::filesystem::path& path, std::span<const RunRow> rows);

struct BaselineInputs {
  std::string qid;
  std::string question;
  const KnowledgeGraph* graph = nullptr;
  const VectorIndex* index = nullptr;
  EmbeddingBackend* embedder = nullptr;
  LlmBackend* llm = nullptr;
  SamplingParams params;
  std::size_t retrieve_k = 4;
  std::size_t char_budget = 4000;
};

// Single-shot retrieve-then-read baseline: embed the question, pull the
// top nodes with their one-hop neighborhoods, ask once, take the reply as
// the answer.  Comes back as a zero-step episode so the same scoring and
// serialization applies.
Episode run_graphrag_baseline(const BaselineInputs& in);

}  // namespace graphwalk
