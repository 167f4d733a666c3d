#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphwalk/eval.hpp"
#include "graphwalk/gateway.hpp"
#include "graphwalk/retrieval.hpp"
#include "graphwalk/synthetic.hpp"

namespace graphwalk {

// Everything a `run` invocation needs, resolved from CLI flags.
struct RunConfig {
  std::string mode = "agent";  // agent | baseline | replay | synth
  std::filesystem::path graph_path;
  std::filesystem::path questions_path;
  std::filesystem::path out_dir = "runs/out";

  int max_steps = 10;
  int votes = 1;
  bool sweep = false;
  std::vector<int> steps_grid{10, 25, 50};
  std::vector<int> votes_grid{1, 4, 8, 16};

  std::uint64_t seed = 0;
  int workers = 1;
  bool strict = false;  // nonzero exit when any episode hits a backend error
  std::size_t list_cap = 50;
  std::size_t context_budget = 60000;

  BackendConfig backend;
  SamplingParams params;

  std::string embed_backend = "hashed";  // hashed | endpoint
  RemoteEmbedderConfig embed;

  // baseline mode
  std::size_t baseline_k = 4;
  std::size_t baseline_budget = 4000;

  // synth mode
  int depth = 3;
  int episodes = 8;
  int branching = 2;
  std::string policy = "oracle";
  double noise_p = 0.7;
  int alternatives = 3;
};

// The resolved configuration as recorded in results.json.  Deliberately
// omits the output directory (so reruns into other directories compare
// equal) and all credentials.
nlohmann::json run_config_json(const RunConfig& cfg);

// Runs episodes for every (max_steps, votes) row, scores them, and writes
//   {out}/episodes.jsonl                      (single row)
//   {out}/sweep/s{steps}_v{votes}/episodes.jsonl  (sweep rows)
//   {out}/results.json, {out}/results.txt
// Rows always land in ascending (max_steps, votes) order.  Returns 0, or 1
// when --strict saw backend errors.
int cmd_run(const RunConfig& cfg);

struct ScoreConfig {
  std::filesystem::path run_dir;  // holds episodes.jsonl or sweep/
  std::filesystem::path questions_path;
  std::string embed_backend = "hashed";
  RemoteEmbedderConfig embed;
};

// Rescores recorded episodes and rewrites results.json / results.txt.  An
// existing results.json's run_config block is carried over unchanged, so
// rescoring an untouched run reproduces the files byte for byte.
int cmd_score(const ScoreConfig& cfg);

// Generates a chain world and writes graph.json + questions.jsonl.
int cmd_synth(const ChainWorldConfig& config, const std::filesystem::path& out_dir);

}  // namespace graphwalk
