#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "graphwalk/eval.hpp"
#include "graphwalk/gateway.hpp"
#include "graphwalk/graph.hpp"
#include "graphwalk/graph_api.hpp"
#include "graphwalk/voting.hpp"

namespace graphwalk {

// A generated benchmark of cue-following walks.  Each chain is a spine of
// waypoints; every non-terminal waypoint stores a "cue" feature naming the
// relation that leads onward, the terminal waypoint stores the answer under
// "value", and each spine waypoint also sprouts decoy edges so wrong turns
// land somewhere plausible.  Answering a depth-h chain needs exactly
//   1 retrieval + (h-1) x (cue lookup + neighbor hop) + 1 value lookup
// = 2h graph actions, so an episode succeeds iff max_steps >= 2h: at 2h the
// answer has been observed and the forced finish can state it.
struct ChainWorldConfig {
  int depth = 3;      // hops per chain (h); the answer needs 2h actions
  int chains = 8;     // independent chains == questions
  int branching = 2;  // relations leaving each spine waypoint, decoys included
  std::uint64_t seed = 0;
  std::string domain = "synthetic";
};

// Everything a scripted policy needs to walk one chain perfectly.
struct ChainSpec {
  int hops = 1;
  std::string qid;
  std::string anchor;                   // terminal retrieval query == c0's name
  std::vector<std::string> node_ids;    // spine, anchor node first
  std::vector<std::string> relations;   // hop j follows relations[j-1]
  std::string answer;
};

struct ChainWorld {
  ChainWorldConfig config;
  KnowledgeGraph graph;
  std::vector<QAItem> questions;  // one per chain, meta records the walk
  std::vector<ChainSpec> chains;
};

// Deterministic for a fixed config.  Throws ConfigError on out-of-range
// parameters (depth < 1, chains < 1, branching outside 1..6).
ChainWorld make_chain_world(const ChainWorldConfig& config);

// Writes graph.json and questions.jsonl into dir (created if needed).
void write_chain_world(const ChainWorld& world, const std::filesystem::path& dir);

// The on-track call at a 0-based position in the walk; positions past the
// Finish keep returning Finish.
Action oracle_action(const ChainSpec& chain, int position);

// Steps after which the answer has been observed: 2 * hops.
int oracle_threshold(const ChainSpec& chain);

struct PolicySpec {
  enum class Kind { Oracle, Noisy, NeverFinish };
  Kind kind = Kind::Oracle;
  // Noisy only: chance each sample takes the on-track call; otherwise one
  // of `alternatives` distinct wrong calls, uniformly.
  double p = 1.0;
  int alternatives = 3;
};

// Maps a CLI name (oracle | noisy | never-finish) to a spec.
PolicySpec make_policy(const std::string& name, double p, int alternatives);

// A model stand-in wired to a chain world.  It reads the prompt like the
// real model would: locates the question, recovers the committed calls from
// the transcript's Action lines, and plays the walk from there.  Once a
// wrong call has been committed it stays lost: wrong non-Finish calls
// forever, and "unknown" under a forced finish.  Sampling is driven by a
// generator seeded from (params.seed, prompt), so outcomes depend only on
// those two and never on scheduling.
class PolicyBackend final : public LlmBackend {
 public:
  PolicyBackend(const ChainWorld* world, PolicySpec spec);

  CompletionBatch sample(const std::string& prompt, const SamplingParams& params,
                         int n) override;
  BackendAccounting accounting() const override;
  bool deterministic() const override { return true; }

  // The canonical keys a noisy policy draws from at an on-track position:
  // the correct call first, then the `alternatives` wrong calls.  Exposed
  // so vote statistics can be checked against exact enumeration.
  std::vector<CanonicalKey> step_candidates(const ChainSpec& chain, int position) const;

 private:
  const ChainSpec& chain_for_prompt(const std::string& prompt) const;
  Action wrong_action(const ChainSpec& chain, int position, int index) const;

  const ChainWorld* world_;
  PolicySpec spec_;
  BackendAccounting accounting_;
  mutable std::mutex mutex_;
};

}  // namespace graphwalk
