#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphwalk/gateway.hpp"
#include "graphwalk/graph_api.hpp"
#include "graphwalk/prompts.hpp"
#include "graphwalk/voting.hpp"

namespace graphwalk {

struct InferenceBudget {
  int max_steps = 10;  // thought-action exchanges before forcing an answer
  int votes = 1;       // samples per step for majority voting
};

struct TraceStep {
  int index = 0;  // 1-based
  std::string thought;
  Action action;
  // Absent exactly on the Finish step.
  std::optional<Observation> observation;
  std::string observation_text;  // rendered form, as the model saw it
  std::map<CanonicalKey, int> tally;
  int samples_kept = 0;
  int samples_discarded = 0;
};

enum class Termination { Finished, BudgetExhausted, BackendError };

const char* termination_name(Termination t);

struct Episode {
  std::string qid;
  std::string question;
  std::vector<TraceStep> steps;
  Termination termination = Termination::BackendError;
  std::string final_answer;
  std::int64_t tokens = 0;
  std::int64_t wall_ms = 0;
};

// Transcript block exactly as embedded in prompts: Thought/Action lines per
// step plus an Observation line for every non-Finish step.
std::string render_transcript(std::span<const TraceStep> trace);

// Deterministic prompt assembly: header, function definitions,
// demonstrations, graph definition, question, answer instruction, then the
// running transcript, ending with the "Thought {n+1}:" cue.  When the
// result would exceed parts.context_budget the oldest transcript steps are
// elided behind an "[earlier steps omitted]" marker; if even an empty
// transcript does not fit, PromptOverflow is thrown.  Demonstrations are
// required.
std::string build_prompt(const PromptParts& parts, const std::string& question,
                         std::span<const TraceStep> trace);

// Same prompt but ending with the forced-answer cue:
//   "Thought {n+1}: I have reached the step limit and must answer now."
//   "Action {n+1}: Finish["
std::string build_forced_prompt(const PromptParts& parts, const std::string& question,
                                std::span<const TraceStep> trace);

// Splits a sampled completion into thought text and its first action call.
// The sample arrives as the continuation of a "Thought {i}:" cue, so any
// leading label echo and the trailing "Action {i}:" label are stripped from
// the thought.  A sample with no parseable call comes back with an empty
// action (the voting layer discards it).
StepSample parse_step(const std::string& completion);

// Answer text recovered from a forced "Finish[" continuation: everything up
// to the first closing bracket, whole trimmed text when none.
std::string parse_forced_answer(const std::string& completion);

struct EpisodeInputs {
  std::string qid;
  std::string question;
  const KnowledgeGraph* graph = nullptr;
  const VectorIndex* index = nullptr;
  EmbeddingBackend* embedder = nullptr;
  LlmBackend* llm = nullptr;
  SamplingParams params;
  InferenceBudget budget;
  PromptParts prompt;
  std::size_t list_cap = 50;
};

// Runs one thought -> action -> observation episode.  Ends with Finished
// when the model calls Finish, with BudgetExhausted (after one forced
// Finish exchange) when max_steps runs out, and with BackendError when the
// gateway fails; the partial trace is preserved in every case.  Steps never
// exceed max_steps + 1, the +1 being the forced exchange.
Episode run_episode(const EpisodeInputs& in);

nlohmann::json episode_to_json(const Episode& episode);
Episode episode_from_json(const nlohmann::json& j);

// One compact JSON object per line.
void write_episodes_jsonl(const std::filesystem::path& path,
                          std::span<const Episode> episodes);
std::vector<Episode> read_episodes_jsonl(const std::filesystem::path& path);

}  // namespace graphwalk
