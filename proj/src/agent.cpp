#include "graphwalk/agent.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>

#include "graphwalk/errors.hpp"
#include "graphwalk/hash.hpp"

namespace graphwalk {
namespace {

constexpr std::string_view kElisionMarker = "[earlier steps omitted]\n";

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string render_transcript_from(std::span<const TraceStep> trace, std::size_t skip) {
  std::ostringstream out;
  if (skip > 0) out << kElisionMarker;
  for (std::size_t i = skip; i < trace.size(); ++i) {
    const TraceStep& s = trace[i];
    out << "Thought " << s.index << ": " << s.thought << "\n";
    out << "Action " << s.index << ": " << action_surface(s.action) << "\n";
    if (s.observation) {
      out << "Observation " << s.index << ": " << s.observation_text << "\n";
    }
  }
  return out.str();
}

std::string assemble(const PromptParts& parts, const std::string& question,
                     std::span<const TraceStep> trace, const std::string& cue) {
  if (parts.demonstrations.empty()) {
    throw ConfigError("prompt assembly requires demonstrations");
  }
  auto body = [&](std::size_t skip) {
    std::string p;
    p += prompt_header();
    p += "\n";
    p += parts.function_definitions;
    p += "\nHere are some examples. You should follow the structure of the examples in "
         "your output.\n\n";
    p += parts.demonstrations;
    p += "\nGraph Definition: " + parts.schema_text + "\n";
    p += "Question: " + question + "\n\n";
    p += answer_instruction();
    p += "\n\n";
    p += render_transcript_from(trace, skip);
    p += cue;
    return p;
  };

  // Elide oldest steps until the prompt fits the budget.
  for (std::size_t skip = 0; skip <= trace.size(); ++skip) {
    std::string p = body(skip);
    if (p.size() <= parts.context_budget) return p;
  }
  throw PromptOverflow("prompt exceeds the context budget of " +
                       std::to_string(parts.context_budget) +
                       " characters even with the transcript elided");
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Finished: return "Finished";
    case Termination::BudgetExhausted: return "BudgetExhausted";
    case Termination::BackendError: return "BackendError";
  }
  return "Unknown";
}

std::string render_transcript(std::span<const TraceStep> trace) {
  return render_transcript_from(trace, 0);
}

std::string build_prompt(const PromptParts& parts, const std::string& question,
                         std::span<const TraceStep> trace) {
  int next = trace.empty() ? 1 : trace.back().index + 1;
  return assemble(parts, question, trace, "Thought " + std::to_string(next) + ":");
}

std::string build_forced_prompt(const PromptParts& parts, const std::string& question,
                                std::span<const TraceStep> trace) {
  int next = trace.empty() ? 1 : trace.back().index + 1;
  std::string cue = "Thought " + std::to_string(next) +
                    ": I have reached the step limit and must answer now.\nAction " +
                    std::to_string(next) + ": Finish[";
  return assemble(parts, question, trace, cue);
}

StepSample parse_step(const std::string& completion) {
  StepSample sample;
  sample.raw = completion;

  Action action;
  try {
    action = parse_action(completion);
  } catch (const ActionParseError&) {
    // Thought-only sample; the voting layer discards it.
    sample.thought = trim(completion);
    return sample;
  }

  std::size_t call_pos = completion.find(action.raw);
  std::string thought =
      call_pos == std::string::npos ? "" : completion.substr(0, call_pos);
  // Strip the label of the action line and any echoed thought label.
  static const std::regex action_label(R"((?:^|\s)Action\s*\d*\s*:\s*$)");
  thought = std::regex_replace(thought, action_label, "");
  static const std::regex thought_label(R"(^\s*Thought\s*\d*\s*:\s*)");
  thought = std::regex_replace(thought, thought_label, "");
  sample.thought = trim(thought);
  sample.action = std::move(action);
  return sample;
}

std::string parse_forced_answer(const std::string& completion) {
  std::size_t close = completion.find(']');
  if (close == std::string::npos) return trim(completion);
  return trim(completion.substr(0, close));
}

Episode run_episode(const EpisodeInputs& in) {
  auto start = std::chrono::steady_clock::now();
  Episode episode;
  episode.qid = in.qid;
  episode.question = in.question;

  SamplingParams params = in.params;
  if (!params.seed) {
    params.seed = fnv1a64(in.qid);
  }

  bool finished = false;
  try {
    for (int i = 1; i <= in.budget.max_steps && !finished; ++i) {
      std::string prompt = build_prompt(in.prompt, in.question, episode.steps);
      VoteResult vote =
          step_with_votes(*in.llm, prompt, params, in.budget.votes, parse_step);
      episode.tokens += vote.tokens;

      TraceStep step;
      step.index = i;
      step.thought = vote.thought;
      step.action = vote.action;
      step.tally = std::move(vote.tally);
      step.samples_kept = vote.kept;
      step.samples_discarded = vote.discarded;

      if (vote.action.is_finish()) {
        episode.final_answer = vote.action.arg0;
        episode.termination = Termination::Finished;
        finished = true;
      } else {
        Observation obs = execute(vote.action, *in.graph, *in.index, *in.embedder);
        step.observation_text = render_observation(obs, in.list_cap);
        step.observation = std::move(obs);
      }
      episode.steps.push_back(std::move(step));
    }

    if (!finished) {
      // Budget forcing: one extra exchange that completes "Finish[".
      std::string prompt = build_forced_prompt(in.prompt, in.question, episode.steps);
      CompletionBatch batch = in.llm->sample(prompt, params, 1);
      const SampleResult& s = batch.samples.front();
      episode.tokens += s.tokens;

      int index = static_cast<int>(episode.steps.size()) + 1;
      TraceStep step;
      step.index = index;
      step.thought = "I have reached the step limit and must answer now.";
      step.action.kind = ActionKind::Finish;
      step.action.arg0 = parse_forced_answer(s.text);
      step.action.raw = "Finish[" + step.action.arg0 + "]";
      step.tally[canonicalize(step.action)] = 1;
      step.samples_kept = 1;
      episode.final_answer = step.action.arg0;
      episode.steps.push_back(std::move(step));
      episode.termination = Termination::BudgetExhausted;
    }
  } catch (const GatewayError&) {
    // Partial trace survives; the run records the failure and moves on.
    episode.termination = Termination::BackendError;
    episode.final_answer.clear();
  }

  if (in.llm->deterministic()) {
    episode.wall_ms = 0;  // keep replays byte-stable
  } else {
    episode.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  }
  return episode;
}

namespace {

nlohmann::json action_to_json(const Action& a) {
  nlohmann::json j = {{"fn", action_name(a.kind)}, {"arg0", a.arg0}};
  if (a.kind == ActionKind::NodeFeature || a.kind == ActionKind::NeighborCheck ||
      a.kind == ActionKind::NodeDegree) {
    j["arg1"] = a.arg1;
  }
  return j;
}

Action action_from_json(const nlohmann::json& j) {
  Action a;
  std::string fn = j.at("fn").get<std::string>();
  std::string lowered = fn;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "retrievenode") a.kind = ActionKind::RetrieveNode;
  else if (lowered == "nodefeature") a.kind = ActionKind::NodeFeature;
  else if (lowered == "neighborcheck") a.kind = ActionKind::NeighborCheck;
  else if (lowered == "nodedegree") a.kind = ActionKind::NodeDegree;
  else if (lowered == "finish") a.kind = ActionKind::Finish;
  else throw ParseError("episode file: unknown action fn \"" + fn + "\"");
  a.arg0 = j.value("arg0", "");
  a.arg1 = j.value("arg1", "");
  a.raw = action_surface(a);
  return a;
}

}  // namespace

nlohmann::json episode_to_json(const Episode& episode) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& s : episode.steps) {
    nlohmann::json sj = {
        {"i", s.index},
        {"thought", s.thought},
        {"action_raw", s.action.raw},
        {"action", action_to_json(s.action)},
        {"tally", s.tally},
        {"kept", s.samples_kept},
        {"discarded", s.samples_discarded},
    };
    if (s.observation) {
      sj["observation"] = {{"kind", observation_kind_name(*s.observation)},
                           {"rendered", s.observation_text}};
    }
    steps.push_back(std::move(sj));
  }
  return {{"qid", episode.qid},
          {"question", episode.question},
          {"steps", std::move(steps)},
          {"termination", termination_name(episode.termination)},
          {"answer", episode.final_answer},
          {"tokens", episode.tokens},
          {"wall_ms", episode.wall_ms}};
}

Episode episode_from_json(const nlohmann::json& j) {
  Episode e;
  e.qid = j.at("qid").get<std::string>();
  e.question = j.at("question").get<std::string>();
  std::string term = j.at("termination").get<std::string>();
  if (term == "Finished") e.termination = Termination::Finished;
  else if (term == "BudgetExhausted") e.termination = Termination::BudgetExhausted;
  else if (term == "BackendError") e.termination = Termination::BackendError;
  else throw ParseError("episode file: unknown termination \"" + term + "\"");
  e.final_answer = j.at("answer").get<std::string>();
  e.tokens = j.value("tokens", std::int64_t{0});
  e.wall_ms = j.value("wall_ms", std::int64_t{0});
  for (const auto& sj : j.at("steps")) {
    TraceStep s;
    s.index = sj.at("i").get<int>();
    s.thought = sj.value("thought", "");
    s.action = action_from_json(sj.at("action"));
    if (sj.contains("action_raw")) s.action.raw = sj["action_raw"].get<std::string>();
    if (sj.contains("tally")) {
      s.tally = sj["tally"].get<std::map<CanonicalKey, int>>();
    }
    s.samples_kept = sj.value("kept", 0);
    s.samples_discarded = sj.value("discarded", 0);
    if (sj.contains("observation")) {
      s.observation_text = sj["observation"].value("rendered", "");
      // Payload is not reconstructed; the rendered text is what scoring and
      // audit need.
      s.observation = FeatureValue{s.observation_text};
    }
    e.steps.push_back(std::move(s));
  }
  return e;
}

void write_episodes_jsonl(const std::filesystem::path& path,
                          std::span<const Episode> episodes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write episodes file: " + path.string());
  }
  for (const Episode& e : episodes) {
    out << episode_to_json(e).dump() << "\n";
  }
}

std::vector<Episode> read_episodes_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open episodes file: " + path.string());
  }
  std::vector<Episode> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(episode_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("episodes file " + path.string() + " line " +
                       std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace graphwalk
