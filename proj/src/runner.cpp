#include "graphwalk/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <thread>

#include "graphwalk/agent.hpp"
#include "graphwalk/errors.hpp"
#include "graphwalk/hash.hpp"
#include "graphwalk/prompts.hpp"

namespace graphwalk {
namespace {

std::unique_ptr<EmbeddingBackend> make_embedder(const std::string& kind,
                                                const RemoteEmbedderConfig& config) {
  if (kind == "hashed") return std::make_unique<HashedTrigramEmbedder>();
  if (kind == "endpoint") return std::make_unique<RemoteEmbedder>(config);
  throw ConfigError("unknown embedding backend \"" + kind +
                    "\"; expected hashed or endpoint");
}

struct RowKey {
  int max_steps;
  int votes;
  bool operator<(const RowKey& other) const {
    if (max_steps != other.max_steps) return max_steps < other.max_steps;
    return votes < other.votes;
  }
};

std::vector<RowKey> resolve_rows(const RunConfig& cfg) {
  if (cfg.mode == "baseline") return {{0, 1}};
  if (!cfg.sweep) {
    if (cfg.max_steps < 1) throw ConfigError("--steps must be at least 1");
    if (cfg.votes < 1) throw ConfigError("--votes must be at least 1");
    return {{cfg.max_steps, cfg.votes}};
  }
  if (cfg.mode != "agent" && cfg.mode != "synth") {
    throw ConfigError("--sweep applies to the agent and synth modes");
  }
  if (cfg.backend.kind == "scripted" && cfg.mode != "synth") {
    throw ConfigError("a sweep replays every question once per row; scripted "
                      "transcripts are single-pass, use a policy or endpoint backend");
  }
  std::set<RowKey> keys;
  for (int steps : cfg.steps_grid) {
    if (steps < 1) throw ConfigError("--steps-grid entries must be at least 1");
    for (int votes : cfg.votes_grid) {
      if (votes < 1) throw ConfigError("--votes-grid entries must be at least 1");
      keys.insert({steps, votes});
    }
  }
  if (keys.empty()) throw ConfigError("the sweep grid is empty");
  return {keys.begin(), keys.end()};
}

// Runs one configuration row over all questions with a fixed-slot worker
// pool: episode i always lands in slot i, so the output order never depends
// on scheduling.
std::vector<Episode> run_batch(const RunConfig& cfg, const RowKey& row,
                               const std::vector<QAItem>& questions,
                               const KnowledgeGraph& graph, const VectorIndex& index,
                               EmbeddingBackend& embedder, LlmBackend& llm,
                               const PromptParts& prompt, int workers) {
  std::vector<Episode> episodes(questions.size());
  std::vector<std::string> failures(questions.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < questions.size();
         i = next.fetch_add(1)) {
      const QAItem& item = questions[i];
      try {
        SamplingParams params = cfg.params;
        params.seed = derive_seed(cfg.seed, item.qid);
        if (cfg.mode == "baseline") {
          BaselineInputs in;
          in.qid = item.qid;
          in.question = item.question;
          in.graph = &graph;
          in.index = &index;
          in.embedder = &embedder;
          in.llm = &llm;
          in.params = params;
          in.retrieve_k = cfg.baseline_k;
          in.char_budget = cfg.baseline_budget;
          episodes[i] = run_graphrag_baseline(in);
        } else {
          EpisodeInputs in;
          in.qid = item.qid;
          in.question = item.question;
          in.graph = &graph;
          in.index = &index;
          in.embedder = &embedder;
          in.llm = &llm;
          in.params = params;
          in.budget = {row.max_steps, row.votes};
          in.prompt = prompt;
          in.list_cap = cfg.list_cap;
          episodes[i] = run_episode(in);
        }
      } catch (const std::exception& e) {
        episodes[i] = Episode{};
        episodes[i].qid = item.qid;
        episodes[i].question = item.question;
        episodes[i].termination = Termination::BackendError;
        failures[i] = e.what();
      }
    }
  };

  int n = std::max(1, std::min<int>(workers, static_cast<int>(questions.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      std::cerr << "[" << questions[i].qid << "] episode failed: " << failures[i]
                << "\n";
    }
  }
  return episodes;
}

std::filesystem::path row_dir(const std::filesystem::path& out, const RowKey& row,
                              bool sweep) {
  if (!sweep) return out;
  return out / "sweep" /
         ("s" + std::to_string(row.max_steps) + "_v" + std::to_string(row.votes));
}

nlohmann::json sampling_json(const SamplingParams& params) {
  return {{"temperature", params.temperature},
          {"top_p", params.top_p},
          {"max_new_tokens", params.max_new_tokens},
          {"stop", params.stop}};
}

}  // namespace

nlohmann::json run_config_json(const RunConfig& cfg) {
  nlohmann::json j = {{"mode", cfg.mode},
                      {"seed", cfg.seed},
                      {"workers", cfg.workers},
                      {"strict", cfg.strict},
                      {"list_cap", cfg.list_cap},
                      {"context_budget", cfg.context_budget},
                      {"sampling", sampling_json(cfg.params)},
                      {"embedding", {{"backend", cfg.embed_backend}}}};
  if (cfg.embed_backend == "endpoint") {
    j["embedding"]["model"] = cfg.embed.model;
    j["embedding"]["base_url"] = cfg.embed.base_url;
  }
  if (cfg.mode == "synth") {
    j["world"] = {{"depth", cfg.depth},
                  {"episodes", cfg.episodes},
                  {"branching", cfg.branching}};
    j["policy"] = {{"name", cfg.policy},
                   {"p", cfg.noise_p},
                   {"alternatives", cfg.alternatives}};
  } else {
    j["graph"] = cfg.graph_path.string();
    j["questions"] = cfg.questions_path.string();
    j["backend"] = {{"kind", cfg.backend.kind}};
    if (cfg.backend.kind == "endpoint") {
      j["backend"]["model"] = cfg.backend.endpoint.model;
      j["backend"]["base_url"] = cfg.backend.endpoint.base_url;
      j["backend"]["timeout_ms"] = cfg.backend.endpoint.timeout_ms;
      j["backend"]["retries"] = cfg.backend.endpoint.retries;
    } else if (cfg.backend.kind == "scripted") {
      j["backend"]["script"] = cfg.backend.script_path.string();
    }
  }
  if (cfg.mode == "baseline") {
    j["baseline"] = {{"retrieve_k", cfg.baseline_k},
                     {"char_budget", cfg.baseline_budget}};
  } else if (cfg.sweep) {
    j["steps_grid"] = cfg.steps_grid;
    j["votes_grid"] = cfg.votes_grid;
  } else {
    j["max_steps"] = cfg.max_steps;
    j["votes"] = cfg.votes;
  }
  return j;
}

int cmd_run(const RunConfig& cfg) {
  // Resolve the world, graph, and questions.
  std::optional<ChainWorld> world;
  KnowledgeGraph loaded_graph;
  std::vector<QAItem> questions;
  if (cfg.mode == "synth") {
    ChainWorldConfig wc;
    wc.depth = cfg.depth;
    wc.chains = cfg.episodes;
    wc.branching = cfg.branching;
    wc.seed = cfg.seed;
    world = make_chain_world(wc);
    questions = world->questions;
  } else if (cfg.mode == "agent" || cfg.mode == "baseline" || cfg.mode == "replay") {
    if (cfg.graph_path.empty()) throw ConfigError("--graph is required");
    if (cfg.questions_path.empty()) throw ConfigError("--questions is required");
    loaded_graph = KnowledgeGraph::load(cfg.graph_path);
    questions = read_qa_jsonl(cfg.questions_path);
  } else {
    throw ConfigError("unknown mode \"" + cfg.mode +
                      "\"; expected agent, baseline, replay, or synth");
  }
  const KnowledgeGraph& graph = world ? world->graph : loaded_graph;
  if (questions.empty()) throw ConfigError("no questions to run");
  std::sort(questions.begin(), questions.end(),
            [](const QAItem& a, const QAItem& b) { return a.qid < b.qid; });

  // Backends.
  std::unique_ptr<EmbeddingBackend> embedder =
      make_embedder(cfg.embed_backend, cfg.embed);
  std::unique_ptr<LlmBackend> llm;
  if (cfg.mode == "synth") {
    llm = std::make_unique<PolicyBackend>(
        &*world, make_policy(cfg.policy, cfg.noise_p, cfg.alternatives));
  } else {
    BackendConfig bc = cfg.backend;
    if (cfg.mode == "replay") bc.kind = "scripted";
    llm = make_backend(bc);
  }
  int workers = cfg.workers;
  if (cfg.backend.kind == "scripted" || cfg.mode == "replay") {
    workers = 1;  // canned transcripts are consumed in request order
  }

  VectorIndex index = VectorIndex::build(graph, *embedder);

  PromptParts prompt;
  prompt.schema_text = graph.render_schema();
  prompt.context_budget = cfg.context_budget;

  std::vector<RowKey> rows = resolve_rows(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<RunRow> run_rows;
  std::vector<ScoreRow> per_question;
  int backend_errors = 0;
  for (const RowKey& row : rows) {
    std::vector<Episode> episodes =
        run_batch(cfg, row, questions, graph, index, *embedder, *llm, prompt, workers);

    std::filesystem::path dir = row_dir(cfg.out_dir, row, cfg.sweep);
    std::filesystem::create_directories(dir);
    write_episodes_jsonl(dir / "episodes.jsonl", episodes);

    std::vector<ScoreRow> scores;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      ScoreRow s = score_episode(episodes[i], questions[i], *embedder);
      s.max_steps = row.max_steps;
      s.votes = row.votes;
      scores.push_back(std::move(s));
    }
    RunRow aggregated = aggregate_rows(scores, row.max_steps, row.votes);
    backend_errors += aggregated.backend_errors;

    std::cout << (row.max_steps == 0
                      ? std::string("[1-hop baseline]")
                      : "[" + std::to_string(row.max_steps) + " steps, votes=" +
                            std::to_string(row.votes) + "]")
              << " episodes=" << aggregated.episodes << std::fixed
              << std::setprecision(2) << " EmbF1=" << aggregated.embed_avg * 100.0
              << " RougeL=" << aggregated.rouge_avg * 100.0
              << " errors=" << aggregated.backend_errors << "\n"
              << std::defaultfloat;

    run_rows.push_back(std::move(aggregated));
    per_question.insert(per_question.end(), scores.begin(), scores.end());
  }

  nlohmann::json results = results_to_json(run_config_json(cfg), run_rows, per_question);
  write_results_json(cfg.out_dir / "results.json", results);
  write_results_txt(cfg.out_dir / "results.txt", run_rows);
  std::cout << "wrote " << (cfg.out_dir / "results.json").string() << "\n";

  return cfg.strict && backend_errors > 0 ? 1 : 0;
}

namespace {

bool parse_row_dir(const std::string& name, RowKey& key) {
  if (name.size() < 4 || name[0] != 's') return false;
  std::size_t v = name.find("_v");
  if (v == std::string::npos) return false;
  try {
    key.max_steps = std::stoi(name.substr(1, v - 1));
    key.votes = std::stoi(name.substr(v + 2));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

int cmd_score(const ScoreConfig& cfg) {
  std::vector<QAItem> questions = read_qa_jsonl(cfg.questions_path);
  std::map<std::string, const QAItem*> by_qid;
  for (const QAItem& item : questions) by_qid[item.qid] = &item;

  // Keep the recorded configuration so a rescore of an untouched run
  // reproduces results.json byte for byte.
  nlohmann::json run_config;
  RowKey recorded{0, 1};
  std::filesystem::path results_path = cfg.run_dir / "results.json";
  if (std::filesystem::exists(results_path)) {
    std::ifstream in(results_path, std::ios::binary);
    try {
      nlohmann::json old = nlohmann::json::parse(in);
      if (old.contains("run_config")) {
        run_config = old["run_config"];
        recorded.max_steps = run_config.value("max_steps", 0);
        recorded.votes = run_config.value("votes", 1);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("existing results.json is unreadable: " + std::string(e.what()));
    }
  }
  if (run_config.is_null()) {
    run_config = {{"mode", "score"}, {"questions", cfg.questions_path.string()}};
  }

  std::vector<std::pair<RowKey, std::filesystem::path>> row_files;
  std::filesystem::path sweep_dir = cfg.run_dir / "sweep";
  if (std::filesystem::is_directory(sweep_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(sweep_dir)) {
      RowKey key{};
      if (entry.is_directory() && parse_row_dir(entry.path().filename().string(), key)) {
        row_files.emplace_back(key, entry.path() / "episodes.jsonl");
      }
    }
    std::sort(row_files.begin(), row_files.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  } else {
    row_files.emplace_back(recorded, cfg.run_dir / "episodes.jsonl");
  }
  if (row_files.empty()) {
    throw ConfigError("no episodes found under " + cfg.run_dir.string());
  }

  std::unique_ptr<EmbeddingBackend> embedder =
      make_embedder(cfg.embed_backend, cfg.embed);

  std::vector<RunRow> run_rows;
  std::vector<ScoreRow> per_question;
  for (const auto& [key, path] : row_files) {
    std::vector<Episode> episodes = read_episodes_jsonl(path);
    std::vector<ScoreRow> scores;
    for (const Episode& episode : episodes) {
      auto it = by_qid.find(episode.qid);
      if (it == by_qid.end()) {
        throw UnknownQid("episode qid \"" + episode.qid +
                         "\" is not in the questions file");
      }
      ScoreRow s = score_episode(episode, *it->second, *embedder);
      s.max_steps = key.max_steps;
      s.votes = key.votes;
      scores.push_back(std::move(s));
    }
    run_rows.push_back(aggregate_rows(scores, key.max_steps, key.votes));
    per_question.insert(per_question.end(), scores.begin(), scores.end());
  }

  nlohmann::json results = results_to_json(run_config, run_rows, per_question);
  write_results_json(cfg.run_dir / "results.json", results);
  write_results_txt(cfg.run_dir / "results.txt", run_rows);
  std::cout << "wrote " << (cfg.run_dir / "results.json").string() << "\n";
  return 0;
}

int cmd_synth(const ChainWorldConfig& config, const std::filesystem::path& out_dir) {
  ChainWorld world = make_chain_world(config);
  write_chain_world(world, out_dir);
  std::cout << "wrote " << (out_dir / "graph.json").string() << " ("
            << world.graph.node_count() << " nodes, " << world.graph.edge_count()
            << " edges) and " << (out_dir / "questions.jsonl").string() << " ("
            << world.questions.size() << " questions)\n";
  return 0;
}

}  // namespace graphwalk
