#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "graphwalk/agent.hpp"
#include "graphwalk/runner.hpp"

namespace {

using namespace graphwalk;
namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(GRAPHWALK_DATA_DIR); }

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("graphwalk_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_results(const fs::path& out_dir) {
  return nlohmann::json::parse(slurp(out_dir / "results.json"));
}

RunConfig synth_config(const fs::path& out_dir) {
  RunConfig cfg;
  cfg.mode = "synth";
  cfg.out_dir = out_dir;
  cfg.depth = 2;
  cfg.episodes = 3;
  cfg.branching = 2;
  cfg.policy = "oracle";
  cfg.seed = 5;
  cfg.max_steps = 5;  // threshold for depth 2 is 4; one more to Finish
  cfg.votes = 1;
  return cfg;
}

void write_script(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  for (const std::string& line : lines) out << line << "\n";
}

}  // namespace

TEST_CASE("cmd_synth writes a world that loads back") {
  fs::path dir = fresh_dir("synth_out");
  ChainWorldConfig config;
  config.depth = 3;
  config.chains = 2;
  config.branching = 2;
  config.seed = 21;
  CHECK(cmd_synth(config, dir) == 0);

  KnowledgeGraph graph = KnowledgeGraph::load(dir / "graph.json");
  CHECK(graph.node_count() == 12);  // 2 x (3 spine + 2 decoys + 1 pad)
  std::vector<QAItem> questions = read_qa_jsonl(dir / "questions.jsonl");
  CHECK(questions.size() == 2);
  CHECK(questions[0].meta.at("threshold") == 6);
  fs::remove_all(dir);
}

TEST_CASE("a synthetic oracle run scores perfectly and lays out one row") {
  fs::path dir = fresh_dir("oracle_run");
  RunConfig cfg = synth_config(dir);
  CHECK(cmd_run(cfg) == 0);

  CHECK(fs::exists(dir / "episodes.jsonl"));
  CHECK_FALSE(fs::exists(dir / "sweep"));

  nlohmann::json results = read_results(dir);
  REQUIRE(results.contains("run_config"));
  REQUIRE(results.contains("rows"));
  REQUIRE(results.contains("per_question"));
  CHECK(results["run_config"]["mode"] == "synth");
  CHECK_FALSE(results["run_config"].contains("out_dir"));

  REQUIRE(results["rows"].size() == 1);
  const auto& row = results["rows"][0];
  CHECK(row["max_steps"] == 5);
  CHECK(row["votes"] == 1);
  CHECK(row["episodes"] == 3);
  CHECK(row["backend_errors"] == 0);
  CHECK(row["rouge_l"]["Avg"].get<double>() == doctest::Approx(1.0));
  CHECK(row["embedding_f1"]["Avg"].get<double>() == doctest::Approx(1.0));

  REQUIRE(results["per_question"].size() == 3);
  for (const auto& q : results["per_question"]) {
    CHECK(q["termination"] == "Finished");
    CHECK(q["wall_ms"] == 0);
  }

  std::vector<Episode> episodes = read_episodes_jsonl(dir / "episodes.jsonl");
  REQUIRE(episodes.size() == 3);
  for (const Episode& e : episodes) {
    CHECK(e.termination == Termination::Finished);
    CHECK(e.steps.size() == 5);  // 4 walk steps + the Finish step
  }
  fs::remove_all(dir);
}

TEST_CASE("reruns of one configuration are byte-identical across directories") {
  fs::path a = fresh_dir("det_a");
  fs::path b = fresh_dir("det_b");
  RunConfig cfg = synth_config(a);
  cfg.policy = "noisy";
  cfg.noise_p = 0.7;
  cfg.episodes = 4;
  cfg.votes = 2;
  cfg.workers = 2;
  cfg.seed = 77;
  CHECK(cmd_run(cfg) == 0);
  cfg.out_dir = b;
  CHECK(cmd_run(cfg) == 0);

  CHECK(slurp(a / "episodes.jsonl") == slurp(b / "episodes.jsonl"));
  CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
  CHECK(slurp(a / "results.txt") == slurp(b / "results.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("rescoring an untouched run reproduces its results byte for byte") {
  fs::path run_dir = fresh_dir("score_run");
  RunConfig cfg = synth_config(run_dir);
  CHECK(cmd_run(cfg) == 0);
  std::string results_before = slurp(run_dir / "results.json");
  std::string table_before = slurp(run_dir / "results.txt");

  // The same world the run generated, written out for its questions file.
  fs::path world_dir = fresh_dir("score_world");
  ChainWorldConfig wc;
  wc.depth = cfg.depth;
  wc.chains = cfg.episodes;
  wc.branching = cfg.branching;
  wc.seed = cfg.seed;
  CHECK(cmd_synth(wc, world_dir) == 0);

  ScoreConfig sc;
  sc.run_dir = run_dir;
  sc.questions_path = world_dir / "questions.jsonl";
  CHECK(cmd_score(sc) == 0);
  CHECK(slurp(run_dir / "results.json") == results_before);
  CHECK(slurp(run_dir / "results.txt") == table_before);
  fs::remove_all(run_dir);
  fs::remove_all(world_dir);
}

TEST_CASE("rescoring rejects an episode whose qid is not in the questions") {
  fs::path dir = fresh_dir("score_ghost");
  Episode ghost;
  ghost.qid = "ghost-1";
  ghost.question = "who?";
  write_episodes_jsonl(dir / "episodes.jsonl", std::vector<Episode>{ghost});

  ScoreConfig sc;
  sc.run_dir = dir;
  sc.questions_path = data_dir() / "questions" / "example1.jsonl";
  CHECK_THROWS_AS(cmd_score(sc), UnknownQid);

  sc.run_dir = fresh_dir("score_empty");
  CHECK_THROWS_AS(cmd_score(sc), ConfigError);
  fs::remove_all(dir);
  fs::remove_all(sc.run_dir);
}

TEST_CASE("replay mode walks a recorded transcript to the recorded answer") {
  fs::path dir = fresh_dir("replay");
  RunConfig cfg;
  cfg.mode = "replay";
  cfg.out_dir = dir;
  cfg.graph_path = data_dir() / "fixtures" / "academic_replay.json";
  cfg.questions_path = data_dir() / "questions" / "example1.jsonl";
  cfg.backend.kind = "scripted";
  cfg.backend.script_path = data_dir() / "scripts" / "example1.jsonl";
  cfg.max_steps = 10;
  CHECK(cmd_run(cfg) == 0);

  std::vector<Episode> episodes = read_episodes_jsonl(dir / "episodes.jsonl");
  REQUIRE(episodes.size() == 1);
  CHECK(episodes[0].qid == "example-1");
  CHECK(episodes[0].termination == Termination::Finished);
  CHECK(episodes[0].final_answer == "1993");
  CHECK(episodes[0].steps.size() == 3);
  CHECK(episodes[0].wall_ms == 0);

  nlohmann::json results = read_results(dir);
  CHECK(results["rows"][0]["rouge_l"]["Avg"].get<double>() == doctest::Approx(1.0));
  fs::remove_all(dir);
}

TEST_CASE("baseline mode answers in zero steps under the 0/1 row") {
  fs::path dir = fresh_dir("baseline");
  fs::path script = dir / "baseline_script.jsonl";
  write_script(script, {R"({"match": "sequence", "responses": [" 1993"]})"});

  RunConfig cfg;
  cfg.mode = "baseline";
  cfg.out_dir = dir;
  cfg.graph_path = data_dir() / "fixtures" / "academic_replay.json";
  cfg.questions_path = data_dir() / "questions" / "example1.jsonl";
  cfg.backend.kind = "scripted";
  cfg.backend.script_path = script;
  CHECK(cmd_run(cfg) == 0);

  nlohmann::json results = read_results(dir);
  REQUIRE(results["rows"].size() == 1);
  CHECK(results["rows"][0]["max_steps"] == 0);
  CHECK(results["rows"][0]["votes"] == 1);
  CHECK(results["per_question"][0]["steps"] == 0);
  CHECK(results["per_question"][0]["answer"] == "1993");
  CHECK(results["per_question"][0]["termination"] == "Finished");
  std::string table = slurp(dir / "results.txt");
  CHECK(table.find("1-hop baseline") != std::string::npos);
  CHECK(table.find("Embedding F1 (x100)") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("strict runs exit nonzero when the script runs dry") {
  fs::path dir = fresh_dir("strict");
  fs::path script = dir / "one_step.jsonl";
  write_script(script,
               {R"({"match": "sequence", "responses": [" Finding the paper first.\nAction 1: RetrieveNode[Strongly Interacting Higgs Sector in the Minimal Standard Model]"]})"});

  RunConfig cfg;
  cfg.mode = "agent";
  cfg.out_dir = dir;
  cfg.graph_path = data_dir() / "fixtures" / "academic_replay.json";
  cfg.questions_path = data_dir() / "questions" / "example1.jsonl";
  cfg.backend.kind = "scripted";
  cfg.backend.script_path = script;
  cfg.max_steps = 10;
  cfg.strict = true;
  CHECK(cmd_run(cfg) == 1);

  nlohmann::json results = read_results(dir);
  CHECK(results["rows"][0]["backend_errors"] == 1);
  CHECK(results["per_question"][0]["termination"] == "BackendError");

  cfg.strict = false;
  CHECK(cmd_run(cfg) == 0);
  fs::remove_all(dir);
}

TEST_CASE("sweeps lay rows out per configuration in ascending order") {
  fs::path dir = fresh_dir("sweep");
  RunConfig cfg = synth_config(dir);
  cfg.sweep = true;
  cfg.steps_grid = {5, 2};
  cfg.votes_grid = {2, 1};
  CHECK(cmd_run(cfg) == 0);

  CHECK_FALSE(fs::exists(dir / "episodes.jsonl"));
  for (const char* leaf : {"s2_v1", "s2_v2", "s5_v1", "s5_v2"}) {
    CHECK(fs::exists(dir / "sweep" / leaf / "episodes.jsonl"));
  }

  nlohmann::json results = read_results(dir);
  REQUIRE(results["rows"].size() == 4);
  std::vector<std::pair<int, int>> order;
  for (const auto& row : results["rows"]) {
    order.emplace_back(row["max_steps"].get<int>(), row["votes"].get<int>());
  }
  CHECK(order == std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {5, 1}, {5, 2}});

  // Below the walk threshold the forced answer is a miss; above it the
  // oracle is perfect.
  CHECK(results["rows"][0]["embedding_f1"]["Avg"].get<double>() < 0.5);
  CHECK(results["rows"][2]["embedding_f1"]["Avg"].get<double>() ==
        doctest::Approx(1.0));
  for (const auto& q : results["per_question"]) {
    if (q["max_steps"] == 2) {
      CHECK(q["termination"] == "BudgetExhausted");
      CHECK(q["answer"] == "unknown");
    } else {
      CHECK(q["termination"] == "Finished");
    }
  }
  std::string table = slurp(dir / "results.txt");
  CHECK(table.find("2 steps, votes=1") != std::string::npos);
  CHECK(table.find("5 steps, votes=2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run configuration mistakes are rejected up front") {
  fs::path dir = fresh_dir("badcfg");

  RunConfig cfg = synth_config(dir);
  cfg.mode = "poke";
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);

  cfg = synth_config(dir);
  cfg.mode = "agent";  // no graph/questions given
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);

  cfg = synth_config(dir);
  cfg.votes = 0;
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);
  cfg = synth_config(dir);
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);

  // Sweeps only make sense where questions can be replayed per row.
  cfg = synth_config(dir);
  cfg.mode = "replay";
  cfg.sweep = true;
  cfg.graph_path = data_dir() / "fixtures" / "academic_replay.json";
  cfg.questions_path = data_dir() / "questions" / "example1.jsonl";
  cfg.backend.kind = "scripted";
  cfg.backend.script_path = data_dir() / "scripts" / "example1.jsonl";
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);
  cfg.mode = "agent";
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);

  fs::remove_all(dir);
}
