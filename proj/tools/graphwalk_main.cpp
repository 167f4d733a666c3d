#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "graphwalk/errors.hpp"
#include "graphwalk/runner.hpp"
#include "graphwalk/synthetic.hpp"

namespace {

void add_embed_flags(CLI::App* cmd, std::string* backend,
                     graphwalk::RemoteEmbedderConfig* embed) {
  cmd->add_option("--embed-backend", *backend,
                  "Embedding backend: hashed (offline, default) or endpoint")
      ->check(CLI::IsMember({"hashed", "endpoint"}));
  cmd->add_option("--embed-url", embed->base_url,
                  "Base URL of the embeddings endpoint, e.g. http://host:8000/v1");
  cmd->add_option("--embed-model", embed->model, "Model name sent to /embeddings");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "graphwalk: an agent that answers questions by walking typed knowledge "
      "graphs step by step, with inference-time scaling through step budgets "
      "and per-step majority voting"};
  app.require_subcommand(1);

  graphwalk::RunConfig run_cfg;
  CLI::App* run = app.add_subcommand(
      "run", "Run episodes over a question set and score them");
  run->set_config("--config", "", "Read defaults from an INI/TOML file");
  run->add_option("--mode", run_cfg.mode,
                  "agent (default), baseline, replay, or synth")
      ->check(CLI::IsMember({"agent", "baseline", "replay", "synth"}));
  run->add_option("--graph", run_cfg.graph_path, "Graph JSON file");
  run->add_option("--questions", run_cfg.questions_path, "Questions JSONL file");
  run->add_option("--out", run_cfg.out_dir, "Output directory (default runs/out)");
  run->add_option("--steps", run_cfg.max_steps,
                  "Max thought-action exchanges before the forced answer");
  run->add_option("--votes", run_cfg.votes, "Samples per step for majority voting");
  run->add_flag("--sweep", run_cfg.sweep,
                "Run the full steps-grid x votes-grid instead of one row");
  run->add_option("--steps-grid", run_cfg.steps_grid, "Sweep steps grid")
      ->delimiter(',');
  run->add_option("--votes-grid", run_cfg.votes_grid, "Sweep votes grid")
      ->delimiter(',');
  run->add_option("--seed", run_cfg.seed, "Run seed; episodes derive theirs from it");
  run->add_option("--workers", run_cfg.workers,
                  "Concurrent episodes (scripted replays always use 1)")
      ->check(CLI::Range(1, 64));
  run->add_flag("--strict", run_cfg.strict,
                "Exit nonzero if any episode ends in a backend error");
  run->add_option("--list-cap", run_cfg.list_cap,
                  "Max neighbor ids shown per observation");
  run->add_option("--context-budget", run_cfg.context_budget,
                  "Prompt budget in characters; older steps are elided beyond it");
  run->add_option("--backend", run_cfg.backend.kind,
                  "LLM backend: endpoint (default) or scripted")
      ->check(CLI::IsMember({"endpoint", "scripted"}));
  run->add_option("--script", run_cfg.backend.script_path,
                  "Canned-response JSONL for the scripted backend");
  run->add_option("--base-url", run_cfg.backend.endpoint.base_url,
                  "Chat endpoint base URL (or env GATEWAY_BASE_URL)");
  run->add_option("--model", run_cfg.backend.endpoint.model,
                  "Model name sent to /chat/completions");
  run->add_option("--timeout-ms", run_cfg.backend.endpoint.timeout_ms,
                  "Per-request timeout");
  run->add_option("--retries", run_cfg.backend.endpoint.retries,
                  "Extra attempts after a failed request");
  run->add_option("--temperature", run_cfg.params.temperature, "Sampling temperature");
  run->add_option("--top-p", run_cfg.params.top_p, "Nucleus sampling cutoff");
  run->add_option("--max-tokens", run_cfg.params.max_new_tokens,
                  "Completion token cap per request");
  add_embed_flags(run, &run_cfg.embed_backend, &run_cfg.embed);
  run->add_option("--baseline-k", run_cfg.baseline_k,
                  "Baseline mode: nodes retrieved before the single call");
  run->add_option("--baseline-budget", run_cfg.baseline_budget,
                  "Baseline mode: context budget in characters");
  run->add_option("--depth", run_cfg.depth, "Synth mode: hops per chain");
  run->add_option("--episodes", run_cfg.episodes, "Synth mode: number of chains");
  run->add_option("--branching", run_cfg.branching,
                  "Synth mode: relations leaving each spine waypoint");
  run->add_option("--policy", run_cfg.policy,
                  "Synth mode: oracle, noisy, or never-finish")
      ->check(CLI::IsMember({"oracle", "noisy", "never-finish", "never_finish"}));
  run->add_option("--noise-p", run_cfg.noise_p,
                  "Synth mode: per-sample chance of the on-track call");
  run->add_option("--alternatives", run_cfg.alternatives,
                  "Synth mode: distinct wrong calls a noisy sample spreads over");

  // replay = run with a scripted backend, spelled out.
  graphwalk::RunConfig replay_cfg;
  replay_cfg.mode = "replay";
  CLI::App* replay = app.add_subcommand(
      "replay", "Re-run recorded transcripts against a graph (scripted backend)");
  replay->add_option("--graph", replay_cfg.graph_path, "Graph JSON file")->required();
  replay->add_option("--questions", replay_cfg.questions_path, "Questions JSONL file")
      ->required();
  replay->add_option("--script", replay_cfg.backend.script_path,
                     "Canned-response JSONL")
      ->required();
  replay->add_option("--out", replay_cfg.out_dir, "Output directory");
  replay->add_option("--steps", replay_cfg.max_steps, "Max exchanges per episode");
  replay->add_option("--votes", replay_cfg.votes, "Samples per step");
  replay->add_option("--seed", replay_cfg.seed, "Run seed");
  replay->add_flag("--strict", replay_cfg.strict,
                   "Exit nonzero if any episode ends in a backend error");

  graphwalk::ScoreConfig score_cfg;
  CLI::App* score = app.add_subcommand(
      "score", "Rescore a run directory's episodes and rewrite its results");
  score->add_option("--run-dir", score_cfg.run_dir,
                    "Directory holding episodes.jsonl or sweep/")
      ->required();
  score->add_option("--questions", score_cfg.questions_path, "Questions JSONL file")
      ->required();
  add_embed_flags(score, &score_cfg.embed_backend, &score_cfg.embed);

  graphwalk::ChainWorldConfig synth_cfg;
  std::filesystem::path synth_out = "runs/world";
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a cue-walk benchmark world (graph + questions)");
  synth->add_option("--depth", synth_cfg.depth, "Hops per chain");
  synth->add_option("--chains", synth_cfg.chains, "Number of chains / questions");
  synth->add_option("--branching", synth_cfg.branching,
                    "Relations leaving each spine waypoint");
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--domain", synth_cfg.domain, "Domain label for the questions");
  synth->add_option("--out", synth_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_cfg.backend.kind.empty()) {
        run_cfg.backend.kind =
            run_cfg.backend.script_path.empty() ? "endpoint" : "scripted";
      }
      return graphwalk::cmd_run(run_cfg);
    }
    if (*replay) {
      replay_cfg.backend.kind = "scripted";
      return graphwalk::cmd_run(replay_cfg);
    }
    if (*score) {
      return graphwalk::cmd_score(score_cfg);
    }
    if (*synth) {
      return graphwalk::cmd_synth(synth_cfg, synth_out);
    }
  } catch (const graphwalk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
