#include "graphwalk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "graphwalk/errors.hpp"
#include "graphwalk/hash.hpp"

namespace graphwalk {
namespace {

const std::vector<std::string>& relation_pool() {
  static const std::vector<std::string> pool = {"alpha", "beta",    "gamma",
                                                "delta", "epsilon", "zeta"};
  return pool;
}

std::string pad3(int n) {
  std::string s = std::to_string(n);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

std::string digits8(std::mt19937_64& rng) {
  return std::to_string(10000000 + rng() % 90000000);
}

std::string difficulty_for(int hops) {
  if (hops <= 2) return "easy";
  if (hops <= 4) return "medium";
  return "hard";
}

ojson chain_schema_json() {
  ojson neighbors = ojson::array();
  auto add = [&](const std::string& name, const std::string& inverse) {
    neighbors.push_back(
        {{"relation", name}, {"target", "waypoint"}, {"inverse", inverse}});
  };
  for (const std::string& r : relation_pool()) {
    add(r, r + "_of");
    add(r + "_of", r);
  }
  add("next", "next_of");
  add("next_of", "next");

  return {{"node_types",
           ojson::array({{{"name", "waypoint"},
                          {"features", ojson::array({"name", "cue", "value"})},
                          {"searchable", "name"},
                          {"neighbors", std::move(neighbors)}}})},
          {"definition",
           "There is one type of node in the graph: waypoint.\n"
           "Waypoint nodes have features: name, cue and value. The cue feature of a "
           "waypoint names the relation that leads onward to the next waypoint on a "
           "route; a waypoint without a cue is the end of its route and stores the "
           "route's value. Waypoint nodes are linked to other waypoint nodes through "
           "the relations alpha, beta, gamma, delta, epsilon, zeta and next, each "
           "with a reverse direction named by appending _of."}};
}

}  // namespace

ChainWorld make_chain_world(const ChainWorldConfig& config) {
  if (config.depth < 1) throw ConfigError("chain world depth must be at least 1");
  if (config.chains < 1) throw ConfigError("chain world needs at least one chain");
  if (config.branching < 1 ||
      config.branching > static_cast<int>(relation_pool().size())) {
    throw ConfigError("chain world branching must be between 1 and " +
                      std::to_string(relation_pool().size()));
  }

  std::mt19937_64 rng(derive_seed(config.seed, "chain-world"));
  const int h = config.depth;

  ojson nodes = ojson::array();
  ojson edges = ojson::array();
  ChainWorld world;
  world.config = config;

  for (int i = 0; i < config.chains; ++i) {
    ChainSpec chain;
    chain.hops = h;
    chain.qid = "chain-h" + std::to_string(h) + "-" + pad3(i);
    chain.answer = "relic-" + pad3(i) + "-" + digits8(rng);

    // Relation labels for each hop, drawn from the pool.
    for (int j = 0; j + 1 < h; ++j) {
      chain.relations.push_back(relation_pool()[rng() % relation_pool().size()]);
    }

    // Spine waypoints.  Non-terminal ones carry the cue naming the next
    // relation; the terminal one carries the answer.
    for (int j = 0; j < h; ++j) {
      std::string id = "c" + pad3(i) + "_" + std::to_string(j);
      std::string name = "wp-" + pad3(i) + "-" + std::to_string(j) + "-" + digits8(rng);
      if (j == 0) chain.anchor = name;
      chain.node_ids.push_back(id);
      ojson features = {{"name", name}};
      if (j + 1 < h) {
        features["cue"] = chain.relations[static_cast<std::size_t>(j)];
      } else {
        features["value"] = chain.answer;
      }
      nodes.push_back({{"id", id}, {"type", "waypoint"}, {"features", std::move(features)}});
    }
    for (int j = 0; j + 1 < h; ++j) {
      edges.push_back({{"src", chain.node_ids[static_cast<std::size_t>(j)]},
                       {"dst", chain.node_ids[static_cast<std::size_t>(j) + 1]},
                       {"relation", chain.relations[static_cast<std::size_t>(j)]}});
    }

    // Decoy branches: every non-terminal spine waypoint also leaves through
    // branching-1 other relations, each to its own dead-end waypoint.
    for (int j = 0; j + 1 < h; ++j) {
      std::vector<std::string> others;
      for (const std::string& r : relation_pool()) {
        if (r != chain.relations[static_cast<std::size_t>(j)]) others.push_back(r);
      }
      for (int k = 0; k + 1 < config.branching; ++k) {
        std::size_t pick = rng() % others.size();
        std::string relation = others[pick];
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
        std::string id =
            "d" + pad3(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
        nodes.push_back(
            {{"id", id},
             {"type", "waypoint"},
             {"features",
              {{"name", "dk-" + pad3(i) + "-" + std::to_string(j) + "-" +
                            std::to_string(k) + "-" + digits8(rng)},
               {"value", "dk-val-" + digits8(rng)}}}});
        edges.push_back({{"src", chain.node_ids[static_cast<std::size_t>(j)]},
                         {"dst", id},
                         {"relation", relation}});
      }
    }

    // Trailing padding waypoint so even a one-hop chain has an edge to walk
    // past the terminal.
    std::string pad_id = "p" + pad3(i);
    nodes.push_back({{"id", pad_id},
                     {"type", "waypoint"},
                     {"features", {{"name", "dk-pad-" + pad3(i) + "-" + digits8(rng)}}}});
    edges.push_back({{"src", chain.node_ids.back()}, {"dst", pad_id}, {"relation", "next"}});

    QAItem item;
    item.qid = chain.qid;
    item.question =
        "Find the waypoint named " + chain.anchor +
        ". Each waypoint's cue feature names the relation to follow to the next "
        "waypoint; walk the cues until you reach a waypoint with no cue, and report "
        "that waypoint's value feature.";
    item.answers = {chain.answer};
    item.difficulty = difficulty_for(h);
    item.domain = config.domain;
    item.meta = {{"hops", h},
                 {"anchor", chain.anchor},
                 {"spine", chain.node_ids},
                 {"relations", chain.relations},
                 {"threshold", 2 * h}};
    world.questions.push_back(std::move(item));
    world.chains.push_back(std::move(chain));
  }

  ojson doc = {{"schema", chain_schema_json()},
               {"graph", {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}}};
  world.graph = KnowledgeGraph::from_json(doc);
  return world;
}

void write_chain_world(const ChainWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "graph.json", std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write graph file: " + (dir / "graph.json").string());
  }
  out << world.graph.to_json().dump(2) << "\n";
  write_qa_jsonl(dir / "questions.jsonl", world.questions);
}

Action oracle_action(const ChainSpec& chain, int position) {
  const int h = chain.hops;
  Action a;
  if (position <= 0) {
    a.kind = ActionKind::RetrieveNode;
    a.arg0 = chain.anchor;
  } else if (position <= 2 * h - 2) {
    int j = (position + 1) / 2;  // hop number, 1-based
    const std::string& node = chain.node_ids[static_cast<std::size_t>(j) - 1];
    if (position % 2 == 1) {
      a.kind = ActionKind::NodeFeature;
      a.arg0 = node;
      a.arg1 = "cue";
    } else {
      a.kind = ActionKind::NeighborCheck;
      a.arg0 = node;
      a.arg1 = chain.relations[static_cast<std::size_t>(j) - 1];
    }
  } else if (position == 2 * h - 1) {
    a.kind = ActionKind::NodeFeature;
    a.arg0 = chain.node_ids.back();
    a.arg1 = "value";
  } else {
    a.kind = ActionKind::Finish;
    a.arg0 = chain.answer;
  }
  a.raw = action_surface(a);
  return a;
}

int oracle_threshold(const ChainSpec& chain) { return 2 * chain.hops; }

PolicySpec make_policy(const std::string& name, double p, int alternatives) {
  PolicySpec spec;
  if (name == "oracle") {
    spec.kind = PolicySpec::Kind::Oracle;
    spec.p = 1.0;
  } else if (name == "noisy") {
    spec.kind = PolicySpec::Kind::Noisy;
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("noisy policy needs p in [0, 1]");
    }
    spec.p = p;
  } else if (name == "never-finish" || name == "never_finish") {
    spec.kind = PolicySpec::Kind::NeverFinish;
    spec.p = 1.0;
  } else {
    throw ConfigError("unknown policy \"" + name +
                      "\"; expected oracle, noisy, or never-finish");
  }
  if (alternatives < 1) {
    throw ConfigError("policy needs at least one wrong alternative");
  }
  spec.alternatives = alternatives;
  return spec;
}

namespace {

// The committed calls, recovered from the transcript's Action lines after
// the question.  Unparseable lines (the open forced-finish cue) are skipped.
std::vector<CanonicalKey> committed_calls(const std::string& tail) {
  std::vector<CanonicalKey> keys;
  std::istringstream lines(tail);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.starts_with("Action")) continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    try {
      keys.push_back(canonicalize(parse_action(line.substr(colon + 1))));
    } catch (const ActionParseError&) {
      // Not a complete call; ignore.
    }
  }
  return keys;
}

}  // namespace

PolicyBackend::PolicyBackend(const ChainWorld* world, PolicySpec spec)
    : world_(world), spec_(spec) {
  if (world_ == nullptr) throw ConfigError("policy backend needs a chain world");
}

const ChainSpec& PolicyBackend::chain_for_prompt(const std::string& prompt) const {
  std::size_t q = prompt.rfind("Question: ");
  if (q == std::string::npos) {
    throw ConfigError("policy backend: prompt has no question line");
  }
  std::size_t end = prompt.find('\n', q);
  std::string question = prompt.substr(q, end == std::string::npos ? end : end - q);
  for (const ChainSpec& chain : world_->chains) {
    if (question.find(chain.anchor) != std::string::npos) return chain;
  }
  throw ConfigError("policy backend: the question names no known waypoint anchor");
}

Action PolicyBackend::wrong_action(const ChainSpec& chain, int position,
                                   int index) const {
  // A plausible but off-route call: asking a spine waypoint for a feature
  // it does not have.  Distinct per index, never equal to any on-track call.
  std::size_t along = std::min<std::size_t>(static_cast<std::size_t>(position) / 2,
                                            chain.node_ids.size() - 1);
  Action a;
  a.kind = ActionKind::NodeFeature;
  a.arg0 = chain.node_ids[along];
  a.arg1 = "decoy" + std::to_string(index + 1);
  a.raw = action_surface(a);
  return a;
}

std::vector<CanonicalKey> PolicyBackend::step_candidates(const ChainSpec& chain,
                                                         int position) const {
  std::vector<CanonicalKey> keys;
  keys.push_back(canonicalize(oracle_action(chain, position)));
  for (int i = 0; i < spec_.alternatives; ++i) {
    keys.push_back(canonicalize(wrong_action(chain, position, i)));
  }
  return keys;
}

CompletionBatch PolicyBackend::sample(const std::string& prompt,
                                      const SamplingParams& params, int n) {
  if (n < 1) throw ConfigError("sample count must be positive");
  const ChainSpec& chain = chain_for_prompt(prompt);
  const int threshold = oracle_threshold(chain);

  std::size_t q = prompt.rfind("Question: ");
  std::vector<CanonicalKey> committed = committed_calls(prompt.substr(q));
  const int position = static_cast<int>(committed.size());

  auto target = [&](int at) {
    if (spec_.kind == PolicySpec::Kind::NeverFinish && at >= threshold) {
      // Keep re-reading the answer rather than ever finishing.
      Action a;
      a.kind = ActionKind::NodeFeature;
      a.arg0 = chain.node_ids.back();
      a.arg1 = "value";
      a.raw = action_surface(a);
      return a;
    }
    return oracle_action(chain, at);
  };

  bool on_track = true;
  for (int t = 0; t < position && on_track; ++t) {
    on_track = committed[static_cast<std::size_t>(t)] == canonicalize(target(t));
  }

  // One generator per (seed, prompt): outcomes are scheduling independent,
  // while the n samples of a batch stay mutually independent draws.
  std::mt19937_64 rng(derive_seed(params.seed.value_or(0), prompt));

  CompletionBatch batch;
  batch.prompt_hash = fnv1a64(prompt);
  batch.requested = n;

  if (prompt.ends_with("Finish[")) {
    // Forced answer: state the value iff the walk reached it.
    std::string text = on_track && position >= threshold ? chain.answer + "]"
                                                         : "unknown]";
    for (int s = 0; s < n; ++s) {
      batch.samples.push_back({text, 0, count_tokens(text)});
    }
  } else {
    const auto correct_scale = static_cast<std::uint64_t>(
        std::llround(spec_.p * 1000000.0));
    for (int s = 0; s < n; ++s) {
      bool take_correct = on_track;
      if (take_correct && spec_.kind == PolicySpec::Kind::Noisy) {
        take_correct = rng() % 1000000 < correct_scale;
      }
      Action a = take_correct
                     ? target(position)
                     : wrong_action(chain, position,
                                    static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                         spec_.alternatives)));
      std::string thought = a.is_finish() ? "The route's value is known; answering."
                            : take_correct ? "Following the cue chain."
                                           : "Trying another reading of the graph.";
      std::string text = " " + thought + "\nAction " + std::to_string(position + 1) +
                         ": " + action_surface(a);
      batch.samples.push_back({text, 0, count_tokens(text)});
    }
  }

  std::lock_guard<std::mutex> lock(mutex_);
  accounting_.requests += 1;
  accounting_.samples += n;
  for (const SampleResult& s : batch.samples) accounting_.tokens += s.tokens;
  return batch;
}

BackendAccounting PolicyBackend::accounting() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return accounting_;
}

}  // namespace graphwalk
