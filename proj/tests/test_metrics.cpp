#include <doctest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "graphwalk/eval.hpp"
#include "graphwalk/retrieval.hpp"

namespace {

using namespace graphwalk;

// Independent LCS oracle: plain full-table dynamic program, nothing shared
// with the production implementation.
std::size_t lcs_oracle(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> table(a.size() + 1,
                                              std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        table[i][j] = table[i - 1][j - 1] + 1;
      } else {
        table[i][j] = std::max(table[i - 1][j], table[i][j - 1]);
      }
    }
  }
  return table[a.size()][b.size()];
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len,
                                       int vocab) {
  std::vector<std::string> out;
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back("t" + std::to_string(rng() % static_cast<std::uint64_t>(vocab)));
  }
  return out;
}

}  // namespace

TEST_CASE("lcs_length matches a brute-force table on random token pairs") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = random_tokens(rng, 12, 5);
    auto b = random_tokens(rng, 12, 5);
    CAPTURE(trial);
    CHECK(lcs_length(a, b) == lcs_oracle(a, b));
  }
}

TEST_CASE("lcs_length fixed values") {
  std::vector<std::string> abc{"a", "b", "c"};
  std::vector<std::string> acb{"a", "c", "b"};
  std::vector<std::string> empty;
  CHECK(lcs_length(abc, abc) == 3);
  CHECK(lcs_length(abc, acb) == 2);
  CHECK(lcs_length(abc, empty) == 0);
  CHECK(lcs_length(empty, empty) == 0);
  std::vector<std::string> x{"x"};
  CHECK(lcs_length(abc, x) == 0);
}

TEST_CASE("tokenize casefolds and splits on non-alphanumeric runs") {
  CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("A-B_c9") == std::vector<std::string>{"a", "b", "c9"});
  CHECK(tokenize("  leading   and trailing  ") ==
        std::vector<std::string>{"leading", "and", "trailing"});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("1993") == std::vector<std::string>{"1993"});
}

TEST_CASE("rouge_l reference value: two of three tokens shared") {
  // candidate "the cat sat" (3 tokens), reference "the cat" (2 tokens),
  // LCS 2 -> F1 = 2*2 / (3+2) = 0.8 exactly.
  CHECK(rouge_l("the cat sat", "the cat") == 0.8);
}

TEST_CASE("rouge_l boundary values") {
  CHECK(rouge_l("same answer", "same answer") == 1.0);
  CHECK(rouge_l("Same Answer!", "same answer") == 1.0);  // casefold + punctuation
  CHECK(rouge_l("alpha beta", "gamma delta") == 0.0);
  CHECK(rouge_l("", "reference") == 0.0);
  CHECK(rouge_l("candidate", "") == 0.0);
  CHECK(rouge_l("", "") == 0.0);
}

TEST_CASE("rouge_l is order sensitive through the subsequence") {
  // "b a" vs "a b": LCS is 1 token -> 2*1/(2+2) = 0.5.
  CHECK(rouge_l("b a", "a b") == 0.5);
}

TEST_CASE("embedding_f1 on identical and disjoint token sets") {
  HashedTrigramEmbedder embedder;
  CHECK(embedding_f1("machine learning", "machine learning", embedder) ==
        doctest::Approx(1.0));
  // Case and punctuation wash out in tokenization.
  CHECK(embedding_f1("Machine, Learning", "machine learning", embedder) ==
        doctest::Approx(1.0));
  double disjoint = embedding_f1("wxyzq jjjkk", "machine learning", embedder);
  CHECK(disjoint < 0.9);
  CHECK(disjoint >= 0.0);
  CHECK(embedding_f1("", "machine learning", embedder) == 0.0);
  CHECK(embedding_f1("machine", "", embedder) == 0.0);
}

TEST_CASE("embedding_f1 is symmetric") {
  HashedTrigramEmbedder embedder;
  const char* pairs[][2] = {
      {"the higgs sector", "higgs sector hidden symmetry"},
      {"one two three", "three four"},
      {"physical review d", "physical review"},
  };
  for (const auto& pair : pairs) {
    CAPTURE(pair[0]);
    CHECK(embedding_f1(pair[0], pair[1], embedder) ==
          doctest::Approx(embedding_f1(pair[1], pair[0], embedder)));
  }
}

TEST_CASE("embedding_f1 rewards near-matches above unrelated text") {
  HashedTrigramEmbedder embedder;
  double near = embedding_f1("accretion rates", "accretion rate", embedder);
  double far = embedding_f1("zzz qqq", "accretion rate", embedder);
  CHECK(near > far);
}

TEST_CASE("score_episode takes the best reference and carries identity") {
  HashedTrigramEmbedder embedder;
  QAItem item;
  item.qid = "q1";
  item.question = "irrelevant";
  item.answers = {"completely different words", "the cat"};
  item.difficulty = "medium";
  item.domain = "demo";

  Episode episode;
  episode.qid = "q1";
  episode.question = "irrelevant";
  episode.final_answer = "the cat sat";
  episode.termination = Termination::Finished;
  episode.tokens = 42;
  episode.wall_ms = 7;
  TraceStep step;
  step.index = 1;
  episode.steps.push_back(step);

  ScoreRow row = score_episode(episode, item, embedder);
  CHECK(row.qid == "q1");
  CHECK(row.domain == "demo");
  CHECK(row.difficulty == "medium");
  CHECK(row.rouge == 0.8);  // best reference is "the cat"
  CHECK(row.embed > 0.0);
  CHECK(row.answer == "the cat sat");
  CHECK(row.termination == "Finished");
  CHECK(row.steps == 1);
  CHECK(row.tokens == 42);
  CHECK(row.wall_ms == 7);
}

TEST_CASE("aggregate_rows averages per domain and slices medium+hard") {
  auto make_row = [](const char* qid, const char* domain, const char* difficulty,
                     double rouge, double embed) {
    ScoreRow r;
    r.qid = qid;
    r.domain = domain;
    r.difficulty = difficulty;
    r.rouge = rouge;
    r.embed = embed;
    r.termination = "Finished";
    r.tokens = 10;
    r.wall_ms = 0;
    return r;
  };
  std::vector<ScoreRow> rows = {
      make_row("a1", "alpha", "easy", 1.0, 1.0),
      make_row("a2", "alpha", "hard", 0.0, 0.5),
      make_row("b1", "beta", "medium", 0.5, 0.5),
  };
  RunRow agg = aggregate_rows(rows, 10, 4);
  CHECK(agg.max_steps == 10);
  CHECK(agg.votes == 4);
  CHECK(agg.episodes == 3);
  CHECK(agg.rouge_by_domain.at("alpha") == doctest::Approx(0.5));
  CHECK(agg.rouge_by_domain.at("beta") == doctest::Approx(0.5));
  // Macro mean over domains, not over episodes.
  CHECK(agg.rouge_avg == doctest::Approx(0.5));
  CHECK(agg.embed_avg == doctest::Approx((0.75 + 0.5) / 2));
  // Medium + hard slice is a plain mean over those questions.
  CHECK(agg.rouge_hard == doctest::Approx(0.25));
  CHECK(agg.embed_hard == doctest::Approx(0.5));
  CHECK(agg.tokens == 30);
}

TEST_CASE("aggregate_rows counts backend errors") {
  ScoreRow ok;
  ok.qid = "x";
  ok.domain = "d";
  ok.difficulty = "easy";
  ok.termination = "Finished";
  ScoreRow err = ok;
  err.qid = "y";
  err.termination = "BackendError";
  std::vector<ScoreRow> rows = {ok, err};
  RunRow agg = aggregate_rows(rows, 5, 1);
  CHECK(agg.episodes == 2);
  CHECK(agg.backend_errors == 1);
}
