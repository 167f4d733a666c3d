#include "graphwalk/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "graphwalk/errors.hpp"
#include "graphwalk/hash.hpp"

namespace graphwalk {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open questions file: " + path.string());
  }
  std::vector<QAItem> items;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ParseError("questions file " + path.string() + " line " +
                       std::to_string(line_no) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!j.is_object()) fail("expected an object");
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (key != "qid" && key != "question" && key != "answers" &&
          key != "difficulty" && key != "domain" && key != "meta") {
        fail("unknown key \"" + key + "\"");
      }
    }
    QAItem item;
    try {
      item.qid = j.at("qid").get<std::string>();
      item.question = j.at("question").get<std::string>();
      item.answers = j.at("answers").get<std::vector<std::string>>();
      item.domain = j.at("domain").get<std::string>();
      item.difficulty = j.value("difficulty", "easy");
      if (j.contains("meta")) item.meta = j["meta"];
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (item.qid.empty()) fail("qid must be nonempty");
    if (item.answers.empty()) fail("answers must be nonempty");
    if (item.difficulty != "easy" && item.difficulty != "medium" &&
        item.difficulty != "hard") {
      fail("difficulty must be easy, medium, or hard");
    }
    if (!seen.insert(item.qid).second) fail("duplicate qid \"" + item.qid + "\"");
    items.push_back(std::move(item));
  }
  return items;
}

void write_qa_jsonl(const std::filesystem::path& path, std::span<const QAItem> items) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write questions file: " + path.string());
  }
  for (const QAItem& item : items) {
    nlohmann::json j = {{"qid", item.qid},
                        {"question", item.question},
                        {"answers", item.answers},
                        {"difficulty", item.difficulty},
                        {"domain", item.domain}};
    if (!item.meta.is_null()) j["meta"] = item.meta;
    out << j.dump() << "\n";
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  // Two-row dynamic program; rows track prefixes of b.
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double rouge_l(const std::string& candidate, const std::string& reference) {
  std::vector<std::string> c = tokenize(candidate);
  std::vector<std::string> r = tokenize(reference);
  if (c.empty() || r.empty()) return 0.0;
  std::size_t lcs = lcs_length(c, r);
  return 2.0 * static_cast<double>(lcs) /
         static_cast<double>(c.size() + r.size());
}

double embedding_f1(const std::string& candidate, const std::string& reference,
                    EmbeddingBackend& backend) {
  std::vector<std::string> c = tokenize(candidate);
  std::vector<std::string> r = tokenize(reference);
  if (c.empty() || r.empty()) return 0.0;

  std::vector<std::string> all;
  all.reserve(c.size() + r.size());
  all.insert(all.end(), c.begin(), c.end());
  all.insert(all.end(), r.begin(), r.end());
  std::vector<std::vector<float>> vecs = backend.embed(all);
  for (auto& v : vecs) normalize_unit(v);

  auto cosine = [&](std::size_t i, std::size_t j) {
    const std::vector<float>& x = vecs[i];
    const std::vector<float>& y = vecs[j];
    if (x.size() != y.size()) {
      throw DimensionMismatch("embedding widths differ within one scoring call");
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      dot += static_cast<double>(x[k]) * static_cast<double>(y[k]);
    }
    return dot;
  };

  double precision = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      best = std::max(best, cosine(i, c.size() + j));
    }
    precision += best;
  }
  precision /= static_cast<double>(c.size());

  double recall = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      best = std::max(best, cosine(i, c.size() + j));
    }
    recall += best;
  }
  recall /= static_cast<double>(r.size());

  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ScoreRow score_episode(const Episode& episode, const QAItem& item,
                       EmbeddingBackend& backend) {
  ScoreRow row;
  row.qid = item.qid;
  row.domain = item.domain;
  row.difficulty = item.difficulty;
  row.answer = episode.final_answer;
  row.termination = termination_name(episode.termination);
  row.steps = static_cast<int>(episode.steps.size());
  row.tokens = episode.tokens;
  row.wall_ms = episode.wall_ms;
  for (const std::string& reference : item.answers) {
    row.rouge = std::max(row.rouge, rouge_l(episode.final_answer, reference));
    row.embed = std::max(row.embed, embedding_f1(episode.final_answer, reference, backend));
  }
  return row;
}

RunRow aggregate_rows(std::span<const ScoreRow> rows, int max_steps, int votes) {
  RunRow out;
  out.max_steps = max_steps;
  out.votes = votes;
  out.episodes = static_cast<int>(rows.size());

  std::map<std::string, std::vector<double>> rouge_domain;
  std::map<std::string, std::vector<double>> embed_domain;
  std::vector<double> rouge_hard;
  std::vector<double> embed_hard;
  for (const ScoreRow& row : rows) {
    rouge_domain[row.domain].push_back(row.rouge);
    embed_domain[row.domain].push_back(row.embed);
    if (row.difficulty == "medium" || row.difficulty == "hard") {
      rouge_hard.push_back(row.rouge);
      embed_hard.push_back(row.embed);
    }
    if (row.termination == "BackendError") ++out.backend_errors;
    out.tokens += row.tokens;
    out.wall_ms += row.wall_ms;
  }

  std::vector<double> rouge_means;
  for (const auto& [domain, values] : rouge_domain) {
    out.rouge_by_domain[domain] = mean(values);
    rouge_means.push_back(out.rouge_by_domain[domain]);
  }
  std::vector<double> embed_means;
  for (const auto& [domain, values] : embed_domain) {
    out.embed_by_domain[domain] = mean(values);
    embed_means.push_back(out.embed_by_domain[domain]);
  }
  out.rouge_avg = mean(rouge_means);
  out.embed_avg = mean(embed_means);
  out.rouge_hard = mean(rouge_hard);
  out.embed_hard = mean(embed_hard);
  return out;
}

namespace {

nlohmann::json run_row_to_json(const RunRow& row) {
  nlohmann::json rouge(row.rouge_by_domain);
  rouge["Avg"] = row.rouge_avg;
  nlohmann::json embed(row.embed_by_domain);
  embed["Avg"] = row.embed_avg;
  return {{"max_steps", row.max_steps},
          {"votes", row.votes},
          {"rouge_l", std::move(rouge)},
          {"embedding_f1", std::move(embed)},
          {"rouge_l_medium_hard", row.rouge_hard},
          {"embedding_f1_medium_hard", row.embed_hard},
          {"episodes", row.episodes},
          {"backend_errors", row.backend_errors},
          {"tokens", row.tokens},
          {"wall_ms", row.wall_ms}};
}

nlohmann::json score_row_to_json(const ScoreRow& row) {
  return {{"qid", row.qid},
          {"domain", row.domain},
          {"difficulty", row.difficulty},
          {"max_steps", row.max_steps},
          {"votes", row.votes},
          {"rouge_l", row.rouge},
          {"embedding_f1", row.embed},
          {"answer", row.answer},
          {"termination", row.termination},
          {"steps", row.steps},
          {"tokens", row.tokens},
          {"wall_ms", row.wall_ms}};
}

}  // namespace

nlohmann::json results_to_json(const nlohmann::json& run_config,
                               std::span<const RunRow> rows,
                               std::span<const ScoreRow> per_question) {
  nlohmann::json row_array = nlohmann::json::array();
  for (const RunRow& row : rows) row_array.push_back(run_row_to_json(row));
  nlohmann::json question_array = nlohmann::json::array();
  for (const ScoreRow& row : per_question) {
    question_array.push_back(score_row_to_json(row));
  }
  return {{"run_config", run_config},
          {"rows", std::move(row_array)},
          {"per_question", std::move(question_array)}};
}

void write_results_json(const std::filesystem::path& path,
                        const nlohmann::json& results) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write results file: " + path.string());
  }
  out << results.dump(2) << "\n";
}

namespace {

std::string score_cell(double unit_score) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << unit_score * 100.0;
  return out.str();
}

std::string pad_left(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  return std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  return s + std::string(width - s.size(), ' ');
}

std::string config_label(const RunRow& row) {
  if (row.max_steps == 0) return "1-hop baseline";
  return std::to_string(row.max_steps) + " steps, votes=" + std::to_string(row.votes);
}

void render_metric_block(std::ostringstream& out, const std::string& title,
                         std::span<const RunRow> rows,
                         const std::vector<std::string>& domains,
                         bool use_rouge) {
  std::size_t label_width = std::strlen("config");
  for (const RunRow& row : rows) {
    label_width = std::max(label_width, config_label(row).size());
  }
  std::vector<std::size_t> widths;
  for (const std::string& domain : domains) {
    widths.push_back(std::max<std::size_t>(domain.size(), 6));
  }

  out << title << " (x100)\n";
  out << pad_right("config", label_width);
  for (std::size_t i = 0; i < domains.size(); ++i) {
    out << " | " << pad_left(domains[i], widths[i]);
  }
  out << " | " << pad_left("Avg", 6) << "\n";
  for (const RunRow& row : rows) {
    out << pad_right(config_label(row), label_width);
    for (std::size_t i = 0; i < domains.size(); ++i) {
      const auto& by_domain = use_rouge ? row.rouge_by_domain : row.embed_by_domain;
      auto it = by_domain.find(domains[i]);
      std::string cell = it == by_domain.end() ? "-" : score_cell(it->second);
      out << " | " << pad_left(cell, widths[i]);
    }
    out << " | " << pad_left(score_cell(use_rouge ? row.rouge_avg : row.embed_avg), 6)
        << "\n";
  }
  out << "\n";
}

}  // namespace

std::string render_results_table(std::span<const RunRow> rows) {
  std::vector<std::string> domains;
  for (const RunRow& row : rows) {
    for (const auto& [domain, value] : row.embed_by_domain) {
      (void)value;
      if (std::find(domains.begin(), domains.end(), domain) == domains.end()) {
        domains.push_back(domain);
      }
    }
  }
  std::sort(domains.begin(), domains.end());

  std::ostringstream out;
  render_metric_block(out, "Embedding F1", rows, domains, /*use_rouge=*/false);
  render_metric_block(out, "ROUGE-L", rows, domains, /*use_rouge=*/true);

  std::size_t label_width = std::strlen("config");
  for (const RunRow& row : rows) {
    label_width = std::max(label_width, config_label(row).size());
  }
  out << "Medium+hard slice (x100)\n";
  out << pad_right("config", label_width) << " | " << pad_left("EmbF1", 6) << " | "
      << pad_left("RougeL", 6) << "\n";
  for (const RunRow& row : rows) {
    out << pad_right(config_label(row), label_width) << " | "
        << pad_left(score_cell(row.embed_hard), 6) << " | "
        << pad_left(score_cell(row.rouge_hard), 6) << "\n";
  }
  return out.str();
}

void write_results_txt(const std::filesystem::path& path, std::span<const RunRow> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write results table: " + path.string());
  }
  out << render_results_table(rows);
}

Episode run_graphrag_baseline(const BaselineInputs& in) {
  auto start = std::chrono::steady_clock::now();
  Episode episode;
  episode.qid = in.qid;
  episode.question = in.question;

  SamplingParams params = in.params;
  params.stop.clear();  // direct answer, no transcript structure to guard
  if (!params.seed) params.seed = fnv1a64(in.qid);

  std::string context = one_hop_context(*in.graph, *in.index, *in.embedder,
                                        in.question, in.retrieve_k, in.char_budget);
  std::string prompt =
      "Answer the question using the retrieved graph context below. Reply with the "
      "answer only.\n\nGraph context:\n" +
      context + "\nQuestion: " + in.question + "\nAnswer:";

  try {
    CompletionBatch batch = in.llm->sample(prompt, params, 1);
    const SampleResult& s = batch.samples.front();
    episode.tokens = s.tokens;
    episode.final_answer = trim(s.text);
    episode.termination = Termination::Finished;
  } catch (const GatewayError&) {
    episode.termination = Termination::BackendError;
  }

  if (in.llm->deterministic()) {
    episode.wall_ms = 0;
  } else {
    episode.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  }
  return episode;
}

}  // namespace graphwalk
