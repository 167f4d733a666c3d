#include "graphwalk/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "graphwalk/hash.hpp"

namespace graphwalk {

using json = nlohmann::json;

std::string apply_stop(std::string text, const std::vector<std::string>& stop) {
  std::size_t cut = std::string::npos;
  for (const std::string& s : stop) {
    if (s.empty()) continue;
    std::size_t pos = text.find(s);
    if (pos != std::string::npos && pos < cut) cut = pos;
  }
  if (cut != std::string::npos) text.resize(cut);
  return text;
}

std::int64_t count_tokens(const std::string& text) {
  std::int64_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

// ---- scripted ------------------------------------------------------------

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open script file: " + path.string());
  }
  auto backend = std::unique_ptr<ScriptedBackend>(new ScriptedBackend());
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty()) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ConfigError("script " + path.string() + " line " + std::to_string(line_no) +
                        ": " + e.what());
    }
    const std::string where = path.string() + " line " + std::to_string(line_no);
    if (!j.contains("match") || !j["match"].is_string()) {
      throw ConfigError("script " + where + ": missing \"match\"");
    }
    Line line;
    std::string match = j["match"].get<std::string>();
    if (match == "prompt_hash") {
      if (!j.contains("prompt_hash") || !j["prompt_hash"].is_string()) {
        throw ConfigError("script " + where + ": prompt_hash lines need a \"prompt_hash\"");
      }
      line.prompt_hash = j["prompt_hash"].get<std::string>();
    } else if (match != "sequence") {
      throw ConfigError("script " + where + ": match must be \"sequence\" or \"prompt_hash\"");
    }
    if (!j.contains("responses") || !j["responses"].is_array() || j["responses"].empty()) {
      throw ConfigError("script " + where + ": missing nonempty \"responses\"");
    }
    for (const auto& r : j["responses"]) {
      if (!r.is_string()) {
        throw ConfigError("script " + where + ": responses must be strings");
      }
      line.responses.push_back(r.get<std::string>());
    }
    bool hashed = !line.prompt_hash.empty();
    if (!backend->lines_.empty() && hashed != backend->by_hash_) {
      throw ConfigError("script " + path.string() + " mixes match modes");
    }
    backend->by_hash_ = hashed;
    backend->lines_.push_back(std::move(line));
  }
  if (backend->lines_.empty()) {
    throw ConfigError("script " + path.string() + " has no lines");
  }
  return backend;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_lines(
    std::vector<std::vector<std::string>> lines) {
  auto backend = std::unique_ptr<ScriptedBackend>(new ScriptedBackend());
  for (auto& responses : lines) {
    Line line;
    line.responses = std::move(responses);
    backend->lines_.push_back(std::move(line));
  }
  return backend;
}

CompletionBatch ScriptedBackend::sample(const std::string& prompt,
                                        const SamplingParams& params, int n) {
  std::lock_guard<std::mutex> lock(mutex_);
  Line* line = nullptr;
  if (by_hash_) {
    std::string digest = fnv1a64_hex(prompt);
    for (Line& l : lines_) {
      if (!l.consumed && l.prompt_hash == digest) {
        line = &l;
        break;
      }
    }
    if (line == nullptr) {
      throw BackendUnavailable("script has no unconsumed line for prompt hash " + digest);
    }
  } else {
    if (cursor_ >= lines_.size()) {
      throw BackendUnavailable("script exhausted after " + std::to_string(lines_.size()) +
                               " lines");
    }
    line = &lines_[cursor_++];
  }
  line->consumed = true;
  if (static_cast<int>(line->responses.size()) < n) {
    throw MalformedResponse("script line offers " + std::to_string(line->responses.size()) +
                            " responses but " + std::to_string(n) + " were requested");
  }
  CompletionBatch batch;
  batch.prompt_hash = fnv1a64(prompt);
  batch.requested = n;
  for (int i = 0; i < n; ++i) {
    SampleResult s;
    s.text = apply_stop(line->responses[static_cast<std::size_t>(i)], params.stop);
    s.tokens = count_tokens(s.text);
    batch.samples.push_back(std::move(s));
  }
  accounting_.requests += 1;
  accounting_.samples += n;
  for (const SampleResult& s : batch.samples) accounting_.tokens += s.tokens;
  return batch;
}

BackendAccounting ScriptedBackend::accounting() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return accounting_;
}

// ---- endpoint ------------------------------------------------------------

namespace {

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  auto scheme = base_url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = base_url.find('/', host_start);
  if (slash == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

}  // namespace

ChatEndpointBackend::ChatEndpointBackend(EndpointConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw ConfigError("endpoint backend requires a base url");
  }
  // Health probe: any HTTP response counts as reachable.
  auto [root, prefix] = split_base_url(config_.base_url);
  httplib::Client client(root);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(5, 0);
  auto res = client.Get(prefix + "/models");
  if (!res) {
    throw ConfigError("endpoint health probe failed: no response from " + config_.base_url);
  }
}

std::vector<std::string> ChatEndpointBackend::request_once(const std::string& prompt,
                                                           const SamplingParams& params,
                                                           int n) {
  auto [root, prefix] = split_base_url(config_.base_url);
  httplib::Client client(root);
  client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  json body = {
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"n", n},
      {"stop", params.stop},
      {"max_tokens", params.max_new_tokens},
  };

  {
    std::lock_guard<std::mutex> lock(mutex_);
    accounting_.requests += 1;
  }
  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    if (res.error() == httplib::Error::ConnectionTimeout ||
        res.error() == httplib::Error::Read) {
      throw TimeoutError("chat request timed out against " + config_.base_url);
    }
    throw BackendUnavailable("chat endpoint unreachable: " + config_.base_url);
  }
  if (res->status != 200) {
    throw BackendUnavailable("chat endpoint returned HTTP " + std::to_string(res->status) +
                             ": " + res->body.substr(0, 200));
  }
  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw MalformedResponse(std::string("chat response is not JSON: ") + e.what());
  }
  if (!parsed.contains("choices") || !parsed["choices"].is_array()) {
    throw MalformedResponse("chat response lacks a \"choices\" array");
  }
  std::vector<std::string> texts;
  for (const auto& choice : parsed["choices"]) {
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string()) {
      throw MalformedResponse("chat choice lacks message content");
    }
    texts.push_back(choice["message"]["content"].get<std::string>());
  }
  if (static_cast<int>(texts.size()) != n) {
    throw MalformedResponse("chat response returned " + std::to_string(texts.size()) +
                            " choices for n=" + std::to_string(n));
  }
  return texts;
}

std::vector<std::string> ChatEndpointBackend::request_with_retry(const std::string& prompt,
                                                                 const SamplingParams& params,
                                                                 int n) {
  int attempts = 1 + std::max(0, config_.retries);
  for (int attempt = 1;; ++attempt) {
    try {
      return request_once(prompt, params, n);
    } catch (const GatewayError&) {
      if (attempt >= attempts) throw;
    }
  }
}

CompletionBatch ChatEndpointBackend::sample(const std::string& prompt,
                                            const SamplingParams& params, int n) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> texts;
  bool fanned_out = config_.force_single && n > 1;
  if (!fanned_out) {
    try {
      texts = request_with_retry(prompt, params, n);
    } catch (const BackendUnavailable&) {
      if (n <= 1) throw;
      fanned_out = true;  // server may reject multi-sample requests
    }
  }
  if (fanned_out) {
    // n single-sample requests, fetched concurrently, reassembled in order.
    std::vector<std::future<std::vector<std::string>>> futures;
    futures.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      futures.push_back(std::async(std::launch::async, [this, &prompt, &params] {
        return request_with_retry(prompt, params, 1);
      }));
    }
    for (auto& f : futures) {
      std::vector<std::string> one = f.get();
      texts.push_back(one.front());
    }
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  CompletionBatch batch;
  batch.prompt_hash = fnv1a64(prompt);
  batch.requested = n;
  for (std::string& t : texts) {
    SampleResult s;
    s.text = apply_stop(std::move(t), params.stop);
    s.tokens = count_tokens(s.text);
    s.latency_ms = elapsed / std::max(1, n);
    batch.samples.push_back(std::move(s));
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    accounting_.samples += n;
    for (const SampleResult& s : batch.samples) accounting_.tokens += s.tokens;
  }
  return batch;
}

BackendAccounting ChatEndpointBackend::accounting() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return accounting_;
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config) {
  if (config.kind == "scripted") {
    return ScriptedBackend::from_file(config.script_path);
  }
  if (config.kind == "endpoint") {
    EndpointConfig ep = config.endpoint;
    if (ep.base_url.empty()) {
      if (const char* env = std::getenv("GATEWAY_BASE_URL")) ep.base_url = env;
    }
    if (ep.api_key.empty()) {
      if (const char* env = std::getenv("GATEWAY_API_KEY")) ep.api_key = env;
    }
    return std::make_unique<ChatEndpointBackend>(std::move(ep));
  }
  throw ConfigError("unknown backend kind \"" + config.kind +
                    "\" (expected endpoint or scripted)");
}

}  // namespace graphwalk
