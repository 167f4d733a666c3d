#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "graphwalk/errors.hpp"

namespace graphwalk {

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 0.9;
  int max_new_tokens = 512;
  std::vector<std::string> stop = {"Observation"};
  // Episode-stable seed consumed by deterministic backends; remote
  // endpoints ignore it.
  std::optional<std::uint64_t> seed;
};

struct SampleResult {
  std::string text;
  std::int64_t latency_ms = 0;
  std::int64_t tokens = 0;  // whitespace-delimited count of the text
};

struct CompletionBatch {
  std::uint64_t prompt_hash = 0;
  int requested = 0;
  std::vector<SampleResult> samples;  // stable order; size == requested
};

// Cumulative request and token totals; monotone over a backend's lifetime.
struct BackendAccounting {
  std::int64_t requests = 0;
  std::int64_t samples = 0;
  std::int64_t tokens = 0;
};

// Produces n completions for a prompt.  Implementations must be callable
// from several threads and must return samples in a stable order.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual CompletionBatch sample(const std::string& prompt, const SamplingParams& params,
                                 int n) = 0;
  virtual BackendAccounting accounting() const = 0;
  // True when replays through this backend are bit-stable; timing fields
  // are recorded as zero in that case.
  virtual bool deterministic() const = 0;
};

// Truncates text at the first occurrence of any stop sequence.
std::string apply_stop(std::string text, const std::vector<std::string>& stop);

std::int64_t count_tokens(const std::string& text);

// Replays canned responses from a JSONL file.  Each line is
//   {"match": "sequence", "responses": ["...", ...]}
// or
//   {"match": "prompt_hash", "prompt_hash": "<16 hex>", "responses": [...]}
// Sequence lines are consumed strictly in file order; prompt_hash lines are
// consumed by the first request whose prompt hashes to the stored digest.
// A file mixes only one match mode.
class ScriptedBackend : public LlmBackend {
 public:
  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);
  static std::unique_ptr<ScriptedBackend> from_lines(
      std::vector<std::vector<std::string>> lines);

  CompletionBatch sample(const std::string& prompt, const SamplingParams& params,
                         int n) override;
  BackendAccounting accounting() const override;
  bool deterministic() const override { return true; }

 private:
  struct Line {
    std::string prompt_hash;  // empty in sequence mode
    std::vector<std::string> responses;
    bool consumed = false;
  };

  bool by_hash_ = false;
  std::vector<Line> lines_;
  std::size_t cursor_ = 0;
  BackendAccounting accounting_;
  mutable std::mutex mutex_;
};

struct EndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;
  int timeout_ms = 120000;
  int retries = 1;        // extra attempts after a failed request
  bool force_single = false;  // always fan out to single-sample requests
};

// OpenAI-style chat endpoint: POST {base_url}/chat/completions.  When the
// server rejects a multi-sample request the gateway transparently fans out
// to n single-sample requests, fetched concurrently and reassembled in
// order.
class ChatEndpointBackend : public LlmBackend {
 public:
  // Probes the endpoint before returning; throws ConfigError when it is
  // unreachable.
  explicit ChatEndpointBackend(EndpointConfig config);

  CompletionBatch sample(const std::string& prompt, const SamplingParams& params,
                         int n) override;
  BackendAccounting accounting() const override;
  bool deterministic() const override { return false; }

 private:
  std::vector<std::string> request_once(const std::string& prompt,
                                        const SamplingParams& params, int n);
  std::vector<std::string> request_with_retry(const std::string& prompt,
                                              const SamplingParams& params, int n);

  EndpointConfig config_;
  BackendAccounting accounting_;
  mutable std::mutex mutex_;
};

struct BackendConfig {
  std::string kind;  // "endpoint" | "scripted"
  EndpointConfig endpoint;
  std::filesystem::path script_path;
};

// Builds an endpoint or scripted backend.  Policy backends are bound to a
// synthetic world and are constructed by the synthetic harness instead.
// Endpoint credentials fall back to GATEWAY_BASE_URL / GATEWAY_API_KEY.
std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config);

}  // namespace graphwalk
