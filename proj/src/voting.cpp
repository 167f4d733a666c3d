#include "graphwalk/voting.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace graphwalk {
namespace {

// Trims and collapses internal whitespace runs to single spaces.
std::string squash(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

CanonicalKey canonicalize(const Action& action) {
  std::string name = lowered(action_name(action.kind));
  std::string a0 = squash(action.arg0);
  if (action.kind == ActionKind::Finish) {
    a0 = lowered(std::move(a0));
  }
  CanonicalKey key = name + "[" + a0;
  if (action.kind == ActionKind::NodeFeature || action.kind == ActionKind::NeighborCheck ||
      action.kind == ActionKind::NodeDegree) {
    key += "," + squash(action.arg1);
  }
  key += "]";
  return key;
}

VoteResult majority_vote(std::span<const StepSample> samples) {
  VoteResult result;
  // First-sampled bearer of each key, for thought selection.
  std::map<CanonicalKey, std::size_t> first_bearer;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const StepSample& s = samples[i];
    if (!s.action) {
      ++result.discarded;
      continue;
    }
    ++result.kept;
    CanonicalKey key = canonicalize(*s.action);
    if (++result.tally[key] == 1) {
      first_bearer.emplace(std::move(key), i);
    }
  }
  if (result.kept == 0) {
    throw AllSamplesMalformed("all " + std::to_string(samples.size()) +
                              " samples in the batch were malformed");
  }
  // tally is key-ordered, so taking a strictly greater count leaves the
  // lexicographically smallest key as the winner among ties.
  int best = 0;
  for (const auto& [key, count] : result.tally) {
    if (count > best) {
      best = count;
      result.winner = key;
    }
  }
  const StepSample& chosen = samples[first_bearer.at(result.winner)];
  result.thought = chosen.thought;
  result.action = *chosen.action;
  return result;
}

VoteResult step_with_votes(LlmBackend& backend, const std::string& prompt,
                           const SamplingParams& params, int k,
                           const SampleParser& parser) {
  std::int64_t tokens = 0;
  auto sample_batch = [&]() {
    CompletionBatch batch = backend.sample(prompt, params, k);
    std::vector<StepSample> parsed;
    parsed.reserve(batch.samples.size());
    for (const SampleResult& s : batch.samples) {
      tokens += s.tokens;
      parsed.push_back(parser(s.text));
    }
    return parsed;
  };

  std::vector<StepSample> samples = sample_batch();
  bool any_ok = std::any_of(samples.begin(), samples.end(),
                            [](const StepSample& s) { return s.action.has_value(); });
  if (!any_ok) {
    // One full resample, then give up.
    samples = sample_batch();
  }
  VoteResult result = majority_vote(samples);
  result.tokens = tokens;
  return result;
}

}  // namespace graphwalk
