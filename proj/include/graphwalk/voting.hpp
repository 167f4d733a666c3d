#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "graphwalk/gateway.hpp"
#include "graphwalk/graph_api.hpp"

namespace graphwalk {

// Canonical identity of a call for vote counting: lowercased function
// name, arguments trimmed with internal whitespace collapsed, and Finish
// answers additionally lowercased.  Plain string so tie-breaks are ordinary
// lexicographic comparisons.
using CanonicalKey = std::string;

CanonicalKey canonicalize(const Action& action);

// One parsed sample from a voting batch; action is empty when the sample
// had no parseable call.
struct StepSample {
  std::string raw;
  std::string thought;
  std::optional<Action> action;
};

struct VoteResult {
  CanonicalKey winner;
  std::string thought;       // from the first-sampled bearer of the winner
  Action action;             // ditto
  std::map<CanonicalKey, int> tally;
  int kept = 0;       // well-formed samples
  int discarded = 0;  // malformed samples
  std::int64_t tokens = 0;   // completion tokens consumed, resamples included
};

// Plurality winner over the well-formed samples; exact ties go to the
// lexicographically smallest key.  Throws AllSamplesMalformed when nothing
// parseable is present.
VoteResult majority_vote(std::span<const StepSample> samples);

using SampleParser = std::function<StepSample(const std::string&)>;

// Samples k completions for the prompt, parses each, and vote-selects the
// action to commit.  When every sample in the batch is malformed the whole
// batch is resampled exactly once; a second all-malformed batch raises
// AllSamplesMalformed.  With k == 1 this reduces to the single-sample step.
VoteResult step_with_votes(LlmBackend& backend, const std::string& prompt,
                           const SamplingParams& params, int k,
                           const SampleParser& parser);

}  // namespace graphwalk
