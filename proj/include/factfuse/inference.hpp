#pragma once

#include <optional>

#include "factfuse/crowd.hpp"
#include "factfuse/world.hpp"

namespace factfuse {

// Posterior entries below this threshold are dropped from the sparse map
// (and the remainder renormalized) to keep long runs from accumulating dust.
inline constexpr double kPosteriorDropThreshold = 1e-15;

// P(answers | world) = p_c^same * (1-p_c)^diff over the answered facts.
// An empty answer set has likelihood 1.
double likelihood(const AnswerSet& answers, WorldId world, CrowdModel model);

struct PosteriorUpdate {
  JointDistribution posterior;
  double evidence;  // P(answers) under the prior
};

// Bayesian merge of one round of crowd answers into the belief state.
// Answers must cover exactly the task set. Returns nullopt when the evidence
// probability is zero (possible only at p_c = 1, when the answers contradict
// every supported world); the caller decides how to handle that.
std::optional<PosteriorUpdate> posterior_update(const JointDistribution& prior,
                                                const TaskSet& tasks,
                                                const AnswerSet& answers,
                                                CrowdModel model);

}  // namespace factfuse
