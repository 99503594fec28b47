#include "factfuse/inference.hpp"

#include <bit>
#include <stdexcept>

namespace factfuse {

namespace {

double pow_uint(double base, unsigned exp) {
  double r = 1.0;
  while (exp > 0) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

// (mask of answered fact bits, judgments packed into those bits)
std::pair<std::uint32_t, std::uint32_t> pack_answers(const AnswerSet& answers) {
  std::uint32_t mask = 0, bits = 0;
  for (const auto& [fact, judgment] : answers.judgments()) {
    mask |= 1u << fact.value;
    if (judgment) bits |= 1u << fact.value;
  }
  return {mask, bits};
}

}  // namespace

double likelihood(const AnswerSet& answers, WorldId world, CrowdModel model) {
  const auto [mask, bits] = pack_answers(answers);
  const unsigned diff =
      static_cast<unsigned>(std::popcount((world.bits ^ bits) & mask));
  const unsigned same = static_cast<unsigned>(answers.size()) - diff;
  return pow_uint(model.accuracy(), same) * pow_uint(model.error(), diff);
}

std::optional<PosteriorUpdate> posterior_update(const JointDistribution& prior,
                                                const TaskSet& tasks,
                                                const AnswerSet& answers,
                                                CrowdModel model) {
  if (tasks.empty())
    throw std::invalid_argument("posterior_update: task set must not be empty");
  if (!answers.covers(tasks))
    throw std::invalid_argument(
        "posterior_update: answers must cover exactly the task set");
  for (FactId f : tasks.facts())
    if (!prior.fact_set().contains(f))
      throw std::out_of_range("unknown fact id " + std::to_string(f.value));

  const auto [mask, bits] = pack_answers(answers);
  const double p = model.accuracy();
  const double q = model.error();
  const unsigned m = static_cast<unsigned>(tasks.size());

  std::vector<double> weighted;
  weighted.reserve(prior.entries().size());
  for (const auto& [w, pr] : prior.entries()) {
    const unsigned diff =
        static_cast<unsigned>(std::popcount((w.bits ^ bits) & mask));
    weighted.push_back(pr * pow_uint(p, m - diff) * pow_uint(q, diff));
  }
  const double evidence = neumaier_sum(weighted);
  if (evidence <= 0.0) return std::nullopt;

  std::vector<JointDistribution::Entry> entries;
  entries.reserve(weighted.size());
  std::vector<double> kept;
  kept.reserve(weighted.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    const double post = weighted[i] / evidence;
    if (post < kPosteriorDropThreshold) continue;
    entries.emplace_back(prior.entries()[i].first, post);
    kept.push_back(post);
  }
  const double total = neumaier_sum(kept);
  for (auto& [w, pr] : entries) pr /= total;
  return PosteriorUpdate{
      JointDistribution(prior.fact_set_ptr(), std::move(entries)), evidence};
}

}  // namespace factfuse
