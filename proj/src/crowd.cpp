#include "factfuse/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace factfuse {

CrowdModel::CrowdModel(double accuracy) : accuracy_(accuracy) {
  if (!(accuracy >= 0.5 && accuracy <= 1.0))
    throw std::invalid_argument("crowd accuracy must lie in [0.5, 1]");
}

double crowd_entropy(CrowdModel model) {
  const double p = model.accuracy();
  const double q = model.error();
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (q > 0.0) h -= q * std::log2(q);
  return h;
}

TaskSet::TaskSet(std::vector<FactId> facts) {
  for (FactId f : facts) add(f);
}

void TaskSet::add(FactId fact) {
  if (contains(fact))
    throw std::invalid_argument("task set already contains fact " +
                                std::to_string(fact.value));
  facts_.push_back(fact);
}

bool TaskSet::contains(FactId fact) const {
  return std::find(facts_.begin(), facts_.end(), fact) != facts_.end();
}

AnswerSet::AnswerSet(std::vector<std::pair<FactId, bool>> judgments)
    : judgments_(std::move(judgments)) {
  std::sort(judgments_.begin(), judgments_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < judgments_.size(); ++i)
    if (judgments_[i].first == judgments_[i - 1].first)
      throw std::invalid_argument("duplicate answer for fact " +
                                  std::to_string(judgments_[i].first.value));
}

AnswerSet::AnswerSet(const TaskSet& tasks, const std::vector<bool>& judgments) {
  if (tasks.size() != judgments.size())
    throw std::invalid_argument("need exactly one judgment per task");
  std::vector<std::pair<FactId, bool>> pairs;
  pairs.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    pairs.emplace_back(tasks.at(i), judgments[i]);
  *this = AnswerSet(std::move(pairs));
}

std::optional<bool> AnswerSet::find(FactId fact) const {
  auto it = std::lower_bound(
      judgments_.begin(), judgments_.end(), fact,
      [](const auto& e, FactId key) { return e.first < key; });
  if (it != judgments_.end() && it->first == fact) return it->second;
  return std::nullopt;
}

bool AnswerSet::at(FactId fact) const {
  if (auto j = find(fact)) return *j;
  throw std::out_of_range("no answer for fact " + std::to_string(fact.value));
}

bool AnswerSet::covers(const TaskSet& tasks) const {
  if (tasks.size() != judgments_.size()) return false;
  for (FactId f : tasks.facts())
    if (!find(f)) return false;
  return true;
}

Agreement count_agreement(WorldId world, const AnswerSet& answers) {
  Agreement a;
  for (const auto& [fact, judgment] : answers.judgments()) {
    if (world_bit(world, fact) == judgment)
      ++a.same;
    else
      ++a.diff;
  }
  return a;
}

void apply_answer_noise(std::span<double> probs, std::size_t axes,
                        CrowdModel model) {
  if (probs.size() != std::size_t{1} << axes)
    throw std::invalid_argument("table size must be 2^axes");
  const double p = model.accuracy();
  const double q = model.error();
  if (q == 0.0) return;  // perfectly reliable crowd: answers mirror judgments
  for (std::size_t axis = 0; axis < axes; ++axis) {
    const std::size_t stride = std::size_t{1} << axis;
    for (std::size_t base = 0; base < probs.size(); base += stride * 2) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double x0 = probs[i];
        const double x1 = probs[i + stride];
        probs[i] = p * x0 + q * x1;
        probs[i + stride] = q * x0 + p * x1;
      }
    }
  }
}

JudgmentTable answer_set_distribution(const JointDistribution& dist,
                                      const TaskSet& tasks, CrowdModel model) {
  if (tasks.empty())
    throw std::invalid_argument(
        "answer_set_distribution: task set must not be empty");
  // Noise factors depend only on the selected facts, so grouping worlds by
  // their judgment pattern on the tasks and pushing that marginal through a
  // per-fact symmetric channel reproduces the world-by-world double sum.
  JudgmentTable table = marginalize(dist, tasks.facts());
  apply_answer_noise(table.probs, tasks.size(), model);
  return table;
}

AnswerSet simulate_answers(const std::vector<bool>& truth, const TaskSet& tasks,
                           CrowdModel model, SplitRng& rng) {
  std::vector<std::pair<FactId, bool>> judgments;
  judgments.reserve(tasks.size());
  for (FactId f : tasks.facts()) {
    if (f.value >= truth.size())
      throw std::out_of_range("no ground truth for fact " +
                              std::to_string(f.value));
    const bool correct = rng.bernoulli(model.accuracy());
    judgments.emplace_back(f, correct ? truth[f.value] : !truth[f.value]);
  }
  return AnswerSet(std::move(judgments));
}

}  // namespace factfuse
