#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "factfuse/rng.hpp"
#include "factfuse/world.hpp"

namespace factfuse {

// Noisy crowd: every answer is independently correct with probability p_c.
// Accuracies below 0.5 are rejected (answers would be adversarial, not noisy).
class CrowdModel {
 public:
  explicit CrowdModel(double accuracy);

  double accuracy() const { return accuracy_; }
  double error() const { return 1.0 - accuracy_; }

 private:
  double accuracy_;
};

// Entropy of a single crowd answer in bits: -p log p - (1-p) log (1-p).
double crowd_entropy(CrowdModel model);

// Ordered, duplicate-free set of facts posed to the crowd in one round.
class TaskSet {
 public:
  TaskSet() = default;
  explicit TaskSet(std::vector<FactId> facts);

  void add(FactId fact);  // rejects duplicates
  bool contains(FactId fact) const;
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  std::span<const FactId> facts() const { return facts_; }
  FactId at(std::size_t pos) const { return facts_[pos]; }

 private:
  std::vector<FactId> facts_;
};

// Crowd judgments keyed by fact id (true = the crowd said the fact holds).
class AnswerSet {
 public:
  AnswerSet() = default;
  explicit AnswerSet(std::vector<std::pair<FactId, bool>> judgments);
  // Judgments aligned with the task order.
  AnswerSet(const TaskSet& tasks, const std::vector<bool>& judgments);

  std::size_t size() const { return judgments_.size(); }
  std::optional<bool> find(FactId fact) const;
  bool at(FactId fact) const;  // throws on missing fact
  std::span<const std::pair<FactId, bool>> judgments() const {
    return judgments_;
  }
  // True when the answered facts are exactly the given tasks.
  bool covers(const TaskSet& tasks) const;

 private:
  std::vector<std::pair<FactId, bool>> judgments_;  // sorted by fact id
};

struct Agreement {
  std::size_t same = 0;
  std::size_t diff = 0;
};

// How many answered facts agree/disagree with the world's judgments.
// Only answered facts are counted.
Agreement count_agreement(WorldId world, const AnswerSet& answers);

// In-place binary symmetric channel: turns a judgment table over some facts
// into the distribution of crowd answers about those facts.
void apply_answer_noise(std::span<double> probs, std::size_t axes,
                        CrowdModel model);

// Distribution of the crowd's joint answer vector for a task set: each world
// contributes P(world) * p_c^same * (1-p_c)^diff to every answer vector.
JudgmentTable answer_set_distribution(const JointDistribution& dist,
                                      const TaskSet& tasks, CrowdModel model);

// One simulated crowd response per task: correct with probability p_c,
// flipped otherwise. truth[i] is the ground-truth judgment of fact i.
AnswerSet simulate_answers(const std::vector<bool>& truth, const TaskSet& tasks,
                           CrowdModel model, SplitRng& rng);

}  // namespace factfuse
