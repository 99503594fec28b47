#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "factfuse/inference.hpp"
#include "factfuse/rng.hpp"
#include "factfuse/selection.hpp"

namespace factfuse {

enum class SelectorKind { Greedy, Opt, Query, Random };

SelectorKind selector_from_name(const std::string& name);
std::string selector_name(SelectorKind kind);

// One uncertain-book instance evolving across rounds.
struct InstanceState {
  std::string id;
  JointDistribution joint;
  std::optional<std::vector<bool>> ground_truth;  // judgment per fact
  std::size_t tasks_spent = 0;
  bool done = false;
};

struct RoundConfig {
  SelectorKind selector = SelectorKind::Greedy;
  std::size_t k = 1;       // tasks per round
  std::size_t budget = 0;  // total tasks per instance
  CrowdModel model{0.8};
  std::uint64_t seed = 0;
  SelectionOptions options;
  std::optional<FoiQuery> foi;  // required for the query selector
};

struct F1Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  void add(const std::vector<bool>& predicted, const std::vector<bool>& truth);
  double score() const;  // 2tp / (2tp + fp + fn); 1 when nothing to judge
};

struct RoundLog {
  std::size_t round = 0;           // 1-based
  std::vector<FactId> tasks;       // selection order
  std::vector<bool> answers;       // aligned with tasks
  double evidence = 1.0;           // P(answers) before the update
  bool rejected = false;           // inconsistent evidence; belief unchanged
  double utility_after = 0.0;
  std::optional<double> f1_after;      // present when ground truth is known
  std::optional<F1Counts> counts_after;  // judgment counts behind f1_after
};

struct MetricsPoint {
  std::size_t tasks_cum = 0;  // tasks asked so far, summed over instances
  double utility_sum = 0.0;   // plain sum of per-instance utilities
  std::optional<double> f1_pooled;  // micro-averaged over all judged facts
};

struct Metrics {
  std::vector<MetricsPoint> trajectory;  // one point per executed round
};

struct InstanceRunLog {
  std::string instance_id;
  std::vector<RoundLog> rounds;
};

struct RunResult {
  Metrics metrics;
  std::vector<InstanceRunLog> logs;
};

// Where a round's answers come from: a simulated crowd or a recorded log.
class AnswerSource {
 public:
  virtual ~AnswerSource() = default;
  // Judgments for the round's tasks, in task order.
  virtual std::vector<bool> answers_for(const InstanceState& state,
                                        std::size_t round,
                                        const TaskSet& tasks) = 0;
};

// Draws answers from per-instance random substreams so results do not depend
// on how instances are interleaved. Requires ground truth on every instance.
class SimulatedCrowd : public AnswerSource {
 public:
  SimulatedCrowd(std::uint64_t seed, CrowdModel model);
  std::vector<bool> answers_for(const InstanceState& state, std::size_t round,
                                const TaskSet& tasks) override;

 private:
  std::uint64_t seed_;
  CrowdModel model_;
  std::map<std::string, SplitRng> streams_;
};

// Replays previously recorded (round, fact, judgment) triples; any answer
// missing from the record is an error.
class ReplaySource : public AnswerSource {
 public:
  void record(const std::string& instance, std::size_t round, FactId fact,
              bool judgment);
  std::vector<bool> answers_for(const InstanceState& state, std::size_t round,
                                const TaskSet& tasks) override;

 private:
  std::map<std::tuple<std::string, std::size_t, std::uint32_t>, bool> answers_;
};

// Tasks to ask this round: min(k, number of facts, remaining budget).
std::size_t round_task_count(std::size_t fact_count, std::size_t k,
                             std::size_t remaining_budget);

// Hard judgment per fact: true iff its marginal exceeds 0.5 (ties are false).
std::vector<bool> judge_facts(const JointDistribution& dist);

double f1_score(const std::vector<bool>& predicted,
                const std::vector<bool>& truth);

// Uniform sample of `count` distinct facts, returned in ascending id order.
TaskSet random_selection(std::size_t fact_count, std::size_t count,
                         SplitRng& rng);

// One select-collect-update cycle. Asks at most round_task_count tasks (the
// selector may return fewer; zero marks the instance done), merges the
// answers, and charges the budget — also for rejected rounds, since the crowd
// was consulted. random_stream is only needed for the random selector.
RoundLog run_round(InstanceState& state, const RoundConfig& config,
                   AnswerSource& source, std::size_t round,
                   SplitRng* random_stream);

// Multi-round driver over independent instances: every instance runs its
// round, then a metrics point is recorded; stops when no instance can ask.
RunResult run_budget(std::vector<InstanceState>& states,
                     const RoundConfig& config, AnswerSource& source);

}  // namespace factfuse
