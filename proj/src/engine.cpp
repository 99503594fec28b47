#include "factfuse/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace factfuse {

SelectorKind selector_from_name(const std::string& name) {
  if (name == "greedy") return SelectorKind::Greedy;
  if (name == "opt") return SelectorKind::Opt;
  if (name == "query") return SelectorKind::Query;
  if (name == "random") return SelectorKind::Random;
  throw std::invalid_argument("unknown selector: " + name);
}

std::string selector_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Greedy: return "greedy";
    case SelectorKind::Opt: return "opt";
    case SelectorKind::Query: return "query";
    case SelectorKind::Random: return "random";
  }
  throw std::logic_error("unreachable");
}

SimulatedCrowd::SimulatedCrowd(std::uint64_t seed, CrowdModel model)
    : seed_(seed), model_(model) {}

std::vector<bool> SimulatedCrowd::answers_for(const InstanceState& state,
                                              std::size_t /*round*/,
                                              const TaskSet& tasks) {
  if (!state.ground_truth)
    throw std::invalid_argument("instance " + state.id +
                                " has no ground truth to simulate answers");
  auto [it, inserted] =
      streams_.try_emplace(state.id, SplitRng(seed_, state.id + "/answers"));
  AnswerSet answers =
      simulate_answers(*state.ground_truth, tasks, model_, it->second);
  std::vector<bool> out;
  out.reserve(tasks.size());
  for (FactId f : tasks.facts()) out.push_back(answers.at(f));
  return out;
}

void ReplaySource::record(const std::string& instance, std::size_t round,
                          FactId fact, bool judgment) {
  answers_[{instance, round, fact.value}] = judgment;
}

std::vector<bool> ReplaySource::answers_for(const InstanceState& state,
                                            std::size_t round,
                                            const TaskSet& tasks) {
  std::vector<bool> out;
  out.reserve(tasks.size());
  for (FactId f : tasks.facts()) {
    auto it = answers_.find({state.id, round, f.value});
    if (it == answers_.end())
      throw std::invalid_argument(
          "replay log has no answer for instance " + state.id + ", round " +
          std::to_string(round) + ", fact " + std::to_string(f.value));
    out.push_back(it->second);
  }
  return out;
}

std::size_t round_task_count(std::size_t fact_count, std::size_t k,
                             std::size_t remaining_budget) {
  if (fact_count < 1 || k < 1 || remaining_budget < 1)
    throw std::invalid_argument(
        "round_task_count: fact count, k and remaining budget must be >= 1");
  return std::min({k, fact_count, remaining_budget});
}

std::vector<bool> judge_facts(const JointDistribution& dist) {
  std::vector<bool> judgments;
  judgments.reserve(dist.fact_count());
  for (std::uint32_t i = 0; i < dist.fact_count(); ++i)
    judgments.push_back(marginal_fact_prob(dist, FactId{i}) > 0.5);
  return judgments;
}

void F1Counts::add(const std::vector<bool>& predicted,
                   const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction and truth judge different facts");
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    if (predicted[i] && !truth[i]) ++fp;
    if (!predicted[i] && truth[i]) ++fn;
  }
}

double F1Counts::score() const {
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;  // nothing judged positive anywhere: exact match
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double f1_score(const std::vector<bool>& predicted,
                const std::vector<bool>& truth) {
  F1Counts counts;
  counts.add(predicted, truth);
  return counts.score();
}

TaskSet random_selection(std::size_t fact_count, std::size_t count,
                         SplitRng& rng) {
  if (count < 1 || count > fact_count)
    throw std::invalid_argument("random_selection: count out of range");
  std::vector<std::uint32_t> ids(fact_count);
  for (std::uint32_t i = 0; i < fact_count; ++i) ids[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j =
        i + rng.below(static_cast<std::uint32_t>(fact_count - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  std::vector<FactId> facts;
  facts.reserve(count);
  for (std::uint32_t id : ids) facts.push_back(FactId{id});
  return TaskSet(std::move(facts));
}

RoundLog run_round(InstanceState& state, const RoundConfig& config,
                   AnswerSource& source, std::size_t round,
                   SplitRng* random_stream) {
  RoundLog log;
  log.round = round;
  if (state.tasks_spent >= config.budget)
    throw std::logic_error("run_round called with exhausted budget");

  const std::size_t count = round_task_count(
      state.joint.fact_count(), config.k, config.budget - state.tasks_spent);

  TaskSet tasks;
  switch (config.selector) {
    case SelectorKind::Greedy:
      tasks = select_greedy(state.joint, count, config.model, config.options)
                  .tasks;
      break;
    case SelectorKind::Opt:
      tasks = select_opt(state.joint, count, config.model).tasks;
      break;
    case SelectorKind::Query:
      if (!config.foi)
        throw std::invalid_argument(
            "query selector needs facts of interest (foi)");
      tasks = select_greedy_query(state.joint, *config.foi, count, config.model)
                  .tasks;
      break;
    case SelectorKind::Random:
      if (!random_stream)
        throw std::invalid_argument(
            "random selector needs a selection stream");
      tasks = random_selection(state.joint.fact_count(), count, *random_stream);
      break;
  }

  if (tasks.empty()) {
    state.done = true;  // nothing worth asking; instance has converged
    return log;
  }

  log.tasks.assign(tasks.facts().begin(), tasks.facts().end());
  log.answers = source.answers_for(state, round, tasks);
  const AnswerSet answers(tasks, log.answers);

  auto update = posterior_update(state.joint, tasks, answers, config.model);
  if (update) {
    log.evidence = update->evidence;
    state.joint = std::move(update->posterior);
  } else {
    // Impossible answers (p_c = 1 only): keep the belief, log the rejection.
    log.evidence = 0.0;
    log.rejected = true;
  }
  state.tasks_spent += tasks.size();  // the crowd was consulted either way
  if (state.tasks_spent >= config.budget) state.done = true;

  log.utility_after = utility(state.joint);
  if (state.ground_truth) {
    F1Counts counts;
    counts.add(judge_facts(state.joint), *state.ground_truth);
    log.counts_after = counts;
    log.f1_after = counts.score();
  }
  return log;
}

RunResult run_budget(std::vector<InstanceState>& states,
                     const RoundConfig& config, AnswerSource& source) {
  if (config.budget < 1)
    throw std::invalid_argument("run_budget: budget must be >= 1");
  for (const InstanceState& s : states)
    if (auto violation = validate(s.joint))
      throw std::invalid_argument("instance " + s.id + ": " +
                                  violation->invariant + " violation (" +
                                  violation->detail + ")");

  RunResult result;
  result.logs.reserve(states.size());
  for (const InstanceState& s : states)
    result.logs.push_back(InstanceRunLog{s.id, {}});

  std::map<std::string, SplitRng> selection_streams;
  std::vector<std::optional<F1Counts>> latest_counts(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].ground_truth) {
      F1Counts counts;
      counts.add(judge_facts(states[i].joint), *states[i].ground_truth);
      latest_counts[i] = counts;
    }

  for (std::size_t round = 1;; ++round) {
    bool asked = false;
    for (std::size_t i = 0; i < states.size(); ++i) {
      InstanceState& s = states[i];
      if (s.done) continue;
      if (s.tasks_spent >= config.budget) {
        s.done = true;
        continue;
      }
      SplitRng* stream = nullptr;
      if (config.selector == SelectorKind::Random) {
        auto [it, inserted] = selection_streams.try_emplace(
            s.id, SplitRng(config.seed, s.id + "/select"));
        stream = &it->second;
      }
      RoundLog log = run_round(s, config, source, round, stream);
      if (log.tasks.empty()) continue;
      if (log.counts_after) latest_counts[i] = log.counts_after;
      result.logs[i].rounds.push_back(std::move(log));
      asked = true;
    }
    if (!asked) break;

    MetricsPoint point;
    for (const InstanceState& s : states) point.tasks_cum += s.tasks_spent;
    for (const InstanceState& s : states) point.utility_sum += utility(s.joint);
    F1Counts pooled;
    bool any_truth = false;
    for (const auto& counts : latest_counts)
      if (counts) {
        pooled.tp += counts->tp;
        pooled.fp += counts->fp;
        pooled.fn += counts->fn;
        any_truth = true;
      }
    if (any_truth) point.f1_pooled = pooled.score();
    result.metrics.trajectory.push_back(point);
  }
  return result;
}

}  // namespace factfuse
