#include "factfuse/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace factfuse {

namespace {

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n)
    throw std::invalid_argument("k out of range: need 1 <= k <= " +
                                std::to_string(n));
}

double entropy_over(const JointDistribution& dist,
                    std::span<const FactId> facts, CrowdModel model) {
  JudgmentTable table = marginalize(dist, facts);
  apply_answer_noise(table.probs, facts.size(), model);
  return entropy_bits(table.probs);
}

void check_query(const JointDistribution& dist, const FoiQuery& query) {
  if (query.facts.empty())
    throw std::invalid_argument("facts of interest must not be empty");
  for (std::size_t i = 0; i < query.facts.size(); ++i) {
    if (!dist.fact_set().contains(query.facts[i]))
      throw std::out_of_range("unknown fact id " +
                              std::to_string(query.facts[i].value));
    for (std::size_t j = 0; j < i; ++j)
      if (query.facts[j] == query.facts[i])
        throw std::invalid_argument("duplicate fact of interest " +
                                    std::to_string(query.facts[i].value));
  }
}

// Joint entropy H(X_I, A_T) of the facts of interest and the answer vector.
// Starts from the judgment marginal over I ∪ T, then converts each task axis
// into an answer axis: through the symmetric channel when the task is not a
// fact of interest, by duplicating the axis (keeping the judgment and adding
// the noisy answer) when it is.
double fact_answer_entropy(const JointDistribution& dist, const FoiQuery& query,
                           const TaskSet& tasks, CrowdModel model) {
  std::vector<FactId> scope = query.facts;
  for (FactId t : tasks.facts())
    if (std::find(scope.begin(), scope.end(), t) == scope.end())
      scope.push_back(t);
  std::sort(scope.begin(), scope.end());

  JudgmentTable m = marginalize(dist, scope);
  std::vector<double> arr = std::move(m.probs);
  std::size_t dims = scope.size();
  const double p = model.accuracy();
  const double q = model.error();

  for (FactId t : tasks.facts()) {
    const std::size_t axis = static_cast<std::size_t>(
        std::find(scope.begin(), scope.end(), t) - scope.begin());
    const bool keep_judgment =
        std::find(query.facts.begin(), query.facts.end(), t) !=
        query.facts.end();
    if (!keep_judgment) {
      std::span<double> view(arr.data(), std::size_t{1} << dims);
      const std::size_t stride = std::size_t{1} << axis;
      for (std::size_t base = 0; base < view.size(); base += stride * 2) {
        for (std::size_t i = base; i < base + stride; ++i) {
          const double x0 = view[i];
          const double x1 = view[i + stride];
          view[i] = p * x0 + q * x1;
          view[i + stride] = q * x0 + p * x1;
        }
      }
    } else {
      const std::size_t size = std::size_t{1} << dims;
      std::vector<double> next(size * 2, 0.0);
      for (std::size_t idx = 0; idx < size; ++idx) {
        const double x = arr[idx];
        if (x == 0.0) continue;
        const bool judgment = (idx >> axis) & 1u;
        next[idx] += x * (judgment ? q : p);         // answer false
        next[idx + size] += x * (judgment ? p : q);  // answer true
      }
      arr = std::move(next);
      ++dims;
    }
  }
  return entropy_bits(arr);
}

}  // namespace

double task_entropy(const JointDistribution& dist, const TaskSet& tasks,
                    CrowdModel model) {
  if (tasks.empty())
    throw std::invalid_argument("task_entropy: task set must not be empty");
  return entropy_over(dist, tasks.facts(), model);
}

double gain(const JointDistribution& dist, const TaskSet& tasks,
            FactId candidate, CrowdModel model) {
  if (!dist.fact_set().contains(candidate))
    throw std::out_of_range("unknown fact id " +
                            std::to_string(candidate.value));
  if (tasks.contains(candidate))
    throw std::invalid_argument("candidate " + std::to_string(candidate.value) +
                                " is already selected");
  std::vector<FactId> extended(tasks.facts().begin(), tasks.facts().end());
  extended.push_back(candidate);
  const double with = entropy_over(dist, extended, model);
  const double base = tasks.empty() ? 0.0 : entropy_over(dist, tasks.facts(), model);
  return with - base;
}

double prune_bound(double candidate_entropy, std::size_t k,
                   std::size_t selected) {
  if (selected >= k)
    throw std::invalid_argument("prune_bound: selected must be below k");
  return candidate_entropy + static_cast<double>(k - selected - 1);
}

SelectionResult select_opt(const JointDistribution& dist, std::size_t k,
                           CrowdModel model) {
  const std::size_t n = dist.fact_count();
  check_k(k, n);

  SelectionResult best;  // the empty set, entropy 0
  std::vector<FactId> combo;
  for (std::size_t size = 1; size <= k; ++size) {
    combo.assign(size, FactId{0});
    // lexicographic enumeration of all id combinations of this size
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      for (std::size_t i = 0; i < size; ++i)
        combo[i] = FactId{static_cast<std::uint32_t>(idx[i])};
      const double h = entropy_over(dist, combo, model);
      if (h > best.task_entropy_bits + kGainEpsilon) {
        best.tasks = TaskSet(combo);
        best.task_entropy_bits = h;
      }
      // advance the combination
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == n - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
  }

  best.k_star = best.tasks.size();
  best.gains.clear();
  double prev = 0.0;
  for (std::size_t i = 0; i < best.tasks.size(); ++i) {
    std::span<const FactId> prefix = best.tasks.facts().subspan(0, i + 1);
    const double h = entropy_over(dist, prefix, model);
    best.gains.push_back(h - prev);
    prev = h;
  }
  return best;
}

SelectionResult select_greedy(const JointDistribution& dist, std::size_t k,
                              CrowdModel model, SelectionOptions options) {
  const std::size_t n = dist.fact_count();
  check_k(k, n);

  AnswerTable table;
  Partition current = Partition::initial({});
  if (options.preprocess) {
    table = precompute_answer_table(dist, model);
    current = Partition::initial(table);
  }

  SelectionResult result;
  double current_entropy = 0.0;
  std::vector<bool> pruned(n, false);
  std::vector<FactId> extended;

  while (result.tasks.size() < k) {
    double best_entropy = -std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    bool found = false;
    for (std::uint32_t j = 0; j < n; ++j) {
      const FactId candidate{j};
      if (pruned[j] || result.tasks.contains(candidate)) continue;
      double h;
      if (options.preprocess) {
        h = entropy_bits(partition_marginal(table, current, candidate)
                             .second.probs);
      } else {
        extended.assign(result.tasks.facts().begin(),
                        result.tasks.facts().end());
        extended.push_back(candidate);
        h = entropy_over(dist, extended, model);
      }
      if (!found || h > best_entropy + kGainEpsilon) {
        best_entropy = h;
        best_id = j;
        found = true;
      } else if (options.prune &&
                 prune_bound(h, k, result.tasks.size()) <
                     best_entropy - kGainEpsilon) {
        pruned[j] = true;
        ++result.pruned_count;
      }
    }
    if (!found || best_entropy - current_entropy <= kGainEpsilon) break;
    result.gains.push_back(best_entropy - current_entropy);
    result.tasks.add(FactId{best_id});
    current_entropy = best_entropy;
    if (options.preprocess)
      current = partition_marginal(table, current, FactId{best_id}).first;
  }

  result.task_entropy_bits = current_entropy;
  result.k_star = result.tasks.size();
  return result;
}

AnswerTable precompute_answer_table(const JointDistribution& dist,
                                    CrowdModel model) {
  const std::size_t n = dist.fact_count();
  std::vector<double> dense(std::size_t{1} << n, 0.0);
  for (const auto& [w, p] : dist.entries()) dense[w.bits] += p;
  apply_answer_noise(dense, n, model);
  AnswerTable table;
  table.fact_count = n;
  for (std::size_t a = 0; a < dense.size(); ++a)
    if (dense[a] > 0.0)
      table.entries.emplace_back(WorldId{static_cast<std::uint32_t>(a)},
                                 dense[a]);
  return table;
}

Partition Partition::initial(const AnswerTable& table) {
  Partition p;
  p.row_count_ = table.entries.size();
  std::vector<std::uint32_t> all(table.entries.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  p.blocks_.push_back(std::move(all));
  std::vector<double> ps;
  ps.reserve(table.entries.size());
  for (const auto& [a, prob] : table.entries) ps.push_back(prob);
  p.sums_.push_back(neumaier_sum(ps));
  return p;
}

bool Partition::in_scope(FactId fact) const {
  return std::find(scope_.begin(), scope_.end(), fact) != scope_.end();
}

std::pair<Partition, JudgmentTable> partition_marginal(const AnswerTable& table,
                                                       const Partition& partition,
                                                       FactId next_task) {
  if (next_task.value >= table.fact_count)
    throw std::out_of_range("unknown fact id " +
                            std::to_string(next_task.value));
  if (partition.in_scope(next_task))
    throw std::invalid_argument("task " + std::to_string(next_task.value) +
                                " is already in the defining set");
  if (partition.row_count_ != table.entries.size())
    throw std::invalid_argument("partition does not belong to this table");

  const std::size_t m = partition.scope_.size();
  Partition refined;
  refined.row_count_ = partition.row_count_;
  refined.scope_ = partition.scope_;
  refined.scope_.push_back(next_task);
  refined.blocks_.assign(std::size_t{2} << m, {});
  refined.sums_.assign(std::size_t{2} << m, 0.0);

  std::vector<double> ps;
  for (std::size_t b = 0; b < partition.blocks_.size(); ++b) {
    auto& zeros = refined.blocks_[b];
    auto& ones = refined.blocks_[b | (std::size_t{1} << m)];
    for (std::uint32_t row : partition.blocks_[b]) {
      const bool bit = world_bit(table.entries[row].first, next_task);
      (bit ? ones : zeros).push_back(row);
    }
    for (std::size_t half = 0; half < 2; ++half) {
      const auto& rows = half ? ones : zeros;
      ps.clear();
      ps.reserve(rows.size());
      for (std::uint32_t row : rows) ps.push_back(table.entries[row].second);
      refined.sums_[b | (half << m)] = neumaier_sum(ps);
    }
  }

  JudgmentTable marginal;
  marginal.scope = refined.scope_;
  marginal.probs.assign(refined.sums_.begin(), refined.sums_.end());
  return {std::move(refined), std::move(marginal)};
}

double query_objective(const JointDistribution& dist, const FoiQuery& query,
                       const TaskSet& tasks, CrowdModel model) {
  check_query(dist, query);
  if (tasks.empty()) {
    std::vector<FactId> foi = query.facts;
    std::sort(foi.begin(), foi.end());
    return -entropy_bits(marginalize(dist, foi).probs);
  }
  const double h_tasks = task_entropy(dist, tasks, model);
  return h_tasks - fact_answer_entropy(dist, query, tasks, model);
}

double query_gain(const JointDistribution& dist, const FoiQuery& query,
                  const TaskSet& tasks, FactId candidate, CrowdModel model) {
  if (!dist.fact_set().contains(candidate))
    throw std::out_of_range("unknown fact id " +
                            std::to_string(candidate.value));
  if (tasks.contains(candidate))
    throw std::invalid_argument("candidate " + std::to_string(candidate.value) +
                                " is already selected");
  TaskSet extended(
      std::vector<FactId>(tasks.facts().begin(), tasks.facts().end()));
  extended.add(candidate);
  return query_objective(dist, query, extended, model) -
         query_objective(dist, query, tasks, model);
}

SelectionResult select_greedy_query(const JointDistribution& dist,
                                    const FoiQuery& query, std::size_t k,
                                    CrowdModel model) {
  const std::size_t n = dist.fact_count();
  check_k(k, n);
  check_query(dist, query);

  SelectionResult result;
  double current_objective = query_objective(dist, query, result.tasks, model);
  while (result.tasks.size() < k) {
    double best_objective = -std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    bool found = false;
    TaskSet extended;
    for (std::uint32_t j = 0; j < n; ++j) {
      const FactId candidate{j};
      if (result.tasks.contains(candidate)) continue;
      extended = TaskSet(std::vector<FactId>(result.tasks.facts().begin(),
                                             result.tasks.facts().end()));
      extended.add(candidate);
      const double obj = query_objective(dist, query, extended, model);
      if (!found || obj > best_objective + kGainEpsilon) {
        best_objective = obj;
        best_id = j;
        found = true;
      }
    }
    if (!found || best_objective - current_objective <= kGainEpsilon) break;
    result.gains.push_back(best_objective - current_objective);
    result.tasks.add(FactId{best_id});
    current_objective = best_objective;
  }

  result.task_entropy_bits =
      result.tasks.empty() ? 0.0 : task_entropy(dist, result.tasks, model);
  result.k_star = result.tasks.size();
  return result;
}

}  // namespace factfuse
