#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "factfuse/crowd.hpp"
#include "factfuse/world.hpp"

namespace factfuse {

// Entropy gains within this epsilon of zero count as zero: they neither
// justify accepting a task nor survive a tie-break.
inline constexpr double kGainEpsilon = 1e-12;

struct SelectionOptions {
  bool prune = false;       // drop provably dominated candidates
  bool preprocess = false;  // evaluate via the precomputed answer table
};

struct SelectionResult {
  TaskSet tasks;                  // in selection order
  double task_entropy_bits = 0.0; // H of the answer distribution over tasks
  std::size_t k_star = 0;         // number of tasks actually selected
  std::vector<double> gains;      // one accepted step gain per task
  std::size_t pruned_count = 0;   // candidates permanently pruned
};

// H of the crowd's joint answer vector for the task set, in bits.
double task_entropy(const JointDistribution& dist, const TaskSet& tasks,
                    CrowdModel model);

// Step gain of adding a candidate: H(T ∪ {c}) - H(T); H of the empty set is 0.
double gain(const JointDistribution& dist, const TaskSet& tasks,
            FactId candidate, CrowdModel model);

// Upper bound on the answer entropy of any feasible completion through this
// candidate: each of the k - selected - 1 remaining binary answers can add at
// most one bit. Candidates whose bound stays below the iteration's best are
// dominated and can be skipped in all later iterations.
double prune_bound(double candidate_entropy, std::size_t k,
                   std::size_t selected);

// Exhaustive argmax of answer entropy over task sets of size at most k,
// preferring higher entropy, then fewer tasks, then the lexicographically
// smallest id list. Cost grows combinatorially; intended for desk-scale k, n.
SelectionResult select_opt(const JointDistribution& dist, std::size_t k,
                           CrowdModel model);

// Greedy argmax: repeatedly add the candidate with the largest entropy gain,
// smallest id on ties, stopping early once no candidate gains more than
// kGainEpsilon. Options toggle pruning and answer-table preprocessing; all
// four combinations select identical task lists.
SelectionResult select_greedy(const JointDistribution& dist, std::size_t k,
                              CrowdModel model, SelectionOptions options = {});

// Joint distribution of the crowd's answers to every fact, sparse over n-bit
// answer vectors (WorldId reused as the vector type), sorted by bits.
struct AnswerTable {
  std::size_t fact_count = 0;
  std::vector<std::pair<WorldId, double>> entries;
};

AnswerTable precompute_answer_table(const JointDistribution& dist,
                                    CrowdModel model);

// Partition of an AnswerTable's rows by answer pattern on a defining task
// set: block b holds the rows whose pattern equals b (bit p of b is the
// answer for scope[p]), so block sums are the marginal answer distribution
// over the scope. Refining by one more task reuses all previous grouping
// work, which is what makes greedy iterations cheap after preprocessing.
class Partition {
 public:
  static Partition initial(const AnswerTable& table);

  std::span<const FactId> scope() const { return scope_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::uint32_t>& block(std::size_t b) const {
    return blocks_[b];
  }
  std::span<const double> sums() const { return sums_; }
  bool in_scope(FactId fact) const;

 private:
  Partition() = default;
  friend std::pair<Partition, JudgmentTable> partition_marginal(
      const AnswerTable& table, const Partition& partition, FactId next_task);

  std::vector<FactId> scope_;
  std::vector<std::vector<std::uint32_t>> blocks_;  // row indices, by pattern
  std::vector<double> sums_;
  std::size_t row_count_ = 0;  // sanity link back to the source table
};

// Split every block by the next task's answer bit; returns the refined
// partition and the marginal over scope ∪ {next_task}.
std::pair<Partition, JudgmentTable> partition_marginal(const AnswerTable& table,
                                                       const Partition& partition,
                                                       FactId next_task);

// Facts the caller actually cares about (facts of interest).
struct FoiQuery {
  std::vector<FactId> facts;
};

// Query-aware utility of a task set: Q(I|T) = H(T) - H(I, T), the negated
// expected posterior entropy of the facts of interest after seeing answers.
double query_objective(const JointDistribution& dist, const FoiQuery& query,
                       const TaskSet& tasks, CrowdModel model);

// Step gain of a candidate under the query objective.
double query_gain(const JointDistribution& dist, const FoiQuery& query,
                  const TaskSet& tasks, FactId candidate, CrowdModel model);

// Greedy selection driven by the query objective. Candidates range over all
// facts, not just the facts of interest; with the FOI equal to the whole fact
// set this reduces to select_greedy (every step gain shifts by exactly one
// crowd-answer entropy, so the argmax sequence is unchanged).
SelectionResult select_greedy_query(const JointDistribution& dist,
                                    const FoiQuery& query, std::size_t k,
                                    CrowdModel model);

}  // namespace factfuse
