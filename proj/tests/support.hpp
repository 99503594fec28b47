#pragma once

// Shared fixtures and independent oracles for the test suite.
//
// The oracles here deliberately use the most literal, slowest possible
// formulations (world-by-world sums, full answer enumeration) so that the
// library's optimized paths are checked against straight-line arithmetic.

#include <string>
#include <utility>
#include <vector>

#include "factfuse/crowd.hpp"
#include "factfuse/inference.hpp"
#include "factfuse/rng.hpp"
#include "factfuse/world.hpp"

namespace factfuse::test {

// ---------------------------------------------------------------------------
// The running example: four facts about Hong Kong with a correlated prior
// over all 16 worlds. World strings list facts left to right (fact 0 first).
// ---------------------------------------------------------------------------

FactSet golden_fact_set();
JointDistribution golden_joint();
std::vector<bool> golden_truth();  // {true, true, true, false}

// Expected answer distribution over all four facts at accuracy 0.8, keyed by
// answer string (fact 0 leftmost), published rounded to three decimals.
const std::vector<std::pair<std::string, double>>& golden_answer_table();

struct PairEntropy {
  std::uint32_t a, b;        // fact ids, a < b
  double fact_entropy;       // answer entropy at accuracy 1.0
  double task_entropy;       // answer entropy at accuracy 0.8
};

// Expected pair entropies for all six fact pairs, rounded to three decimals.
const std::vector<PairEntropy>& golden_pair_entropies();

// ---------------------------------------------------------------------------
// Random instance generators (deterministic given the caller's SplitRng).
// ---------------------------------------------------------------------------

// Product prior with marginals drawn from [0.05, 0.95]: dense over 2^n.
JointDistribution random_dense_instance(SplitRng& rng, std::size_t n);

// Sparse prior over  2 <= m <= max_worlds  distinct worlds.
JointDistribution random_sparse_instance(SplitRng& rng, std::size_t n,
                                         std::size_t max_worlds);

// Alternates dense and sparse shapes; n drawn uniformly from [n_min, n_max].
JointDistribution random_instance(SplitRng& rng, std::size_t n_min,
                                  std::size_t n_max);

// ---------------------------------------------------------------------------
// Literal oracles.
// ---------------------------------------------------------------------------

// Answer-set distribution computed world by world: for every answer pattern
// (bit p of the index is the judgment for tasks[p]) sum
// P(world) * accuracy^same * error^diff using count_agreement.
std::vector<double> answer_dist_literal(const JointDistribution& dist,
                                        const std::vector<FactId>& tasks,
                                        CrowdModel model);

// Sum over every possible answer set of P(ans) * H(posterior | ans), via
// posterior_update; inconsistent answer sets (zero evidence) contribute 0.
double expected_posterior_entropy(const JointDistribution& dist,
                                  const std::vector<FactId>& tasks,
                                  CrowdModel model);

// Directory holding the bundled data files (compile-time constant).
std::string data_dir();

}  // namespace factfuse::test
