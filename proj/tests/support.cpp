#include "support.hpp"

#include <cmath>
#include <set>

namespace factfuse::test {

FactSet golden_fact_set() {
  return FactSet({
      Fact{FactId{0}, "Hong Kong", "Continent", "Asia"},
      Fact{FactId{1}, "Hong Kong", "Population", ">=500,000"},
      Fact{FactId{2}, "Hong Kong", "Major Ethnic Group", "Chinese"},
      Fact{FactId{3}, "Hong Kong", "Continent", "Europe"},
  });
}

JointDistribution golden_joint() {
  const std::vector<std::pair<std::string, double>> worlds = {
      {"0000", 0.03}, {"0001", 0.06}, {"0010", 0.07}, {"0011", 0.04},
      {"0100", 0.09}, {"0101", 0.01}, {"0110", 0.11}, {"0111", 0.09},
      {"1000", 0.04}, {"1001", 0.04}, {"1010", 0.04}, {"1011", 0.05},
      {"1100", 0.06}, {"1101", 0.09}, {"1110", 0.07}, {"1111", 0.11},
  };
  std::vector<JointDistribution::Entry> entries;
  entries.reserve(worlds.size());
  for (const auto& [bits, p] : worlds)
    entries.emplace_back(world_from_string(bits, 4), p);
  return JointDistribution(golden_fact_set(), std::move(entries));
}

std::vector<bool> golden_truth() { return {true, true, true, false}; }

const std::vector<std::pair<std::string, double>>& golden_answer_table() {
  static const std::vector<std::pair<std::string, double>> table = {
      {"0000", 0.049}, {"0001", 0.050}, {"0010", 0.063}, {"0011", 0.055},
      {"0100", 0.071}, {"0101", 0.049}, {"0110", 0.087}, {"0111", 0.077},
      {"1000", 0.047}, {"1001", 0.051}, {"1010", 0.052}, {"1011", 0.056},
      {"1100", 0.065}, {"1101", 0.071}, {"1110", 0.073}, {"1111", 0.085},
  };
  return table;
}

const std::vector<PairEntropy>& golden_pair_entropies() {
  static const std::vector<PairEntropy> table = {
      {0, 1, 1.948, 1.982}, {0, 2, 1.977, 1.993}, {0, 3, 1.976, 1.997},
      {1, 2, 1.929, 1.975}, {1, 3, 1.949, 1.982}, {2, 3, 1.981, 1.993},
  };
  return table;
}

namespace {

FactSet synthetic_fact_set(std::size_t n) {
  std::vector<Fact> facts;
  facts.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    facts.push_back(Fact{FactId{static_cast<std::uint32_t>(j)}, "entity",
                         "attr-" + std::to_string(j),
                         "value-" + std::to_string(j)});
  return FactSet(std::move(facts));
}

}  // namespace

JointDistribution random_dense_instance(SplitRng& rng, std::size_t n) {
  std::vector<double> marginals(n);
  for (double& p : marginals) p = 0.05 + 0.9 * rng.next_unit();
  return independent_prior(synthetic_fact_set(n), marginals);
}

JointDistribution random_sparse_instance(SplitRng& rng, std::size_t n,
                                         std::size_t max_worlds) {
  const std::uint64_t space = std::uint64_t{1} << n;
  const std::size_t want =
      2 + rng.below(std::min<std::uint64_t>(space, max_worlds) - 1);
  std::set<std::uint32_t> worlds;
  while (worlds.size() < want)
    worlds.insert(static_cast<std::uint32_t>(rng.below(space)));
  std::vector<JointDistribution::Entry> entries;
  entries.reserve(want);
  double total = 0.0;
  for (std::uint32_t w : worlds) {
    const double weight = 0.01 + rng.next_unit();
    entries.emplace_back(WorldId{w}, weight);
    total += weight;
  }
  for (auto& [w, p] : entries) p /= total;
  return JointDistribution(synthetic_fact_set(n), std::move(entries));
}

JointDistribution random_instance(SplitRng& rng, std::size_t n_min,
                                  std::size_t n_max) {
  const std::size_t n = n_min + rng.below(n_max - n_min + 1);
  if (rng.bernoulli(0.5)) return random_dense_instance(rng, n);
  return random_sparse_instance(rng, n, 40);
}

std::vector<double> answer_dist_literal(const JointDistribution& dist,
                                        const std::vector<FactId>& tasks,
                                        CrowdModel model) {
  const std::size_t m = tasks.size();
  std::vector<double> out(std::size_t{1} << m, 0.0);
  TaskSet task_set(tasks);
  for (std::size_t pattern = 0; pattern < out.size(); ++pattern) {
    std::vector<bool> judgments(m);
    for (std::size_t p = 0; p < m; ++p) judgments[p] = (pattern >> p) & 1u;
    const AnswerSet answers(task_set, judgments);
    double sum = 0.0;
    for (const auto& [world, prob] : dist.entries()) {
      const Agreement agreement = count_agreement(world, answers);
      sum += prob * std::pow(model.accuracy(), double(agreement.same)) *
             std::pow(model.error(), double(agreement.diff));
    }
    out[pattern] = sum;
  }
  return out;
}

double expected_posterior_entropy(const JointDistribution& dist,
                                  const std::vector<FactId>& tasks,
                                  CrowdModel model) {
  const std::size_t m = tasks.size();
  const TaskSet task_set(tasks);
  double expected = 0.0;
  for (std::size_t pattern = 0; pattern < (std::size_t{1} << m); ++pattern) {
    std::vector<bool> judgments(m);
    for (std::size_t p = 0; p < m; ++p) judgments[p] = (pattern >> p) & 1u;
    const AnswerSet answers(task_set, judgments);
    const auto update = posterior_update(dist, task_set, answers, model);
    if (!update) continue;  // zero evidence contributes nothing
    expected += update->evidence * entropy(update->posterior);
  }
  return expected;
}

std::string data_dir() { return FACTFUSE_DATA_DIR; }

}  // namespace factfuse::test
