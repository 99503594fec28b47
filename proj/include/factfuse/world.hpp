#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace factfuse {

// A fact is a (subject, predicate, object) triple whose truth is uncertain.
// Ids are dense and 0-based; fact i owns bit i of a WorldId.
struct FactId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(FactId, FactId) = default;
};

struct Fact {
  FactId id;
  std::string subject;
  std::string predicate;
  std::string object;
};

// One possible world: bit i set means fact i holds in that world.
struct WorldId {
  std::uint32_t bits = 0;
  friend constexpr auto operator<=>(WorldId, WorldId) = default;
};

inline constexpr std::size_t kDefaultMaxFacts = 20;

// Absolute tolerance on |sum - 1| for any probability table.
inline constexpr double kSumTolerance = 1e-9;

inline bool world_bit(WorldId w, FactId f) { return (w.bits >> f.value) & 1u; }

// Textual form: n characters of 0/1, leftmost character is fact 0.
std::string world_to_string(WorldId w, std::size_t fact_count);
WorldId world_from_string(std::string_view s, std::size_t fact_count);

// The universe of facts an instance reasons about. Ids must be exactly
// 0..n-1 in order; duplicate triples and all-empty triples are rejected.
class FactSet {
 public:
  explicit FactSet(std::vector<Fact> facts,
                   std::size_t max_facts = kDefaultMaxFacts);

  std::size_t size() const { return facts_.size(); }
  const Fact& fact(FactId id) const;
  bool contains(FactId id) const { return id.value < facts_.size(); }
  std::span<const Fact> facts() const { return facts_; }

 private:
  std::vector<Fact> facts_;
};

struct InvariantViolation {
  std::string invariant;  // "nonnegativity" or "normalization"
  double magnitude = 0.0;
  std::string detail;
};

// Sparse joint distribution over the 2^n possible worlds. Entries are kept
// sorted by world bits; absent worlds have probability zero. Construction
// enforces structure (world range, no duplicate worlds, finite values);
// numeric invariants are reported by validate() so that malformed inputs can
// be inspected rather than silently rejected.
class JointDistribution {
 public:
  using Entry = std::pair<WorldId, double>;

  JointDistribution(FactSet fact_set, std::vector<Entry> entries);
  JointDistribution(std::shared_ptr<const FactSet> fact_set,
                    std::vector<Entry> entries);

  const FactSet& fact_set() const { return *fact_set_; }
  std::shared_ptr<const FactSet> fact_set_ptr() const { return fact_set_; }
  std::size_t fact_count() const { return fact_set_->size(); }
  std::span<const Entry> entries() const { return entries_; }

  // Probability of a world; zero when absent from the sparse map.
  double prob(WorldId w) const;

  // Copy rescaled so probabilities sum to exactly 1; total mass must be > 0.
  JointDistribution normalized() const;

 private:
  std::shared_ptr<const FactSet> fact_set_;
  std::vector<Entry> entries_;
};

// Dense probability table over the 2^|scope| judgment vectors of an ordered
// fact list: bit p of a table index is the judgment of scope[p].
struct JudgmentTable {
  std::vector<FactId> scope;
  std::vector<double> probs;
};

// Compensated (Neumaier) summation; keeps normalization checks stable for
// tables with up to 2^20 entries.
double neumaier_sum(std::span<const double> xs);

// Shannon entropy in bits with the 0*log(0) = 0 convention. Throws if the
// table has a negative entry or does not sum to 1 within kSumTolerance.
double entropy_bits(std::span<const double> probs);

double entropy(const JointDistribution& dist);

// Utility of a belief state: Q(F) = -H(F).
double utility(const JointDistribution& dist);

// First violated numeric invariant, or nullopt when the distribution is valid.
std::optional<InvariantViolation> validate(const JointDistribution& dist);

// P(fact is true) under the joint. Throws on unknown fact ids.
double marginal_fact_prob(const JointDistribution& dist, FactId fact);

// Marginal distribution over the judgment vectors of a non-empty, duplicate-
// free subset of facts, in the order given.
JudgmentTable marginalize(const JointDistribution& dist,
                          std::span<const FactId> subset);

// Product distribution from independent per-fact marginals; marginals[i] is
// P(fact i is true). Worlds with zero probability are omitted.
JointDistribution independent_prior(FactSet fact_set,
                                    std::span<const double> marginals);

}  // namespace factfuse
