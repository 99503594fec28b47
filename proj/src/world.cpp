#include "factfuse/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace factfuse {

std::string world_to_string(WorldId w, std::size_t fact_count) {
  std::string s(fact_count, '0');
  for (std::size_t i = 0; i < fact_count; ++i)
    if ((w.bits >> i) & 1u) s[i] = '1';
  return s;
}

WorldId world_from_string(std::string_view s, std::size_t fact_count) {
  if (s.size() != fact_count)
    throw std::invalid_argument("world string must have one character per fact");
  WorldId w;
  for (std::size_t i = 0; i < fact_count; ++i) {
    if (s[i] == '1')
      w.bits |= 1u << i;
    else if (s[i] != '0')
      throw std::invalid_argument("world string must contain only 0 or 1");
  }
  return w;
}

FactSet::FactSet(std::vector<Fact> facts, std::size_t max_facts)
    : facts_(std::move(facts)) {
  if (facts_.empty()) throw std::invalid_argument("fact set must not be empty");
  if (facts_.size() > max_facts)
    throw std::invalid_argument("fact set exceeds the configured maximum of " +
                                std::to_string(max_facts) + " facts");
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    const Fact& f = facts_[i];
    if (f.id.value != i)
      throw std::invalid_argument("fact ids must be 0..n-1 in order");
    if (f.subject.empty() && f.predicate.empty() && f.object.empty())
      throw std::invalid_argument("fact triple must not be empty");
    for (std::size_t j = 0; j < i; ++j) {
      const Fact& g = facts_[j];
      if (g.subject == f.subject && g.predicate == f.predicate &&
          g.object == f.object)
        throw std::invalid_argument("duplicate fact triple: " + f.subject + "/" +
                                    f.predicate + "/" + f.object);
    }
  }
}

const Fact& FactSet::fact(FactId id) const {
  if (!contains(id))
    throw std::out_of_range("unknown fact id " + std::to_string(id.value));
  return facts_[id.value];
}

JointDistribution::JointDistribution(FactSet fact_set, std::vector<Entry> entries)
    : JointDistribution(std::make_shared<const FactSet>(std::move(fact_set)),
                        std::move(entries)) {}

JointDistribution::JointDistribution(std::shared_ptr<const FactSet> fact_set,
                                     std::vector<Entry> entries)
    : fact_set_(std::move(fact_set)), entries_(std::move(entries)) {
  if (!fact_set_) throw std::invalid_argument("fact set must not be null");
  if (entries_.empty())
    throw std::invalid_argument("distribution must have at least one world");
  const std::size_t n = fact_set_->size();
  const std::uint64_t world_count = 1ull << n;
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  WorldId prev{};
  bool first = true;
  for (const Entry& e : entries_) {
    if (e.first.bits >= world_count)
      throw std::invalid_argument("world " + std::to_string(e.first.bits) +
                                  " out of range for " + std::to_string(n) +
                                  " facts");
    if (!std::isfinite(e.second))
      throw std::invalid_argument("world probability must be finite");
    if (!first && e.first == prev)
      throw std::invalid_argument("duplicate world " +
                                  world_to_string(e.first, n));
    prev = e.first;
    first = false;
  }
}

double JointDistribution::prob(WorldId w) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), w,
      [](const Entry& e, WorldId key) { return e.first < key; });
  if (it != entries_.end() && it->first == w) return it->second;
  return 0.0;
}

JointDistribution JointDistribution::normalized() const {
  std::vector<double> ps;
  ps.reserve(entries_.size());
  for (const Entry& e : entries_) ps.push_back(e.second);
  const double total = neumaier_sum(ps);
  if (!(total > 0.0))
    throw std::domain_error("cannot normalize a distribution with zero mass");
  std::vector<Entry> scaled = entries_;
  for (Entry& e : scaled) e.second /= total;
  return JointDistribution(fact_set_, std::move(scaled));
}

double neumaier_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double entropy_bits(std::span<const double> probs) {
  double h = 0.0, sum = 0.0, comp = 0.0;
  for (double p : probs) {
    if (p < 0.0)
      throw std::invalid_argument("invalid table: negative probability");
    if (p > 0.0) h -= p * std::log2(p);
    const double t = sum + p;
    if (sum >= p)
      comp += (sum - t) + p;
    else
      comp += (p - t) + sum;
    sum = t;
  }
  if (std::abs(sum + comp - 1.0) > kSumTolerance)
    throw std::invalid_argument("invalid table: probabilities do not sum to 1");
  return h;
}

double entropy(const JointDistribution& dist) {
  std::vector<double> ps;
  ps.reserve(dist.entries().size());
  for (const auto& [w, p] : dist.entries()) ps.push_back(p);
  return entropy_bits(ps);
}

double utility(const JointDistribution& dist) { return -entropy(dist); }

std::optional<InvariantViolation> validate(const JointDistribution& dist) {
  std::vector<double> ps;
  ps.reserve(dist.entries().size());
  for (const auto& [w, p] : dist.entries()) {
    if (p < 0.0)
      return InvariantViolation{
          "nonnegativity", -p,
          "world " + world_to_string(w, dist.fact_count()) +
              " has negative probability"};
    ps.push_back(p);
  }
  const double sum = neumaier_sum(ps);
  if (std::abs(sum - 1.0) > kSumTolerance)
    return InvariantViolation{"normalization", std::abs(sum - 1.0),
                              "probabilities sum to " + std::to_string(sum)};
  return std::nullopt;
}

double marginal_fact_prob(const JointDistribution& dist, FactId fact) {
  if (!dist.fact_set().contains(fact))
    throw std::out_of_range("unknown fact id " + std::to_string(fact.value));
  std::vector<double> ps;
  for (const auto& [w, p] : dist.entries())
    if (world_bit(w, fact)) ps.push_back(p);
  return neumaier_sum(ps);
}

JudgmentTable marginalize(const JointDistribution& dist,
                          std::span<const FactId> subset) {
  if (subset.empty())
    throw std::invalid_argument("marginalize: subset must not be empty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (!dist.fact_set().contains(subset[i]))
      throw std::out_of_range("unknown fact id " +
                              std::to_string(subset[i].value));
    for (std::size_t j = 0; j < i; ++j)
      if (subset[j] == subset[i])
        throw std::invalid_argument("marginalize: duplicate fact id " +
                                    std::to_string(subset[i].value));
  }
  JudgmentTable table;
  table.scope.assign(subset.begin(), subset.end());
  table.probs.assign(std::size_t{1} << subset.size(), 0.0);
  for (const auto& [w, p] : dist.entries()) {
    std::uint32_t v = 0;
    for (std::size_t pos = 0; pos < subset.size(); ++pos)
      v |= static_cast<std::uint32_t>(world_bit(w, subset[pos])) << pos;
    table.probs[v] += p;
  }
  return table;
}

JointDistribution independent_prior(FactSet fact_set,
                                    std::span<const double> marginals) {
  if (marginals.size() != fact_set.size())
    throw std::invalid_argument("need exactly one marginal per fact");
  for (double m : marginals)
    if (!(m >= 0.0 && m <= 1.0))
      throw std::invalid_argument("marginal probability outside [0, 1]");
  std::vector<JointDistribution::Entry> entries{{WorldId{0}, 1.0}};
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const double p_true = marginals[i];
    std::vector<JointDistribution::Entry> next;
    next.reserve(entries.size() * 2);
    if (p_true < 1.0)
      for (const auto& [w, p] : entries) next.emplace_back(w, p * (1.0 - p_true));
    if (p_true > 0.0)
      for (const auto& [w, p] : entries)
        next.emplace_back(WorldId{w.bits | (1u << i)}, p * p_true);
    entries = std::move(next);
  }
  return JointDistribution(std::move(fact_set), std::move(entries));
}

}  // namespace factfuse
