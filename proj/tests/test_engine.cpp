#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "factfuse/engine.hpp"
#include "support.hpp"

using namespace factfuse;
using test::golden_joint;
using test::golden_truth;

namespace {

std::vector<std::uint32_t> ids(const std::vector<FactId>& facts) {
  std::vector<std::uint32_t> out;
  for (FactId f : facts) out.push_back(f.value);
  return out;
}

InstanceState golden_instance(std::string id = "hk") {
  return InstanceState{std::move(id), golden_joint(), golden_truth()};
}

JointDistribution uncertain_joint(std::size_t n, SplitRng& rng) {
  return test::random_dense_instance(rng, n);
}

}  // namespace

TEST_CASE("selector names round-trip") {
  for (const char* name : {"greedy", "opt", "query", "random"})
    CHECK(selector_name(selector_from_name(name)) == name);
  CHECK_THROWS_AS(selector_from_name("magic"), std::invalid_argument);
}

TEST_CASE("round task count is the smallest of the three limits") {
  CHECK(round_task_count(30, 5, 60) == 5);
  CHECK(round_task_count(3, 5, 60) == 3);
  CHECK(round_task_count(30, 5, 2) == 2);
  CHECK_THROWS_AS(round_task_count(30, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(round_task_count(30, 0, 60), std::invalid_argument);
}

TEST_CASE("judgments threshold at one half, ties go false") {
  const std::vector<bool> judged = judge_facts(golden_joint());
  REQUIRE(judged.size() == 4);
  CHECK(judged[0] == false);  // marginal exactly 0.50
  CHECK(judged[1] == true);   // 0.63
  CHECK(judged[2] == true);   // 0.58
  CHECK(judged[3] == false);  // 0.49

  FactSet facts({Fact{FactId{0}, "s", "p", "a"},
                 Fact{FactId{1}, "s", "p", "b"}});
  const JointDistribution point(std::move(facts), {{WorldId{0b10}, 1.0}});
  const std::vector<bool> from_point = judge_facts(point);
  CHECK(from_point == std::vector<bool>{false, true});
}

TEST_CASE("f1 score basics") {
  CHECK(f1_score({true, false, true}, {true, false, true}) == 1.0);
  CHECK(f1_score({false, false}, {true, false}) == 0.0);
  // predicted positives {0,1}, actual positives {1,2}
  CHECK(f1_score({true, true, false}, {false, true, true}) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(f1_score({true}, {true, false}), std::invalid_argument);
}

TEST_CASE("pooled f1 counts accumulate across instances") {
  F1Counts counts;
  counts.add({true, true, false}, {false, true, true});   // tp 1 fp 1 fn 1
  counts.add({true, false}, {true, false});               // tp 1
  CHECK(counts.tp == 2);
  CHECK(counts.fp == 1);
  CHECK(counts.fn == 1);
  CHECK(counts.score() == doctest::Approx(2.0 * 2 / (2.0 * 2 + 1 + 1)));
  // nothing judged positive anywhere counts as a perfect score
  CHECK(F1Counts{}.score() == 1.0);
}

TEST_CASE("random selection is seeded, sorted, and exhaustive at count = n") {
  SplitRng rng(5, "rand-select");
  const TaskSet all = random_selection(4, 4, rng);
  CHECK(ids({all.facts().begin(), all.facts().end()}) ==
        std::vector<std::uint32_t>{0, 1, 2, 3});

  SplitRng a(6, "rand-select");
  SplitRng b(6, "rand-select");
  const TaskSet first = random_selection(10, 3, a);
  const TaskSet second = random_selection(10, 3, b);
  REQUIRE(first.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(first.at(i).value == second.at(i).value);
  for (std::size_t i = 1; i < first.size(); ++i)
    CHECK(first.at(i - 1).value < first.at(i).value);

  CHECK_THROWS_AS(random_selection(3, 4, rng), std::invalid_argument);
}

TEST_CASE("random selection inclusion frequencies are unbiased") {
  SplitRng rng(7, "rand-freq");
  const std::size_t n = 6, count = 2, draws = 10000;
  std::vector<int> included(n, 0);
  for (std::size_t d = 0; d < draws; ++d) {
    const TaskSet picked = random_selection(n, count, rng);
    for (FactId f : picked.facts()) ++included[f.value];
  }
  const double mean = double(draws) * count / n;
  const double sigma =
      std::sqrt(double(draws) * (double(count) / n) * (1.0 - double(count) / n));
  for (std::uint32_t f = 0; f < n; ++f)
    CHECK(std::abs(included[f] - mean) <= 3.0 * sigma);
}

TEST_CASE("simulated crowd needs ground truth") {
  InstanceState state{"x", golden_joint(), std::nullopt};
  SimulatedCrowd crowd(1, CrowdModel(0.8));
  CHECK_THROWS_AS(crowd.answers_for(state, 1, TaskSet({FactId{0}})),
                  std::invalid_argument);
}

TEST_CASE("simulated crowd streams are keyed by instance, not call order") {
  const TaskSet ts({FactId{0}, FactId{2}});
  InstanceState a = golden_instance("alpha");
  InstanceState b = golden_instance("beta");

  SimulatedCrowd solo(17, CrowdModel(0.7));
  const std::vector<bool> alpha_alone = solo.answers_for(a, 1, ts);

  SimulatedCrowd interleaved(17, CrowdModel(0.7));
  (void)interleaved.answers_for(b, 1, ts);  // different instance first
  const std::vector<bool> alpha_after = interleaved.answers_for(a, 1, ts);
  CHECK(alpha_alone == alpha_after);
}

TEST_CASE("replay source returns recorded judgments and rejects gaps") {
  ReplaySource replay;
  replay.record("x", 1, FactId{2}, true);
  replay.record("x", 1, FactId{0}, false);
  InstanceState state = golden_instance("x");
  const std::vector<bool> answers =
      replay.answers_for(state, 1, TaskSet({FactId{0}, FactId{2}}));
  CHECK(answers == std::vector<bool>{false, true});
  CHECK_THROWS_AS(replay.answers_for(state, 2, TaskSet({FactId{0}})),
                  std::invalid_argument);
}

TEST_CASE("one round on the golden instance asks the greedy pair") {
  InstanceState state = golden_instance();
  RoundConfig config;
  config.k = 2;
  config.budget = 10;
  config.model = CrowdModel(0.8);
  SimulatedCrowd crowd(3, config.model);
  const RoundLog log = run_round(state, config, crowd, 1, nullptr);
  CHECK(ids(log.tasks) == std::vector<std::uint32_t>{0, 3});
  CHECK(log.answers.size() == 2);
  CHECK(log.evidence > 0.0);
  CHECK_FALSE(log.rejected);
  CHECK(state.tasks_spent == 2);
  CHECK(log.utility_after == utility(state.joint));
  REQUIRE(log.f1_after.has_value());
}

TEST_CASE("a certain instance asks nothing and finishes") {
  FactSet facts({Fact{FactId{0}, "s", "p", "a"}});
  InstanceState state{"pt", JointDistribution(std::move(facts),
                                              {{WorldId{1}, 1.0}}),
                      std::vector<bool>{true}};
  RoundConfig config;
  config.k = 2;
  config.budget = 5;
  config.model = CrowdModel(1.0);
  SimulatedCrowd crowd(3, config.model);
  const RoundLog log = run_round(state, config, crowd, 1, nullptr);
  CHECK(log.tasks.empty());
  CHECK(state.done);
  CHECK(state.tasks_spent == 0);
}

TEST_CASE("a pure-noise round leaves utility unchanged") {
  InstanceState state = golden_instance();
  const double before = utility(state.joint);
  RoundConfig config;
  config.k = 2;
  config.budget = 4;
  config.model = CrowdModel(0.5);
  SimulatedCrowd crowd(11, config.model);
  const RoundLog log = run_round(state, config, crowd, 1, nullptr);
  CHECK(log.tasks.size() == 2);
  CHECK(std::abs(log.utility_after - before) < 1e-12);
}

TEST_CASE("contradictory replayed answers are rejected but still billed") {
  FactSet facts({Fact{FactId{0}, "s", "p", "a"},
                 Fact{FactId{1}, "s", "p", "b"}});
  // two perfectly correlated coin-flip facts: worlds 00 and 11 only
  JointDistribution correlated(std::move(facts),
                               {{WorldId{0b00}, 0.5}, {WorldId{0b11}, 0.5}});
  InstanceState state{"x", std::move(correlated),
                      std::vector<bool>{true, true}};
  RoundConfig config;
  config.selector = SelectorKind::Random;  // greedy would never ask both
  config.k = 2;
  config.budget = 4;
  config.model = CrowdModel(1.0);

  ReplaySource replay;
  replay.record("x", 1, FactId{0}, true);
  replay.record("x", 1, FactId{1}, false);  // impossible combination
  replay.record("x", 2, FactId{0}, true);
  replay.record("x", 2, FactId{1}, true);

  SplitRng stream(config.seed, "x/select");
  const double before = utility(state.joint);
  const RoundLog first = run_round(state, config, replay, 1, &stream);
  CHECK(first.rejected);
  CHECK(first.evidence == 0.0);
  CHECK(state.tasks_spent == 2);  // the crowd was still consulted
  CHECK(utility(state.joint) == before);

  const RoundLog second = run_round(state, config, replay, 2, &stream);
  CHECK_FALSE(second.rejected);
  CHECK(state.tasks_spent == 4);
  CHECK(utility(state.joint) == 0.0);  // belief collapsed to world 11
}

TEST_CASE("budget arithmetic: five rounds of two tasks") {
  std::vector<InstanceState> states = {golden_instance()};
  RoundConfig config;
  config.k = 2;
  config.budget = 10;
  config.model = CrowdModel(0.8);
  config.seed = 9;
  SimulatedCrowd crowd(config.seed, config.model);
  const RunResult result = run_budget(states, config, crowd);
  CHECK(result.metrics.trajectory.size() == 5);
  std::size_t previous = 0;
  for (const MetricsPoint& pt : result.metrics.trajectory) {
    CHECK(pt.tasks_cum > previous);  // strictly increasing
    previous = pt.tasks_cum;
  }
  CHECK(result.metrics.trajectory.back().tasks_cum == 10);
  CHECK(states[0].tasks_spent == 10);
}

TEST_CASE("budget 60 at seven per round gives nine rounds, final four") {
  SplitRng gen(51, "budget-shape");
  std::vector<InstanceState> states;
  states.push_back(InstanceState{"wide", uncertain_joint(8, gen),
                                 std::vector<bool>(8, true)});
  RoundConfig config;
  config.k = 7;
  config.budget = 60;
  config.model = CrowdModel(0.7);  // noisy: gains never vanish
  config.seed = 4;
  SimulatedCrowd crowd(config.seed, config.model);
  const RunResult result = run_budget(states, config, crowd);
  REQUIRE(result.logs.size() == 1);
  const auto& rounds = result.logs[0].rounds;
  REQUIRE(rounds.size() == 9);
  for (std::size_t r = 0; r + 1 < rounds.size(); ++r)
    CHECK(rounds[r].tasks.size() == 7);
  CHECK(rounds.back().tasks.size() == 4);
  CHECK(states[0].tasks_spent == 60);
}

TEST_CASE("a certain instance produces an empty trajectory") {
  FactSet facts({Fact{FactId{0}, "s", "p", "a"}});
  std::vector<InstanceState> states;
  states.push_back(InstanceState{
      "pt", JointDistribution(std::move(facts), {{WorldId{1}, 1.0}}),
      std::vector<bool>{true}});
  RoundConfig config;
  config.k = 2;
  config.budget = 6;
  config.model = CrowdModel(1.0);
  SimulatedCrowd crowd(0, config.model);
  const RunResult result = run_budget(states, config, crowd);
  CHECK(result.metrics.trajectory.empty());
  CHECK(result.logs[0].rounds.empty());
}

TEST_CASE("run_budget validates instances and configuration") {
  std::vector<InstanceState> states = {golden_instance()};
  RoundConfig config;  // budget left at 0
  SimulatedCrowd crowd(0, config.model);
  CHECK_THROWS_AS(run_budget(states, config, crowd), std::invalid_argument);

  FactSet facts({Fact{FactId{0}, "s", "p", "a"}});
  std::vector<InstanceState> bad;
  bad.push_back(InstanceState{
      "broken", JointDistribution(std::move(facts), {{WorldId{1}, 0.7}}),
      std::nullopt});
  config.budget = 2;
  try {
    run_budget(bad, config, crowd);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string message = e.what();
    CHECK(message.find("broken") != std::string::npos);
    CHECK(message.find("normalization") != std::string::npos);
  }
}

TEST_CASE("identical seeds give identical runs") {
  auto run_once = [] {
    std::vector<InstanceState> states = {golden_instance("a"),
                                         golden_instance("b")};
    RoundConfig config;
    config.k = 2;
    config.budget = 8;
    config.model = CrowdModel(0.8);
    config.seed = 77;
    SimulatedCrowd crowd(config.seed, config.model);
    return run_budget(states, config, crowd);
  };
  const RunResult first = run_once();
  const RunResult second = run_once();
  REQUIRE(first.metrics.trajectory.size() ==
          second.metrics.trajectory.size());
  for (std::size_t i = 0; i < first.metrics.trajectory.size(); ++i) {
    CHECK(first.metrics.trajectory[i].tasks_cum ==
          second.metrics.trajectory[i].tasks_cum);
    CHECK(first.metrics.trajectory[i].utility_sum ==
          second.metrics.trajectory[i].utility_sum);
  }
  REQUIRE(first.logs.size() == second.logs.size());
  for (std::size_t i = 0; i < first.logs.size(); ++i) {
    REQUIRE(first.logs[i].rounds.size() == second.logs[i].rounds.size());
    for (std::size_t r = 0; r < first.logs[i].rounds.size(); ++r) {
      CHECK(first.logs[i].rounds[r].answers ==
            second.logs[i].rounds[r].answers);
      CHECK(first.logs[i].rounds[r].utility_after ==
            second.logs[i].rounds[r].utility_after);
    }
  }
}

TEST_CASE("per-instance answers do not depend on interleaving") {
  RoundConfig config;
  config.k = 2;
  config.budget = 6;
  config.model = CrowdModel(0.8);
  config.seed = 123;

  std::vector<InstanceState> forward = {golden_instance("a"),
                                        golden_instance("b")};
  SimulatedCrowd crowd_f(config.seed, config.model);
  const RunResult fwd = run_budget(forward, config, crowd_f);

  std::vector<InstanceState> backward = {golden_instance("b"),
                                         golden_instance("a")};
  SimulatedCrowd crowd_b(config.seed, config.model);
  const RunResult bwd = run_budget(backward, config, crowd_b);

  auto find_log = [](const RunResult& r, const std::string& id)
      -> const InstanceRunLog& {
    for (const auto& log : r.logs)
      if (log.instance_id == id) return log;
    throw std::logic_error("missing log");
  };
  for (const std::string id : {"a", "b"}) {
    const InstanceRunLog& x = find_log(fwd, id);
    const InstanceRunLog& y = find_log(bwd, id);
    REQUIRE(x.rounds.size() == y.rounds.size());
    for (std::size_t r = 0; r < x.rounds.size(); ++r) {
      CHECK(ids(x.rounds[r].tasks) == ids(y.rounds[r].tasks));
      CHECK(x.rounds[r].answers == y.rounds[r].answers);
      CHECK(x.rounds[r].evidence == y.rounds[r].evidence);
      CHECK(x.rounds[r].utility_after == y.rounds[r].utility_after);
    }
  }
  // aggregate metrics are order-independent sums
  for (std::size_t i = 0; i < fwd.metrics.trajectory.size(); ++i) {
    CHECK(fwd.metrics.trajectory[i].tasks_cum ==
          bwd.metrics.trajectory[i].tasks_cum);
    CHECK(std::abs(fwd.metrics.trajectory[i].utility_sum -
                   bwd.metrics.trajectory[i].utility_sum) < 1e-12);
  }
}

TEST_CASE("a perfect crowd settles every asked fact") {
  std::vector<InstanceState> states = {golden_instance()};
  RoundConfig config;
  config.k = 2;
  config.budget = 4;
  config.model = CrowdModel(1.0);
  config.seed = 5;
  SimulatedCrowd crowd(config.seed, config.model);
  const RunResult result = run_budget(states, config, crowd);
  for (const RoundLog& round : result.logs[0].rounds)
    for (FactId f : round.tasks) {
      const double p = marginal_fact_prob(states[0].joint, f);
      CHECK((p == 0.0 || p == 1.0));
    }
}

TEST_CASE("pooled metrics mix judged and truthless instances") {
  RoundConfig config;
  config.k = 2;
  config.budget = 4;
  config.model = CrowdModel(0.8);
  config.seed = 21;

  // a simulated crowd needs ground truth everywhere, so record a fully
  // truthy run first and replay it against a truthless copy of "blind"
  std::vector<InstanceState> recorded = {golden_instance("judged"),
                                         golden_instance("blind")};
  SimulatedCrowd crowd(config.seed, config.model);
  const RunResult source = run_budget(recorded, config, crowd);
  ReplaySource replay;
  for (const InstanceRunLog& log : source.logs)
    for (const RoundLog& round : log.rounds)
      for (std::size_t t = 0; t < round.tasks.size(); ++t)
        replay.record(log.instance_id, round.round, round.tasks[t],
                      round.answers[t]);

  std::vector<InstanceState> states = {golden_instance("judged")};
  states.push_back(InstanceState{"blind", golden_joint(), std::nullopt});
  const RunResult result = run_budget(states, config, replay);
  REQUIRE_FALSE(result.metrics.trajectory.empty());
  const MetricsPoint& last = result.metrics.trajectory.back();
  CHECK(last.tasks_cum == 8);  // both instances consume budget
  const double total = utility(states[0].joint) + utility(states[1].joint);
  CHECK(std::abs(last.utility_sum - total) < 1e-12);
  REQUIRE(last.f1_pooled.has_value());  // from the judged instance alone
  const auto& blind_rounds =
      result.logs[1].instance_id == "blind" ? result.logs[1].rounds
                                            : result.logs[0].rounds;
  for (const RoundLog& round : blind_rounds)
    CHECK_FALSE(round.f1_after.has_value());
}

TEST_CASE("query selector runs rounds against the facts of interest") {
  std::vector<InstanceState> states = {golden_instance()};
  RoundConfig config;
  config.selector = SelectorKind::Query;
  config.foi = FoiQuery{{FactId{2}}};
  config.k = 1;
  config.budget = 3;
  config.model = CrowdModel(0.8);
  config.seed = 2;
  SimulatedCrowd crowd(config.seed, config.model);
  const RunResult result = run_budget(states, config, crowd);
  CHECK_FALSE(result.logs[0].rounds.empty());
}

TEST_CASE("expected utility never drops across a round") {
  SplitRng rng(52, "expected-round");
  for (int trial = 0; trial < 10; ++trial) {
    const JointDistribution dist = test::random_instance(rng, 4, 6);
    const CrowdModel model(0.55 + 0.45 * rng.next_unit());
    const auto selection = select_greedy(dist, 2, model);
    if (selection.k_star == 0) continue;
    std::vector<FactId> tasks(selection.tasks.facts().begin(),
                              selection.tasks.facts().end());
    const double expected =
        test::expected_posterior_entropy(dist, tasks, model);
    CHECK(-expected >= utility(dist) - 1e-9);
  }
}
