#include <doctest.h>

#include <chrono>
#include <random>
#include <set>

#include "ehsched/experiments.hpp"
#include "ehsched/monotone_search.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ehsched;

namespace {

std::vector<int> as_vector(const Policy& f) { return {f.actions().begin(), f.actions().end()}; }

std::uint64_t stream_length(const ModelSpec& m, Family family) {
  std::uint64_t n = 0;
  enumerate_monotone(m, family, [&](const Policy&) { ++n; });
  return n;
}

ModelSpec tiny_model(std::mt19937_64& rng, int buffer, int battery, bool fading) {
  ModelParams p;
  p.buffer = buffer;
  p.battery = battery;
  p.beta = 0.9;
  p.power = testing::random_convex_power(rng, buffer);
  p.delay = testing::random_convex_delay(rng, buffer);
  p.arrivals = testing::random_pmf(rng, buffer + 1);
  p.energy = testing::random_pmf(rng, battery + 1);
  if (fading) p.channel = Channel{{0.6, 1.1}, Pmf({0.5, 0.5})};
  return ModelSpec(p);
}

}  // namespace

TEST_CASE("monotone counts on the counterexamples") {
  const auto ex1 = make_preset(PresetName::kEx1Queue).model;
  const auto ex2 = make_preset(PresetName::kEx2Battery).model;
  CHECK(count_monotone(ex1, Family::kQueue) == 86400);
  CHECK(count_monotone(ex2, Family::kBattery) == 303750);
  CHECK(MonotonePolicySpace(ex1, Family::kQueue).size() == 86400);
  CHECK(stream_length(ex2, Family::kBattery) == 303750);

  const auto battery_count = count_monotone(ex1, Family::kBattery);
  CHECK(BigCount(stream_length(ex1, Family::kBattery)) == battery_count);
}

TEST_CASE("count of a single-policy space") {
  ModelParams p;
  p.buffer = 1;
  p.battery = 0;
  p.beta = 0.5;
  p.power = {0, 5};
  p.delay = {0, 1};
  p.arrivals = Pmf({0.5, 0.5});
  p.energy = Pmf({1.0});
  const ModelSpec m(p);
  CHECK(count_monotone(m, Family::kQueue) == 1);
  CHECK(count_monotone(m, Family::kBattery) == 1);
  CHECK(stream_length(m, Family::kQueue) == 1);

  // Only u = 0 is feasible, so every policy is optimal and the gap is zero.
  const Mdp mdp(m);
  const auto vstar = policy_iteration(mdp).value;
  const auto best = best_monotone(mdp, Family::kQueue, vstar);
  CHECK(best.alpha == 0.0);
  CHECK(best.objective == 0.0);
  CHECK(best.best_policy == Policy(m, 0));
}

TEST_CASE("count, stream and brute-force filter agree") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const bool fading = trial % 3 == 2;
    const auto m = tiny_model(rng, 2, 2, fading);
    if (testing::feasible_policy_count(m) > 300000) continue;
    for (auto family : {Family::kQueue, Family::kBattery}) {
      const bool queue = family == Family::kQueue;
      std::uint64_t filtered = 0;
      testing::for_each_feasible_policy(m, [&](const std::vector<int>& a) { filtered += testing::is_monotone(m, a, queue); });

      std::set<std::vector<int>> seen;
      enumerate_monotone(m, family, [&](const Policy& f) {
        CHECK_NOTHROW(f.validate(m));
        CHECK(testing::is_monotone(m, as_vector(f), queue));
        seen.insert(as_vector(f));
      });
      CHECK(seen.size() == filtered);
      CHECK(count_monotone(m, family) == filtered);
    }
  }
}

TEST_CASE("streams match counts on random models") {
  std::mt19937_64 rng(32);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 20; ++trial) {
    const auto m = testing::random_model(rng, {3, 4, true});
    for (auto family : {Family::kQueue, Family::kBattery}) {
      const auto count = count_monotone(m, family);
      if (count > 200000) continue;
      CHECK(BigCount(stream_length(m, family)) == count);
      ++checked;
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("policy_at agrees with the stream order") {
  const auto m = make_preset(PresetName::kEx1Queue).model;
  const MonotonePolicySpace space(m, Family::kQueue);
  std::vector<std::uint64_t> probes{0, 1, 17, 4321, 86399};
  space.for_range(0, space.size(), [&](std::uint64_t idx, const Policy& f) {
    if (std::find(probes.begin(), probes.end(), idx) != probes.end()) CHECK(f == space.policy_at(idx));
  });
  CHECK_THROWS(space.policy_at(space.size()));
}

TEST_CASE("budget refusal carries the exact count") {
  const auto m = make_preset(PresetName::kEx2Battery).model;
  try {
    MonotonePolicySpace space(m, Family::kBattery, 1000);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.bound() == 303750);
  }
  const auto fading = make_preset(PresetName::kEx3FadingQueue).model;
  CHECK_THROWS_AS(MonotonePolicySpace(fading, Family::kQueue), BudgetExceeded);
}

TEST_CASE("best monotone is optimal within the family") {
  const auto m = make_preset(PresetName::kEx1Queue).model;
  const Mdp mdp(m);
  const auto vstar = policy_iteration(mdp).value;
  const auto best = best_monotone(mdp, Family::kQueue, vstar);
  CHECK(best.enumerated_count == 86400);
  CHECK(best.alpha == doctest::Approx(0.1186).epsilon(0.005 / 0.1186));
  CHECK(check_policy_monotone(m, best.best_policy, Family::kQueue).holds());
  CHECK(sup_distance(best.best_value, evaluate_policy(mdp, best.best_policy)) <= 1e-9);

  const MonotonePolicySpace space(m, Family::kQueue);
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<std::uint64_t> pick(0, space.size() - 1);
  for (int k = 0; k < 1000; ++k) {
    const auto gap = policy_gap(mdp, space.policy_at(pick(rng)), vstar);
    CHECK(best.objective <= gap.objective + 1e-12);
  }
}

TEST_CASE("gap of the optimal policy is zero and greedy never beats the best") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 15; ++trial) {
    const auto m = testing::random_model(rng, {3, 3, false});
    const Mdp mdp(m);
    const auto opt = policy_iteration(mdp);
    CHECK(policy_gap(mdp, opt.policy, opt.value).alpha <= 1e-9);
    for (auto family : {Family::kQueue, Family::kBattery}) {
      if (count_monotone(m, family) > 100000) continue;
      const auto best = best_monotone(mdp, family, opt.value);
      const auto greedy = greedy_gap(mdp, opt.value);
      CHECK(best.objective <= greedy.objective + 1e-12);
      CHECK(best.alpha >= -1e-12);
    }
  }
}

TEST_CASE("search result does not depend on the thread count") {
  const auto m = make_preset(PresetName::kEx2Battery).model;
  const Mdp mdp(m);
  const auto vstar = policy_iteration(mdp).value;
  const auto one = best_monotone(mdp, Family::kBattery, vstar, {kDefaultEnumerationBudget, 1});
  const auto three = best_monotone(mdp, Family::kBattery, vstar, {kDefaultEnumerationBudget, 3});
  CHECK(one.best_policy == three.best_policy);
  CHECK(one.alpha == three.alpha);
  CHECK(one.best_policy == greedy_policy(m));
}
