#include <doctest.h>

#include <algorithm>

#include "ehsched/experiments.hpp"

using namespace ehsched;

TEST_CASE("preset names round-trip") {
  for (auto name : all_presets()) CHECK(parse_preset(to_string(name)) == name);
  CHECK(all_presets().size() == 4);
  CHECK_THROWS_AS(parse_preset("ex5"), ValidationError);
}

TEST_CASE("preset models") {
  const auto ex1 = make_preset(PresetName::kEx1Queue);
  CHECK(ex1.family == Family::kQueue);
  CHECK(std::ranges::equal(ex1.model.power(), std::vector<int>{0, 1, 4, 7, 13, 21}));
  CHECK(ex1.model.beta() == 0.99);
  CHECK(ex1.model.arrivals()[0] == doctest::Approx(0.9 / (1.0 - 1e-6)).epsilon(1e-12));

  const auto ex2 = make_preset(PresetName::kEx2Battery);
  CHECK(ex2.family == Family::kBattery);
  CHECK(ex2.model.arrivals()[1] == 0.67);
  CHECK(ex2.model.arrivals()[5] == 0.0);
  CHECK(ex2.model.energy()[2] == 0.05);

  const auto ex3 = make_preset(PresetName::kEx3FadingQueue);
  CHECK(ex3.model.channel_states() == 2);
  CHECK(ex3.model.params().fading_cost_rounding == FadingCostRounding::kFloor);
  CHECK(ex3.heuristic_overrides.size() == 7);
}

TEST_CASE("geometric interpretations") {
  const auto candidates = geometric_candidates();
  CHECK(candidates.size() == 8);
  CHECK(std::find(candidates.begin(), candidates.end(), kResolvedGeometric) != candidates.end());

  // Origin 1 shifts mass up one value and drops what falls past the maximum.
  const auto shifted = interpret_geometric(0.5, 5, {GeometricForm::kRatio, 6, 1});
  CHECK(shifted[0] == 0.0);
  CHECK(shifted[1] == doctest::Approx(16.0 / 31.0));
  CHECK(shifted[5] == doctest::Approx(1.0 / 31.0));
  CHECK(shifted.support_size() == 6);
  CHECK_FALSE(describe(kResolvedGeometric).empty());
}

TEST_CASE("heuristic overrides") {
  const auto ex4 = make_preset(PresetName::kEx4FadingBattery);
  const auto opt = policy_iteration(ex4.model).policy;
  const auto heuristic = nearest_monotone_heuristic(ex4, opt);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < opt.size(); ++i) changed += opt[i] != heuristic[i];
  CHECK(changed == 2);
  CHECK(check_policy_monotone(ex4.model, heuristic, Family::kBattery).holds());

  const auto ex3 = make_preset(PresetName::kEx3FadingQueue);
  const auto h3 = nearest_monotone_heuristic(ex3, policy_iteration(ex3.model).policy);
  CHECK(check_policy_monotone(ex3.model, h3, Family::kQueue).holds());

  auto broken = ex3;
  broken.heuristic_overrides.push_back({{1, 0, 0}, 1});
  CHECK_THROWS_WITH_AS(nearest_monotone_heuristic(broken, policy_iteration(ex3.model).policy),
                       doctest::Contains("(1,0,1)"), ValidationError);
}

TEST_CASE("pmf ambiguity resolution picks the frozen reading") {
  const auto res = resolve_pmf_ambiguity();
  REQUIRE(res.candidates.size() == 8);
  const auto& chosen = res.candidates[res.chosen];
  CHECK(chosen.interp == kResolvedGeometric);
  CHECK(res.resolved);
  CHECK(chosen.monotone_count == 86400);
  CHECK(chosen.queue_inversion);
  CHECK(chosen.alpha_monotone == doctest::Approx(0.1186).epsilon(0.005 / 0.1186));
  CHECK(chosen.alpha_greedy == doctest::Approx(0.8609).epsilon(0.005 / 0.8609));
  for (const auto& c : res.candidates) CHECK(chosen.score <= c.score);
}

TEST_CASE("every preset run passes its checks") {
  for (auto name : all_presets()) {
    CAPTURE(to_string(name));
    const auto run = run_preset(name);
    for (const auto& c : run.checks) {
      CAPTURE(c.quantity);
      CHECK(c.passed);
    }
    CHECK(run.passed());
  }
}
