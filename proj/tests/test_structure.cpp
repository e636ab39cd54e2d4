#include <doctest.h>

#include <random>

#include "ehsched/experiments.hpp"
#include "ehsched/structure.hpp"
#include "support/generators.hpp"

using namespace ehsched;

namespace {

ValueFunction from_formula(const ModelSpec& m, double (*fn)(const State&)) {
  ValueFunction v(m);
  for (const auto& st : m.states()) v[m.index(st)] = fn(st);
  return v;
}

// Brute-force class-M membership, written independently of check_value_monotone.
bool in_class_m(const ModelSpec& m, const ValueFunction& v) {
  for (const auto& a : m.states())
    for (const auto& b : m.states())
      if (a.h == b.h && a.n <= b.n && a.s >= b.s && v.at(m, a) > v.at(m, b) + 1e-9) return false;
  return true;
}

}  // namespace

TEST_CASE("family and property names") {
  CHECK(parse_family("queue") == Family::kQueue);
  CHECK(parse_family("s") == Family::kBattery);
  CHECK_THROWS_AS(parse_family("diagonal"), ValidationError);
  CHECK(to_string(Property::kHDiagonal) == "H_prop2");
  CHECK(to_string(Property::kLatticeSubmodularSU) == "lattice_submodular_su");
}

TEST_CASE("class M on hand-built value functions") {
  const auto m = make_preset(PresetName::kEx1Queue).model;

  const auto flat = check_value_monotone(m, ValueFunction(m, 3.0));
  CHECK(all_hold(flat));

  const auto falling = check_value_monotone(m, from_formula(m, [](const State& st) { return -1.0 * st.n; }));
  CHECK_FALSE(falling[0].holds());
  CHECK(falling[1].holds());
  CHECK(falling[0].witnesses.size() == 5 * 6);
  CHECK(falling[0].has_pair({0, 0, 0}, {1, 0, 0}));

  const auto rising_in_s = check_value_monotone(m, from_formula(m, [](const State& st) { return 1.0 * st.s; }));
  CHECK(rising_in_s[0].holds());
  CHECK_FALSE(rising_in_s[1].holds());
  CHECK(rising_in_s[1].has_pair({2, 3, 0}, {2, 4, 0}));

  // Differences below the comparison tolerance are not violations.
  CHECK(all_hold(check_value_monotone(m, from_formula(m, [](const State& st) { return -1e-11 * st.n; }))));
}

TEST_CASE("H properties are vacuous outside class M") {
  const auto m = make_preset(PresetName::kEx1Queue).model;
  const Mdp mdp(m);
  const auto reports = check_h_properties(mdp, from_formula(m, [](const State& st) { return -1.0 * st.n; }));
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(r.vacuous);
    CHECK_FALSE(r.holds());
    CHECK(r.witnesses.empty());
  }
}

TEST_CASE("zero value function is submodular everywhere") {
  const auto m = make_preset(PresetName::kEx2Battery).model;
  const Mdp mdp(m);
  // H(n,s,u) = d(n - u) with linear d: every quadruple is an equality.
  const auto reports = check_submodularity(mdp, ValueFunction(m));
  REQUIRE(reports.size() == 4);
  CHECK(all_hold(reports));
}

TEST_CASE("Bellman operator preserves class M and the H properties") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 120; ++trial) {
    const auto m = testing::random_model(rng);
    const Mdp mdp(m);
    const auto v = testing::random_class_m(rng, m);
    REQUIRE(in_class_m(m, v));
    CHECK(all_hold(check_h_properties(mdp, v)));
    const auto bv = bellman_apply(mdp, v).first;
    CHECK(all_hold(check_value_monotone(m, bv)));
    CHECK(in_class_m(m, bv));
  }
}

TEST_CASE("optimal values of random models lie in class M") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = testing::random_model(rng);
    const auto vstar = policy_iteration(m).value;
    CHECK(all_hold(check_value_monotone(m, vstar)));
  }
}

TEST_CASE("counterexamples break submodularity and policy monotonicity") {
  SUBCASE("queue") {
    const auto m = make_preset(PresetName::kEx1Queue).model;
    const Mdp mdp(m);
    const auto opt = policy_iteration(mdp);
    CHECK(all_hold(check_value_monotone(m, opt.value)));
    CHECK(all_hold(check_h_properties(mdp, opt.value)));
    CHECK_FALSE(check_submodularity(mdp, opt.value)[0].holds());

    const auto pol = check_policy_monotone(m, opt.policy, Family::kQueue);
    CHECK(pol.property == Property::kPolicyMonotoneN);
    CHECK(pol.has_pair({4, 3, 0}, {5, 3, 0}));
    const auto& w = pol.witnesses.front();
    CHECK(w.lhs > w.rhs);
  }
  SUBCASE("battery") {
    const auto m = make_preset(PresetName::kEx2Battery).model;
    const Mdp mdp(m);
    const auto opt = policy_iteration(mdp);
    CHECK(all_hold(check_h_properties(mdp, opt.value)));
    CHECK_FALSE(check_submodularity(mdp, opt.value)[1].holds());
    const auto pol = check_policy_monotone(m, opt.policy, Family::kBattery);
    CHECK(pol.has_pair({5, 2, 0}, {5, 3, 0}));
  }
}

TEST_CASE("greedy is monotone in both coordinates") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = testing::random_model(rng);
    CHECK(all_hold(check_policy_monotone(m, greedy_policy(m))));
  }
  for (auto name : all_presets()) {
    const auto m = make_preset(name).model;
    CHECK(all_hold(check_policy_monotone(m, greedy_policy(m))));
  }
}
