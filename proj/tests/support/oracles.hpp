#pragma once

// Reference computations used only by tests. They go through the model's
// transition law directly and share no code with the solver's Mdp tables or
// its linear solves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched::testing {

using Table = std::vector<double>;

/// V_f by fixed-point iteration of V <- d_f + beta P_f V.
inline Table iterate_policy_value(const ModelSpec& m, const std::vector<int>& actions, double tol = 1e-13) {
  const std::size_t n = m.num_states();
  std::vector<std::vector<Outcome>> rows(n);
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    const State st = m.state_at(i);
    rows[i] = transition(m, st, actions[i]);
    cost[i] = m.delay(st.n - actions[i]);
  }
  Table v(n, 0.0), next(n, 0.0);
  for (;;) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double expect = 0.0;
      for (const auto& o : rows[i]) expect += o.prob * v[m.index(o.next)];
      next[i] = cost[i] + m.beta() * expect;
      change = std::max(change, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    if (change * m.beta() / (1.0 - m.beta()) < tol) return v;
  }
}

/// Calls fn(actions) for every feasible stationary deterministic policy.
inline void for_each_feasible_policy(const ModelSpec& m, const std::function<void(const std::vector<int>&)>& fn) {
  const std::size_t n = m.num_states();
  std::vector<std::vector<int>> sets(n);
  for (std::size_t i = 0; i < n; ++i) sets[i] = feasible_actions(m, m.state_at(i));
  std::vector<std::size_t> digit(n, 0);
  std::vector<int> actions(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) actions[i] = sets[i][digit[i]];
    fn(actions);
    std::size_t k = 0;
    while (k < n && ++digit[k] == sets[k].size()) digit[k++] = 0;
    if (k == n) return;
  }
}

inline std::uint64_t feasible_policy_count(const ModelSpec& m) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < m.num_states(); ++i) total *= feasible_actions(m, m.state_at(i)).size();
  return total;
}

/// Weakly increasing along n (queue) or along s (battery) for every other coordinate.
inline bool is_monotone(const ModelSpec& m, const std::vector<int>& actions, bool queue) {
  for (int h = 0; h < m.channel_states(); ++h)
    for (int n = 0; n <= m.buffer(); ++n)
      for (int s = 0; s <= m.battery(); ++s) {
        if (queue && n < m.buffer() && actions[m.index({n, s, h})] > actions[m.index({n + 1, s, h})]) return false;
        if (!queue && s < m.battery() && actions[m.index({n, s, h})] > actions[m.index({n, s + 1, h})])
          return false;
      }
  return true;
}

}  // namespace ehsched::testing
