#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/solver.hpp"

namespace ehsched::testing {

inline Pmf random_pmf(std::mt19937_64& rng, int size, double zero_prob = 0.3) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(size));
  for (auto& x : w) x = unit(rng) < zero_prob ? 0.0 : unit(rng);
  if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) w[0] = 1.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  *std::max_element(w.begin(), w.end()) += 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  return Pmf(w);
}

/// p(0) = 0 with strictly increasing positive increments.
inline std::vector<int> random_convex_power(std::mt19937_64& rng, int buffer) {
  std::uniform_int_distribution<int> step(0, 2);
  std::vector<int> p{0};
  int inc = 1 + step(rng);
  for (int u = 1; u <= buffer; ++u) {
    p.push_back(p.back() + inc);
    inc += 1 + step(rng);
  }
  return p;
}

inline std::vector<double> random_convex_delay(std::mt19937_64& rng, int buffer) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> d{0.0};
  double inc = unit(rng) + 0.1;
  for (int q = 1; q <= buffer; ++q) {
    d.push_back(d.back() + inc);
    inc += unit(rng);
  }
  return d;
}

struct ModelShape {
  int max_buffer = 5;
  int max_battery = 6;
  bool allow_fading = true;
};

inline ModelSpec random_model(std::mt19937_64& rng, const ModelShape& shape = {}) {
  std::uniform_int_distribution<int> buffer(1, shape.max_buffer);
  std::uniform_int_distribution<int> battery(1, shape.max_battery);
  std::uniform_real_distribution<double> beta(0.5, 0.97);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelParams p;
  p.buffer = buffer(rng);
  p.battery = battery(rng);
  p.beta = beta(rng);
  p.power = random_convex_power(rng, p.buffer);
  p.delay = random_convex_delay(rng, p.buffer);
  p.arrivals = random_pmf(rng, p.buffer + 1);
  p.energy = random_pmf(rng, p.battery + 1);
  if (shape.allow_fading && unit(rng) < 0.3) {
    p.channel = Channel{{0.5 + unit(rng), 0.5 + unit(rng)}, random_pmf(rng, 2, 0.0)};
    p.fading_cost_rounding = unit(rng) < 0.5 ? FadingCostRounding::kFloor : FadingCostRounding::kCeil;
  }
  return ModelSpec(std::move(p));
}

inline ValueFunction random_values(std::mt19937_64& rng, const ModelSpec& m, double scale = 10.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  ValueFunction v(m);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

/// Random member of class M: cumulative non-negative steps up in n and down in s.
inline ValueFunction random_class_m(std::mt19937_64& rng, const ModelSpec& m) {
  std::uniform_real_distribution<double> step(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ValueFunction v(m);
  for (int h = 0; h < m.channel_states(); ++h) {
    std::vector<double> up(static_cast<std::size_t>(m.buffer()) + 1), down(static_cast<std::size_t>(m.battery()) + 1);
    for (std::size_t k = 1; k < up.size(); ++k) up[k] = up[k - 1] + (unit(rng) < 0.2 ? 0.0 : step(rng));
    for (std::size_t k = 1; k < down.size(); ++k) down[k] = down[k - 1] + (unit(rng) < 0.2 ? 0.0 : step(rng));
    const double shift = 5.0 * unit(rng);
    for (int n = 0; n <= m.buffer(); ++n)
      for (int s = 0; s <= m.battery(); ++s)
        v[m.index({n, s, h})] = shift + up[static_cast<std::size_t>(n)] / (1.0 + 0.1 * s) -
                                down[static_cast<std::size_t>(s)];
  }
  return v;
}

inline Policy random_feasible_policy(std::mt19937_64& rng, const ModelSpec& m) {
  Policy f(m);
  for (std::size_t i = 0; i < m.num_states(); ++i) {
    const auto actions = feasible_actions(m, m.state_at(i));
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    f[i] = actions[pick(rng)];
  }
  return f;
}

}  // namespace ehsched::testing
