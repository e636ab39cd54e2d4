#include "ehsched/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace ehsched {

namespace {

// Relative slack under which two action values count as tied.
constexpr double kTieTolerance = 1e-12;

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - kTieTolerance * std::max(1.0, std::abs(incumbent));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ValueFunction::ValueFunction(const ModelSpec& m, double fill) : values_(m.num_states(), fill) {}

ValueFunction::ValueFunction(const ModelSpec& m, std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() != m.num_states())
    throw ValidationError(fmt::format("value table has {} entries, model has {} states", values_.size(),
                                      m.num_states()));
}

double sup_distance(const ValueFunction& a, const ValueFunction& b) {
  if (a.size() != b.size()) throw ValidationError("value tables differ in size");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

Policy::Policy(const ModelSpec& m, int fill) : actions_(m.num_states(), fill) {}

Policy::Policy(const ModelSpec& m, std::vector<int> actions) : actions_(std::move(actions)) {
  if (actions_.size() != m.num_states())
    throw ValidationError(fmt::format("policy table has {} entries, model has {} states", actions_.size(),
                                      m.num_states()));
}

void Policy::validate(const ModelSpec& m) const {
  if (actions_.size() != m.num_states()) throw ValidationError("policy table size does not match the model");
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const State st = m.state_at(i);
    const int u = actions_[i];
    if (u < 0 || u > st.n || m.cost(u, st.h) > st.s)
      throw ValidationError(
          fmt::format("policy action {} infeasible in state ({},{},{})", u, st.n, st.s, st.h + 1));
  }
}

Mdp::Mdp(const ModelSpec& m) : model_(m), actions_(m.num_states()) {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const State st = m.state_at(i);
    for (int u : feasible_actions(m, st)) {
      Action a{u, m.delay(st.n - u), {}};
      for (const auto& o : transition(m, st, u))
        a.row.push_back({static_cast<std::uint32_t>(m.index(o.next)), o.prob});
      actions_[i].push_back(std::move(a));
    }
  }
}

const Mdp::Action& Mdp::action(std::size_t state, int u) const {
  for (const auto& a : actions_[state])
    if (a.u == u) return a;
  const State st = model_.state_at(state);
  throw ValidationError(fmt::format("action {} infeasible in state ({},{},{})", u, st.n, st.s, st.h + 1));
}

double Mdp::q_value(std::size_t, const Action& a, const ValueFunction& v) const {
  double expect = 0.0;
  for (const auto& e : a.row) expect += e.prob * v[e.next];
  return a.cost + beta() * expect;
}

std::pair<ValueFunction, Policy> bellman_apply(const Mdp& mdp, const ValueFunction& v) {
  const auto& m = mdp.model();
  if (v.size() != mdp.num_states()) throw ValidationError("value table size does not match the model");
  ValueFunction out(m);
  Policy policy(m);
  for (std::size_t i = 0; i < mdp.num_states(); ++i) {
    const auto actions = mdp.actions(i);
    double incumbent = mdp.q_value(i, actions.front(), v);
    double lowest = incumbent;
    int best_u = actions.front().u;
    for (const auto& a : actions.subspan(1)) {
      const double q = mdp.q_value(i, a, v);
      lowest = std::min(lowest, q);
      if (improves(q, incumbent)) {
        incumbent = q;
        best_u = a.u;
      }
    }
    // The value is the exact minimum even when a near-tie kept a smaller u.
    out[i] = lowest;
    policy[i] = best_u;
  }
  return {std::move(out), std::move(policy)};
}

std::pair<ValueFunction, Policy> bellman_apply(const ModelSpec& m, const ValueFunction& v) {
  return bellman_apply(Mdp(m), v);
}

SolveResult value_iteration(const Mdp& mdp, const ValueFunction& v0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ValidationError("value iteration tolerance must be positive");
  const double beta = mdp.beta();
  const double stop = tol * (1.0 - beta) / (2.0 * beta);
  ValueFunction v = v0;
  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < max_iter) {
    auto [next, policy] = bellman_apply(mdp, v);
    change = sup_distance(next, v);
    v = std::move(next);
    ++it;
    if (change <= stop) {
      auto [bv, greedy] = bellman_apply(mdp, v);
      return {v, std::move(greedy), it, sup_distance(bv, v)};
    }
  }
  throw ConvergenceError(
      fmt::format("value iteration did not converge in {} iterations (last change {:.3e})", it, change), change,
      it);
}

SolveResult value_iteration(const ModelSpec& m, const ValueFunction& v0, double tol, int max_iter) {
  return value_iteration(Mdp(m), v0, tol, max_iter);
}

ValueFunction evaluate_policy(const Mdp& mdp, const Policy& f) {
  const auto& m = mdp.model();
  const auto n = static_cast<Eigen::Index>(mdp.num_states());
  if (f.size() != mdp.num_states()) throw ValidationError("policy table size does not match the model");
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd cost(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = mdp.action(static_cast<std::size_t>(i), f[static_cast<std::size_t>(i)]);
    cost(i) = a.cost;
    for (const auto& e : a.row) system(i, static_cast<Eigen::Index>(e.next)) -= mdp.beta() * e.prob;
  }
  const Eigen::VectorXd solution = system.partialPivLu().solve(cost);
  return ValueFunction(m, std::vector<double>(solution.data(), solution.data() + n));
}

ValueFunction evaluate_policy(const ModelSpec& m, const Policy& f) { return evaluate_policy(Mdp(m), f); }

SolveResult policy_iteration(const Mdp& mdp) {
  const auto& m = mdp.model();
  Policy policy(m, 0);
  int it = 0;
  for (;;) {
    ++it;
    const ValueFunction v = evaluate_policy(mdp, policy);
    bool changed = false;
    for (std::size_t i = 0; i < mdp.num_states(); ++i) {
      double incumbent = mdp.q_value(i, policy[i], v);
      for (const auto& a : mdp.actions(i)) {
        const double q = mdp.q_value(i, a, v);
        if (improves(q, incumbent)) {
          incumbent = q;
          policy[i] = a.u;
          changed = true;
        }
      }
    }
    if (!changed) {
      auto [bv, greedy] = bellman_apply(mdp, v);
      const double residual = sup_distance(bv, v);
      return {v, std::move(greedy), it, residual};
    }
  }
}

SolveResult policy_iteration(const ModelSpec& m) { return policy_iteration(Mdp(m)); }

Policy greedy_policy(const ModelSpec& m) {
  Policy f(m);
  for (std::size_t i = 0; i < m.num_states(); ++i) f[i] = max_feasible_action(m, m.state_at(i));
  return f;
}

int discounted_horizon(const ModelSpec& m, double tail) {
  const auto delay = m.delay();
  const double max_delay = *std::max_element(delay.begin(), delay.end());
  if (max_delay <= 0.0) return 1;
  const double bound = tail * (1.0 - m.beta()) / max_delay;
  return std::max(1, static_cast<int>(std::ceil(std::log(bound) / std::log(m.beta()))));
}

MonteCarloEstimate simulate_policy(const Mdp& mdp, const Policy& f, const State& start,
                                   std::size_t trajectories, int horizon, std::uint64_t seed) {
  const auto& m = mdp.model();
  f.validate(m);
  if (trajectories < 2) throw ValidationError("Monte-Carlo estimate needs at least two trajectories");

  struct Step {
    double cost;
    std::vector<double> cdf;
    std::vector<std::uint32_t> next;
  };
  std::vector<Step> steps(mdp.num_states());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& a = mdp.action(i, f[i]);
    steps[i].cost = a.cost;
    double acc = 0.0;
    for (const auto& e : a.row) {
      acc += e.prob;
      steps[i].cdf.push_back(acc);
      steps[i].next.push_back(e.next);
    }
    steps[i].cdf.back() = 1.0;
  }

  const std::size_t origin = m.index(start);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < trajectories; ++k) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k)));
    std::size_t state = origin;
    double discount = 1.0;
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const auto& step = steps[state];
      total += discount * step.cost;
      discount *= mdp.beta();
      const auto pos = std::upper_bound(step.cdf.begin(), step.cdf.end(), unit(rng)) - step.cdf.begin();
      state = step.next[static_cast<std::size_t>(std::min<std::ptrdiff_t>(pos, std::ssize(step.cdf) - 1))];
    }
    sum += total;
    sum_sq += total * total;
  }
  const double n = static_cast<double>(trajectories);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), trajectories, horizon};
}

}  // namespace ehsched
