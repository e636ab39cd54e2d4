#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

/// Real table over the state space of a model, laid out by ModelSpec::index.
class ValueFunction {
 public:
  ValueFunction() = default;
  explicit ValueFunction(const ModelSpec& m, double fill = 0.0);
  ValueFunction(const ModelSpec& m, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double at(const ModelSpec& m, const State& st) const { return values_[m.index(st)]; }

  /// Sup-norm distance; sizes must match.
  friend double sup_distance(const ValueFunction& a, const ValueFunction& b);

 private:
  std::vector<double> values_;
};

/// Action table over the state space of a model.
class Policy {
 public:
  Policy() = default;
  explicit Policy(const ModelSpec& m, int fill = 0);
  Policy(const ModelSpec& m, std::vector<int> actions);

  std::size_t size() const { return actions_.size(); }
  int operator[](std::size_t i) const { return actions_[i]; }
  int& operator[](std::size_t i) { return actions_[i]; }
  std::span<const int> actions() const { return actions_; }
  int at(const ModelSpec& m, const State& st) const { return actions_[m.index(st)]; }
  void set(const ModelSpec& m, const State& st, int u) { actions_[m.index(st)] = u; }

  /// Throws ValidationError naming the first state whose action is infeasible.
  void validate(const ModelSpec& m) const;

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<int> actions_;
};

/// Precomputed sparse transition rows for every feasible (state, action).
/// Built once per model and shared by all evaluations on it.
class Mdp {
 public:
  struct Entry {
    std::uint32_t next;
    double prob;
  };
  struct Action {
    int u;
    double cost;  // d(n - u)
    std::vector<Entry> row;
  };

  explicit Mdp(const ModelSpec& m);

  const ModelSpec& model() const { return model_; }
  std::size_t num_states() const { return actions_.size(); }
  double beta() const { return model_.beta(); }

  /// Feasible actions of a state in increasing u.
  std::span<const Action> actions(std::size_t state) const { return actions_[state]; }
  const Action& action(std::size_t state, int u) const;

  /// H(state, u) = d(n - u) + beta E[V(next)].
  double q_value(std::size_t state, const Action& a, const ValueFunction& v) const;
  double q_value(std::size_t state, int u, const ValueFunction& v) const {
    return q_value(state, action(state, u), v);
  }

 private:
  ModelSpec model_;
  std::vector<std::vector<Action>> actions_;
};

struct SolveResult {
  ValueFunction value;
  Policy policy;
  int iterations = 0;
  double residual = 0.0;  // sup-norm of B V - V at the returned V
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// One Bellman step. Ties in the minimization go to the smallest u.
std::pair<ValueFunction, Policy> bellman_apply(const Mdp& mdp, const ValueFunction& v);
std::pair<ValueFunction, Policy> bellman_apply(const ModelSpec& m, const ValueFunction& v);

/// Iterates V <- BV until successive iterates differ by at most tol (1 - beta) / (2 beta).
/// Throws ConvergenceError when max_iter is reached first.
SolveResult value_iteration(const Mdp& mdp, const ValueFunction& v0, double tol, int max_iter);
SolveResult value_iteration(const ModelSpec& m, const ValueFunction& v0, double tol, int max_iter);

/// Howard policy iteration with exact evaluation, starting from the all-zero policy.
SolveResult policy_iteration(const Mdp& mdp);
SolveResult policy_iteration(const ModelSpec& m);

/// Solves V = d_f + beta P_f V with a dense LU factorization.
ValueFunction evaluate_policy(const Mdp& mdp, const Policy& f);
ValueFunction evaluate_policy(const ModelSpec& m, const Policy& f);

/// Transmits the most packets the battery allows in every state.
Policy greedy_policy(const ModelSpec& m);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trajectories = 0;
  int horizon = 0;
};

/// Smallest horizon T with beta^T max_d / (1 - beta) < tail.
int discounted_horizon(const ModelSpec& m, double tail);

/// Discounted cost of `f` from `start`, averaged over independent trajectories.
/// Trajectory k draws from its own generator seeded by (seed, k), so the result
/// does not depend on scheduling.
MonteCarloEstimate simulate_policy(const Mdp& mdp, const Policy& f, const State& start,
                                   std::size_t trajectories, int horizon, std::uint64_t seed);

}  // namespace ehsched
