#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ehsched/model.hpp"
#include "ehsched/solver.hpp"
#include "ehsched/structure.hpp"

namespace ehsched {

using BigCount = boost::multiprecision::cpp_int;

/// Refusal to enumerate a policy space larger than the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(BigCount bound, std::uint64_t budget);
  const BigCount& bound() const { return bound_; }

 private:
  BigCount bound_;
};

constexpr std::uint64_t kDefaultEnumerationBudget = 20'000'000;

/// Lines of the state grid along which a family must be weakly increasing:
/// one per (s, h) running over n for the queue family, one per (n, h) running
/// over s for the battery family. Entries are state indices.
std::vector<std::vector<std::size_t>> monotone_lines(const ModelSpec& m, Family family);

/// Exact number of feasible policies in the family, by a per-line dynamic
/// program over (position, last action). Does not materialize any policy.
BigCount count_monotone(const ModelSpec& m, Family family);

/// The set of feasible monotone policies as a product of per-line choices.
/// Index order is lexicographic with line 0 most significant.
class MonotonePolicySpace {
 public:
  MonotonePolicySpace(const ModelSpec& m, Family family,
                      std::uint64_t budget = kDefaultEnumerationBudget);

  const ModelSpec& model() const { return model_; }
  Family family() const { return family_; }
  std::uint64_t size() const { return size_; }

  Policy policy_at(std::uint64_t index) const;

  /// Visits policies [begin, end) in index order. `fn(index, policy)`; the
  /// policy object is reused between calls.
  void for_range(std::uint64_t begin, std::uint64_t end,
                 const std::function<void(std::uint64_t, const Policy&)>& fn) const;

 private:
  ModelSpec model_;
  Family family_;
  std::vector<std::vector<std::size_t>> lines_;
  std::vector<std::vector<std::vector<int>>> choices_;  // per line: increasing sequences
  std::uint64_t size_ = 0;
};

/// Streams every feasible policy of the family exactly once.
void enumerate_monotone(const ModelSpec& m, Family family, const std::function<void(const Policy&)>& fn,
                        std::uint64_t budget = kDefaultEnumerationBudget);

struct GapReport {
  Policy best_policy;
  ValueFunction best_value;
  double alpha = 0.0;       // max_st (V_f - V*) / V*, over states with V* > 0
  State worst_state;
  std::uint64_t enumerated_count = 1;
  double objective = 0.0;   // max_st |V_f - V*|
};

/// Gap of a single fixed policy against V*.
GapReport policy_gap(const Mdp& mdp, const Policy& f, const ValueFunction& vstar);

struct SearchOptions {
  std::uint64_t budget = kDefaultEnumerationBudget;
  unsigned threads = 1;
};

/// Exhaustive minimax search over the family; ties keep the first enumerated policy.
GapReport best_monotone(const Mdp& mdp, Family family, const ValueFunction& vstar,
                        const SearchOptions& options = {});

GapReport greedy_gap(const Mdp& mdp, const ValueFunction& vstar);

}  // namespace ehsched
