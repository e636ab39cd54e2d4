#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/solver.hpp"

namespace ehsched {

/// Policy families: weakly increasing in the queue state, or in the battery state.
enum class Family { kQueue, kBattery };

std::string to_string(Family f);
Family parse_family(const std::string& s);

enum class Property {
  kValueMonotoneInN,   // V weakly increasing in n
  kValueMonotoneInS,   // V weakly decreasing in s
  kHMonotoneInN,       // H(n,s,u) <= H(n+1,s,u)
  kHDiagonal,          // H(n,s,n) <= H(n+1,s,n+1)
  kHAntitoneInS,       // H(n,s+1,u) <= H(n,s,u)
  kSubmodularNU,       // H submodular in (n,u)
  kSubmodularSU,       // H submodular in (s,u)
  kLatticeSubmodularNU,  // V(n-u, s-p(u)) submodular in (n,u)
  kLatticeSubmodularSU,  // V(n-u, s-p(u)) submodular in (s,u)
  kPolicyMonotoneN,
  kPolicyMonotoneS,
};

std::string to_string(Property p);

struct StatePoint {
  State state;
  std::optional<int> action;
};

/// One failed inequality lhs <= rhs at the listed points.
struct Witness {
  std::vector<StatePoint> points;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ViolationReport {
  Property property;
  std::vector<Witness> witnesses;
  /// The property's hypothesis failed, so the check was not run.
  bool vacuous = false;

  bool holds() const { return !vacuous && witnesses.empty(); }
  /// True when some witness involves exactly these points in order (actions ignored).
  bool has_pair(const State& a, const State& b) const;
};

bool all_hold(std::span<const ViolationReport> reports);

constexpr double kComparisonTolerance = 1e-9;

/// Class-M check: {in n, in s}.
std::vector<ViolationReport> check_value_monotone(const ModelSpec& m, const ValueFunction& v);

/// The three monotonicity properties of H built from V. All three are marked
/// vacuous when V is not in class M.
std::vector<ViolationReport> check_h_properties(const Mdp& mdp, const ValueFunction& v);

/// Submodularity probes: H in (n,u), H in (s,u), and V(n-u, s-p(u)) in (n,u) and (s,u).
/// Only quadruples whose four corners are feasible are examined.
std::vector<ViolationReport> check_submodularity(const Mdp& mdp, const ValueFunction& v);

ViolationReport check_policy_monotone(const ModelSpec& m, const Policy& f, Family family);
/// Both families: {queue, battery}.
std::vector<ViolationReport> check_policy_monotone(const ModelSpec& m, const Policy& f);

}  // namespace ehsched
