#include "ehsched/structure.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ehsched {

std::string to_string(Family f) { return f == Family::kQueue ? "queue" : "battery"; }

Family parse_family(const std::string& s) {
  if (s == "queue" || s == "n") return Family::kQueue;
  if (s == "battery" || s == "s") return Family::kBattery;
  throw ValidationError(fmt::format("family must be 'queue' or 'battery', got '{}'", s));
}

std::string to_string(Property p) {
  switch (p) {
    case Property::kValueMonotoneInN: return "M_in_n";
    case Property::kValueMonotoneInS: return "M_in_s";
    case Property::kHMonotoneInN: return "H_prop1";
    case Property::kHDiagonal: return "H_prop2";
    case Property::kHAntitoneInS: return "H_prop3";
    case Property::kSubmodularNU: return "submodular_nu";
    case Property::kSubmodularSU: return "submodular_su";
    case Property::kLatticeSubmodularNU: return "lattice_submodular_nu";
    case Property::kLatticeSubmodularSU: return "lattice_submodular_su";
    case Property::kPolicyMonotoneN: return "policy_monotone_n";
    case Property::kPolicyMonotoneS: return "policy_monotone_s";
  }
  return "unknown";
}

bool ViolationReport::has_pair(const State& a, const State& b) const {
  return std::any_of(witnesses.begin(), witnesses.end(), [&](const Witness& w) {
    return w.points.size() >= 2 && w.points[0].state == a && w.points[1].state == b;
  });
}

bool all_hold(std::span<const ViolationReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ViolationReport& r) { return r.holds(); });
}

namespace {

bool violates(double lhs, double rhs) { return lhs > rhs + kComparisonTolerance; }

bool feasible(const ModelSpec& m, const State& st, int u) {
  return u >= 0 && u <= st.n && m.cost(u, st.h) <= st.s;
}

}  // namespace

std::vector<ViolationReport> check_value_monotone(const ModelSpec& m, const ValueFunction& v) {
  ViolationReport in_n{Property::kValueMonotoneInN, {}};
  ViolationReport in_s{Property::kValueMonotoneInS, {}};
  for (const State& st : m.states()) {
    if (st.n < m.buffer()) {
      const State up{st.n + 1, st.s, st.h};
      const double lo = v.at(m, st), hi = v.at(m, up);
      if (violates(lo, hi)) in_n.witnesses.push_back({{{st, {}}, {up, {}}}, lo, hi});
    }
    if (st.s < m.battery()) {
      const State up{st.n, st.s + 1, st.h};
      const double lo = v.at(m, up), hi = v.at(m, st);
      if (violates(lo, hi)) in_s.witnesses.push_back({{{st, {}}, {up, {}}}, lo, hi});
    }
  }
  return {std::move(in_n), std::move(in_s)};
}

std::vector<ViolationReport> check_h_properties(const Mdp& mdp, const ValueFunction& v) {
  const auto& m = mdp.model();
  std::vector<ViolationReport> out{{Property::kHMonotoneInN, {}},
                                   {Property::kHDiagonal, {}},
                                   {Property::kHAntitoneInS, {}}};
  if (!all_hold(check_value_monotone(m, v))) {
    for (auto& r : out) r.vacuous = true;
    return out;
  }
  auto h_value = [&](const State& st, int u) { return mdp.q_value(m.index(st), u, v); };

  for (const State& st : m.states()) {
    if (st.n < m.buffer()) {
      const State up{st.n + 1, st.s, st.h};
      for (const auto& a : mdp.actions(m.index(st))) {
        const double lhs = h_value(st, a.u), rhs = h_value(up, a.u);
        if (violates(lhs, rhs)) out[0].witnesses.push_back({{{st, a.u}, {up, a.u}}, lhs, rhs});
      }
      if (feasible(m, st, st.n) && feasible(m, up, up.n)) {
        const double lhs = h_value(st, st.n), rhs = h_value(up, up.n);
        if (violates(lhs, rhs)) out[1].witnesses.push_back({{{st, st.n}, {up, up.n}}, lhs, rhs});
      }
    }
    if (st.s < m.battery()) {
      const State up{st.n, st.s + 1, st.h};
      for (const auto& a : mdp.actions(m.index(st))) {
        const double lhs = h_value(up, a.u), rhs = h_value(st, a.u);
        if (violates(lhs, rhs)) out[2].witnesses.push_back({{{up, a.u}, {st, a.u}}, lhs, rhs});
      }
    }
  }
  return out;
}

std::vector<ViolationReport> check_submodularity(const Mdp& mdp, const ValueFunction& v) {
  const auto& m = mdp.model();
  const auto& ph = m.channel_pmf();

  auto h_value = [&](const State& st, int u) { return mdp.q_value(m.index(st), u, v); };
  // V(n - u, s - cost(u, h)) averaged over the next channel state.
  auto lattice_value = [&](const State& st, int u) {
    double acc = 0.0;
    for (int h = 0; h < m.channel_states(); ++h)
      acc += ph[h] * v.at(m, {st.n - u, st.s - m.cost(u, st.h), h});
    return acc;
  };

  std::vector<ViolationReport> out{{Property::kSubmodularNU, {}},
                                   {Property::kSubmodularSU, {}},
                                   {Property::kLatticeSubmodularNU, {}},
                                   {Property::kLatticeSubmodularSU, {}}};

  auto probe = [&](ViolationReport& report, auto&& fn, const State& lo, const State& hi, int u) {
    // fn(hi,u+1) + fn(lo,u) <= fn(hi,u) + fn(lo,u+1)
    const double lhs = fn(hi, u + 1) + fn(lo, u);
    const double rhs = fn(hi, u) + fn(lo, u + 1);
    if (violates(lhs, rhs))
      report.witnesses.push_back({{{lo, u}, {hi, u}, {lo, u + 1}, {hi, u + 1}}, lhs, rhs});
  };

  for (const State& st : m.states()) {
    // Every corner is feasible iff (st, u + 1) is.
    for (int u = 0; feasible(m, st, u + 1); ++u) {
      if (st.n < m.buffer()) {
        const State up{st.n + 1, st.s, st.h};
        probe(out[0], h_value, st, up, u);
        probe(out[2], lattice_value, st, up, u);
      }
      if (st.s < m.battery()) {
        const State up{st.n, st.s + 1, st.h};
        probe(out[1], h_value, st, up, u);
        probe(out[3], lattice_value, st, up, u);
      }
    }
  }
  return out;
}

ViolationReport check_policy_monotone(const ModelSpec& m, const Policy& f, Family family) {
  ViolationReport report{family == Family::kQueue ? Property::kPolicyMonotoneN : Property::kPolicyMonotoneS, {}};
  for (const State& st : m.states()) {
    State up = st;
    if (family == Family::kQueue) {
      if (st.n == m.buffer()) continue;
      ++up.n;
    } else {
      if (st.s == m.battery()) continue;
      ++up.s;
    }
    const int lo = f.at(m, st), hi = f.at(m, up);
    if (lo > hi)
      report.witnesses.push_back({{{st, lo}, {up, hi}}, static_cast<double>(lo), static_cast<double>(hi)});
  }
  return report;
}

std::vector<ViolationReport> check_policy_monotone(const ModelSpec& m, const Policy& f) {
  return {check_policy_monotone(m, f, Family::kQueue), check_policy_monotone(m, f, Family::kBattery)};
}

}  // namespace ehsched
