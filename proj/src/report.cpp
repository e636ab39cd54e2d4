#include "ehsched/report.hpp"

#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace ehsched {

namespace {

template <class Cell>
void csv_grid(std::ostream& os, const ModelSpec& m, Cell&& cell) {
  os << "h,n";
  for (int s = 0; s <= m.battery(); ++s) os << ",s" << s;
  os << '\n';
  for (int h = 0; h < m.channel_states(); ++h) {
    for (int n = 0; n <= m.buffer(); ++n) {
      os << h + 1 << ',' << n;
      for (int s = 0; s <= m.battery(); ++s) os << ',' << cell(State{n, s, h});
      os << '\n';
    }
  }
}

template <class Cell>
void text_grid(std::ostream& os, const ModelSpec& m, int width, Cell&& cell) {
  for (int h = 0; h < m.channel_states(); ++h) {
    if (m.fading()) fmt::print(os, "h = {}\n", h + 1);
    fmt::print(os, "{:>4} |", "n\\s");
    for (int s = 0; s <= m.battery(); ++s) fmt::print(os, " {:>{}}", s, width);
    os << '\n' << std::string(6 + static_cast<std::size_t>((width + 1) * (m.battery() + 1)), '-') << '\n';
    for (int n = 0; n <= m.buffer(); ++n) {
      fmt::print(os, "{:>4} |", n);
      for (int s = 0; s <= m.battery(); ++s) fmt::print(os, " {:>{}}", cell(State{n, s, h}), width);
      os << '\n';
    }
  }
}

}  // namespace

std::string format_point(const StatePoint& p) {
  if (p.action) return fmt::format("({},{},{};u={})", p.state.n, p.state.s, p.state.h + 1, *p.action);
  return fmt::format("({},{},{})", p.state.n, p.state.s, p.state.h + 1);
}

void write_value_csv(std::ostream& os, const ModelSpec& m, const ValueFunction& v) {
  csv_grid(os, m, [&](const State& st) { return fmt::format("{:.17g}", v.at(m, st)); });
}

void write_policy_csv(std::ostream& os, const ModelSpec& m, const Policy& f) {
  csv_grid(os, m, [&](const State& st) { return f.at(m, st); });
}

void write_violations_csv(std::ostream& os, std::span<const ViolationReport> reports) {
  os << "property,vacuous,points,lhs,rhs\n";
  for (const auto& r : reports) {
    if (r.vacuous) {
      fmt::print(os, "{},1,,,\n", to_string(r.property));
      continue;
    }
    for (const auto& w : r.witnesses) {
      std::string points;
      for (const auto& p : w.points) points += (points.empty() ? "" : " ") + format_point(p);
      fmt::print(os, "{},0,{},{:.17g},{:.17g}\n", to_string(r.property), points, w.lhs, w.rhs);
    }
  }
}

void write_gap_csv(std::ostream& os, const ModelSpec& m, const ValueFunction& vstar, const GapReport& gap) {
  os << "n,s,h,v_star,v_policy,relative_gap\n";
  for (std::size_t i = 0; i < vstar.size(); ++i) {
    const State st = m.state_at(i);
    const double rel = vstar[i] > 0.0 ? (gap.best_value[i] - vstar[i]) / vstar[i] : 0.0;
    fmt::print(os, "{},{},{},{:.17g},{:.17g},{:.17g}\n", st.n, st.s, st.h + 1, vstar[i], gap.best_value[i], rel);
  }
}

void write_checks_csv(std::ostream& os, const PresetRun& run) {
  os << "preset,quantity,expected,computed,tolerance,kind,status\n";
  for (const auto& c : run.checks)
    fmt::print(os, "{},\"{}\",{:.17g},{:.17g},{},{},{}\n", to_string(run.preset.name), c.quantity, c.expected,
               c.computed, c.tolerance, c.hard ? "hard" : "soft", c.passed ? "pass" : "FAIL");
}

void print_value_grid(std::ostream& os, const ModelSpec& m, const ValueFunction& v, int precision) {
  text_grid(os, m, precision + 5, [&](const State& st) { return fmt::format("{:.{}f}", v.at(m, st), precision); });
}

void print_policy_grid(std::ostream& os, const ModelSpec& m, const Policy& f) {
  text_grid(os, m, 2, [&](const State& st) { return f.at(m, st); });
}

void print_violations(std::ostream& os, std::span<const ViolationReport> reports, std::size_t max_rows) {
  for (const auto& r : reports) {
    if (r.vacuous) {
      fmt::print(os, "  {:<24} vacuous (V not in class M)\n", to_string(r.property));
      continue;
    }
    fmt::print(os, "  {:<24} {}\n", to_string(r.property),
               r.witnesses.empty() ? std::string("holds") : fmt::format("{} violation(s)", r.witnesses.size()));
    for (std::size_t k = 0; k < std::min(max_rows, r.witnesses.size()); ++k) {
      const auto& w = r.witnesses[k];
      std::string points;
      for (const auto& p : w.points) points += (points.empty() ? "" : " ") + format_point(p);
      fmt::print(os, "      {}  lhs={:.6g} rhs={:.6g}\n", points, w.lhs, w.rhs);
    }
    if (r.witnesses.size() > max_rows) fmt::print(os, "      ... {} more\n", r.witnesses.size() - max_rows);
  }
}

void print_gap(std::ostream& os, const std::string& label, const GapReport& gap) {
  fmt::print(os, "{}: alpha = {:.4f} at ({},{},{}), sup|V - V*| = {:.6g}, policies searched = {}\n", label,
             gap.alpha, gap.worst_state.n, gap.worst_state.s, gap.worst_state.h + 1, gap.objective,
             gap.enumerated_count);
}

void print_preset_summary(std::ostream& os, const PresetRun& run) {
  const auto& m = run.preset.model;
  fmt::print(os, "== {} ==\n", to_string(run.preset.name));
  fmt::print(os, "{:<44} {:>12} {:>12} {:>9}  {}\n", "quantity", "expected", "computed", "tol", "status");
  for (const auto& c : run.checks)
    fmt::print(os, "{:<44} {:>12.6g} {:>12.6g} {:>9.3g}  {}{}\n", c.quantity, c.expected, c.computed, c.tolerance,
               c.passed ? "pass" : "FAIL", c.hard ? "" : " (soft)");
  os << "optimal policy f*:\n";
  print_policy_grid(os, m, run.optimal.policy);
  os << (run.preset.heuristic_overrides.empty() ? "best monotone policy:\n" : "heuristic monotone policy:\n");
  print_policy_grid(os, m, run.monotone.best_policy);
  fmt::print(os, "{} monotone policies in the {} family\n", run.monotone_count.str(),
             to_string(run.preset.family));
  os << '\n';
}

}  // namespace ehsched
