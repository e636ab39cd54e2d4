#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "ehsched/experiments.hpp"
#include "ehsched/model.hpp"
#include "ehsched/monotone_search.hpp"
#include "ehsched/solver.hpp"
#include "ehsched/structure.hpp"

namespace ehsched {

// Grids put queue states 0..L on rows and battery states 0..B on columns,
// one block per channel state.

void write_value_csv(std::ostream& os, const ModelSpec& m, const ValueFunction& v);
void write_policy_csv(std::ostream& os, const ModelSpec& m, const Policy& f);
void write_violations_csv(std::ostream& os, std::span<const ViolationReport> reports);
/// Per-state comparison: n,s,h,v_star,v_policy,relative_gap.
void write_gap_csv(std::ostream& os, const ModelSpec& m, const ValueFunction& vstar, const GapReport& gap);
void write_checks_csv(std::ostream& os, const PresetRun& run);

void print_value_grid(std::ostream& os, const ModelSpec& m, const ValueFunction& v, int precision = 3);
void print_policy_grid(std::ostream& os, const ModelSpec& m, const Policy& f);
void print_violations(std::ostream& os, std::span<const ViolationReport> reports, std::size_t max_rows = 5);
void print_gap(std::ostream& os, const std::string& label, const GapReport& gap);
void print_preset_summary(std::ostream& os, const PresetRun& run);

std::string format_point(const StatePoint& p);

}  // namespace ehsched
