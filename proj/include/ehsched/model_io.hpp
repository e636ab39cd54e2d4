#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ehsched/model.hpp"

namespace ehsched {

/// A model file that is malformed or fails validation. `field` is a dotted
/// path into the document; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Parses the JSON model schema:
///
///   {
///     "L": 5, "B": 5, "beta": 0.99,
///     "power":    {"table": [0, 1, 4, ...]}  |  {"awgn": {"N0": 2.0, "W": 1.75}},
///     "delay":    {"table": [0, 1, 2, ...]}  |  "linear",
///     "arrivals": {"table": [...]}  |  {"geometric": {"p": 0.9, "form": "ratio"|"success",
///                                                     "support": 6, "origin": 0}},
///     "energy":   same as arrivals,
///     "channel":  {"gains": [0.7, 0.8], "pmf": [0.4, 0.6]},        (optional)
///     "fading_cost_rounding": "floor" | "ceil"                     (optional, default ceil)
///   }
///
/// Geometric defaults: form "ratio" ((1-p) p^k), support L+1 (B+1 for energy), origin 0.
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::filesystem::path& path);

/// Canonical JSON for a model; parse_model(dump_model(m)) == m.
std::string dump_model(const ModelSpec& m);

}  // namespace ehsched
