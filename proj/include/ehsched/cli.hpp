#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ehsched/structure.hpp"

namespace ehsched {

enum class Command { kSolve, kCheck, kEnumerate, kBestMonotone, kGreedyGap, kReproduce };
enum class OutputFormat { kText, kCsv };

struct RunConfig {
  Command command = Command::kSolve;
  std::optional<std::filesystem::path> model_path;
  std::optional<Family> family;
  std::filesystem::path output_dir = "ehsched-out";
  OutputFormat format = OutputFormat::kText;

  std::optional<std::filesystem::path> dump_model;
  std::string method = "pi";  // pi | vi
  bool count_only = false;
  bool list = false;
  std::uint64_t budget = 20'000'000;
  unsigned threads = 0;  // 0: all cores
  std::size_t mc_trajectories = 0;
  std::uint64_t seed = 20190401;
  std::vector<std::string> presets;
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kReproduction = 2;
}  // namespace exit_code

/// Parses and dispatches. Diagnostics go to `err`, tables to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehsched
