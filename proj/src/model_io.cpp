#include "ehsched/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ehsched/experiments.hpp"

namespace ehsched {

using nlohmann::json;

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{} (line {}): {}", field, line, message)
                                  : fmt::format("{}: {}", field, message)),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string dotted;
    std::size_t pos = 0;
    int line = 0;
    for (const auto& key : path) {
      if (!dotted.empty()) dotted += '.';
      dotted += key;
      const auto found = text_.find('"' + key + '"', pos);
      if (found == std::string::npos) break;
      pos = found;
      line = line_at(text_, found);
    }
    throw ConfigError(dotted, line, message);
  }

  const json& require(const json& obj, const std::vector<std::string>& path) const {
    if (!obj.is_object() || !obj.contains(path.back())) fail(path, "required field is missing");
    return obj.at(path.back());
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, path));
    return out;
  }

  std::vector<int> integers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of integers");
    std::vector<int> out;
    for (const auto& x : v) out.push_back(integer(x, path));
    return out;
  }

  Pmf pmf(const json& v, std::vector<std::string> path, int max_value) const {
    if (!v.is_object() || v.size() != 1) fail(path, "expected {\"table\": [...]} or {\"geometric\": {...}}");
    try {
      if (v.contains("table")) {
        path.push_back("table");
        return Pmf(numbers(v.at("table"), path)).padded(max_value + 1);
      }
      if (v.contains("geometric")) {
        path.push_back("geometric");
        const auto& g = v.at("geometric");
        if (!g.is_object()) fail(path, "expected an object");
        PmfInterpretation interp{GeometricForm::kRatio, max_value + 1, 0};
        auto sub = [&](const char* key) {
          auto p = path;
          p.push_back(key);
          return p;
        };
        const double p = number(require(g, sub("p")), sub("p"));
        if (g.contains("form")) {
          const auto form = string(g.at("form"), sub("form"));
          if (form == "ratio") interp.form = GeometricForm::kRatio;
          else if (form == "success") interp.form = GeometricForm::kSuccess;
          else fail(sub("form"), "expected 'ratio' or 'success'");
        }
        if (g.contains("support")) interp.support_size = integer(g.at("support"), sub("support"));
        if (g.contains("origin")) interp.origin = integer(g.at("origin"), sub("origin"));
        if (interp.origin < 0 || interp.origin > max_value) fail(sub("origin"), "origin outside the domain");
        return interpret_geometric(p, max_value, interp);
      }
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
    fail(path, "expected {\"table\": [...]} or {\"geometric\": {...}}");
  }

 private:
  const std::string& text_;
};

}  // namespace

ModelSpec parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  const Reader r(text);
  if (!doc.is_object()) r.fail({"<document>"}, "expected a JSON object");

  static const std::vector<std::string> known{"L",     "B",        "beta",   "power",   "delay",
                                              "arrivals", "energy", "channel", "fading_cost_rounding"};
  for (const auto& [key, value] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) r.fail({key}, "unknown field");

  ModelParams p;
  p.buffer = r.integer(r.require(doc, {"L"}), {"L"});
  p.battery = r.integer(r.require(doc, {"B"}), {"B"});
  p.beta = r.number(r.require(doc, {"beta"}), {"beta"});
  if (p.buffer < 1) r.fail({"L"}, "must be a positive integer");
  if (p.battery < 0) r.fail({"B"}, "must be a non-negative integer");
  if (!(p.beta > 0.0 && p.beta < 1.0)) r.fail({"beta"}, "must lie in (0,1)");

  const auto& power = r.require(doc, {"power"});
  if (power.is_object() && power.contains("table")) {
    p.power = r.integers(power.at("table"), {"power", "table"});
  } else if (power.is_object() && power.contains("awgn")) {
    const auto& a = power.at("awgn");
    p.awgn = AwgnParams{r.number(r.require(a, {"power", "awgn", "N0"}), {"power", "awgn", "N0"}),
                        r.number(r.require(a, {"power", "awgn", "W"}), {"power", "awgn", "W"})};
    try {
      awgn_power(p.awgn->noise, p.awgn->bandwidth, p.buffer);
    } catch (const ValidationError& e) {
      r.fail({"power", "awgn"}, e.what());
    }
  } else {
    r.fail({"power"}, "expected {\"table\": [...]} or {\"awgn\": {\"N0\": .., \"W\": ..}}");
  }

  const auto& delay = r.require(doc, {"delay"});
  if (delay.is_string() && delay.get<std::string>() == "linear") {
    p.delay.resize(static_cast<std::size_t>(p.buffer) + 1);
    std::iota(p.delay.begin(), p.delay.end(), 0.0);
  } else if (delay.is_object() && delay.contains("table")) {
    p.delay = r.numbers(delay.at("table"), {"delay", "table"});
  } else {
    r.fail({"delay"}, "expected \"linear\" or {\"table\": [...]}");
  }

  p.arrivals = r.pmf(r.require(doc, {"arrivals"}), {"arrivals"}, p.buffer);
  p.energy = r.pmf(r.require(doc, {"energy"}), {"energy"}, p.battery);

  if (doc.contains("channel")) {
    const auto& ch = doc.at("channel");
    Channel channel;
    channel.gains = r.numbers(r.require(ch, {"channel", "gains"}), {"channel", "gains"});
    try {
      channel.pmf = Pmf(r.numbers(r.require(ch, {"channel", "pmf"}), {"channel", "pmf"}))
                        .padded(static_cast<int>(channel.gains.size()));
    } catch (const ValidationError& e) {
      r.fail({"channel", "pmf"}, e.what());
    }
    p.channel = std::move(channel);
  }
  if (doc.contains("fading_cost_rounding")) {
    try {
      p.fading_cost_rounding = parse_fading_cost_rounding(
          r.string(doc.at("fading_cost_rounding"), {"fading_cost_rounding"}));
    } catch (const ValidationError& e) {
      r.fail({"fading_cost_rounding"}, e.what());
    }
  }

  try {
    return ModelSpec(std::move(p));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    std::string field = "<model>";
    for (const char* key : {"power", "delay", "channel", "arrivals", "energy"})
      if (what.find(key) != std::string::npos) {
        field = key;
        break;
      }
    r.fail({field}, what);
  }
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open model file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string dump_model(const ModelSpec& m) {
  const auto& p = m.params();
  json doc;
  doc["L"] = p.buffer;
  doc["B"] = p.battery;
  doc["beta"] = p.beta;
  if (p.awgn)
    doc["power"] = {{"awgn", {{"N0", p.awgn->noise}, {"W", p.awgn->bandwidth}}}};
  else
    doc["power"] = {{"table", p.power}};
  doc["delay"] = {{"table", p.delay}};
  auto table = [](const Pmf& pmf) {
    return json{{"table", std::vector<double>(pmf.probs().begin(), pmf.probs().end())}};
  };
  doc["arrivals"] = table(p.arrivals);
  doc["energy"] = table(p.energy);
  if (p.channel) {
    doc["channel"] = {{"gains", p.channel->gains},
                      {"pmf", std::vector<double>(p.channel->pmf.probs().begin(), p.channel->pmf.probs().end())}};
  }
  doc["fading_cost_rounding"] = to_string(p.fading_cost_rounding);
  return doc.dump(2) + "\n";
}

}  // namespace ehsched
