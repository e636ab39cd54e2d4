#include "ehsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace ehsched {

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("pmf must have at least one entry");
  double total = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!std::isfinite(probs_[k]) || probs_[k] < 0.0)
      throw ValidationError(fmt::format("pmf entry {} is negative or not finite ({})", k, probs_[k]));
    total += probs_[k];
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    throw ValidationError(fmt::format("pmf sums to {:.17g}, expected 1", total));
}

Pmf Pmf::point_mass(int value, int support_size) {
  if (value < 0 || value >= support_size)
    throw ValidationError(fmt::format("point mass at {} outside support of size {}", value, support_size));
  std::vector<double> probs(static_cast<std::size_t>(support_size), 0.0);
  probs[static_cast<std::size_t>(value)] = 1.0;
  return Pmf(std::move(probs));
}

Pmf Pmf::padded(int size) const {
  if (size <= 0) throw ValidationError("pmf support size must be positive");
  std::vector<double> out = probs_;
  if (static_cast<int>(out.size()) > size) {
    for (std::size_t k = static_cast<std::size_t>(size); k < out.size(); ++k)
      if (out[k] != 0.0)
        throw ValidationError(
            fmt::format("pmf has mass {} at value {}, outside support {{0..{}}}", out[k], k, size - 1));
  }
  out.resize(static_cast<std::size_t>(size), 0.0);
  return Pmf(std::move(out));
}

Pmf truncated_geometric(double p, int support_size, GeometricForm form) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(fmt::format("geometric parameter {} not in (0,1)", p));
  if (support_size <= 0) throw ValidationError("geometric support size must be positive");
  std::vector<double> mass(static_cast<std::size_t>(support_size));
  const double head = form == GeometricForm::kRatio ? 1.0 - p : p;
  const double ratio = form == GeometricForm::kRatio ? p : 1.0 - p;
  for (int k = 0; k < support_size; ++k) mass[static_cast<std::size_t>(k)] = head * std::pow(ratio, k);
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (auto& x : mass) x /= total;
  // Renormalization can leave the sum a few ulps away from 1.
  const double drift = 1.0 - std::accumulate(mass.begin(), mass.end(), 0.0);
  mass.front() += drift;
  return Pmf(std::move(mass));
}

std::vector<double> awgn_power_exact(double noise, double bandwidth, int max_packets) {
  if (!(noise > 0.0)) throw ValidationError(fmt::format("noise level N0 must be positive, got {}", noise));
  if (!(bandwidth > 0.0)) throw ValidationError(fmt::format("bandwidth W must be positive, got {}", bandwidth));
  if (max_packets < 0) throw ValidationError("packet count must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(max_packets) + 1);
  for (int u = 0; u <= max_packets; ++u)
    out[static_cast<std::size_t>(u)] = noise * bandwidth * (std::exp2(u / bandwidth) - 1.0);
  return out;
}

std::vector<int> awgn_power(double noise, double bandwidth, int max_packets) {
  const auto exact = awgn_power_exact(noise, bandwidth, max_packets);
  std::vector<int> out(exact.size());
  for (std::size_t u = 0; u < exact.size(); ++u) {
    if (!(exact[u] < static_cast<double>(std::numeric_limits<int>::max())))
      throw ValidationError(fmt::format("AWGN energy for {} packets overflows the integer battery scale", u));
    out[u] = static_cast<int>(std::floor(exact[u]));
  }
  return out;
}

std::string to_string(FadingCostRounding r) { return r == FadingCostRounding::kFloor ? "floor" : "ceil"; }

FadingCostRounding parse_fading_cost_rounding(const std::string& s) {
  if (s == "floor") return FadingCostRounding::kFloor;
  if (s == "ceil") return FadingCostRounding::kCeil;
  throw ValidationError(fmt::format("fading_cost_rounding must be 'floor' or 'ceil', got '{}'", s));
}

namespace {

void validate_power(const std::vector<int>& power) {
  if (power.front() != 0) throw ValidationError("power table must satisfy p(0) = 0");
  for (std::size_t u = 1; u < power.size(); ++u) {
    const bool in_zero_prefix = power[u - 1] == 0;
    if (power[u] < power[u - 1] || (!in_zero_prefix && power[u] == power[u - 1]))
      throw ValidationError(
          fmt::format("power table must be strictly increasing beyond its zero prefix (p({}) = {}, p({}) = {})",
                      u - 1, power[u - 1], u, power[u]));
  }
}

void validate_delay(const std::vector<double>& delay) {
  if (delay.front() != 0.0) throw ValidationError("delay table must satisfy d(0) = 0");
  for (std::size_t q = 0; q < delay.size(); ++q) {
    if (!std::isfinite(delay[q]) || delay[q] < 0.0)
      throw ValidationError(fmt::format("delay d({}) must be finite and non-negative", q));
    if (q > 0 && delay[q] < delay[q - 1])
      throw ValidationError(fmt::format("delay table must be weakly increasing (d({}) > d({}))", q - 1, q));
  }
}

}  // namespace

ModelSpec::ModelSpec(ModelParams params) : params_(std::move(params)) {
  auto& p = params_;
  if (p.buffer < 1) throw ValidationError(fmt::format("buffer length L must be positive, got {}", p.buffer));
  if (p.battery < 0) throw ValidationError(fmt::format("battery size B must be non-negative, got {}", p.battery));
  if (!(p.beta > 0.0 && p.beta < 1.0)) throw ValidationError(fmt::format("beta must lie in (0,1), got {}", p.beta));

  const auto rows = static_cast<std::size_t>(p.buffer) + 1;
  if (p.awgn) {
    auto table = awgn_power(p.awgn->noise, p.awgn->bandwidth, p.buffer);
    if (!p.power.empty() && p.power != table)
      throw ValidationError("power table disagrees with its AWGN parameters");
    p.power = std::move(table);
  }
  if (p.power.size() != rows)
    throw ValidationError(fmt::format("power table needs L+1 = {} entries, got {}", rows, p.power.size()));
  validate_power(p.power);
  if (p.delay.size() != rows)
    throw ValidationError(fmt::format("delay table needs L+1 = {} entries, got {}", rows, p.delay.size()));
  validate_delay(p.delay);

  p.arrivals = p.arrivals.padded(p.buffer + 1);
  p.energy = p.energy.padded(p.battery + 1);

  std::vector<double> exact(p.power.begin(), p.power.end());
  if (p.awgn) exact = awgn_power_exact(p.awgn->noise, p.awgn->bandwidth, p.buffer);

  if (p.channel) {
    auto& ch = *p.channel;
    if (ch.gains.empty()) throw ValidationError("channel needs at least one state");
    for (std::size_t h = 0; h < ch.gains.size(); ++h)
      if (!(ch.gains[h] > 0.0) || !std::isfinite(ch.gains[h]))
        throw ValidationError(fmt::format("channel gain g({}) must be positive", h + 1));
    ch.pmf = ch.pmf.padded(static_cast<int>(ch.gains.size()));
    channel_states_ = static_cast<int>(ch.gains.size());
    channel_pmf_ = ch.pmf;
  }

  cost_.resize(rows * static_cast<std::size_t>(channel_states_));
  for (int h = 0; h < channel_states_; ++h) {
    for (std::size_t u = 0; u < rows; ++u) {
      int c = p.power[u];
      if (p.channel) {
        const double scaled = exact[u] / p.channel->gains[static_cast<std::size_t>(h)];
        c = static_cast<int>(p.fading_cost_rounding == FadingCostRounding::kFloor ? std::floor(scaled)
                                                                                   : std::ceil(scaled));
      }
      cost_[static_cast<std::size_t>(h) * rows + u] = c;
    }
  }
}

State ModelSpec::state_at(std::size_t idx) const {
  State st;
  const auto hs = static_cast<std::size_t>(channel_states_);
  const auto ss = static_cast<std::size_t>(battery() + 1);
  st.h = static_cast<int>(idx % hs);
  idx /= hs;
  st.s = static_cast<int>(idx % ss);
  st.n = static_cast<int>(idx / ss);
  return st;
}

bool ModelSpec::valid(const State& st) const {
  return st.n >= 0 && st.n <= buffer() && st.s >= 0 && st.s <= battery() && st.h >= 0 &&
         st.h < channel_states_;
}

std::vector<State> ModelSpec::states() const {
  std::vector<State> out;
  out.reserve(num_states());
  for (std::size_t i = 0; i < num_states(); ++i) out.push_back(state_at(i));
  return out;
}

std::vector<int> feasible_actions(const ModelSpec& m, const State& st) {
  if (!m.valid(st)) throw ValidationError(fmt::format("state ({},{},{}) out of range", st.n, st.s, st.h + 1));
  std::vector<int> out;
  for (int u = 0; u <= st.n; ++u)
    if (m.cost(u, st.h) <= st.s) out.push_back(u);
  return out;
}

int max_feasible_action(const ModelSpec& m, const State& st) { return feasible_actions(m, st).back(); }

std::vector<Outcome> transition(const ModelSpec& m, const State& st, int u) {
  if (!m.valid(st)) throw ValidationError(fmt::format("state ({},{},{}) out of range", st.n, st.s, st.h + 1));
  if (u < 0 || u > st.n || m.cost(u, st.h) > st.s)
    throw ValidationError(fmt::format("action {} infeasible in state ({},{},{})", u, st.n, st.s, st.h + 1));

  std::vector<double> dense(m.num_states(), 0.0);
  const int queue_left = st.n - u;
  const int energy_left = st.s - m.cost(u, st.h);
  const auto& pa = m.arrivals().probs();
  const auto& pe = m.energy().probs();
  const auto& ph = m.channel_pmf().probs();
  for (std::size_t a = 0; a < pa.size(); ++a) {
    if (pa[a] == 0.0) continue;
    const int next_n = std::min(queue_left + static_cast<int>(a), m.buffer());
    for (std::size_t e = 0; e < pe.size(); ++e) {
      if (pe[e] == 0.0) continue;
      const int next_s = std::min(energy_left + static_cast<int>(e), m.battery());
      for (std::size_t h = 0; h < ph.size(); ++h) {
        if (ph[h] == 0.0) continue;
        dense[m.index({next_n, next_s, static_cast<int>(h)})] += pa[a] * pe[e] * ph[h];
      }
    }
  }
  std::vector<Outcome> out;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] > 0.0) out.push_back({m.state_at(i), dense[i]});
  return out;
}

}  // namespace ehsched
