#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehsched {

/// Raised when a model, pmf or policy fails validation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite probability mass function over {0, ..., support_size - 1}.
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-12;

  Pmf() : probs_{1.0} {}
  explicit Pmf(std::vector<double> probs);

  static Pmf point_mass(int value, int support_size);

  std::span<const double> probs() const { return probs_; }
  int support_size() const { return static_cast<int>(probs_.size()); }
  double operator[](int k) const {
    return k >= 0 && k < support_size() ? probs_[static_cast<std::size_t>(k)] : 0.0;
  }

  /// Zero-pads on the right up to `size`. Shrinking is allowed only over zero entries.
  Pmf padded(int size) const;

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probs_;
};

/// How a "Geom(p)" label maps to masses over k = 0, 1, 2, ...
enum class GeometricForm {
  kRatio,    ///< mass(k) ∝ (1 - p) p^k
  kSuccess,  ///< mass(k) ∝ p (1 - p)^k
};

/// Geometric pmf restricted to {0, ..., support_size - 1} and renormalized.
Pmf truncated_geometric(double p, int support_size, GeometricForm form = GeometricForm::kRatio);

/// Unfloored AWGN energy curve N0 W (2^{u/W} - 1) for u = 0..max_packets.
std::vector<double> awgn_power_exact(double noise, double bandwidth, int max_packets);

/// Integer AWGN energy table floor(N0 W (2^{u/W} - 1)).
std::vector<int> awgn_power(double noise, double bandwidth, int max_packets);

struct AwgnParams {
  double noise = 1.0;      // N0
  double bandwidth = 1.0;  // W
  friend bool operator==(const AwgnParams&, const AwgnParams&) = default;
};

enum class FadingCostRounding { kFloor, kCeil };

std::string to_string(FadingCostRounding r);
FadingCostRounding parse_fading_cost_rounding(const std::string& s);

struct Channel {
  std::vector<double> gains;
  Pmf pmf;
  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Raw problem description. Validated and normalized by ModelSpec.
struct ModelParams {
  int buffer = 1;   // L
  int battery = 1;  // B
  double beta = 0.9;
  /// Integer energy table p(0..L). Filled from `awgn` when empty.
  std::vector<int> power;
  /// AWGN source of the power table; its unfloored curve drives the fading cost.
  std::optional<AwgnParams> awgn;
  std::vector<double> delay;
  Pmf arrivals;
  Pmf energy;
  std::optional<Channel> channel;
  FadingCostRounding fading_cost_rounding = FadingCostRounding::kCeil;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Queue occupancy, battery level and channel index. `h` is zero-based;
/// non-fading models have a single channel state h = 0.
struct State {
  int n = 0;
  int s = 0;
  int h = 0;
  friend bool operator==(const State&, const State&) = default;
};

/// A validated, immutable problem instance.
class ModelSpec {
 public:
  explicit ModelSpec(ModelParams params);

  const ModelParams& params() const { return params_; }
  int buffer() const { return params_.buffer; }
  int battery() const { return params_.battery; }
  double beta() const { return params_.beta; }
  int channel_states() const { return channel_states_; }
  bool fading() const { return params_.channel.has_value(); }

  std::span<const int> power() const { return params_.power; }
  std::span<const double> delay() const { return params_.delay; }
  double delay(int q) const { return params_.delay[static_cast<std::size_t>(q)]; }
  const Pmf& arrivals() const { return params_.arrivals; }
  const Pmf& energy() const { return params_.energy; }
  /// Channel-state pmf; a point mass for non-fading models.
  const Pmf& channel_pmf() const { return channel_pmf_; }

  /// Integer energy drawn when sending u packets in channel state h.
  int cost(int u, int h) const {
    return cost_[static_cast<std::size_t>(h * (buffer() + 1) + u)];
  }

  std::size_t num_states() const {
    return static_cast<std::size_t>((buffer() + 1) * (battery() + 1) * channel_states_);
  }
  std::size_t index(const State& st) const {
    return static_cast<std::size_t>((st.n * (battery() + 1) + st.s) * channel_states_ + st.h);
  }
  State state_at(std::size_t idx) const;
  bool valid(const State& st) const;
  std::vector<State> states() const;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) { return a.params_ == b.params_; }

 private:
  ModelParams params_;
  int channel_states_ = 1;
  Pmf channel_pmf_;
  std::vector<int> cost_;
};

/// U(n, s, h) in increasing order. Always contains 0.
std::vector<int> feasible_actions(const ModelSpec& m, const State& st);

/// Largest feasible action in `st`.
int max_feasible_action(const ModelSpec& m, const State& st);

struct Outcome {
  State next;
  double prob = 0.0;
};

/// Exact next-state distribution, truncated outcomes merged, ordered by state index.
std::vector<Outcome> transition(const ModelSpec& m, const State& st, int u);

}  // namespace ehsched
