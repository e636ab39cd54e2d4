#include "ehsched/monotone_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace ehsched {

BudgetExceeded::BudgetExceeded(BigCount bound, std::uint64_t budget)
    : std::runtime_error(fmt::format("monotone policy space has {} policies, budget is {}", bound.str(), budget)),
      bound_(std::move(bound)) {}

std::vector<std::vector<std::size_t>> monotone_lines(const ModelSpec& m, Family family) {
  std::vector<std::vector<std::size_t>> lines;
  const int outer = family == Family::kQueue ? m.battery() : m.buffer();
  const int inner = family == Family::kQueue ? m.buffer() : m.battery();
  for (int o = 0; o <= outer; ++o) {
    for (int h = 0; h < m.channel_states(); ++h) {
      std::vector<std::size_t> line;
      for (int i = 0; i <= inner; ++i)
        line.push_back(family == Family::kQueue ? m.index({i, o, h}) : m.index({o, i, h}));
      lines.push_back(std::move(line));
    }
  }
  return lines;
}

BigCount count_monotone(const ModelSpec& m, Family family) {
  BigCount total = 1;
  const int top = m.buffer();
  for (const auto& line : monotone_lines(m, family)) {
    // ways[u]: increasing feasible prefixes ending with action u.
    std::vector<BigCount> ways(static_cast<std::size_t>(top) + 1, 0);
    bool first = true;
    for (std::size_t idx : line) {
      const State st = m.state_at(idx);
      std::vector<BigCount> next(ways.size(), 0);
      BigCount running = first ? BigCount(1) : BigCount(0);
      for (int u = 0; u <= top; ++u) {
        if (!first) running += ways[static_cast<std::size_t>(u)];
        if (u <= st.n && m.cost(u, st.h) <= st.s) next[static_cast<std::size_t>(u)] = running;
      }
      ways = std::move(next);
      first = false;
    }
    BigCount line_total = 0;
    for (const auto& w : ways) line_total += w;
    total *= line_total;
  }
  return total;
}

namespace {

void extend(const ModelSpec& m, const std::vector<std::size_t>& line, std::size_t pos, int floor_u,
            std::vector<int>& prefix, std::vector<std::vector<int>>& out, std::uint64_t cap, bool& overflow) {
  if (overflow) return;
  if (pos == line.size()) {
    out.push_back(prefix);
    if (out.size() > cap) overflow = true;
    return;
  }
  for (int u : feasible_actions(m, m.state_at(line[pos]))) {
    if (u < floor_u) continue;
    prefix.push_back(u);
    extend(m, line, pos + 1, u, prefix, out, cap, overflow);
    prefix.pop_back();
  }
}

}  // namespace

MonotonePolicySpace::MonotonePolicySpace(const ModelSpec& m, Family family, std::uint64_t budget)
    : model_(m), family_(family), lines_(monotone_lines(m, family)) {
  BigCount size = 1;
  for (const auto& line : lines_) {
    std::vector<std::vector<int>> seqs;
    std::vector<int> prefix;
    bool overflow = false;
    extend(m, line, 0, 0, prefix, seqs, budget, overflow);
    if (overflow) throw BudgetExceeded(count_monotone(m, family), budget);
    size *= seqs.size();
    if (size > budget) throw BudgetExceeded(count_monotone(m, family), budget);
    choices_.push_back(std::move(seqs));
  }
  size_ = size.convert_to<std::uint64_t>();
}

Policy MonotonePolicySpace::policy_at(std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("monotone policy index out of range");
  Policy f(model_);
  for (std::size_t l = lines_.size(); l-- > 0;) {
    const auto radix = choices_[l].size();
    const auto& seq = choices_[l][index % radix];
    index /= radix;
    for (std::size_t i = 0; i < seq.size(); ++i) f[lines_[l][i]] = seq[i];
  }
  return f;
}

void MonotonePolicySpace::for_range(std::uint64_t begin, std::uint64_t end,
                                    const std::function<void(std::uint64_t, const Policy&)>& fn) const {
  end = std::min(end, size_);
  if (begin >= end) return;
  // Odometer over per-line choice digits, least significant digit last.
  std::vector<std::size_t> digits(lines_.size());
  std::uint64_t rest = begin;
  for (std::size_t l = lines_.size(); l-- > 0;) {
    digits[l] = rest % choices_[l].size();
    rest /= choices_[l].size();
  }
  Policy f = policy_at(begin);
  for (std::uint64_t index = begin;;) {
    fn(index, f);
    if (++index == end) break;
    for (std::size_t l = lines_.size(); l-- > 0;) {
      if (++digits[l] < choices_[l].size()) {
        const auto& seq = choices_[l][digits[l]];
        for (std::size_t i = 0; i < seq.size(); ++i) f[lines_[l][i]] = seq[i];
        break;
      }
      digits[l] = 0;
      const auto& seq = choices_[l][0];
      for (std::size_t i = 0; i < seq.size(); ++i) f[lines_[l][i]] = seq[i];
    }
  }
}

void enumerate_monotone(const ModelSpec& m, Family family, const std::function<void(const Policy&)>& fn,
                        std::uint64_t budget) {
  const MonotonePolicySpace space(m, family, budget);
  space.for_range(0, space.size(), [&](std::uint64_t, const Policy& f) { fn(f); });
}

namespace {

constexpr double kZeroValue = 1e-12;

void fill_gap(GapReport& report, const ModelSpec& m, const ValueFunction& vstar) {
  report.alpha = 0.0;
  report.objective = 0.0;
  report.worst_state = State{};
  for (std::size_t i = 0; i < vstar.size(); ++i) {
    report.objective = std::max(report.objective, std::abs(report.best_value[i] - vstar[i]));
    if (vstar[i] <= kZeroValue) continue;
    const double rel = (report.best_value[i] - vstar[i]) / vstar[i];
    if (rel > report.alpha) {
      report.alpha = rel;
      report.worst_state = m.state_at(i);
    }
  }
}

// Dense evaluation that keeps its buffers across calls.
class Evaluator {
 public:
  explicit Evaluator(const Mdp& mdp)
      : mdp_(mdp),
        n_(static_cast<Eigen::Index>(mdp.num_states())),
        system_(n_, n_),
        cost_(n_),
        lu_(n_) {}

  const Eigen::VectorXd& operator()(const Policy& f) {
    system_.setIdentity();
    for (Eigen::Index i = 0; i < n_; ++i) {
      const auto& a = mdp_.action(static_cast<std::size_t>(i), f[static_cast<std::size_t>(i)]);
      cost_(i) = a.cost;
      for (const auto& e : a.row) system_(i, static_cast<Eigen::Index>(e.next)) -= mdp_.beta() * e.prob;
    }
    lu_.compute(system_);
    value_ = lu_.solve(cost_);
    return value_;
  }

 private:
  const Mdp& mdp_;
  Eigen::Index n_;
  Eigen::MatrixXd system_;
  Eigen::VectorXd cost_;
  Eigen::VectorXd value_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  bool better_than(const Candidate& other) const {
    return objective < other.objective || (objective == other.objective && index < other.index);
  }
};

}  // namespace

GapReport policy_gap(const Mdp& mdp, const Policy& f, const ValueFunction& vstar) {
  f.validate(mdp.model());
  GapReport report;
  report.best_policy = f;
  report.best_value = evaluate_policy(mdp, f);
  fill_gap(report, mdp.model(), vstar);
  return report;
}

GapReport best_monotone(const Mdp& mdp, Family family, const ValueFunction& vstar, const SearchOptions& options) {
  const auto& m = mdp.model();
  const MonotonePolicySpace space(m, family, options.budget);
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads == 0 ? std::thread::hardware_concurrency() : options.threads,
                                      static_cast<unsigned>(std::min<std::uint64_t>(space.size(), 1024))));

  std::vector<Candidate> best(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t begin = space.size() * t / threads;
    const std::uint64_t end = space.size() * (t + 1) / threads;
    Evaluator evaluate(mdp);
    space.for_range(begin, end, [&](std::uint64_t index, const Policy& f) {
      const auto& v = evaluate(f);
      double obj = 0.0;
      for (std::size_t i = 0; i < vstar.size(); ++i)
        obj = std::max(obj, std::abs(v(static_cast<Eigen::Index>(i)) - vstar[i]));
      const Candidate c{obj, index};
      if (c.better_than(best[t])) best[t] = c;
    });
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  Candidate winner;
  for (const auto& c : best)
    if (c.better_than(winner)) winner = c;

  GapReport report = policy_gap(mdp, space.policy_at(winner.index), vstar);
  report.enumerated_count = space.size();
  return report;
}

GapReport greedy_gap(const Mdp& mdp, const ValueFunction& vstar) {
  return policy_gap(mdp, greedy_policy(mdp.model()), vstar);
}

}  // namespace ehsched
