// Test-only reference models. These are written straight from the defining
// equations and share no code with the scheduler implementations they check.
#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "socsim/fair_scheduler.hpp"

namespace oracle {

// Fluid generalized-processor-sharing reference. Each backlogged flow drains
// at rate * weight / (sum of backlogged weights); the simulation advances
// piecewise between arrivals and backlog-drain events and can report the
// cumulative service of every flow at arbitrary query times.
class FluidGps {
 public:
  FluidGps(std::vector<std::vector<socsim::Packet>> queues,
           std::vector<double> weights, double rate)
      : weights_(std::move(weights)), rate_(rate) {
    const int n = static_cast<int>(weights_.size());
    served_.assign(n, 0.0);
    backlog_.assign(n, 0.0);
    for (const auto& q : queues)
      for (const socsim::Packet& p : q) arrivals_.push_back(p);
    std::stable_sort(arrivals_.begin(), arrivals_.end(),
                     [](const socsim::Packet& a, const socsim::Packet& b) {
                       return a.arrival < b.arrival;
                     });
  }

  // Cumulative service per flow at time t (t must not decrease across calls).
  std::vector<double> served_at(double t) {
    advance(t);
    return served_;
  }

 private:
  void advance(double target) {
    while (now_ < target) {
      while (next_arrival_ < arrivals_.size() &&
             arrivals_[next_arrival_].arrival <= now_) {
        backlog_[arrivals_[next_arrival_].flow] += arrivals_[next_arrival_].size;
        ++next_arrival_;
      }
      double horizon = target;
      if (next_arrival_ < arrivals_.size())
        horizon = std::min(horizon, arrivals_[next_arrival_].arrival);

      double active_weight = 0.0;
      for (std::size_t f = 0; f < weights_.size(); ++f)
        if (backlog_[f] > 0.0) active_weight += weights_[f];
      if (active_weight == 0.0) {
        now_ = horizon;
        if (now_ >= target) break;
        continue;
      }
      // First backlog to drain bounds the linear piece.
      double dt = horizon - now_;
      for (std::size_t f = 0; f < weights_.size(); ++f) {
        if (backlog_[f] <= 0.0) continue;
        const double rate_f = rate_ * weights_[f] / active_weight;
        dt = std::min(dt, backlog_[f] / rate_f);
      }
      for (std::size_t f = 0; f < weights_.size(); ++f) {
        if (backlog_[f] <= 0.0) continue;
        const double amount = rate_ * weights_[f] / active_weight * dt;
        const double drained = std::min(backlog_[f], amount);
        backlog_[f] -= drained;
        served_[f] += drained;
        if (backlog_[f] < 1e-12) backlog_[f] = 0.0;
      }
      now_ += dt;
    }
    // Queue up arrivals exactly at the target instant as well.
    while (next_arrival_ < arrivals_.size() &&
           arrivals_[next_arrival_].arrival <= now_) {
      backlog_[arrivals_[next_arrival_].flow] += arrivals_[next_arrival_].size;
      ++next_arrival_;
    }
  }

  std::vector<double> weights_;
  double rate_;
  std::vector<socsim::Packet> arrivals_;
  std::vector<double> served_;
  std::vector<double> backlog_;
  double now_ = 0.0;
  std::size_t next_arrival_ = 0;
};

// Brute-force max-min allocation by iterative water level search: raise a
// common level per unit weight until the capacity is spent, capping flows at
// their demands. Bisection, no sorting trick shared with the implementation.
inline std::vector<double> maxmin_bisect(double capacity,
                                         const std::vector<socsim::FlowSpec>& flows) {
  double total_demand = 0.0;
  for (const auto& f : flows) total_demand += f.demand;
  const double target = std::min(capacity, total_demand);
  double lo = 0.0, hi = 1e18;
  const auto allocated = [&](double level) {
    double sum = 0.0;
    for (const auto& f : flows) sum += std::min(f.demand, level * f.weight);
    return sum;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (allocated(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  std::vector<double> out;
  for (const auto& f : flows) out.push_back(std::min(f.demand, hi * f.weight));
  return out;
}

}  // namespace oracle
