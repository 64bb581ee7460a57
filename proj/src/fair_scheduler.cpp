#include "socsim/fair_scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "socsim/errors.hpp"

namespace socsim {

std::vector<double> gps_allocate(double capacity,
                                 const std::vector<FlowSpec>& flows) {
  if (capacity < 0.0)
    throw std::invalid_argument("gps_allocate: negative capacity");
  for (const FlowSpec& f : flows) {
    if (!(f.weight > 0.0))
      throw std::invalid_argument("gps_allocate: non-positive weight");
    if (f.demand < 0.0)
      throw std::invalid_argument("gps_allocate: negative demand");
  }

  const std::size_t n = flows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Ascending demand/weight: demand-capped flows freeze first, the rest
  // split the remainder in proportion to weight.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return flows[a].demand * flows[b].weight <
                            flows[b].demand * flows[a].weight;
                   });

  double remaining = capacity;
  double weight_sum = 0.0;
  for (const FlowSpec& f : flows) weight_sum += f.weight;

  std::vector<double> alloc(n, 0.0);
  for (std::size_t idx : order) {
    const double fair = remaining * flows[idx].weight / weight_sum;
    const double a = std::min(flows[idx].demand, fair);
    alloc[idx] = a;
    remaining -= a;
    weight_sum -= flows[idx].weight;
  }
  return alloc;
}

namespace {

struct StampedPacket {
  int flow;
  int seq;  // arrival order within the flow
  double arrival;
  double size;
  double vfinish;
};

}  // namespace

std::vector<ScheduledPacket> wfq_schedule(
    const std::vector<std::vector<Packet>>& queues,
    const std::vector<double>& weights, double link_rate) {
  if (!(link_rate > 0.0))
    throw std::invalid_argument("wfq_schedule: non-positive link rate");
  if (queues.size() != weights.size())
    throw std::invalid_argument("wfq_schedule: queues/weights size mismatch");
  const int n = static_cast<int>(queues.size());
  for (int f = 0; f < n; ++f) {
    if (!(weights[f] > 0.0))
      throw std::invalid_argument("wfq_schedule: non-positive weight");
    for (const Packet& p : queues[f]) {
      if (!(p.size > 0.0))
        throw std::invalid_argument("wfq_schedule: non-positive packet size");
      if (p.arrival < 0.0)
        throw std::invalid_argument("wfq_schedule: negative arrival");
    }
  }

  std::vector<StampedPacket> packets;
  for (int f = 0; f < n; ++f) {
    std::vector<std::size_t> idx(queues[f].size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return queues[f][a].arrival < queues[f][b].arrival;
    });
    int seq = 0;
    for (std::size_t i : idx)
      packets.push_back({f, seq++, queues[f][i].arrival, queues[f][i].size, 0.0});
  }
  if (packets.empty()) return {};

  std::stable_sort(packets.begin(), packets.end(),
                   [](const StampedPacket& a, const StampedPacket& b) {
                     if (a.arrival != b.arrival) return a.arrival < b.arrival;
                     if (a.flow != b.flow) return a.flow < b.flow;
                     return a.seq < b.seq;
                   });

  // Pass 1: stamp virtual finish times. Virtual time tracks the fluid
  // reference: dV/dt = link_rate / active_weight, and a flow's fluid backlog
  // drains exactly when V reaches its newest stamp.
  double vt = 0.0;
  double now = 0.0;
  double active_weight = 0.0;
  std::vector<double> last_vf(n, 0.0);
  std::set<std::pair<double, int>> backlog;  // (newest stamp, flow)

  auto advance_to = [&](double target) {
    while (!backlog.empty()) {
      const auto [vf, f] = *backlog.begin();
      const double t_drain = now + (vf - vt) * active_weight / link_rate;
      if (t_drain > target) break;
      now = t_drain;
      vt = vf;
      backlog.erase(backlog.begin());
      active_weight -= weights[f];
    }
    if (backlog.empty()) {
      now = target;  // fluid system idle; V holds
    } else {
      vt += (target - now) * link_rate / active_weight;
      now = target;
    }
  };

  for (StampedPacket& p : packets) {
    advance_to(p.arrival);
    const bool was_backlogged = backlog.count({last_vf[p.flow], p.flow}) > 0;
    const double start = std::max(vt, last_vf[p.flow]);
    const double finish = start + p.size / weights[p.flow];
    if (was_backlogged) {
      backlog.erase({last_vf[p.flow], p.flow});
    } else {
      active_weight += weights[p.flow];
    }
    backlog.insert({finish, p.flow});
    last_vf[p.flow] = finish;
    p.vfinish = finish;
  }

  // Pass 2: serve packets; the free server always picks the arrived head
  // with the smallest virtual finish (ties by flow id, then arrival order).
  std::vector<std::vector<const StampedPacket*>> heads(n);
  for (const StampedPacket& p : packets) heads[p.flow].push_back(&p);
  std::vector<std::size_t> head_idx(n, 0);

  std::vector<ScheduledPacket> schedule;
  schedule.reserve(packets.size());
  double t = 0.0;
  std::size_t remaining = packets.size();
  while (remaining > 0) {
    const StampedPacket* best = nullptr;
    double next_arrival = -1.0;
    for (int f = 0; f < n; ++f) {
      if (head_idx[f] >= heads[f].size()) continue;
      const StampedPacket* cand = heads[f][head_idx[f]];
      if (cand->arrival <= t) {
        if (best == nullptr || cand->vfinish < best->vfinish ||
            (cand->vfinish == best->vfinish && cand->flow < best->flow)) {
          best = cand;
        }
      } else if (next_arrival < 0.0 || cand->arrival < next_arrival) {
        next_arrival = cand->arrival;
      }
    }
    if (best == nullptr) {
      t = next_arrival;
      continue;
    }
    const double dep = t + best->size / link_rate;
    schedule.push_back({best->flow, best->arrival, best->size, t, dep});
    t = dep;
    ++head_idx[best->flow];
    --remaining;
  }
  return schedule;
}

DrrResult drr_schedule(const std::vector<std::vector<double>>& queues,
                       const std::vector<double>& quanta,
                       double service_budget) {
  if (queues.size() != quanta.size())
    throw std::invalid_argument("drr_schedule: queues/quanta size mismatch");
  for (double q : quanta)
    if (!(q > 0.0))
      throw std::invalid_argument("drr_schedule: non-positive quantum");
  if (service_budget < 0.0)
    throw std::invalid_argument("drr_schedule: negative budget");
  for (const auto& q : queues)
    for (double s : q)
      if (!(s > 0.0))
        throw std::invalid_argument("drr_schedule: non-positive packet size");

  const std::size_t n = queues.size();
  DrrResult result;
  result.final_deficits.assign(n, 0.0);
  std::vector<std::size_t> head(n, 0);
  double budget = service_budget;

  auto pending = [&]() {
    for (std::size_t q = 0; q < n; ++q)
      if (head[q] < queues[q].size()) return true;
    return false;
  };

  while (pending() && budget > 0.0) {
    ++result.rounds;
    for (std::size_t q = 0; q < n; ++q) {
      if (head[q] >= queues[q].size()) continue;  // empty queue keeps deficit 0
      if (budget <= 0.0) return result;
      result.final_deficits[q] += quanta[q];
      while (head[q] < queues[q].size() &&
             queues[q][head[q]] <= result.final_deficits[q]) {
        const double size = queues[q][head[q]];
        if (size > budget) return result;  // budget exhausted
        result.sequence.push_back({static_cast<int>(q), size});
        result.final_deficits[q] -= size;
        result.served_total += size;
        budget -= size;
        ++head[q];
      }
      if (head[q] >= queues[q].size()) result.final_deficits[q] = 0.0;
    }
  }
  return result;
}

ConserveResult priority_conserve(double licensed_capacity,
                                 double licensed_demand,
                                 double society_demand) {
  if (licensed_capacity < 0.0 || licensed_demand < 0.0 || society_demand < 0.0)
    throw std::invalid_argument("priority_conserve: negative input");
  ConserveResult r;
  r.licensed_allocation = std::min(licensed_capacity, licensed_demand);
  r.donated_capacity = licensed_capacity - r.licensed_allocation;
  return r;
}

void write_packet_trace_csv(const std::string& path,
                            const std::vector<ScheduledPacket>& schedule) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot open for writing: " + path);
  std::fprintf(fp, "flow_id,arrival,size,departure\n");
  for (const ScheduledPacket& p : schedule) {
    std::fprintf(fp, "%d,%.10g,%.10g,%.10g\n", p.flow, p.arrival, p.size,
                 p.departure);
  }
  std::fclose(fp);
}

}  // namespace socsim
