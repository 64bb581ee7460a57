#pragma once

#include <string>
#include <vector>

namespace socsim {

/// One contender for shared capacity: a fluid demand at epoch granularity.
struct FlowSpec {
  double weight = 1.0;
  double demand = 0.0;
};

struct Packet {
  int flow = 0;
  double arrival = 0.0;
  double size = 1.0;
};

struct ScheduledPacket {
  int flow = 0;
  double arrival = 0.0;
  double size = 0.0;
  double start = 0.0;
  double departure = 0.0;
};

/// Weighted max-min (water-filling) split of `capacity` over `flows`.
///
/// No allocation exceeds its demand, the total equals
/// min(capacity, sum of demands), and among flows not capped by their demand
/// allocation/weight is equal. The result is a function of the multiset of
/// flows; input order does not matter.
///
/// Throws std::invalid_argument on negative capacity/demand or
/// non-positive weight.
std::vector<double> gps_allocate(double capacity,
                                 const std::vector<FlowSpec>& flows);

/// Packet-level weighted fair queueing over per-flow FIFO queues.
///
/// Virtual time follows the fluid reference system (it advances at
/// link_rate / sum of backlogged weights); each packet is stamped with a
/// virtual finish time on arrival and the server always picks the pending
/// packet with the smallest stamp. Ties break by (flow id, arrival order).
/// Work-conserving: the link never idles while a packet is queued.
///
/// Returns the schedule in departure order. Empty input yields an empty
/// schedule. Throws std::invalid_argument on link_rate <= 0, weight <= 0,
/// size <= 0 or negative arrival.
std::vector<ScheduledPacket> wfq_schedule(
    const std::vector<std::vector<Packet>>& queues,
    const std::vector<double>& weights, double link_rate);

struct DrrService {
  int queue = 0;
  double size = 0.0;
};

struct DrrResult {
  std::vector<DrrService> sequence;
  std::vector<double> final_deficits;
  double served_total = 0.0;
  long rounds = 0;
};

/// Deficit round robin over per-queue packet size lists.
///
/// Classic semantics: per round each non-empty queue gains its quantum and
/// serves packets while the deficit suffices; a queue that drains resets its
/// deficit to zero. `service_budget` caps the total size served; the schedule
/// stops once the next due packet no longer fits the remaining budget.
///
/// Throws std::invalid_argument on quantum <= 0, negative budget or
/// non-positive packet size.
DrrResult drr_schedule(const std::vector<std::vector<double>>& queues,
                       const std::vector<double>& quanta,
                       double service_budget);

struct ConserveResult {
  double licensed_allocation = 0.0;
  double donated_capacity = 0.0;
};

/// Strict-priority conservation: licensed users take what they demand up to
/// capacity, the idle remainder is donated for one epoch. Society usage never
/// reduces the licensed allocation.
ConserveResult priority_conserve(double licensed_capacity,
                                 double licensed_demand,
                                 double society_demand);

/// Debug trace export: one `flow_id, arrival, size, departure` row per packet.
void write_packet_trace_csv(const std::string& path,
                            const std::vector<ScheduledPacket>& schedule);

}  // namespace socsim
