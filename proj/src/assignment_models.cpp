#include "socsim/assignment_models.hpp"

#include <algorithm>
#include <stdexcept>

#include "socsim/fair_scheduler.hpp"

namespace socsim {

ShareTable per_operator_shares(double society_capacity,
                               const std::vector<double>& users_per_operator,
                               long epoch, int adjustment_period) {
  if (society_capacity < 0.0)
    throw std::invalid_argument("per_operator_shares: negative capacity");
  ShareTable table;
  table.valid_from_epoch = epoch;
  table.adjustment_period = adjustment_period;
  table.shares.assign(users_per_operator.size(), 0.0);

  double total_users = 0.0;
  for (double u : users_per_operator) {
    if (u < 0.0)
      throw std::invalid_argument("per_operator_shares: negative user count");
    total_users += u;
  }
  if (total_users <= 0.0) return table;  // degenerate: left unallocated

  for (std::size_t i = 0; i < users_per_operator.size(); ++i)
    table.shares[i] = society_capacity * users_per_operator[i] / total_users;
  return table;
}

std::vector<double> virtual_operator_allocate(
    double society_capacity, const std::vector<double>& mvno_user_counts,
    const std::vector<double>& mvno_demands) {
  if (mvno_user_counts.size() != mvno_demands.size())
    throw std::invalid_argument("virtual_operator_allocate: size mismatch");
  std::vector<FlowSpec> flows;
  flows.reserve(mvno_user_counts.size());
  std::vector<std::size_t> live;  // MVNOs with users; the rest get zero
  for (std::size_t i = 0; i < mvno_user_counts.size(); ++i) {
    if (mvno_user_counts[i] < 0.0)
      throw std::invalid_argument("virtual_operator_allocate: negative count");
    if (mvno_user_counts[i] > 0.0) {
      flows.push_back({mvno_user_counts[i], mvno_demands[i]});
      live.push_back(i);
    }
  }
  std::vector<double> out(mvno_user_counts.size(), 0.0);
  const std::vector<double> alloc = gps_allocate(society_capacity, flows);
  for (std::size_t k = 0; k < live.size(); ++k) out[live[k]] = alloc[k];
  return out;
}

double chaotic_efficiency(double load) {
  return 1.0 / (1.0 + std::max(0.0, load - 1.0));
}

std::vector<double> chaotic_allocate(double society_capacity,
                                     const std::vector<double>& user_demands) {
  if (society_capacity < 0.0)
    throw std::invalid_argument("chaotic_allocate: negative capacity");
  double total = 0.0;
  for (double d : user_demands) {
    if (d < 0.0)
      throw std::invalid_argument("chaotic_allocate: negative demand");
    total += d;
  }
  if (society_capacity <= 0.0 || user_demands.empty())
    return std::vector<double>(user_demands.size(), 0.0);

  const double load = total / society_capacity;
  const double effective = society_capacity * chaotic_efficiency(load);
  std::vector<FlowSpec> flows;
  flows.reserve(user_demands.size());
  for (double d : user_demands) flows.push_back({1.0, d});
  return gps_allocate(effective, flows);
}

RegisterOutcome AccessRegistry::register_contract(
    const std::string& access_code) {
  int& count = active_[access_code];
  if (enabled_ && count > 0) return RegisterOutcome::RejectedDuplicate;
  ++count;
  return RegisterOutcome::Accepted;
}

void AccessRegistry::terminate_contract(const std::string& access_code) {
  auto it = active_.find(access_code);
  if (it == active_.end() || it->second <= 0) return;
  if (--it->second == 0) active_.erase(it);
}

int AccessRegistry::active_contracts(const std::string& access_code) const {
  auto it = active_.find(access_code);
  return it == active_.end() ? 0 : it->second;
}

std::size_t AccessRegistry::total_active() const {
  std::size_t n = 0;
  for (const auto& [code, count] : active_) n += static_cast<std::size_t>(count);
  return n;
}

}  // namespace socsim
