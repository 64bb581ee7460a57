#pragma once

#include <map>
#include <string>
#include <vector>

namespace socsim {

/// Per-operator society-spectrum shares, frozen between adjustment periods.
struct ShareTable {
  std::vector<double> shares;  // by operator index, society capacity units
  long valid_from_epoch = 0;
  int adjustment_period = 30;
};

/// Splits `society_capacity` across operators in proportion to the user
/// counts they host. All shares are zero (capacity left unallocated) when no
/// users are present. Scale-invariant in the counts.
ShareTable per_operator_shares(double society_capacity,
                               const std::vector<double>& users_per_operator,
                               long epoch, int adjustment_period);

/// Pooled allocation run by a jointly owned virtual operator: one
/// weighted max-min split with weight = user count and demand = aggregate
/// subscriber demand per MVNO.
std::vector<double> virtual_operator_allocate(
    double society_capacity, const std::vector<double>& mvno_user_counts,
    const std::vector<double>& mvno_demands);

/// Unmanaged co-usage: contention degrades the usable capacity by
/// eta(L) = 1 / (1 + max(0, L - 1)) with L = total demand / capacity, and the
/// effective remainder splits equally among users up to their demands.
std::vector<double> chaotic_allocate(double society_capacity,
                                     const std::vector<double>& user_demands);

/// Contention efficiency factor used by chaotic_allocate.
double chaotic_efficiency(double load);

enum class RegisterOutcome { Accepted, RejectedDuplicate };

/// One active society contract per personal access code (when enabled).
/// Registration is rejected while another contract is active on the same
/// code; terminating it frees the code for reuse. With the registry disabled
/// every registration is accepted.
class AccessRegistry {
 public:
  AccessRegistry() = default;
  explicit AccessRegistry(bool enabled) : enabled_(enabled) {}

  RegisterOutcome register_contract(const std::string& access_code);
  void terminate_contract(const std::string& access_code);

  bool enabled() const { return enabled_; }
  int active_contracts(const std::string& access_code) const;
  std::size_t total_active() const;

 private:
  bool enabled_ = true;
  std::map<std::string, int> active_;  // code -> live contract count
};

}  // namespace socsim
