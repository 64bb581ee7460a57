#pragma once

#include <optional>
#include <string>
#include <vector>

namespace socsim {

struct OperatorEpochMetrics {
  double price = 0.0;    // price the epoch traded at
  double revenue = 0.0;  // retail + hosting fees + slice sales
  double retail_revenue = 0.0;
  int exclusive_subs = 0;  // end-of-epoch roster
  double licensed_allocation = 0.0;
  double retail_capacity = 0.0;
  double exclusive_demand = 0.0;
  double donated = 0.0;
  double share = 0.0;  // society share table entry (per-operator model)
};

struct MvnoEpochMetrics {
  double price = 0.0;
  double revenue = 0.0;  // retail
  double margin = 0.0;   // retail - hosting fees - slice fees
  int subs = 0;          // end-of-epoch roster (contracts)
  bool active = false;
  double society_granted = 0.0;      // society-side capacity delivered
  double society_entitlement = 0.0;  // per-MVNO cap under the pooled model
  double slice_used = 0.0;           // dedicated slice capacity consumed
};

struct EpochMetrics {
  long epoch = 0;
  std::vector<OperatorEpochMetrics> operators;  // config order
  std::vector<MvnoEpochMetrics> mvnos;          // config order
  double soc_q_p10 = 0.0, soc_q_p50 = 0.0, soc_q_p90 = 0.0;
  double exc_q_p10 = 0.0, exc_q_p50 = 0.0, exc_q_p90 = 0.0;
  double soc_q_mean = 0.0, exc_q_mean = 0.0;
  double jain_society = 1.0;
  double donated = 0.0;      // licensed capacity donated this epoch
  double unallocated = 0.0;  // society supply left idle
  double society_load_ratio = 0.0;
  double exclusive_load_ratio = 0.0;
  int society_subs = 0;   // end-of-epoch consumers on society plans
  int exclusive_subs = 0;
  double consumer_payments = 0.0;
  double provider_retail_revenue = 0.0;
  double hosting_fees_paid = 0.0;
  double slice_fees_paid = 0.0;
};

/// Jain fairness index (sum x)^2 / (n * sum x^2) in [1/n, 1]; an all-zero
/// vector is defined as perfectly fair (1). Throws std::invalid_argument on
/// empty input or negative entries.
double jain_index(const std::vector<double>& allocations);

/// Earliest epoch e such that for every series the relative spread
/// (max - min) / max over the inclusive window [e - window, e] stays below
/// tol; nullopt when no window qualifies.
///
/// `price_series` is indexed [epoch][series]. Throws std::invalid_argument on
/// window < 2 or tol <= 0 and SeriesTooShort when fewer than window + 1
/// epochs are available.
std::optional<long> detect_equilibrium(
    const std::vector<std::vector<double>>& price_series, int window,
    double tol);

/// Interpolated percentile (0 <= p <= 100) of an unsorted sample; 0 for an
/// empty sample.
double percentile(std::vector<double> values, double p);

/// Fixed-order per-epoch CSV. Columns: epoch, per-operator price/revenue/subs,
/// per-MVNO subs, society quality percentiles, exclusive median, Jain index,
/// donated, unallocated, then per-operator society share snapshots.
void write_metrics_csv(const std::string& path,
                       const std::vector<std::string>& operator_ids,
                       const std::vector<std::string>& mvno_ids,
                       const std::vector<EpochMetrics>& metrics);

}  // namespace socsim
