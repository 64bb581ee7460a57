#include "socsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "socsim/errors.hpp"

namespace socsim {

double jain_index(const std::vector<double>& allocations) {
  if (allocations.empty())
    throw std::invalid_argument("jain_index: empty input");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : allocations) {
    if (x < 0.0) throw std::invalid_argument("jain_index: negative allocation");
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) return 1.0;  // all-zero: defined as fair
  return (sum * sum) / (static_cast<double>(allocations.size()) * sum_sq);
}

std::optional<long> detect_equilibrium(
    const std::vector<std::vector<double>>& price_series, int window,
    double tol) {
  if (window < 2) throw std::invalid_argument("detect_equilibrium: window < 2");
  if (!(tol > 0.0)) throw std::invalid_argument("detect_equilibrium: tol <= 0");
  const long n = static_cast<long>(price_series.size());
  if (n < window + 1)
    throw SeriesTooShort("detect_equilibrium: need at least window+1 epochs");

  const std::size_t series_count = price_series.front().size();
  for (long e = window; e < n; ++e) {
    bool stable = true;
    for (std::size_t s = 0; s < series_count && stable; ++s) {
      double lo = price_series[e - window][s];
      double hi = lo;
      for (long t = e - window + 1; t <= e; ++t) {
        lo = std::min(lo, price_series[t][s]);
        hi = std::max(hi, price_series[t][s]);
      }
      const double rel = hi > 0.0 ? (hi - lo) / hi : 0.0;
      if (!(rel < tol)) stable = false;
    }
    if (stable) return e;
  }
  return std::nullopt;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<std::string>& operator_ids,
                       const std::vector<std::string>& mvno_ids,
                       const std::vector<EpochMetrics>& metrics) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot open for writing: " + path);

  std::fprintf(fp, "epoch");
  for (const std::string& id : operator_ids)
    std::fprintf(fp, ",op_%s_price,op_%s_revenue,op_%s_subs", id.c_str(),
                 id.c_str(), id.c_str());
  for (const std::string& id : mvno_ids)
    std::fprintf(fp, ",mvno_%s_subs", id.c_str());
  std::fprintf(fp,
               ",soc_q_p10,soc_q_p50,soc_q_p90,exc_q_p50,jain_society,donated,"
               "unallocated");
  for (const std::string& id : operator_ids)
    std::fprintf(fp, ",share_%s", id.c_str());
  std::fprintf(fp, "\n");

  for (const EpochMetrics& m : metrics) {
    std::fprintf(fp, "%ld", m.epoch);
    for (const OperatorEpochMetrics& o : m.operators)
      std::fprintf(fp, ",%.10g,%.10g,%d", o.price, o.revenue, o.exclusive_subs);
    for (const MvnoEpochMetrics& v : m.mvnos) std::fprintf(fp, ",%d", v.subs);
    std::fprintf(fp, ",%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g", m.soc_q_p10,
                 m.soc_q_p50, m.soc_q_p90, m.exc_q_p50, m.jain_society,
                 m.donated, m.unallocated);
    for (const OperatorEpochMetrics& o : m.operators)
      std::fprintf(fp, ",%.10g", o.share);
    std::fprintf(fp, "\n");
  }
  std::fclose(fp);
}

}  // namespace socsim
