#include "socsim/market_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socsim/errors.hpp"
#include "socsim/fair_scheduler.hpp"

namespace socsim {

double consumer_utility(double q, double p, double alpha, double demand) {
  if (q < 0.0 || p < 0.0 || alpha < 0.0 || demand < 0.0)
    throw std::invalid_argument("consumer_utility: negative input");
  if (demand == 0.0) return -p;
  return alpha * std::log1p(q / demand) - p;
}

namespace {

const PlanOffer* best_offer(const Consumer& c,
                            const std::vector<PlanOffer>& offers,
                            double* utility) {
  const PlanOffer* best = nullptr;
  double best_u = -std::numeric_limits<double>::infinity();
  for (const PlanOffer& o : offers) {
    const double u =
        consumer_utility(o.fill * c.demand, o.price, c.alpha, c.demand);
    if (best == nullptr || u > best_u ||
        (u == best_u && o.provider_id < best->provider_id)) {
      best = &o;
      best_u = u;
    }
  }
  *utility = best_u;
  return best;
}

}  // namespace

Plan choose_plan(const Consumer& consumer,
                 const std::vector<PlanOffer>& exclusive_offers,
                 const std::vector<PlanOffer>& society_offers) {
  if (society_offers.empty())
    throw NoSocietyOffer("choose_plan: no society offer available");

  double u_soc = 0.0;
  const PlanOffer* soc = best_offer(consumer, society_offers, &u_soc);

  if (!exclusive_offers.empty()) {
    double u_exc = 0.0;
    const PlanOffer* exc = best_offer(consumer, exclusive_offers, &u_exc);
    const bool changes_plan = consumer.plan.kind != PlanKind::Exclusive ||
                              consumer.plan.provider != exc->provider;
    const double hysteresis = changes_plan ? consumer.switching_cost : 0.0;
    if (u_exc - u_soc - hysteresis > 0.0)
      return {PlanKind::Exclusive, exc->provider};
  }
  return {PlanKind::Society, soc->provider};
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double adaptive_step(const AdaptiveParams& params, double current_price,
                     const std::vector<double>& prices,
                     const std::vector<double>& revenues) {
  double next = current_price;
  if (prices.size() >= 2 && revenues.size() >= 2) {
    const std::size_t n = prices.size();
    const double dp = prices[n - 1] - prices[n - 2];
    const double drev =
        revenues[revenues.size() - 1] - revenues[revenues.size() - 2];
    if (dp == 0.0) {
      next = current_price * (1.0 + params.eta);  // probe upward
    } else {
      next = current_price * (1.0 + params.eta * sign(drev) * sign(dp));
    }
  }
  return std::clamp(next, params.min_price, params.max_price);
}

}  // namespace

double apply_pricing(const PricingPolicy& policy, double current_price,
                     const std::vector<double>& prices,
                     const std::vector<double>& revenues, long epoch) {
  switch (policy.kind) {
    case PolicyKind::Fixed:
      return current_price;
    case PolicyKind::Adaptive:
      return adaptive_step(policy.adaptive, current_price, prices, revenues);
    case PolicyKind::Collusion: {
      if (epoch >= policy.collusion.start_epoch &&
          epoch < policy.collusion.end_epoch)
        return policy.collusion.price;
      if (policy.collusion.fallback_kind == PolicyKind::Adaptive)
        return adaptive_step(policy.collusion.fallback_adaptive, current_price,
                             prices, revenues);
      return current_price;
    }
  }
  return current_price;
}

void purchase_slice(MarketState& state, int mvno_index, double amount,
                    double unit_price) {
  if (amount < 0.0 || unit_price < 0.0)
    throw std::invalid_argument("purchase_slice: negative input");
  if (amount == 0.0) return;
  Mvno& mvno = state.mvnos.at(static_cast<std::size_t>(mvno_index));
  PhysicalOperator& host = state.operators.at(static_cast<std::size_t>(mvno.host));
  const double uncommitted = host.exclusive_capacity - host.committed_slice;
  if (amount > uncommitted + 1e-12)
    throw InsufficientCapacity("purchase_slice: host " + host.id +
                               " has only " + std::to_string(uncommitted) +
                               " uncommitted capacity");
  host.committed_slice += amount;
  mvno.purchased_slice += amount;
  mvno.slice_cost_per_epoch += amount * unit_price;
}

void mvno_entry_exit(MarketState& state) {
  const auto active_count = [&]() {
    int n = 0;
    for (const Mvno& m : state.mvnos) n += m.active ? 1 : 0;
    return n;
  };

  // Exits first; the cheapest remaining MVNO absorbs the stranded contracts.
  for (std::size_t m = 0; m < state.mvnos.size(); ++m) {
    Mvno& mvno = state.mvnos[m];
    if (!mvno.active) continue;
    if (mvno.consecutive_losses < state.entry_exit.loss_epochs) continue;
    if (active_count() <= 1) continue;  // society access must survive
    mvno.active = false;
    mvno.consecutive_losses = 0;

    int target = -1;
    for (std::size_t k = 0; k < state.mvnos.size(); ++k) {
      if (!state.mvnos[k].active) continue;
      if (target < 0 ||
          state.mvnos[k].retail_price < state.mvnos[target].retail_price ||
          (state.mvnos[k].retail_price == state.mvnos[target].retail_price &&
           state.mvnos[k].id < state.mvnos[target].id))
        target = static_cast<int>(k);
    }
    for (Consumer& c : state.consumers) {
      if (c.plan.kind == PlanKind::Society &&
          c.plan.provider == static_cast<int>(m))
        c.plan.provider = target;
      for (int& extra : c.extra_society_contracts)
        if (extra == static_cast<int>(m)) extra = target;
    }
  }

  // At most one entry per epoch, gated on incumbent prosperity over the
  // trailing window.
  const int window = state.entry_exit.entry_window;
  double margin_sum = 0.0;
  long margin_n = 0;
  for (std::size_t m = 0; m < state.mvnos.size(); ++m) {
    if (!state.mvnos[m].active) continue;
    const std::vector<double>& hist = state.mvno_margin_history[m];
    if (static_cast<int>(hist.size()) < window) return;  // not enough history
    for (int k = 0; k < window; ++k) {
      margin_sum += hist[hist.size() - 1 - static_cast<std::size_t>(k)];
      ++margin_n;
    }
  }
  if (margin_n == 0) return;
  if (margin_sum / static_cast<double>(margin_n) >
      state.entry_exit.entry_threshold) {
    for (Mvno& m : state.mvnos) {
      if (!m.active) {
        m.active = true;
        m.consecutive_losses = 0;
        break;
      }
    }
  }
}

namespace {

struct ContractRef {
  int consumer;
  int mvno;
};

}  // namespace

std::pair<MarketState, EpochMetrics> step_epoch(const MarketState& prev,
                                                Rng& rng) {
  (void)rng;  // the epoch step is currently fully deterministic
  MarketState next = prev;
  const long epoch = prev.epoch;
  const std::size_t nop = prev.operators.size();
  const std::size_t nmv = prev.mvnos.size();
  const std::size_t ncons = prev.consumers.size();

  // Start-of-epoch rosters: these consumers trade during this epoch.
  std::vector<ContractRef> contracts;
  std::vector<std::vector<int>> contracts_of(nmv);  // indices into contracts
  std::vector<std::vector<int>> exclusive_subs(nop);
  for (std::size_t i = 0; i < ncons; ++i) {
    const Consumer& c = prev.consumers[i];
    if (c.plan.kind == PlanKind::Society) {
      contracts_of[c.plan.provider].push_back(static_cast<int>(contracts.size()));
      contracts.push_back({static_cast<int>(i), c.plan.provider});
    } else {
      exclusive_subs[c.plan.provider].push_back(static_cast<int>(i));
    }
    for (int m : c.extra_society_contracts) {
      contracts_of[m].push_back(static_cast<int>(contracts.size()));
      contracts.push_back({static_cast<int>(i), m});
    }
  }

  double society_demand_total = 0.0;
  for (const ContractRef& ref : contracts)
    society_demand_total += prev.consumers[ref.consumer].demand;

  // (1) Society share table, refreshed only on period boundaries.
  if (prev.assignment_model == AssignmentModel::PerOperator &&
      epoch % prev.adjustment_period == 0) {
    std::vector<double> users(nop, 0.0);
    for (const ContractRef& ref : contracts)
      users[prev.mvnos[ref.mvno].host] += 1.0;
    if (prev.count_exclusive_users)
      for (std::size_t o = 0; o < nop; ++o)
        users[o] += static_cast<double>(exclusive_subs[o].size());
    next.share_table = per_operator_shares(prev.pool.society_capacity(), users,
                                           epoch, prev.adjustment_period);
  }

  // (2) Exclusive retail allocation; idle licensed capacity is donated.
  std::vector<double> exclusive_alloc(ncons, 0.0);
  std::vector<double> op_donated(nop, 0.0);
  std::vector<double> op_licensed_alloc(nop, 0.0);
  std::vector<double> op_excl_demand(nop, 0.0);
  for (std::size_t o = 0; o < nop; ++o) {
    const double cap = prev.operators[o].retail_capacity();
    double demand = 0.0;
    for (int i : exclusive_subs[o]) demand += prev.consumers[i].demand;
    op_excl_demand[o] = demand;
    const ConserveResult conserve =
        priority_conserve(cap, demand, society_demand_total);
    op_licensed_alloc[o] = conserve.licensed_allocation;
    op_donated[o] = conserve.donated_capacity;

    std::vector<FlowSpec> flows;
    flows.reserve(exclusive_subs[o].size());
    for (int i : exclusive_subs[o]) flows.push_back({1.0, prev.consumers[i].demand});
    const std::vector<double> alloc = gps_allocate(cap, flows);
    for (std::size_t k = 0; k < alloc.size(); ++k)
      exclusive_alloc[exclusive_subs[o][k]] = alloc[k];
  }

  // Dedicated slices serve their MVNO's subscribers first; idle slice
  // capacity is donated like any other licensed spectrum.
  std::vector<double> slice_part(contracts.size(), 0.0);
  std::vector<double> slice_donated(nmv, 0.0);
  for (std::size_t m = 0; m < nmv; ++m) {
    const double slice = prev.mvnos[m].purchased_slice;
    if (slice <= 0.0) continue;
    std::vector<FlowSpec> flows;
    flows.reserve(contracts_of[m].size());
    for (int ci : contracts_of[m])
      flows.push_back({1.0, prev.consumers[contracts[ci].consumer].demand});
    const std::vector<double> alloc = gps_allocate(slice, flows);
    double used = 0.0;
    for (std::size_t k = 0; k < alloc.size(); ++k) {
      slice_part[contracts_of[m][k]] = alloc[k];
      used += alloc[k];
    }
    slice_donated[m] = std::max(0.0, slice - used);
  }

  double donations = 0.0;
  for (double d : op_donated) donations += d;
  for (double d : slice_donated) donations += d;
  const double society_pool = prev.pool.society_capacity() + donations;

  // (3) Society-side allocation under the configured assignment model.
  std::vector<double> society_part(contracts.size(), 0.0);
  std::vector<double> mvno_entitlement(nmv, 0.0);
  std::vector<double> residual(contracts.size(), 0.0);
  for (std::size_t ci = 0; ci < contracts.size(); ++ci)
    residual[ci] =
        prev.consumers[contracts[ci].consumer].demand - slice_part[ci];

  switch (prev.assignment_model) {
    case AssignmentModel::Chaotic: {
      society_part = chaotic_allocate(society_pool, residual);
      break;
    }
    case AssignmentModel::VirtualOperator: {
      std::vector<double> counts(nmv, 0.0), demands(nmv, 0.0);
      for (std::size_t m = 0; m < nmv; ++m) {
        counts[m] = static_cast<double>(contracts_of[m].size());
        for (int ci : contracts_of[m]) demands[m] += residual[ci];
      }
      mvno_entitlement =
          virtual_operator_allocate(society_pool, counts, demands);
      for (std::size_t m = 0; m < nmv; ++m) {
        if (contracts_of[m].empty()) continue;
        std::vector<FlowSpec> flows;
        for (int ci : contracts_of[m]) flows.push_back({1.0, residual[ci]});
        const std::vector<double> alloc =
            gps_allocate(mvno_entitlement[m], flows);
        for (std::size_t k = 0; k < alloc.size(); ++k)
          society_part[contracts_of[m][k]] = alloc[k];
      }
      break;
    }
    case AssignmentModel::PerOperator: {
      // Donated capacity stays on the RAN it came from, so it augments that
      // operator's society segment.
      for (std::size_t o = 0; o < nop; ++o) {
        double segment =
            (o < next.share_table.shares.size() ? next.share_table.shares[o]
                                                : 0.0) +
            op_donated[o];
        std::vector<int> segment_contracts;
        for (int m : prev.operators[o].hosted_mvnos) {
          segment += slice_donated[m];
          for (int ci : contracts_of[m]) segment_contracts.push_back(ci);
        }
        std::sort(segment_contracts.begin(), segment_contracts.end());
        std::vector<FlowSpec> flows;
        flows.reserve(segment_contracts.size());
        for (int ci : segment_contracts) flows.push_back({1.0, residual[ci]});
        const std::vector<double> alloc = gps_allocate(segment, flows);
        for (std::size_t k = 0; k < alloc.size(); ++k)
          society_part[segment_contracts[k]] = alloc[k];
      }
      break;
    }
  }

  // (4) Realized quality. Under the pooled virtual-operator model, demand
  // spilling into a purchased exclusive slice carries the session-continuity
  // penalty.
  const double gamma =
      prev.assignment_model == AssignmentModel::VirtualOperator
          ? prev.continuity_penalty
          : 1.0;
  std::vector<double> realized(ncons, 0.0);
  std::vector<double> society_delivered(ncons, 0.0);
  std::vector<double> mvno_granted(nmv, 0.0);
  std::vector<double> mvno_slice_used(nmv, 0.0);
  for (std::size_t i = 0; i < ncons; ++i)
    if (prev.consumers[i].plan.kind == PlanKind::Exclusive)
      realized[i] = exclusive_alloc[i];
  for (std::size_t ci = 0; ci < contracts.size(); ++ci) {
    const double q = gamma * slice_part[ci] + society_part[ci];
    realized[contracts[ci].consumer] += q;
    society_delivered[contracts[ci].consumer] += q;
    mvno_granted[contracts[ci].mvno] += society_part[ci];
    mvno_slice_used[contracts[ci].mvno] += slice_part[ci];
  }
  next.last_allocation.realized_quality = realized;
  next.last_allocation.society_delivered = society_delivered;

  // Revenues for the epoch (the trading roster is the start-of-epoch one).
  std::vector<double> op_retail(nop, 0.0), op_revenue(nop, 0.0);
  std::vector<double> mvno_retail(nmv, 0.0), mvno_margin(nmv, 0.0);
  double hosting_total = 0.0, slice_fees_total = 0.0;
  for (std::size_t o = 0; o < nop; ++o) {
    for (int i : exclusive_subs[o])
      op_retail[o] += prev.operators[o].retail_price * prev.consumers[i].demand;
    op_revenue[o] = op_retail[o];
  }
  for (std::size_t m = 0; m < nmv; ++m) {
    const Mvno& mvno = prev.mvnos[m];
    for (int ci : contracts_of[m])
      mvno_retail[m] +=
          mvno.retail_price * prev.consumers[contracts[ci].consumer].demand;
    const double hosting =
        prev.operators[mvno.host].hosting_fee *
        static_cast<double>(contracts_of[m].size());
    const double slice_fee = mvno.active ? mvno.slice_cost_per_epoch : 0.0;
    mvno_margin[m] = mvno_retail[m] - hosting - slice_fee;
    op_revenue[mvno.host] += hosting + slice_fee;
    hosting_total += hosting;
    slice_fees_total += slice_fee;
  }
  // The audit recomputes payments from the consumer side; up to float
  // ordering this must equal the provider-side retail sum.
  double consumer_payments = 0.0, provider_retail = 0.0;
  for (double r : op_retail) provider_retail += r;
  for (double r : mvno_retail) provider_retail += r;
  for (std::size_t i = 0; i < ncons; ++i) {
    const Consumer& c = prev.consumers[i];
    if (c.plan.kind == PlanKind::Exclusive)
      consumer_payments += prev.operators[c.plan.provider].retail_price * c.demand;
    else
      consumer_payments += prev.mvnos[c.plan.provider].retail_price * c.demand;
    for (int m : c.extra_society_contracts)
      consumer_payments += prev.mvnos[m].retail_price * c.demand;
  }

  // (5) Offers quote this round's realized fill; every consumer re-chooses
  // synchronously on the same information.
  std::vector<PlanOffer> exclusive_offers;
  for (std::size_t o = 0; o < nop; ++o) {
    double fill;
    if (exclusive_subs[o].empty()) {
      fill = prev.mean_demand > 0.0
                 ? std::min(1.0, prev.operators[o].retail_capacity() /
                                     prev.mean_demand)
                 : 0.0;
    } else {
      fill = 0.0;
      for (int i : exclusive_subs[o])
        fill += exclusive_alloc[i] / prev.consumers[i].demand;
      fill /= static_cast<double>(exclusive_subs[o].size());
    }
    exclusive_offers.push_back({PlanKind::Exclusive, static_cast<int>(o),
                                prev.operators[o].id,
                                prev.operators[o].retail_price, fill});
  }
  std::vector<PlanOffer> society_offers;
  for (std::size_t m = 0; m < nmv; ++m) {
    if (!prev.mvnos[m].active) continue;
    double fill;
    if (contracts_of[m].empty()) {
      // Optimistic estimate for an empty provider: a dedicated slice plus one
      // head of the society pool.
      const double head =
          society_pool / static_cast<double>(contracts.size() + 1);
      fill = prev.mean_demand > 0.0
                 ? std::min(1.0, (prev.mvnos[m].purchased_slice + head) /
                                     prev.mean_demand)
                 : 0.0;
    } else {
      fill = 0.0;
      for (int ci : contracts_of[m]) {
        const double d = prev.consumers[contracts[ci].consumer].demand;
        fill += (gamma * slice_part[ci] + society_part[ci]) / d;
      }
      fill /= static_cast<double>(contracts_of[m].size());
    }
    society_offers.push_back({PlanKind::Society, static_cast<int>(m),
                              prev.mvnos[m].id, prev.mvnos[m].retail_price,
                              fill});
  }
  for (std::size_t i = 0; i < ncons; ++i)
    next.consumers[i].plan =
        choose_plan(prev.consumers[i], exclusive_offers, society_offers);

  // (6) Pricing reacts to this epoch's own revenue.
  for (std::size_t o = 0; o < nop; ++o) {
    next.op_price_history[o].push_back(prev.operators[o].retail_price);
    next.op_revenue_history[o].push_back(op_revenue[o]);
    next.operators[o].retail_price = apply_pricing(
        prev.operators[o].policy, prev.operators[o].retail_price,
        next.op_price_history[o], next.op_revenue_history[o], epoch);
  }
  for (std::size_t m = 0; m < nmv; ++m) {
    next.mvno_price_history[m].push_back(prev.mvnos[m].retail_price);
    next.mvno_revenue_history[m].push_back(mvno_retail[m]);
    next.mvno_margin_history[m].push_back(mvno_margin[m]);
    if (prev.mvnos[m].active) {
      next.mvnos[m].retail_price = apply_pricing(
          prev.mvnos[m].policy, prev.mvnos[m].retail_price,
          next.mvno_price_history[m], next.mvno_revenue_history[m], epoch);
    }
  }

  // (7) Entry and exit.
  for (std::size_t m = 0; m < nmv; ++m) {
    if (!next.mvnos[m].active) continue;
    if (contracts_of[m].empty() && mvno_retail[m] == 0.0 &&
        mvno_margin[m] == 0.0) {
      // An idle template earns and loses nothing; don't count it as losing.
      next.mvnos[m].consecutive_losses = 0;
    } else if (mvno_margin[m] < 0.0) {
      ++next.mvnos[m].consecutive_losses;
    } else {
      next.mvnos[m].consecutive_losses = 0;
    }
  }
  mvno_entry_exit(next);

  // (8)+(9) Settle and report.
  EpochMetrics metrics;
  metrics.epoch = epoch;
  metrics.operators.resize(nop);
  metrics.mvnos.resize(nmv);

  double society_alloc_total = 0.0;
  for (double a : society_part) society_alloc_total += a;

  std::vector<double> soc_q, exc_q;
  for (std::size_t i = 0; i < ncons; ++i) {
    if (prev.consumers[i].plan.kind == PlanKind::Society)
      soc_q.push_back(realized[i]);
    else
      exc_q.push_back(realized[i]);
  }
  metrics.soc_q_p10 = percentile(soc_q, 10.0);
  metrics.soc_q_p50 = percentile(soc_q, 50.0);
  metrics.soc_q_p90 = percentile(soc_q, 90.0);
  metrics.exc_q_p10 = percentile(exc_q, 10.0);
  metrics.exc_q_p50 = percentile(exc_q, 50.0);
  metrics.exc_q_p90 = percentile(exc_q, 90.0);
  for (double q : soc_q) metrics.soc_q_mean += q;
  if (!soc_q.empty()) metrics.soc_q_mean /= static_cast<double>(soc_q.size());
  for (double q : exc_q) metrics.exc_q_mean += q;
  if (!exc_q.empty()) metrics.exc_q_mean /= static_cast<double>(exc_q.size());
  metrics.jain_society =
      society_part.empty() ? 1.0 : jain_index(society_part);
  metrics.donated = donations;
  metrics.unallocated = std::max(0.0, society_pool - society_alloc_total);

  double slices_total = 0.0;
  for (const Mvno& m : prev.mvnos) slices_total += m.purchased_slice;
  double retail_cap_total = 0.0, excl_demand_total = 0.0;
  for (std::size_t o = 0; o < nop; ++o) {
    retail_cap_total += prev.operators[o].retail_capacity();
    excl_demand_total += op_excl_demand[o];
  }
  double op_donations = 0.0;
  for (double d : op_donated) op_donations += d;
  const double society_serving =
      prev.pool.society_capacity() + op_donations + slices_total;
  metrics.society_load_ratio =
      society_serving > 0.0
          ? society_demand_total / society_serving
          : (society_demand_total > 0.0 ? std::numeric_limits<double>::infinity()
                                        : 0.0);
  metrics.exclusive_load_ratio =
      retail_cap_total > 0.0
          ? excl_demand_total / retail_cap_total
          : (excl_demand_total > 0.0 ? std::numeric_limits<double>::infinity()
                                     : 0.0);

  for (std::size_t o = 0; o < nop; ++o) {
    OperatorEpochMetrics& om = metrics.operators[o];
    om.price = prev.operators[o].retail_price;
    om.revenue = op_revenue[o];
    om.retail_revenue = op_retail[o];
    om.licensed_allocation = op_licensed_alloc[o];
    om.retail_capacity = prev.operators[o].retail_capacity();
    om.exclusive_demand = op_excl_demand[o];
    om.donated = op_donated[o];
    om.share = o < next.share_table.shares.size() ? next.share_table.shares[o]
                                                  : 0.0;
  }
  for (std::size_t m = 0; m < nmv; ++m) {
    MvnoEpochMetrics& mm = metrics.mvnos[m];
    mm.price = prev.mvnos[m].retail_price;
    mm.revenue = mvno_retail[m];
    mm.margin = mvno_margin[m];
    mm.active = next.mvnos[m].active;
    mm.society_granted = mvno_granted[m];
    mm.society_entitlement = mvno_entitlement[m];
    mm.slice_used = mvno_slice_used[m];
  }

  // End-of-epoch rosters (after choices and any exit reassignment).
  for (const Consumer& c : next.consumers) {
    if (c.plan.kind == PlanKind::Society) {
      ++metrics.society_subs;
      ++metrics.mvnos[c.plan.provider].subs;
    } else {
      ++metrics.exclusive_subs;
      ++metrics.operators[c.plan.provider].exclusive_subs;
    }
    for (int m : c.extra_society_contracts) ++metrics.mvnos[m].subs;
  }
  metrics.consumer_payments = consumer_payments;
  metrics.provider_retail_revenue = provider_retail;
  metrics.hosting_fees_paid = hosting_total;
  metrics.slice_fees_paid = slice_fees_total;

  next.epoch = epoch + 1;
  return {std::move(next), metrics};
}

}  // namespace socsim
