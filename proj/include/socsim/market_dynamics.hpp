#pragma once

#include <string>
#include <utility>
#include <vector>

#include "socsim/market_model.hpp"
#include "socsim/metrics.hpp"
#include "socsim/rng.hpp"

namespace socsim {

/// Concave consumer utility: alpha * ln(1 + q/demand) - p.
double consumer_utility(double q, double p, double alpha, double demand);

/// One provider's standing offer, quoting the deliverable fraction of demand
/// observed in the most recent allocation round.
struct PlanOffer {
  PlanKind kind = PlanKind::Society;
  int provider = -1;
  std::string provider_id;
  double price = 0.0;
  double fill = 0.0;  // expected q/demand, in [0,1]
};

/// Picks the exclusive argmax only when its utility beats the best society
/// offer by strictly more than the switching hysteresis; otherwise the
/// society argmax. Ties break toward society, then toward the lowest
/// provider id. Throws NoSocietyOffer when no society offer exists.
Plan choose_plan(const Consumer& consumer,
                 const std::vector<PlanOffer>& exclusive_offers,
                 const std::vector<PlanOffer>& society_offers);

/// Next epoch's retail price under `policy`. `prices`/`revenues` are the
/// trailing own-history including the current epoch; with fewer than two
/// entries the price is left unchanged (except for a collusion window, which
/// pins it outright).
double apply_pricing(const PricingPolicy& policy, double current_price,
                     const std::vector<double>& prices,
                     const std::vector<double>& revenues, long epoch);

/// Transfers `amount` of the host's uncommitted exclusive capacity into the
/// MVNO's dedicated slice and adds the recurring payment to the ledger.
/// Throws InsufficientCapacity when the host cannot cover the amount.
void purchase_slice(MarketState& state, int mvno_index, double amount,
                    double unit_price);

/// Entry/exit sweep: an MVNO exits after `loss_epochs` consecutive losing
/// epochs (never the last active one; its subscribers move to the cheapest
/// remaining MVNO), and one inactive template enters per epoch while the
/// average incumbent margin over the entry window exceeds the threshold.
void mvno_entry_exit(MarketState& state);

/// Advances the market by one epoch and reports its metrics. The input state
/// is untouched; an epoch either applies fully or throws.
std::pair<MarketState, EpochMetrics> step_epoch(const MarketState& state,
                                                Rng& rng);

}  // namespace socsim
