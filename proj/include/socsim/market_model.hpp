#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socsim/assignment_models.hpp"

namespace socsim {

enum class AssignmentModel { Chaotic, VirtualOperator, PerOperator };

enum class PolicyKind { Fixed, Adaptive, Collusion };

struct AdaptiveParams {
  double eta = 0.0;
  double min_price = 0.0;
  double max_price = 0.0;
};

/// Operator/MVNO pricing strategy. A collusion policy pins the price inside
/// [start_epoch, end_epoch) and delegates to the fallback outside it.
struct PricingPolicy {
  PolicyKind kind = PolicyKind::Fixed;
  AdaptiveParams adaptive;
  struct {
    long start_epoch = 0;
    long end_epoch = 0;
    double price = 0.0;
    PolicyKind fallback_kind = PolicyKind::Fixed;
    AdaptiveParams fallback_adaptive;
  } collusion;
};

// ---------------------------------------------------------------------------
// Scenario configuration (mirrors the JSON scenario file)

struct AlphaRange {
  double lo = 0.5;
  double hi = 3.0;
};

struct ConsumerConfig {
  int count = 0;
  AlphaRange alpha;
  double demand = 1.0;
  double switching_cost = 0.0;
  double initial_society_share = 0.5;
};

struct OperatorConfig {
  std::string id;
  double exclusive_weight = 1.0;
  double retail_price = 0.0;
  std::optional<double> hosting_fee;  // default: 5% of mean retail price
  PricingPolicy policy;
};

struct MvnoConfig {
  std::string id;
  std::string host;
  double retail_price = 0.0;
  double purchased_slice = 0.0;
  double slice_unit_price = 0.0;
  bool active = true;
  std::optional<std::string> owner_operator;  // operator subsidiary flag
  PricingPolicy policy;
};

struct EntryExitConfig {
  double entry_threshold = 1e300;  // effectively disabled by default
  int entry_window = 10;
  int loss_epochs = 1000000;
};

struct DuplicateContract {
  int consumer = 0;
  std::string mvno;
};

struct EquilibriumConfig {
  int window = 30;
  double tol = 0.01;
};

struct ScenarioConfig {
  double total_capacity = 0.0;
  double society_fraction = 0.0;
  double w_min = 0.01;
  double w_max = 0.99;
  std::vector<OperatorConfig> operators;
  std::vector<MvnoConfig> mvnos;
  ConsumerConfig consumers;
  AssignmentModel assignment_model = AssignmentModel::PerOperator;
  int adjustment_period = 30;
  bool count_exclusive_users = false;
  double continuity_penalty = 1.0;
  EntryExitConfig entry_exit;
  std::vector<DuplicateContract> duplicate_contracts;
  bool registry_enabled = true;
  long epochs = 0;
  std::uint64_t seed = 0;
  EquilibriumConfig equilibrium;
};

/// Parses and range-checks a scenario JSON document. Throws ConfigError on
/// schema/range violations and TopologyError on dangling references.
ScenarioConfig parse_scenario(const std::string& json_text);

/// Loads a scenario file. Throws IoError if unreadable, ConfigError on parse
/// or validation failure.
ScenarioConfig load_scenario(const std::string& path);

// ---------------------------------------------------------------------------
// Market state

struct SpectrumPool {
  double total_capacity = 0.0;
  double society_fraction = 0.0;  // w
  double w_min = 0.01;
  double w_max = 0.99;
  std::vector<double> exclusive_allocations;  // by operator index

  double society_capacity() const { return society_fraction * total_capacity; }
};

struct PhysicalOperator {
  std::string id;
  double exclusive_capacity = 0.0;
  double retail_price = 0.0;
  double hosting_fee = 0.0;  // regulated constant, not a strategy variable
  PricingPolicy policy;
  std::vector<int> hosted_mvnos;
  double committed_slice = 0.0;  // exclusive capacity sold to hosted MVNOs

  double retail_capacity() const { return exclusive_capacity - committed_slice; }
};

struct Mvno {
  std::string id;
  int host = -1;
  int owner_operator = -1;  // -1: independent
  double retail_price = 0.0;
  double purchased_slice = 0.0;
  double slice_cost_per_epoch = 0.0;  // recurring payment to the host
  bool active = true;
  PricingPolicy policy;
  int consecutive_losses = 0;
};

enum class PlanKind { Exclusive, Society };

struct Plan {
  PlanKind kind = PlanKind::Society;
  int provider = -1;  // operator index or MVNO index depending on kind
};

struct Consumer {
  std::string access_code;
  double demand = 0.0;
  double alpha = 0.0;  // quality weight, heterogeneous
  double switching_cost = 0.0;
  Plan plan;
  std::vector<int> extra_society_contracts;  // MVNO indices (registry off)
};

/// Per-consumer allocation outcome of the most recent epoch; used by tests
/// and by the next epoch's offers.
struct AllocationSnapshot {
  std::vector<double> realized_quality;   // per consumer, all contracts summed
  std::vector<double> society_delivered;  // per consumer, society-side only
};

struct MarketState {
  long epoch = 0;
  SpectrumPool pool;
  std::vector<PhysicalOperator> operators;
  std::vector<Mvno> mvnos;
  std::vector<Consumer> consumers;
  AccessRegistry registry;
  AssignmentModel assignment_model = AssignmentModel::PerOperator;
  std::uint64_t rng_seed = 0;

  // Run parameters carried with the state so an epoch step is self-contained.
  int adjustment_period = 30;
  bool count_exclusive_users = false;
  double continuity_penalty = 1.0;
  EntryExitConfig entry_exit;
  double mean_demand = 0.0;

  ShareTable share_table;

  // Rolling per-provider history for adaptive pricing and entry/exit.
  std::vector<std::vector<double>> op_price_history;    // [op][epoch window]
  std::vector<std::vector<double>> op_revenue_history;  // [op][epoch window]
  std::vector<std::vector<double>> mvno_price_history;
  std::vector<std::vector<double>> mvno_revenue_history;
  std::vector<std::vector<double>> mvno_margin_history;

  AllocationSnapshot last_allocation;

  int operator_index(const std::string& oid) const;
  int mvno_index(const std::string& mid) const;
};

/// Deterministically constructs the initial market state from a validated
/// configuration. A pure function of (config, config.seed).
MarketState build_market(const ScenarioConfig& config);

enum class ViolationKind {
  CapacityMismatch,
  FractionOutOfRange,
  NegativeValue,
  UnknownProvider,
  DuplicateIdentity,
  SliceExceedsCapacity,
  OperatorMvnoOverlap,
  NoActiveMvno,
};

struct Violation {
  ViolationKind kind;
  std::string entity;
  std::string message;
};

/// Diagnostic invariant sweep; empty result means the state is consistent.
std::vector<Violation> validate(const MarketState& state);

const char* violation_kind_name(ViolationKind kind);

/// FNV-1a digest over every field that defines the state; equal digests on
/// independently built states demonstrate build determinism.
std::uint64_t state_digest(const MarketState& state);

}  // namespace socsim
