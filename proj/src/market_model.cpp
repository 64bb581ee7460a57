#include "socsim/market_model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "socsim/errors.hpp"
#include "socsim/rng.hpp"

namespace socsim {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& key,
                      const std::string& ctx) {
  if (!j.contains(key))
    throw ConfigError(ctx + ": missing field `" + key + "`");
  if (!j.at(key).is_number())
    throw ConfigError(ctx + ": `" + key + "` must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ConfigError(ctx + ": missing string field `" + key + "`");
  return j.at(key).get<std::string>();
}

AdaptiveParams parse_adaptive(const json& j, const std::string& ctx) {
  AdaptiveParams p;
  p.eta = require_number(j, "eta", ctx);
  p.min_price = require_number(j, "min_price", ctx);
  p.max_price = require_number(j, "max_price", ctx);
  if (!(p.eta > 0.0)) throw ConfigError(ctx + ": eta must be > 0");
  if (p.min_price < 0.0) throw ConfigError(ctx + ": min_price must be >= 0");
  if (p.max_price < p.min_price)
    throw ConfigError(ctx + ": max_price must be >= min_price");
  return p;
}

PricingPolicy parse_policy(const json& j, const std::string& ctx,
                           double base_price) {
  PricingPolicy policy;
  if (j.is_null()) return policy;
  const std::string kind = require_string(j, "kind", ctx);
  if (kind == "fixed") {
    policy.kind = PolicyKind::Fixed;
  } else if (kind == "adaptive") {
    policy.kind = PolicyKind::Adaptive;
    policy.adaptive = parse_adaptive(j, ctx);
  } else if (kind == "collusion") {
    policy.kind = PolicyKind::Collusion;
    policy.collusion.start_epoch = static_cast<long>(require_number(j, "start", ctx));
    policy.collusion.end_epoch = static_cast<long>(require_number(j, "end", ctx));
    policy.collusion.price = require_number(j, "price", ctx);
    if (policy.collusion.end_epoch < policy.collusion.start_epoch)
      throw ConfigError(ctx + ": collusion end must be >= start");
    if (policy.collusion.price < base_price)
      throw ConfigError(ctx + ": colluded price must be >= the base price");
    if (j.contains("fallback") && !j.at("fallback").is_null()) {
      const json& fb = j.at("fallback");
      const std::string fb_kind = require_string(fb, "kind", ctx + ".fallback");
      if (fb_kind == "fixed") {
        policy.collusion.fallback_kind = PolicyKind::Fixed;
      } else if (fb_kind == "adaptive") {
        policy.collusion.fallback_kind = PolicyKind::Adaptive;
        policy.collusion.fallback_adaptive =
            parse_adaptive(fb, ctx + ".fallback");
      } else {
        throw ConfigError(ctx + ": collusion fallback must be fixed or adaptive");
      }
    }
  } else {
    throw ConfigError(ctx + ": unknown policy kind `" + kind + "`");
  }
  return policy;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }

  ScenarioConfig cfg;

  if (!doc.contains("spectrum") || !doc.at("spectrum").is_object())
    throw ConfigError("scenario: missing `spectrum` object");
  const json& spectrum = doc.at("spectrum");
  cfg.total_capacity = require_number(spectrum, "total", "spectrum");
  cfg.society_fraction = require_number(spectrum, "w", "spectrum");
  cfg.w_min = number_or(spectrum, "w_min", 0.01);
  cfg.w_max = number_or(spectrum, "w_max", 0.99);
  if (!(cfg.total_capacity > 0.0))
    throw ConfigError("spectrum.total must be > 0");
  if (!(cfg.w_min > 0.0) || !(cfg.w_max < 1.0) || cfg.w_min > cfg.w_max)
    throw ConfigError("spectrum.[w_min,w_max] must nest inside (0,1)");
  if (!(cfg.society_fraction >= cfg.w_min) ||
      !(cfg.society_fraction <= cfg.w_max))
    throw ConfigError("spectrum.w outside the configured [w_min, w_max]");

  if (!doc.contains("operators") || !doc.at("operators").is_array() ||
      doc.at("operators").empty())
    throw ConfigError("scenario: `operators` must be a non-empty array");
  std::set<std::string> op_ids;
  for (const json& jop : doc.at("operators")) {
    OperatorConfig op;
    op.id = require_string(jop, "id", "operator");
    op.exclusive_weight = number_or(jop, "exclusive_weight", 1.0);
    op.retail_price = require_number(jop, "retail_price", "operator " + op.id);
    if (jop.contains("hosting_fee"))
      op.hosting_fee = jop.at("hosting_fee").get<double>();
    op.policy = parse_policy(jop.contains("policy") ? jop.at("policy") : json(),
                             "operator " + op.id, op.retail_price);
    if (op.retail_price < 0.0)
      throw ConfigError("operator " + op.id + ": retail_price must be >= 0");
    if (op.hosting_fee && *op.hosting_fee < 0.0)
      throw ConfigError("operator " + op.id + ": hosting_fee must be >= 0");
    if (!(op.exclusive_weight >= 0.0))
      throw ConfigError("operator " + op.id + ": exclusive_weight must be >= 0");
    if (!op_ids.insert(op.id).second)
      throw ConfigError("duplicate operator id `" + op.id + "`");
    cfg.operators.push_back(std::move(op));
  }

  if (doc.contains("mvnos")) {
    if (!doc.at("mvnos").is_array())
      throw ConfigError("scenario: `mvnos` must be an array");
    std::set<std::string> mvno_ids;
    for (const json& jm : doc.at("mvnos")) {
      MvnoConfig m;
      m.id = require_string(jm, "id", "mvno");
      m.host = require_string(jm, "host", "mvno " + m.id);
      m.retail_price = require_number(jm, "retail_price", "mvno " + m.id);
      m.purchased_slice = number_or(jm, "purchased_slice", 0.0);
      m.slice_unit_price = number_or(jm, "slice_unit_price", 0.0);
      m.active = jm.contains("active") ? jm.at("active").get<bool>() : true;
      if (jm.contains("owner_operator") && !jm.at("owner_operator").is_null())
        m.owner_operator = jm.at("owner_operator").get<std::string>();
      m.policy = parse_policy(jm.contains("policy") ? jm.at("policy") : json(),
                              "mvno " + m.id, m.retail_price);
      if (m.retail_price < 0.0)
        throw ConfigError("mvno " + m.id + ": retail_price must be >= 0");
      if (m.purchased_slice < 0.0 || m.slice_unit_price < 0.0)
        throw ConfigError("mvno " + m.id + ": slice fields must be >= 0");
      if (!mvno_ids.insert(m.id).second)
        throw ConfigError("duplicate mvno id `" + m.id + "`");
      if (op_ids.count(m.id) > 0)
        throw ConfigError("id `" + m.id + "` used for both operator and mvno");
      if (op_ids.count(m.host) == 0)
        throw TopologyError("mvno " + m.id + ": unknown host operator `" +
                            m.host + "`");
      if (m.owner_operator && op_ids.count(*m.owner_operator) == 0)
        throw TopologyError("mvno " + m.id + ": unknown owner operator `" +
                            *m.owner_operator + "`");
      cfg.mvnos.push_back(std::move(m));
    }
  }
  bool any_active = false;
  for (const MvnoConfig& m : cfg.mvnos) any_active |= m.active;
  if (!any_active)
    throw ConfigError("scenario: at least one active mvno is required "
                      "(society access is universal)");

  if (!doc.contains("consumers") || !doc.at("consumers").is_object())
    throw ConfigError("scenario: missing `consumers` object");
  const json& jc = doc.at("consumers");
  cfg.consumers.count = static_cast<int>(require_number(jc, "count", "consumers"));
  if (cfg.consumers.count < 0)
    throw ConfigError("consumers.count must be >= 0");
  if (!jc.contains("alpha") || !jc.at("alpha").is_object())
    throw ConfigError("consumers: missing `alpha` object");
  cfg.consumers.alpha.lo = require_number(jc.at("alpha"), "lo", "consumers.alpha");
  cfg.consumers.alpha.hi = require_number(jc.at("alpha"), "hi", "consumers.alpha");
  if (cfg.consumers.alpha.lo < 0.0 ||
      cfg.consumers.alpha.hi < cfg.consumers.alpha.lo)
    throw ConfigError("consumers.alpha: need 0 <= lo <= hi");
  cfg.consumers.demand = require_number(jc, "demand", "consumers");
  if (!(cfg.consumers.demand > 0.0))
    throw ConfigError("consumers.demand must be > 0");
  cfg.consumers.switching_cost = require_number(jc, "switching_cost", "consumers");
  if (cfg.consumers.switching_cost < 0.0)
    throw ConfigError("consumers.switching_cost must be >= 0");
  cfg.consumers.initial_society_share =
      number_or(jc, "initial_society_share", 0.5);
  if (cfg.consumers.initial_society_share < 0.0 ||
      cfg.consumers.initial_society_share > 1.0)
    throw ConfigError("consumers.initial_society_share must lie in [0,1]");

  const std::string model =
      doc.contains("assignment_model")
          ? doc.at("assignment_model").get<std::string>()
          : "per_operator";
  if (model == "chaotic") {
    cfg.assignment_model = AssignmentModel::Chaotic;
  } else if (model == "virtual_operator") {
    cfg.assignment_model = AssignmentModel::VirtualOperator;
  } else if (model == "per_operator") {
    cfg.assignment_model = AssignmentModel::PerOperator;
  } else {
    throw ConfigError("unknown assignment_model `" + model + "`");
  }

  cfg.adjustment_period =
      static_cast<int>(number_or(doc, "adjustment_period", 30.0));
  if (cfg.adjustment_period < 1)
    throw ConfigError("adjustment_period must be >= 1");
  if (doc.contains("count_exclusive_users"))
    cfg.count_exclusive_users = doc.at("count_exclusive_users").get<bool>();
  cfg.continuity_penalty = number_or(doc, "continuity_penalty", 1.0);
  if (cfg.continuity_penalty < 0.0 || cfg.continuity_penalty > 1.0)
    throw ConfigError("continuity_penalty must lie in [0,1]");

  if (doc.contains("entry_exit")) {
    const json& je = doc.at("entry_exit");
    cfg.entry_exit.entry_threshold =
        number_or(je, "entry_threshold", cfg.entry_exit.entry_threshold);
    cfg.entry_exit.entry_window =
        static_cast<int>(number_or(je, "entry_window", 10.0));
    cfg.entry_exit.loss_epochs =
        static_cast<int>(number_or(je, "loss_epochs", 1000000.0));
    if (cfg.entry_exit.entry_window < 1 || cfg.entry_exit.loss_epochs < 1)
      throw ConfigError("entry_exit windows must be >= 1");
  }

  if (doc.contains("duplicate_contracts")) {
    for (const json& jd : doc.at("duplicate_contracts")) {
      DuplicateContract d;
      d.consumer = static_cast<int>(require_number(jd, "consumer", "duplicate_contracts"));
      d.mvno = require_string(jd, "mvno", "duplicate_contracts");
      if (d.consumer < 0 || d.consumer >= cfg.consumers.count)
        throw ConfigError("duplicate_contracts: consumer index out of range");
      bool known = false;
      for (const MvnoConfig& m : cfg.mvnos) known |= (m.id == d.mvno);
      if (!known)
        throw TopologyError("duplicate_contracts: unknown mvno `" + d.mvno + "`");
      cfg.duplicate_contracts.push_back(std::move(d));
    }
  }

  if (doc.contains("registry_enabled"))
    cfg.registry_enabled = doc.at("registry_enabled").get<bool>();
  if (!doc.contains("epochs"))
    throw ConfigError("scenario: missing `epochs`");
  cfg.epochs = static_cast<long>(doc.at("epochs").get<double>());
  if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!doc.contains("seed"))
    throw ConfigError("scenario: missing `seed`");
  cfg.seed = doc.at("seed").get<std::uint64_t>();

  if (doc.contains("equilibrium")) {
    const json& jq = doc.at("equilibrium");
    cfg.equilibrium.window = static_cast<int>(number_or(jq, "window", 30.0));
    cfg.equilibrium.tol = number_or(jq, "tol", 0.01);
    if (cfg.equilibrium.window < 2 || !(cfg.equilibrium.tol > 0.0))
      throw ConfigError("equilibrium: window >= 2 and tol > 0 required");
  }

  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

int MarketState::operator_index(const std::string& oid) const {
  for (std::size_t i = 0; i < operators.size(); ++i)
    if (operators[i].id == oid) return static_cast<int>(i);
  return -1;
}

int MarketState::mvno_index(const std::string& mid) const {
  for (std::size_t i = 0; i < mvnos.size(); ++i)
    if (mvnos[i].id == mid) return static_cast<int>(i);
  return -1;
}

MarketState build_market(const ScenarioConfig& cfg) {
  MarketState state;
  state.epoch = 0;
  state.rng_seed = cfg.seed;
  state.assignment_model = cfg.assignment_model;
  state.adjustment_period = cfg.adjustment_period;
  state.count_exclusive_users = cfg.count_exclusive_users;
  state.continuity_penalty = cfg.continuity_penalty;
  state.entry_exit = cfg.entry_exit;
  state.mean_demand = cfg.consumers.demand;

  // Exclusive capacities are derived from weights so the conservation
  // invariant holds for any w (sweeps over spectrum.w stay consistent).
  double weight_sum = 0.0;
  for (const OperatorConfig& oc : cfg.operators) weight_sum += oc.exclusive_weight;
  if (!(weight_sum > 0.0))
    throw ConfigError("operators: exclusive weights sum to zero");
  const double exclusive_total =
      (1.0 - cfg.society_fraction) * cfg.total_capacity;

  double mean_price = 0.0;
  for (const OperatorConfig& oc : cfg.operators) mean_price += oc.retail_price;
  mean_price /= static_cast<double>(cfg.operators.size());

  state.pool.total_capacity = cfg.total_capacity;
  state.pool.society_fraction = cfg.society_fraction;
  state.pool.w_min = cfg.w_min;
  state.pool.w_max = cfg.w_max;

  for (const OperatorConfig& oc : cfg.operators) {
    PhysicalOperator op;
    op.id = oc.id;
    op.exclusive_capacity = exclusive_total * oc.exclusive_weight / weight_sum;
    op.retail_price = oc.retail_price;
    op.hosting_fee = oc.hosting_fee.value_or(0.05 * mean_price);
    op.policy = oc.policy;
    state.operators.push_back(std::move(op));
    state.pool.exclusive_allocations.push_back(
        state.operators.back().exclusive_capacity);
  }

  for (const MvnoConfig& mc : cfg.mvnos) {
    Mvno m;
    m.id = mc.id;
    m.host = state.operator_index(mc.host);
    m.owner_operator =
        mc.owner_operator ? state.operator_index(*mc.owner_operator) : -1;
    m.retail_price = mc.retail_price;
    m.purchased_slice = mc.purchased_slice;
    m.slice_cost_per_epoch = mc.purchased_slice * mc.slice_unit_price;
    m.active = mc.active;
    m.policy = mc.policy;
    const int idx = static_cast<int>(state.mvnos.size());
    state.operators[m.host].hosted_mvnos.push_back(idx);
    state.operators[m.host].committed_slice += m.purchased_slice;
    state.mvnos.push_back(std::move(m));
  }
  for (const PhysicalOperator& op : state.operators) {
    if (op.committed_slice > op.exclusive_capacity + 1e-9)
      throw ConfigError("operator " + op.id +
                        ": purchased slices exceed exclusive capacity");
  }

  std::vector<int> active_mvnos;
  for (std::size_t i = 0; i < state.mvnos.size(); ++i)
    if (state.mvnos[i].active) active_mvnos.push_back(static_cast<int>(i));

  state.registry = AccessRegistry(cfg.registry_enabled);
  Rng rng(cfg.seed);
  for (int i = 0; i < cfg.consumers.count; ++i) {
    Consumer c;
    c.access_code = "ac-" + std::to_string(i);
    c.demand = cfg.consumers.demand;
    c.alpha = uniform_real(rng, cfg.consumers.alpha.lo, cfg.consumers.alpha.hi);
    c.switching_cost = cfg.consumers.switching_cost;
    if (uniform01(rng) < cfg.consumers.initial_society_share) {
      c.plan.kind = PlanKind::Society;
      c.plan.provider =
          active_mvnos[uniform_index(rng, active_mvnos.size())];
    } else {
      c.plan.kind = PlanKind::Exclusive;
      c.plan.provider =
          static_cast<int>(uniform_index(rng, state.operators.size()));
    }
    state.registry.register_contract(c.access_code);
    state.consumers.push_back(std::move(c));
  }

  // Duplicate society contracts are an experiment hook: the registry rejects
  // them when enabled, leaving the state bit-identical to a clean build.
  for (const DuplicateContract& d : cfg.duplicate_contracts) {
    const int mvno = state.mvno_index(d.mvno);
    Consumer& c = state.consumers[d.consumer];
    if (state.registry.register_contract(c.access_code) ==
        RegisterOutcome::Accepted) {
      c.extra_society_contracts.push_back(mvno);
    }
  }

  const std::size_t nop = state.operators.size();
  const std::size_t nmv = state.mvnos.size();
  state.op_price_history.assign(nop, {});
  state.op_revenue_history.assign(nop, {});
  state.mvno_price_history.assign(nmv, {});
  state.mvno_revenue_history.assign(nmv, {});
  state.mvno_margin_history.assign(nmv, {});
  state.share_table.adjustment_period = cfg.adjustment_period;
  state.last_allocation.realized_quality.assign(state.consumers.size(), 0.0);
  state.last_allocation.society_delivered.assign(state.consumers.size(), 0.0);
  return state;
}

const char* violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::CapacityMismatch: return "CapacityMismatch";
    case ViolationKind::FractionOutOfRange: return "FractionOutOfRange";
    case ViolationKind::NegativeValue: return "NegativeValue";
    case ViolationKind::UnknownProvider: return "UnknownProvider";
    case ViolationKind::DuplicateIdentity: return "DuplicateIdentity";
    case ViolationKind::SliceExceedsCapacity: return "SliceExceedsCapacity";
    case ViolationKind::OperatorMvnoOverlap: return "OperatorMvnoOverlap";
    case ViolationKind::NoActiveMvno: return "NoActiveMvno";
  }
  return "Unknown";
}

std::vector<Violation> validate(const MarketState& state) {
  std::vector<Violation> out;
  const auto report = [&](ViolationKind kind, const std::string& entity,
                          const std::string& message) {
    out.push_back({kind, entity, message});
  };

  double exclusive_sum = 0.0;
  for (double a : state.pool.exclusive_allocations) exclusive_sum += a;
  const double total = state.pool.society_capacity() + exclusive_sum;
  if (std::abs(total - state.pool.total_capacity) > 1e-9)
    report(ViolationKind::CapacityMismatch, "spectrum",
           "society + exclusive allocations do not add up to the total");

  if (!(state.pool.society_fraction >= state.pool.w_min) ||
      !(state.pool.society_fraction <= state.pool.w_max) ||
      !(state.pool.society_fraction > 0.0) ||
      !(state.pool.society_fraction < 1.0))
    report(ViolationKind::FractionOutOfRange, "spectrum",
           "society fraction outside [w_min, w_max] in (0,1)");

  std::set<std::string> op_ids;
  for (const PhysicalOperator& op : state.operators) {
    op_ids.insert(op.id);
    if (op.retail_price < 0.0 || op.hosting_fee < 0.0)
      report(ViolationKind::NegativeValue, op.id,
             "operator prices and fees must be >= 0");
    if (op.committed_slice > op.exclusive_capacity + 1e-9)
      report(ViolationKind::SliceExceedsCapacity, op.id,
             "sold slices exceed exclusive capacity");
  }
  bool any_active = false;
  for (const Mvno& m : state.mvnos) {
    if (op_ids.count(m.id) > 0)
      report(ViolationKind::OperatorMvnoOverlap, m.id,
             "entity is both an operator and an mvno");
    if (m.host < 0 || m.host >= static_cast<int>(state.operators.size()))
      report(ViolationKind::UnknownProvider, m.id, "mvno host out of range");
    if (m.retail_price < 0.0 || m.purchased_slice < 0.0)
      report(ViolationKind::NegativeValue, m.id,
             "mvno price/slice must be >= 0");
    any_active |= m.active;
  }
  if (!state.mvnos.empty() && !any_active)
    report(ViolationKind::NoActiveMvno, "mvnos", "no active mvno remains");

  std::map<std::string, int> codes;
  for (std::size_t i = 0; i < state.consumers.size(); ++i) {
    const Consumer& c = state.consumers[i];
    const std::string entity = "consumer " + std::to_string(i);
    if (!(c.demand > 0.0) || c.alpha < 0.0 || c.switching_cost < 0.0)
      report(ViolationKind::NegativeValue, entity,
             "demand must be > 0; alpha and switching_cost >= 0");
    int contracts = 1 + static_cast<int>(c.extra_society_contracts.size());
    codes[c.access_code] += contracts;
    if (c.plan.kind == PlanKind::Exclusive) {
      if (c.plan.provider < 0 ||
          c.plan.provider >= static_cast<int>(state.operators.size()))
        report(ViolationKind::UnknownProvider, entity,
               "plan references a missing operator");
    } else {
      if (c.plan.provider < 0 ||
          c.plan.provider >= static_cast<int>(state.mvnos.size()) ||
          !state.mvnos[c.plan.provider].active)
        report(ViolationKind::UnknownProvider, entity,
               "plan references a missing or inactive mvno");
    }
    for (int m : c.extra_society_contracts) {
      if (m < 0 || m >= static_cast<int>(state.mvnos.size()) ||
          !state.mvnos[m].active)
        report(ViolationKind::UnknownProvider, entity,
               "extra contract references a missing or inactive mvno");
    }
  }
  if (state.registry.enabled()) {
    for (const auto& [code, n] : codes) {
      if (n > 1)
        report(ViolationKind::DuplicateIdentity, code,
               "identity registry enabled but the code holds " +
                   std::to_string(n) + " active contracts");
    }
  }
  return out;
}

namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  }
  void num(double v) { bytes(&v, sizeof v); }
  void num(long v) { bytes(&v, sizeof v); }
  void num(int v) { bytes(&v, sizeof v); }
  void num(std::uint64_t v) { bytes(&v, sizeof v); }
  void num(bool v) { char c = v ? 1 : 0; bytes(&c, 1); }
  void str(const std::string& s) { bytes(s.data(), s.size()); }
};

}  // namespace

std::uint64_t state_digest(const MarketState& s) {
  Fnv f;
  f.num(s.epoch);
  f.num(s.pool.total_capacity);
  f.num(s.pool.society_fraction);
  for (double a : s.pool.exclusive_allocations) f.num(a);
  f.num(s.rng_seed);
  f.num(static_cast<int>(s.assignment_model));
  for (const PhysicalOperator& op : s.operators) {
    f.str(op.id);
    f.num(op.exclusive_capacity);
    f.num(op.retail_price);
    f.num(op.hosting_fee);
    f.num(op.committed_slice);
  }
  for (const Mvno& m : s.mvnos) {
    f.str(m.id);
    f.num(m.host);
    f.num(m.retail_price);
    f.num(m.purchased_slice);
    f.num(m.active);
    f.num(m.consecutive_losses);
  }
  for (const Consumer& c : s.consumers) {
    f.str(c.access_code);
    f.num(c.demand);
    f.num(c.alpha);
    f.num(c.switching_cost);
    f.num(static_cast<int>(c.plan.kind));
    f.num(c.plan.provider);
    for (int m : c.extra_society_contracts) f.num(m);
  }
  for (double q : s.last_allocation.realized_quality) f.num(q);
  for (const auto& hist : s.op_price_history)
    for (double v : hist) f.num(v);
  for (const auto& hist : s.op_revenue_history)
    for (double v : hist) f.num(v);
  for (double sh : s.share_table.shares) f.num(sh);
  return f.h;
}

}  // namespace socsim
