#include "rsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace rsim {

using nlohmann::json;

double mean_slot_rate(const Scenario& s) {
  double base = 1.0 / s.base_service_ms;
  double boosted = s.fluctuation_mode == FluctuationMode::Faster ? base * s.range_d
                                                                 : base / s.range_d;
  return 0.5 * (base + boosted);
}

double total_arrival_rate(const Scenario& s) {
  return s.utilization * s.num_servers * s.slot_capacity * mean_slot_rate(s);
}

void validate(const Scenario& s) {
  std::vector<std::string> errors;
  auto require = [&errors](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };
  require(s.num_servers >= 1, "num_servers must be >= 1");
  require(s.num_clients >= 1, "num_clients must be >= 1");
  require(s.num_generators >= 1, "num_generators must be >= 1");
  require(s.replication >= 1 && s.replication <= s.num_servers,
          "replication must be in [1, num_servers]");
  require(s.slot_capacity >= 1, "slot_capacity must be >= 1");
  require(s.base_service_ms > 0, "base_service_ms must be > 0");
  require(s.range_d >= 1.0, "range_d must be >= 1");
  require(s.fluctuation_interval_ms > 0, "fluctuation_interval_ms must be > 0");
  require(s.utilization > 0 && s.utilization < 1, "utilization must be in (0, 1)");
  if (s.skew) {
    require(s.skew->client_fraction > 0 && s.skew->client_fraction < 1,
            "skew.client_fraction must be in (0, 1)");
    require(s.skew->demand_fraction > 0 && s.skew->demand_fraction < 1,
            "skew.demand_fraction must be in (0, 1)");
  }
  require(s.key_budget >= 1, "key_budget must be >= 1");
  require(s.repetitions >= 1, "repetitions must be >= 1");
  require(s.one_way_latency >= 0, "one_way_latency_us must be >= 0");
  require(s.sample_weight > 0 && s.sample_weight <= 1, "ewma_sample_weight must be in (0, 1]");
  require(s.limiter.delta > 0, "rate_control.delta_ms must be > 0");
  require(s.limiter.beta > 0 && s.limiter.beta < 1, "rate_control.beta must be in (0, 1)");
  require(s.limiter.gamma > 0, "rate_control.gamma must be > 0");
  require(s.limiter.additive_step > 0, "rate_control.step_cap must be > 0");
  require(s.limiter.queue_threshold >= 0, "rate_control.queue_threshold must be >= 0");
  require(s.limiter.rate_floor > 0, "rate_control.rate_floor must be > 0");
  require(s.limiter.initial_rate >= s.limiter.rate_floor,
          "rate_control.initial_rate must be >= rate_floor");
  require(s.freshness_limit >= 0, "freshness_limit_ms must be >= 0");
  require(s.skip_limit >= 0, "skip_limit must be >= 0");
  require(s.metrics_interval > 0, "metrics_interval_ms must be > 0");
  require(s.cdf_keep_fraction > 0 && s.cdf_keep_fraction <= 1,
          "cdf_keep_fraction must be in (0, 1]");
  if (s.trace_server) {
    require(*s.trace_server >= 0 && *s.trace_server < s.num_servers,
            "trace_server must name an existing server");
  }
  if (!errors.empty()) {
    std::string joined = "invalid scenario:";
    for (const std::string& e : errors) joined += "\n  - " + e;
    throw std::invalid_argument(joined);
  }
}

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
  }
}

std::optional<SkewSpec> parse_skew(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "none") return std::nullopt;
    if (s == "20/80") return SkewSpec{0.2, 0.8};
    if (s == "50/80") return SkewSpec{0.5, 0.8};
    throw std::invalid_argument("unknown skew '" + s +
                                "'; expected none, 20/80, 50/80, or an object");
  }
  if (j.is_object()) {
    reject_unknown_keys(j, {"client_fraction", "demand_fraction"}, "skew");
    SkewSpec spec;
    spec.client_fraction = j.at("client_fraction").get<double>();
    spec.demand_fraction = j.at("demand_fraction").get<double>();
    return spec;
  }
  throw std::invalid_argument("skew must be null, a string, or an object");
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
  reject_unknown_keys(
      j,
      {"num_servers", "num_clients", "num_generators", "replication", "slot_capacity",
       "base_service_ms", "range_d", "fluctuation_interval_ms", "fluctuation_mode",
       "utilization", "skew", "key_budget", "strategy", "repetitions", "base_seed",
       "one_way_latency_us", "ewma_sample_weight", "rate_control", "freshness_limit_ms",
       "skip_limit", "metrics_interval_ms", "collect_feedback_age", "trace_server",
       "cdf_keep_fraction"},
      "config");

  Scenario s;
  auto get_int = [&j](const char* key, int fallback) {
    return j.contains(key) ? j.at(key).get<int>() : fallback;
  };
  auto get_double = [&j](const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
  };
  s.num_servers = get_int("num_servers", s.num_servers);
  s.num_clients = get_int("num_clients", s.num_clients);
  s.num_generators = get_int("num_generators", s.num_generators);
  s.replication = get_int("replication", s.replication);
  s.slot_capacity = get_int("slot_capacity", s.slot_capacity);
  s.base_service_ms = get_double("base_service_ms", s.base_service_ms);
  s.range_d = get_double("range_d", s.range_d);
  s.fluctuation_interval_ms = get_double("fluctuation_interval_ms", s.fluctuation_interval_ms);
  if (j.contains("fluctuation_mode")) {
    std::string mode = j.at("fluctuation_mode").get<std::string>();
    if (mode == "faster") {
      s.fluctuation_mode = FluctuationMode::Faster;
    } else if (mode == "slower") {
      s.fluctuation_mode = FluctuationMode::Slower;
    } else {
      throw std::invalid_argument("fluctuation_mode must be 'faster' or 'slower'");
    }
  }
  s.utilization = get_double("utilization", s.utilization);
  if (j.contains("skew")) s.skew = parse_skew(j.at("skew"));
  if (j.contains("key_budget")) s.key_budget = j.at("key_budget").get<std::uint64_t>();
  if (j.contains("strategy")) s.strategy = parse_strategy(j.at("strategy").get<std::string>());
  s.repetitions = get_int("repetitions", s.repetitions);
  if (j.contains("base_seed")) s.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("one_way_latency_us")) {
    s.one_way_latency = j.at("one_way_latency_us").get<SimTime>();
  }
  s.sample_weight = get_double("ewma_sample_weight", s.sample_weight);
  if (j.contains("rate_control")) {
    const json& rc = j.at("rate_control");
    reject_unknown_keys(rc,
                        {"delta_ms", "beta", "gamma", "step_cap", "queue_threshold",
                         "rate_floor", "initial_rate"},
                        "rate_control");
    if (rc.contains("delta_ms")) s.limiter.delta = from_ms(rc.at("delta_ms").get<double>());
    if (rc.contains("beta")) s.limiter.beta = rc.at("beta").get<double>();
    if (rc.contains("gamma")) s.limiter.gamma = rc.at("gamma").get<double>();
    if (rc.contains("step_cap")) s.limiter.additive_step = rc.at("step_cap").get<double>();
    if (rc.contains("queue_threshold")) {
      s.limiter.queue_threshold = rc.at("queue_threshold").get<double>();
    }
    if (rc.contains("rate_floor")) s.limiter.rate_floor = rc.at("rate_floor").get<double>();
    if (rc.contains("initial_rate")) s.limiter.initial_rate = rc.at("initial_rate").get<double>();
  }
  if (j.contains("freshness_limit_ms")) {
    s.freshness_limit = from_ms(j.at("freshness_limit_ms").get<double>());
  }
  s.skip_limit = get_int("skip_limit", s.skip_limit);
  if (j.contains("metrics_interval_ms")) {
    s.metrics_interval = from_ms(j.at("metrics_interval_ms").get<double>());
  }
  if (j.contains("collect_feedback_age")) {
    s.collect_feedback_age = j.at("collect_feedback_age").get<bool>();
  }
  if (j.contains("trace_server") && !j.at("trace_server").is_null()) {
    s.trace_server = j.at("trace_server").get<ServerId>();
  }
  s.cdf_keep_fraction = get_double("cdf_keep_fraction", s.cdf_keep_fraction);
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["num_servers"] = s.num_servers;
  j["num_clients"] = s.num_clients;
  j["num_generators"] = s.num_generators;
  j["replication"] = s.replication;
  j["slot_capacity"] = s.slot_capacity;
  j["base_service_ms"] = s.base_service_ms;
  j["range_d"] = s.range_d;
  j["fluctuation_interval_ms"] = s.fluctuation_interval_ms;
  j["fluctuation_mode"] = s.fluctuation_mode == FluctuationMode::Faster ? "faster" : "slower";
  j["utilization"] = s.utilization;
  if (s.skew) {
    j["skew"] = {{"client_fraction", s.skew->client_fraction},
                 {"demand_fraction", s.skew->demand_fraction}};
  } else {
    j["skew"] = nullptr;
  }
  j["key_budget"] = s.key_budget;
  j["strategy"] = strategy_name(s.strategy);
  j["repetitions"] = s.repetitions;
  j["base_seed"] = s.base_seed;
  j["one_way_latency_us"] = s.one_way_latency;
  j["ewma_sample_weight"] = s.sample_weight;
  j["rate_control"] = {
      {"delta_ms", to_ms(s.limiter.delta)},
      {"beta", s.limiter.beta},
      {"gamma", s.limiter.gamma},
      {"step_cap", s.limiter.additive_step},
      {"queue_threshold", s.limiter.queue_threshold},
      {"rate_floor", s.limiter.rate_floor},
      {"initial_rate", s.limiter.initial_rate},
  };
  j["freshness_limit_ms"] = to_ms(s.freshness_limit);
  j["skip_limit"] = s.skip_limit;
  j["metrics_interval_ms"] = to_ms(s.metrics_interval);
  j["collect_feedback_age"] = s.collect_feedback_age;
  if (s.trace_server) j["trace_server"] = *s.trace_server;
  j["cdf_keep_fraction"] = s.cdf_keep_fraction;
  return j.dump(2) + "\n";
}

std::string skew_name(const std::optional<SkewSpec>& skew) {
  if (!skew) return "none";
  std::ostringstream out;
  out << std::llround(skew->client_fraction * 100) << "/"
      << std::llround(skew->demand_fraction * 100);
  return out.str();
}

}  // namespace rsim
