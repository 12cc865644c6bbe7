#include "run.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

#ifndef ENTRYBAR_VERSION
#define ENTRYBAR_VERSION "0.0.0"
#endif

namespace entrybar::cli {

namespace {

const std::set<std::string> kCommon = {"operation", "seed", "threads", "output"};

const std::map<std::string, std::set<std::string>> kOperationKeys = {
    {"solve", {"rewards", "cost", "points"}},
    {"metrics", {"rewards", "cost", "p_list", "method", "samples"}},
    {"design-search", {"n", "cost", "p", "resolution"}},
    {"barrier", {"rewards", "cost", "entrant_rewards", "mc_draws", "mc_q"}},
    {"efrm", {"rewards", "cost", "fee", "scheme", "p_list"}},
    {"pm-solve", {"costs"}},
    {"fee-sweep", {"costs", "fee_grid", "p_list"}},
};

// Keys that do not change results and stay out of the hash.
const std::set<std::string> kUnhashed = {"threads", "output"};

const json& require(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ConfigError("missing required key '" + key + "'");
  return cfg.at(key);
}

double number(const json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return cfg[key].get<double>();
}

std::uint64_t count(const json& cfg, const std::string& key, std::uint64_t fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_integer() || cfg[key].get<std::int64_t>() < 0) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return cfg[key].get<std::uint64_t>();
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("'" + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

RewardVector rewards(const json& cfg, const std::string& key = "rewards") {
  const auto a = numbers(require(cfg, key), key);
  if (a.empty()) throw ConfigError("'" + key + "' must not be empty");
  return RewardVector(a);
}

std::vector<CostSpec> costs(const json& cfg) {
  const json& v = require(cfg, "costs");
  if (!v.is_array()) throw ConfigError("'costs' must be an array");
  if (v.empty()) throw ConfigError("'costs' must not be empty");
  std::vector<CostSpec> out;
  for (const auto& c : v) out.push_back(cost_from_json(c));
  return out;
}

std::vector<double> p_list(const json& cfg) {
  std::vector<double> out;
  if (!cfg.contains("p_list")) return out;
  if (!cfg["p_list"].is_array()) throw ConfigError("'p_list' must be an array");
  for (const auto& p : cfg["p_list"]) out.push_back(parse_p(p));
  return out;
}

std::vector<double> fee_grid(const json& cfg) {
  if (!cfg.contains("fee_grid")) return default_fee_grid();
  const json& v = cfg["fee_grid"];
  if (v.is_array()) return numbers(v, "fee_grid");
  if (v.is_object()) {
    for (const auto& [key, _] : v.items()) {
      if (key != "log_min" && key != "log_max" && key != "count") {
        throw ConfigError("unknown fee_grid key '" + key + "'");
      }
    }
    return logspace(number(v, "log_min", 1e-4), number(v, "log_max", 1.0),
                    count(v, "count", 60));
  }
  throw ConfigError("'fee_grid' must be an array or {log_min, log_max, count}");
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto i : v) {
    if (!s.empty()) s += ' ';
    s += std::to_string(i + 1);
  }
  return s;
}

struct Context {
  json result;
  std::vector<std::pair<std::string, std::string>> tables;
};

void op_solve(const json& cfg, Context& ctx) {
  const auto eq = solve_symmetric_ne(rewards(cfg), cost_from_json(require(cfg, "cost")));
  ctx.result = equilibrium_to_json(eq);
  ctx.result["best_response_gain"] = verify_best_response(eq, linspace(0.0, 1.0, 1001));
  std::string csv = "q,cdf\n";
  for (double q : linspace(0.0, 1.0, count(cfg, "points", 101))) {
    csv += csv_row({fmt(q), fmt(cdf_eval(eq, q))});
  }
  ctx.tables.emplace_back("", csv);
}

void op_metrics(const json& cfg, Context& ctx) {
  const auto eq = solve_symmetric_ne(rewards(cfg), cost_from_json(require(cfg, "cost")));
  const auto ps = p_list(cfg);
  for (double p : ps) {
    if (std::isinf(p)) throw ConfigError("metrics p_list takes finite p; linf is always reported");
  }
  const std::string method = cfg.value("method", std::string("quadrature"));
  MetricReport m;
  if (method == "quadrature") {
    m = quadrature_metrics(eq, ps);
  } else if (method == "monte_carlo") {
    m = mc_metrics(eq, ps, count(cfg, "samples", 100000), count(cfg, "seed", 1));
  } else {
    throw ConfigError("'method' must be quadrature or monte_carlo");
  }
  ctx.result = {{"equilibrium", equilibrium_to_json(eq)}, {"metrics", metrics_to_json(m)}};
  std::string csv = "metric,p,value\n";
  csv += csv_row({"l1", "1", fmt(m.l1)});
  csv += csv_row({"linf", "inf", fmt(m.linf)});
  for (const auto& e : m.lp) csv += csv_row({"lp_objective", fmt(e.p), fmt(e.objective)});
  ctx.tables.emplace_back("", csv);
}

void op_design(const json& cfg, Context& ctx) {
  const auto n = count(cfg, "n", 3);
  const auto cost = cost_from_json(require(cfg, "cost"));
  const double p = cfg.contains("p") ? parse_p(cfg["p"]) : 1.0;
  const double res = number(cfg, "resolution", 0.05);
  const auto found = lp_optimal_search(n, cost, p, res, count(cfg, "seed", 1));
  ctx.result = {{"rewards", rewards_to_json(found.rewards)},
                {"objective", found.objective},
                {"p", p_to_json(p)},
                {"evaluated", found.evaluated},
                {"exhaustive", found.exhaustive}};
  json refs = json::object();
  if (n >= 2) {
    refs["final_elimination"] = design_objective(solve_symmetric_ne(final_elimination(n), cost), p);
  }
  refs["top1"] = design_objective(solve_symmetric_ne(top1(n), cost), p);
  ctx.result["reference_objectives"] = refs;
  if (found.exhaustive) {
    std::string csv;
    for (std::size_t i = 1; i <= n; ++i) csv += (i > 1 ? ",alpha_" : "alpha_") + std::to_string(i);
    csv += ",objective\n";
    for (const auto& a : budget_exhausting_grid(n, res)) {
      for (std::size_t i = 0; i < n; ++i) csv += fmt(a[i]) + ",";
      csv += fmt(design_objective(solve_symmetric_ne(a, cost), p)) + "\n";
    }
    ctx.tables.emplace_back("", csv);
  }
}

void op_barrier(const json& cfg, Context& ctx) {
  const auto base = rewards(cfg);
  const auto eq = solve_symmetric_ne(base, cost_from_json(require(cfg, "cost")));
  RewardVector entrant = base;
  if (cfg.contains("entrant_rewards")) {
    entrant = rewards(cfg, "entrant_rewards");
  } else {
    auto a = base.vec();
    a.push_back(0.0);
    entrant = RewardVector(a);
  }
  const auto r = barrier_holds(eq, entrant);
  ctx.result = {{"incumbents", equilibrium_to_json(eq)},
                {"entrant_rewards", rewards_to_json(entrant)},
                {"barrier", barrier_to_json(r)}};
  const auto draws = count(cfg, "mc_draws", 0);
  if (draws > 0) {
    std::vector<double> qs = {0.25, 0.5, 0.75, 1.0};
    if (cfg.contains("mc_q")) qs = numbers(cfg["mc_q"], "mc_q");
    json mc = json::array();
    std::uint64_t seed = count(cfg, "seed", 1);
    for (double q : qs) {
      const auto s = simulate_entrant_reward(eq, entrant, q, draws, seed++);
      mc.push_back({{"q", q},
                    {"exact", entrant_expected_reward(eq, entrant, q)},
                    {"mean", s.mean},
                    {"stderr", s.stderr_estimate}});
    }
    ctx.result["monte_carlo"] = mc;
  }
  std::string csv = "q,cdf,entrant_reward,cost,margin\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    csv += csv_row({fmt(r.grid[i]), fmt(r.incumbent_cdf[i]), fmt(r.entrant_reward[i]),
                    fmt(r.cost[i]), fmt(r.entrant_reward[i] - r.cost[i])});
  }
  ctx.tables.emplace_back("", csv);
}

void op_efrm(const json& cfg, Context& ctx) {
  const auto base = rewards(cfg);
  const auto cost = cost_from_json(require(cfg, "cost"));
  std::vector<double> fees;
  const json& f = require(cfg, "fee");
  if (f.is_number()) fees = {f.get<double>()};
  else fees = numbers(f, "fee");
  const std::string scheme_name = cfg.value("scheme", std::string("max-min"));
  std::vector<EfrmScheme> schemes;
  if (scheme_name == "both") schemes = {EfrmScheme::kMaxMin, EfrmScheme::kMaxMax};
  else schemes = {efrm_scheme_from_string(scheme_name)};
  const auto ps = p_list(cfg);
  json outcomes = json::array();
  std::string csv = "fee,scheme,l1_before,l1_after,linf_before,linf_after\n";
  for (double fee : fees) {
    for (auto s : schemes) {
      const auto o = efrm_evaluate(base, cost, fee, s, ps);
      outcomes.push_back(efrm_to_json(o));
      csv += csv_row({fmt(fee), to_string(s), fmt(o.metrics_before->l1), fmt(o.metrics_after->l1),
                      fmt(o.metrics_before->linf), fmt(o.metrics_after->linf)});
    }
  }
  ctx.result = {{"outcomes", outcomes}};
  ctx.tables.emplace_back("", csv);
}

void op_pm_solve(const json& cfg, Context& ctx) {
  const auto cs = costs(cfg);
  const auto eq = solve_pm_ne(cs);
  ctx.result = pm_to_json(eq, cs);
  std::string csv = "creator,marginal_cost_at_zero,quality,share,utility,contributing\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    csv += csv_row({std::to_string(i + 1), fmt(cs[i].deriv(0.0)), fmt(eq.qualities[i]),
                    fmt(eq.shares[i]), fmt(eq.utilities[i]), eq.qualities[i] > 0.0 ? "1" : "0"});
  }
  ctx.tables.emplace_back("", csv);
}

void op_fee_sweep(const json& cfg, Context& ctx) {
  const auto cs = costs(cfg);
  auto ps = p_list(cfg);
  if (ps.empty()) ps = {1.0, 2.0, 5.0, std::numeric_limits<double>::infinity()};
  const auto grid = fee_grid(cfg);
  const auto sweep = fee_sweep(cs, grid, ps);
  json rows = json::array();
  std::string csv = "fee,p,norm,survivor_count\n";
  for (const auto& row : sweep.rows) {
    rows.push_back(fee_row_to_json(row));
    for (const auto& [p, v] : row.pnorms) {
      csv += csv_row({fmt(row.fee), fmt(p), fmt(v), std::to_string(row.survivors.size())});
    }
  }
  json argmax = json::array();
  std::string marks = "p,fee,norm,survivors\n";
  for (std::size_t j = 0; j < sweep.argmax.size(); ++j) {
    const auto& [p, idx] = sweep.argmax[j];
    const auto& row = sweep.rows[idx];
    argmax.push_back({{"p", p_to_json(p)}, {"fee", row.fee}, {"norm", row.pnorms[j].second}});
    marks += csv_row({fmt(p), fmt(row.fee), fmt(row.pnorms[j].second), join_indices(row.survivors)});
  }
  ctx.result = {{"creators", cs.size()}, {"rows", rows}, {"argmax", argmax}};
  ctx.tables.emplace_back("", csv);
  ctx.tables.emplace_back("_argmax", marks);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string canonical_operation(const std::string& name) {
  static const std::map<std::string, std::string> aliases = {
      {"solve", "solve"},           {"ro-solve", "solve"},
      {"metrics", "metrics"},       {"ro-metrics", "metrics"},
      {"design-search", "design-search"}, {"ro-design", "design-search"},
      {"barrier", "barrier"},       {"ro-barrier", "barrier"},
      {"efrm", "efrm"},             {"pm-solve", "pm-solve"},
      {"fee-sweep", "fee-sweep"},   {"pm-fee-sweep", "fee-sweep"}};
  const auto it = aliases.find(name);
  if (it == aliases.end()) throw ConfigError("unknown operation '" + name + "'");
  return it->second;
}

std::string config_hash(const json& config) {
  json relevant = json::object();
  for (const auto& [key, value] : config.items()) {
    if (!kUnhashed.count(key)) relevant[key] = value;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(relevant.dump())));
  return buf;
}

Artifacts run_config(const json& input) {
  if (!input.is_object()) throw ConfigError("config must be a JSON object");
  json config = input;
  if (!config.contains("operation") || !config["operation"].is_string()) {
    throw ConfigError("config needs an 'operation' string");
  }
  const std::string op = canonical_operation(config["operation"].get<std::string>());
  config["operation"] = op;
  const auto& allowed = kOperationKeys.at(op);
  for (const auto& [key, _] : config.items()) {
    if (!kCommon.count(key) && !allowed.count(key)) {
      throw ConfigError("key '" + key + "' is not accepted by operation '" + op + "'");
    }
  }
  if (config.contains("output")) {
    const json& o = config["output"];
    if (!o.is_object()) throw ConfigError("'output' must be an object");
    for (const auto& [key, value] : o.items()) {
      if ((key != "json" && key != "csv") || !value.is_string()) {
        throw ConfigError("'output' accepts string keys json and csv only");
      }
    }
  }
  if (config.contains("threads")) set_max_threads(static_cast<unsigned>(count(config, "threads", 0)));
  const std::uint64_t seed = count(config, "seed", 1);

  Context ctx;
  try {
    if (op == "solve") op_solve(config, ctx);
    else if (op == "metrics") op_metrics(config, ctx);
    else if (op == "design-search") op_design(config, ctx);
    else if (op == "barrier") op_barrier(config, ctx);
    else if (op == "efrm") op_efrm(config, ctx);
    else if (op == "pm-solve") op_pm_solve(config, ctx);
    else op_fee_sweep(config, ctx);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }

  const std::string hash = config_hash(config);
  Artifacts out;
  out.document["schema_version"] = kSchemaVersion;
  out.document["tool"] = "entrybar";
  out.document["version"] = ENTRYBAR_VERSION;
  out.document["config_hash"] = hash;
  out.document["seed"] = seed;
  out.document["operation"] = op;
  out.document["result"] = nlohmann::ordered_json(ctx.result);
  const std::string header = "# entrybar " ENTRYBAR_VERSION " operation=" + op +
                             " config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
  for (auto& [suffix, body] : ctx.tables) out.tables.emplace_back(suffix, header + body);
  return out;
}

void write_artifacts(const json& config, const Artifacts& artifacts) {
  const json output = config.value("output", json::object());
  const std::string text = artifacts.document.dump(2) + "\n";
  if (output.contains("json")) {
    std::ofstream f(output["json"].get<std::string>(), std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + output["json"].get<std::string>() + "'");
    f << text;
  } else {
    std::cout << text;
  }
  if (!output.contains("csv")) return;
  const std::string csv = output["csv"].get<std::string>();
  for (const auto& [suffix, body] : artifacts.tables) {
    std::string path = csv;
    if (!suffix.empty()) {
      const auto dot = path.rfind('.');
      const auto slash = path.rfind('/');
      const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
      path = has_ext ? path.substr(0, dot) + suffix + path.substr(dot) : path + suffix;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << body;
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const PreconditionError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const ConsistencyError*>(&e)) return 3;
  return 1;
}

}  // namespace entrybar::cli
