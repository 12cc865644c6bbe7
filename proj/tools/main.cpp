#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "run.hpp"

using entrybar::cli::ConfigError;
using entrybar::cli::json;

namespace {

enum class Kind { kText, kNumber, kCount, kNumberList, kTextList, kCostList, kFeeGrid, kFee };

struct Flag {
  std::string name;  // without dashes
  std::string key;   // config key
  Kind kind;
  std::string help;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--" + flag + ": '" + s + "' is not a number");
}

json to_json(const Flag& f, const std::string& text) {
  switch (f.kind) {
    case Kind::kText:
      return text;
    case Kind::kNumber:
      return to_number(text, f.name);
    case Kind::kCount: {
      const double v = to_number(text, f.name);
      if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
        throw ConfigError("--" + f.name + " must be a nonnegative integer");
      }
      return static_cast<std::uint64_t>(v);
    }
    case Kind::kNumberList: {
      json a = json::array();
      for (const auto& x : split(text, ',')) a.push_back(to_number(x, f.name));
      return a;
    }
    case Kind::kTextList: {
      json a = json::array();
      for (const auto& x : split(text, ',')) a.push_back(x);
      return a;
    }
    case Kind::kCostList: {
      json a = json::array();
      for (const auto& x : split(text, ';')) {
        if (!x.empty()) a.push_back(x);
      }
      return a;
    }
    case Kind::kFee: {
      const auto parts = split(text, ',');
      if (parts.size() == 1) return to_number(parts[0], f.name);
      json a = json::array();
      for (const auto& x : parts) a.push_back(to_number(x, f.name));
      return a;
    }
    case Kind::kFeeGrid: {
      if (text.rfind("log:", 0) == 0) {
        const auto parts = split(text.substr(4), ':');
        if (parts.size() != 3) throw ConfigError("--fees log:MIN:MAX:COUNT");
        return {{"log_min", to_number(parts[0], f.name)},
                {"log_max", to_number(parts[1], f.name)},
                {"count", static_cast<std::uint64_t>(to_number(parts[2], f.name))}};
      }
      json a = json::array();
      for (const auto& x : split(text, ',')) a.push_back(to_number(x, f.name));
      return a;
    }
  }
  return nullptr;
}

struct Command {
  std::string name;
  std::string operation;
  std::string help;
  std::vector<Flag> flags;
};

const Flag kRewards{"rewards", "rewards", Kind::kNumberList, "rank rewards, e.g. 0.5,0.5,0"};
const Flag kCost{"cost", "cost", Kind::kText, "cost as family:params, e.g. linear:1"};
const Flag kCosts{"costs", "costs", Kind::kCostList, "creator costs separated by ';'"};
const Flag kPList{"p", "p_list", Kind::kTextList, "p values, e.g. 2,5,inf"};
const Flag kSeed{"seed", "seed", Kind::kCount, "random seed"};

std::vector<Command> commands() {
  return {
      {"ro-solve", "solve", "symmetric rank-order equilibrium",
       {kRewards, kCost, {"points", "points", Kind::kCount, "CDF table points"}, kSeed}},
      {"ro-metrics", "metrics", "quality metrics of a rank-order equilibrium",
       {kRewards, kCost, kPList, {"method", "method", Kind::kText, "quadrature or monte_carlo"},
        {"samples", "samples", Kind::kCount, "Monte Carlo samples"}, kSeed}},
      {"ro-design", "design-search", "grid search for the best rank-order mechanism",
       {{"n", "n", Kind::kCount, "number of creators"}, kCost,
        {"p", "p", Kind::kText, "objective exponent (1, ..., inf)"},
        {"resolution", "resolution", Kind::kNumber, "grid step"}, kSeed}},
      {"ro-barrier", "barrier", "entry-barrier check for an extra creator",
       {kRewards, kCost,
        {"entrant-rewards", "entrant_rewards", Kind::kNumberList, "n+1 rewards (default: append 0)"},
        {"mc-draws", "mc_draws", Kind::kCount, "Monte Carlo draws per checkpoint"},
        {"mc-q", "mc_q", Kind::kNumberList, "Monte Carlo checkpoints"}, kSeed}},
      {"efrm", "efrm", "entry-fee reallocation",
       {kRewards, kCost, {"fee", "fee", Kind::kFee, "entry fee or list of fees"},
        {"scheme", "scheme", Kind::kText, "max-min, max-max or both"}, kPList, kSeed}},
      {"pm-solve", "pm-solve", "proportional mechanism equilibrium", {kCosts, kSeed}},
      {"pm-fee-sweep", "fee-sweep", "proportional mechanism under entry fees",
       {kCosts, {"fees", "fee_grid", Kind::kFeeGrid, "fee list or log:MIN:MAX:COUNT"}, kPList,
        kSeed}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entrybar: equilibria, metrics and mechanism design for creator competition"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

  const auto cmds = commands();
  std::map<CLI::App*, const Command*> owners;
  std::map<std::string, std::string> values;
  std::string config_path, json_path, csv_path;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--json", json_path, "write the JSON result here (default stdout)");
    sub->add_option("--csv", csv_path, "write the CSV table(s) here");
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON config; flags override its fields");
    add_io(sub);
    for (const auto& f : c.flags) {
      sub->add_option("--" + f.name, values[c.name + "/" + f.name], f.help);
    }
    owners[sub] = &c;
  }
  auto* run = app.add_subcommand("run", "run a JSON experiment config");
  run->add_option("--config", config_path, "JSON config")->required();
  add_io(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    json config = config_path.empty() ? json::object() : entrybar::cli::load_config(config_path);
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [sub, cmd] : owners) {
      if (!sub->parsed()) continue;
      if (config.contains("operation") && config["operation"].is_string() &&
          entrybar::cli::canonical_operation(config["operation"].get<std::string>()) != cmd->operation) {
        throw ConfigError("config operation does not match subcommand " + cmd->name);
      }
      config["operation"] = cmd->operation;
      for (const auto& f : cmd->flags) {
        if (sub->count("--" + f.name) > 0) config[f.key] = to_json(f, values[cmd->name + "/" + f.name]);
      }
    }
    if (app.count("--threads") > 0) config["threads"] = threads;
    if (!json_path.empty()) config["output"]["json"] = json_path;
    if (!csv_path.empty()) config["output"]["csv"] = csv_path;
    const auto artifacts = entrybar::cli::run_config(config);
    entrybar::cli::write_artifacts(config, artifacts);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "entrybar: " << e.what() << "\n";
    return entrybar::cli::exit_code_for(e);
  }
}
