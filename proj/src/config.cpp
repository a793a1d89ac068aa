#include "coadapt/config.hpp"

#include "coadapt/env.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coadapt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::QObjective: return "q_objective";
    case RunMode::RolloutObjective: return "rollout_objective";
    case RunMode::RandomOnly: return "random_only";
    case RunMode::EvoLoopCmaes: return "evo_loop_cmaes";
  }
  throw std::logic_error("unknown RunMode");
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "q_objective") return RunMode::QObjective;
  if (s == "rollout_objective") return RunMode::RolloutObjective;
  if (s == "random_only") return RunMode::RandomOnly;
  if (s == "evo_loop_cmaes") return RunMode::EvoLoopCmaes;
  throw std::invalid_argument("unknown run mode: " + s);
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  std::vector<std::string> errors;

  auto take = [&](const std::string& key, auto&& apply) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    try {
      apply(it->second);
    } catch (const std::exception&) {
      errors.push_back(key + " (unparsable value '" + it->second + "')");
    }
    return true;
  };
  auto as_int = [](const std::string& v) {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  };
  auto as_double = [](const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  };
  auto as_bool = [](const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("not a bool");
  };
  auto as_int_list = [&](const std::string& v) {
    std::vector<int> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(as_int(trim(item)));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
  };

  static const std::vector<std::string> known = {
      "env", "mode", "seed", "seeds", "out_dir",
      "schedule.initial_designs", "schedule.episodes_initial",
      "schedule.episodes_later", "schedule.max_designs",
      "sac.hidden", "sac.lr", "sac.gamma", "sac.tau", "sac.init_alpha",
      "sac.auto_alpha", "sac.twin_critic", "sac.updates_individual",
      "sac.updates_population", "sac.batch_size", "sac.pop_frac",
      "optimizer", "optimizer.particles", "optimizer.iterations",
      "optimizer.cmaes_lambda",
      "rollout_optimizer.particles", "rollout_optimizer.iterations",
      "rollout_optimizer.episodes_per_eval",
      "exploration.strategy", "exploration.m_neighbors", "evo.lambda",
      "n_start_states", "population_only", "checkpoint.buffers",
  };
  for (const auto& [key, _] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      errors.push_back(key + " (unknown key)");
    }
  }

  const bool has_env = take("env", [&](const std::string& v) { cfg.env_id = v; });
  take("mode", [&](const std::string& v) { cfg.mode = run_mode_from_string(v); });
  take("seed", [&](const std::string& v) { cfg.seed = std::stoull(v); });
  take("seeds", [&](const std::string& v) { cfg.n_seeds = as_int(v); });
  take("out_dir", [&](const std::string& v) { cfg.out_dir = v; });

  take("schedule.initial_designs",
       [&](const std::string& v) { cfg.schedule.n_initial_designs = as_int(v); });
  take("schedule.episodes_initial",
       [&](const std::string& v) { cfg.schedule.episodes_initial = as_int(v); });
  take("schedule.episodes_later",
       [&](const std::string& v) { cfg.schedule.episodes_later = as_int(v); });
  take("schedule.max_designs",
       [&](const std::string& v) { cfg.schedule.max_designs = as_int(v); });

  take("sac.hidden", [&](const std::string& v) { cfg.sac.hidden = as_int_list(v); });
  take("sac.lr", [&](const std::string& v) { cfg.sac.lr = as_double(v); });
  take("sac.gamma", [&](const std::string& v) { cfg.sac.gamma = as_double(v); });
  take("sac.tau", [&](const std::string& v) { cfg.sac.tau = as_double(v); });
  take("sac.init_alpha",
       [&](const std::string& v) { cfg.sac.init_alpha = as_double(v); });
  take("sac.auto_alpha",
       [&](const std::string& v) { cfg.sac.auto_alpha = as_bool(v); });
  take("sac.twin_critic",
       [&](const std::string& v) { cfg.sac.twin_critic = as_bool(v); });
  take("sac.updates_individual",
       [&](const std::string& v) { cfg.sac.updates_individual = as_int(v); });
  take("sac.updates_population",
       [&](const std::string& v) { cfg.sac.updates_population = as_int(v); });
  take("sac.batch_size",
       [&](const std::string& v) { cfg.sac.batch_size = as_int(v); });
  take("sac.pop_frac",
       [&](const std::string& v) { cfg.sac.pop_frac = as_double(v); });

  take("optimizer", [&](const std::string& v) {
    if (v != "pso" && v != "cmaes") throw std::invalid_argument("bad optimizer");
    cfg.optimizer = v;
  });
  take("optimizer.particles",
       [&](const std::string& v) { cfg.opt_particles = as_int(v); });
  take("optimizer.iterations",
       [&](const std::string& v) { cfg.opt_iterations = as_int(v); });
  take("optimizer.cmaes_lambda",
       [&](const std::string& v) { cfg.cmaes_lambda = as_int(v); });

  take("rollout_optimizer.particles",
       [&](const std::string& v) { cfg.rollout_opt_particles = as_int(v); });
  take("rollout_optimizer.iterations",
       [&](const std::string& v) { cfg.rollout_opt_iterations = as_int(v); });
  take("rollout_optimizer.episodes_per_eval", [&](const std::string& v) {
    cfg.rollout_episodes_per_eval = as_int(v);
  });

  take("exploration.strategy", [&](const std::string& v) {
    if (v != "random" && v != "novelty") {
      throw std::invalid_argument("bad strategy");
    }
    cfg.exploration = v;
  });
  take("exploration.m_neighbors",
       [&](const std::string& v) { cfg.novelty_neighbors = as_int(v); });
  take("evo.lambda", [&](const std::string& v) { cfg.evo_lambda = as_int(v); });

  take("n_start_states",
       [&](const std::string& v) { cfg.n_start_states = as_int(v); });
  take("population_only",
       [&](const std::string& v) { cfg.population_only = as_bool(v); });
  take("checkpoint.buffers",
       [&](const std::string& v) { cfg.checkpoint_buffers = as_bool(v); });

  if (!has_env) errors.push_back("env (missing; environment id is required)");

  // Range checks.
  auto require = [&](bool ok, const std::string& key, const std::string& why) {
    if (!ok) errors.push_back(key + " (" + why + ")");
  };
  if (has_env && !cfg.env_id.empty()) {
    const auto ids = registered_environments();
    require(std::find(ids.begin(), ids.end(), cfg.env_id) != ids.end(), "env",
            "unknown environment id '" + cfg.env_id + "'");
  }
  require(cfg.n_seeds >= 1, "seeds", "must be >= 1");
  require(cfg.schedule.n_initial_designs >= 1, "schedule.initial_designs",
          "must be >= 1");
  require(cfg.schedule.episodes_initial >= 1, "schedule.episodes_initial",
          "must be >= 1");
  require(cfg.schedule.episodes_later >= 1, "schedule.episodes_later",
          "must be >= 1");
  require(cfg.schedule.max_designs >= 1, "schedule.max_designs",
          "must be >= 1");
  require(cfg.sac.gamma >= 0.0 && cfg.sac.gamma <= 1.0, "sac.gamma",
          "must be in [0, 1]");
  require(cfg.sac.tau > 0.0 && cfg.sac.tau <= 1.0, "sac.tau",
          "must be in (0, 1]");
  require(cfg.sac.lr > 0.0, "sac.lr", "must be > 0");
  require(cfg.sac.init_alpha > 0.0, "sac.init_alpha", "must be > 0");
  require(cfg.sac.batch_size >= 1, "sac.batch_size", "must be >= 1");
  require(cfg.sac.updates_individual >= 0, "sac.updates_individual",
          "must be >= 0");
  require(cfg.sac.updates_population >= 0, "sac.updates_population",
          "must be >= 0");
  require(cfg.sac.pop_frac >= 0.0 && cfg.sac.pop_frac <= 1.0, "sac.pop_frac",
          "must be in [0, 1]");
  require(cfg.opt_particles >= 2, "optimizer.particles", "must be >= 2");
  require(cfg.opt_iterations >= 1, "optimizer.iterations", "must be >= 1");
  require(cfg.cmaes_lambda >= 4, "optimizer.cmaes_lambda", "must be >= 4");
  require(cfg.rollout_opt_particles >= 2, "rollout_optimizer.particles",
          "must be >= 2");
  require(cfg.rollout_opt_iterations >= 1, "rollout_optimizer.iterations",
          "must be >= 1");
  require(cfg.rollout_episodes_per_eval >= 1,
          "rollout_optimizer.episodes_per_eval", "must be >= 1");
  require(cfg.n_start_states >= 1, "n_start_states", "must be >= 1");
  require(cfg.novelty_neighbors >= 1, "exploration.m_neighbors",
          "must be >= 1");
  require(cfg.evo_lambda >= 4, "evo.lambda", "must be >= 4");

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

std::string RunConfig::serialize() const {
  std::map<std::string, std::string> kv;
  kv["env"] = env_id;
  kv["mode"] = to_string(mode);
  kv["seed"] = std::to_string(seed);
  kv["seeds"] = std::to_string(n_seeds);
  kv["out_dir"] = out_dir;
  kv["schedule.initial_designs"] = std::to_string(schedule.n_initial_designs);
  kv["schedule.episodes_initial"] = std::to_string(schedule.episodes_initial);
  kv["schedule.episodes_later"] = std::to_string(schedule.episodes_later);
  kv["schedule.max_designs"] = std::to_string(schedule.max_designs);
  kv["sac.hidden"] = join_ints(sac.hidden);
  kv["sac.lr"] = format_double(sac.lr);
  kv["sac.gamma"] = format_double(sac.gamma);
  kv["sac.tau"] = format_double(sac.tau);
  kv["sac.init_alpha"] = format_double(sac.init_alpha);
  kv["sac.auto_alpha"] = sac.auto_alpha ? "true" : "false";
  kv["sac.twin_critic"] = sac.twin_critic ? "true" : "false";
  kv["sac.updates_individual"] = std::to_string(sac.updates_individual);
  kv["sac.updates_population"] = std::to_string(sac.updates_population);
  kv["sac.batch_size"] = std::to_string(sac.batch_size);
  kv["sac.pop_frac"] = format_double(sac.pop_frac);
  kv["optimizer"] = optimizer;
  kv["optimizer.particles"] = std::to_string(opt_particles);
  kv["optimizer.iterations"] = std::to_string(opt_iterations);
  kv["optimizer.cmaes_lambda"] = std::to_string(cmaes_lambda);
  kv["rollout_optimizer.particles"] = std::to_string(rollout_opt_particles);
  kv["rollout_optimizer.iterations"] = std::to_string(rollout_opt_iterations);
  kv["rollout_optimizer.episodes_per_eval"] =
      std::to_string(rollout_episodes_per_eval);
  kv["exploration.strategy"] = exploration;
  kv["exploration.m_neighbors"] = std::to_string(novelty_neighbors);
  kv["evo.lambda"] = std::to_string(evo_lambda);
  kv["n_start_states"] = std::to_string(n_start_states);
  kv["population_only"] = population_only ? "true" : "false";
  kv["checkpoint.buffers"] = checkpoint_buffers ? "true" : "false";

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_map(parse_key_values(ss.str()));
}

}  // namespace coadapt
