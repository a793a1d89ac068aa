#pragma once

#include "coadapt/sac.hpp"

#include <map>
#include <string>
#include <vector>

namespace coadapt {

enum class RunMode {
  QObjective,        // proposed: Eq.-style critic objective, no rollouts
  RolloutObjective,  // baseline: design fitness via simulated episodes
  RandomOnly,        // baseline: uniform design selection throughout
  EvoLoopCmaes,      // baseline: one CMA-ES generation per design step
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

/// Episode schedule of the outer loop.
/// Defaults are the desk-scale schedule; the full-scale setting
/// (300 / 100 episodes, ~50 designs) is reachable through the config file.
struct Schedule {
  int n_initial_designs = 5;
  int episodes_initial = 30;
  int episodes_later = 10;
  int max_designs = 20;
};

/// Everything one run needs; parsed from a flat dotted-key text file with
/// `key = value` lines. CLI flags override file values.
struct RunConfig {
  std::string env_id;
  RunMode mode = RunMode::QObjective;
  std::uint64_t seed = 1;
  int n_seeds = 5;
  std::string out_dir = "runs";

  Schedule schedule;
  SacConfig sac;

  std::string optimizer = "pso";    // pso | cmaes, exploitation optimizer
  int opt_particles = 700;
  int opt_iterations = 250;
  int cmaes_lambda = 8;

  // Rollout-objective exploitation budget; 35 x (29 + init) = 1050 episodes.
  int rollout_opt_particles = 35;
  int rollout_opt_iterations = 29;
  int rollout_episodes_per_eval = 1;

  std::string exploration = "random";  // random | novelty
  int novelty_neighbors = 5;

  int evo_lambda = 9;  // candidates per generation, evo_loop_cmaes mode

  int n_start_states = 256;
  bool population_only = false;
  bool checkpoint_buffers = false;

  /// Canonical serialized form (sorted keys); parse(serialize(c)) == c.
  std::string serialize() const;

  /// FNV-1a hash of the canonical form, for the manifest.
  std::uint64_t hash() const;
};

/// Parse `key = value` lines ('#' comments, blank lines allowed).
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Build a RunConfig from key-value pairs; unknown keys, unparsable values
/// and out-of-range fields raise an error naming every offending key.
RunConfig config_from_map(const std::map<std::string, std::string>& kv);

RunConfig load_config(const std::string& path);

}  // namespace coadapt
