#pragma once

#include "coadapt/config.hpp"
#include "coadapt/design_eval.hpp"
#include "coadapt/env.hpp"
#include "coadapt/run_io.hpp"

#include <limits>
#include <string>
#include <vector>

namespace coadapt {

/// Per-design log of one outer-loop step.
struct CoadaptRecord {
  int design_index = 0;
  DesignVector design;
  std::string mode;  // initial | exploit | explore | baseline
  std::vector<double> returns;
  double best_return = -std::numeric_limits<double>::infinity();
  double objective_value_at_selection =
      std::numeric_limits<double>::quiet_NaN();
  long cumulative_rollouts = 0;  // training episodes + selection rollouts
};

struct RunOutput {
  std::vector<CoadaptRecord> records;
  long episodes_executed = 0;
  long selection_rollouts = 0;
};

/// The original design plus (n - 1) uniform draws; fixed per rng stream.
std::vector<DesignVector> initial_designs(const Environment& env, int n,
                                          RngStream& rng);

/// Run the full co-adaptation loop for one seed. When run_dir is non-empty,
/// writes episodes.csv, selections.jsonl, checkpoint.bin, config.txt and
/// manifest.json there. resume_from continues a checkpointed run (appending
/// to its logs). stop_after > 0 checkpoints and returns after that many
/// designs, leaving a state a later call can resume from.
RunOutput run_coadaptation(const RunConfig& cfg, std::uint64_t seed,
                           const std::string& run_dir = "",
                           const CheckpointData* resume_from = nullptr,
                           int stop_after = 0);

}  // namespace coadapt
