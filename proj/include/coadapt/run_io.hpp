#pragma once

#include "coadapt/config.hpp"
#include "coadapt/replay.hpp"
#include "coadapt/sac.hpp"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace coadapt {

/// One design handed to the RL loop, as stored in the checkpoint.
struct DesignHistoryEntry {
  DesignVector design;
  std::string mode;  // initial | exploit | explore | baseline
  double objective_value = std::numeric_limits<double>::quiet_NaN();
};

/// Snapshot of a run after a completed design; binary layout documented in
/// docs/file_formats.md.
struct CheckpointData {
  std::uint64_t root_seed = 0;
  std::string config_text;
  std::vector<DesignHistoryEntry> history;  // designs selected so far
  long completed_designs = 0;               // designs whose episodes finished
  long episodes_executed = 0;
  long selection_rollouts = 0;
  AgentPair agent;
  std::vector<State> start_state_sample;  // capped sample for objectives

  // Serialized mt19937_64 states (env, policy, optimizer, exploration) so a
  // resumed run continues the original draw sequences.
  std::vector<std::string> rng_states;

  // Optional full buffer snapshot (checkpoint.buffers = true).
  bool has_buffers = false;
  std::vector<DesignTransition> population_entries;
  std::vector<Transition> individual_entries;
  std::vector<std::pair<State, DesignVector>> start_entries;
};

void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

/// episodes.csv writer; flushes after every row so crashed runs stay usable.
class EpisodeCsvWriter {
 public:
  explicit EpisodeCsvWriter(const std::string& path, bool append = false);
  void write_row(const std::string& run_id, int design_index,
                 const std::string& mode, int episode, double episode_return,
                 long cumulative_rollouts);

 private:
  std::ofstream out_;
};

/// selections.jsonl writer: one JSON object per design selection.
class SelectionLogWriter {
 public:
  explicit SelectionLogWriter(const std::string& path, bool append = false);
  void write(int design_index, const std::string& mode,
             const DesignVector& design, double objective_value,
             long optimizer_evaluations, bool fallback);

 private:
  std::ofstream out_;
};

/// Canonical floating-point formatting used in all CSV output.
std::string csv_double(double v);

/// FNV-1a 64 over the file bytes.
std::uint64_t file_checksum(const std::string& path);

/// manifest.json covering the run outputs.
void write_manifest(const std::string& run_dir, const RunConfig& cfg,
                    std::uint64_t seed, const std::vector<std::string>& files);

}  // namespace coadapt
