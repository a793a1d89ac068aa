#pragma once

#include "coadapt/design_eval.hpp"
#include "coadapt/run_io.hpp"

#include <string>
#include <vector>

namespace coadapt {

/// One parsed episodes.csv row.
struct EpisodeRow {
  std::string run_id;
  int design_index = 0;
  std::string mode;
  int episode = 0;
  double episode_return = 0.0;
  long cumulative_rollouts = 0;
};

std::vector<EpisodeRow> read_episode_csv(const std::string& path);

/// One grid point of a 2-D objective slice.
struct LandscapePoint {
  double x = 0.0;  // value along dim_a
  double y = 0.0;  // value along dim_b
  double value = 0.0;
};

struct LandscapeSlice {
  int dim_a = 0;
  int dim_b = 1;
  int resolution = 0;
  DesignVector base;  // fixed values for the remaining dimensions
  std::vector<LandscapePoint> points;  // row-major, x fastest
};

/// Evaluate the design objective on a resolution x resolution grid over
/// dims (dim_a, dim_b) of the design box, holding the other dimensions at
/// base. For 1-D design spaces dim_b is ignored and y is reported as 0.
LandscapeSlice landscape_slice(const Objective& f, const DesignSpace& space,
                               const DesignVector& base, int dim_a, int dim_b,
                               int resolution);

/// Header: dim_i_value,dim_j_value,objective
void write_landscape_csv(const std::string& path, const LandscapeSlice& slice);

/// Mean plus top-2 orthonormal principal directions of the design history.
struct PcaModel {
  Vector mean;
  Matrix components;          // dim x 2, unit columns
  Vector explained_variance;  // the two matching eigenvalues, descending
  double total_variance = 0.0;
};

/// PCA via eigendecomposition of the sample covariance (divisor n - 1).
/// Sign convention: the first nonzero entry of each component is positive,
/// so repeated fits of the same data agree exactly.
PcaModel pca_fit(const std::vector<DesignVector>& designs);

/// Project (design - mean) onto the two components.
Vector pca_project(const PcaModel& model, const DesignVector& design);

/// Header: design_index,pc1,pc2,objective,mode; one row per history entry.
void write_pca_csv(const std::string& path, const PcaModel& model,
                   const std::vector<DesignHistoryEntry>& history);

/// Running-best returns aggregated across seeds, grouped by mode.
struct CompareRow {
  int design_index = 0;
  std::string mode;          // run mode label, one group per mode
  double mean_best = 0.0;    // mean over seeds of the running best return
  double std_best = 0.0;     // population std over seeds
  double mean_rollouts = 0.0;
};

/// One labeled group of runs (same mode, several seeds).
struct RunGroup {
  std::string mode;
  std::vector<std::string> episode_csv_paths;
};

/// Per design index and mode: mean/std across seeds of the running best
/// return, plus the mean cumulative rollout count. All runs within a group
/// must cover the same design indices.
std::vector<CompareRow> compare_runs(const std::vector<RunGroup>& groups);

void write_compare_csv(const std::string& path,
                       const std::vector<CompareRow>& rows);

}  // namespace coadapt
