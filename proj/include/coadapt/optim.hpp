#pragma once

#include "coadapt/core.hpp"

#include <functional>
#include <vector>

namespace coadapt {

using Objective = std::function<double(const DesignVector&)>;

struct PsoConfig {
  int n_particles = 700;
  int n_iterations = 250;
  double inertia = 0.7298;
  double cognitive = 1.49618;
  double social = 1.49618;
  double velocity_clamp = 0.2;  // fraction of the per-dimension span
};

struct OptResult {
  DesignVector best_design;
  double best_value = 0.0;
  std::vector<double> history;  // best-so-far after init and each iteration
  long evaluations = 0;
};

/// Global-best PSO maximization over the box. Positions start uniform with
/// zero velocities; every candidate is clamped before evaluation, so the
/// evaluation count is exactly n_particles * (n_iterations + 1).
/// Non-finite objective values score -inf; all-non-finite is an error.
OptResult pso_maximize(const Objective& f, const DesignSpace& space,
                       const PsoConfig& cfg, RngStream& rng);

struct CmaEsConfig {
  int lambda = 8;       // population size, >= 4
  int n_iterations = 100;
  double sigma0 = 0.0;  // 0 -> 0.3 * mean span
};

/// Incremental (mu/mu_w, lambda) CMA-ES with boundary clamping, exposing
/// ask/tell so a caller can run one generation at a time (evolutionary
/// baseline mode).
class CmaEs {
 public:
  CmaEs(const DesignSpace& space, const CmaEsConfig& cfg, RngStream& rng);

  /// Candidate designs for the current generation, clamped to bounds.
  std::vector<DesignVector> ask();

  /// Report objective values (maximization) for the last ask().
  void tell(const std::vector<double>& values);

  const DesignVector& best_design() const { return best_design_; }
  double best_value() const { return best_value_; }
  long evaluations() const { return evaluations_; }
  bool degenerate() const { return degenerate_; }

  /// Reset distribution state from a uniform sample (single restart path).
  void restart();

 private:
  void init_distribution(const Vector& mean);

  DesignSpace space_;
  CmaEsConfig cfg_;
  RngStream* rng_;

  int dim_ = 0, mu_ = 0;
  Vector weights_;
  double mu_eff_ = 0.0, cc_ = 0.0, cs_ = 0.0, c1_ = 0.0, cmu_ = 0.0,
         damps_ = 0.0, chi_n_ = 0.0;

  Vector mean_, pc_, ps_;
  Matrix cov_;
  double sigma_ = 0.0;
  long generation_ = 0;

  std::vector<Vector> pending_z_;  // raw N(0, C) steps for the last ask()
  std::vector<DesignVector> pending_x_;

  DesignVector best_design_;
  double best_value_ = 0.0;
  long evaluations_ = 0;
  bool has_best_ = false;
  bool degenerate_ = false;
};

/// CMA-ES maximization over the box with the OptResult contract; restarts
/// once from a uniform sample on covariance degeneracy, then errors.
OptResult cma_es_maximize(const Objective& f, const DesignSpace& space,
                          const CmaEsConfig& cfg, RngStream& rng);

}  // namespace coadapt
