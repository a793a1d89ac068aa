#pragma once

#include "coadapt/core.hpp"
#include "coadapt/env.hpp"
#include "coadapt/optim.hpp"
#include "coadapt/sac.hpp"

#include <atomic>
#include <vector>

namespace coadapt {

/// Counts every environment rollout consumed by design selection; the
/// simulation-free objective must leave it untouched.
class RolloutCounter {
 public:
  void add(long n) { count_.fetch_add(n, std::memory_order_relaxed); }
  long get() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<long> count_{0};
};

/// Frozen inputs for one design-optimization run: an immutable population
/// network snapshot, a fixed batch of stored start states, and the set of
/// designs already handed to the RL loop.
struct ObjectiveContext {
  const NetworkSet* networks = nullptr;
  std::vector<State> start_batch;
  std::vector<DesignVector> evaluated_designs;
};

/// Simulation-free design fitness: mean critic value over the start batch
/// with the deterministic (mean) policy action, all from the population nets.
double q_objective(const DesignVector& design, const ObjectiveContext& ctx);

/// One deterministic-policy episode; returns the episodic return.
double rollout_return(const Environment& env, const NetworkSet& net,
                      const DesignVector& design, bool stochastic,
                      RngStream& rng);

/// Rollout-based design fitness: mean return over n_episodes episodes with
/// the deterministic population policy. Adds n_episodes to the counter.
double rollout_objective(const DesignVector& design, const Environment& env,
                         const NetworkSet& net, int n_episodes, RngStream& rng,
                         RolloutCounter& counter);

/// Mean Euclidean distance from design to its min(m, |evaluated|) nearest
/// members of the evaluated set.
double novelty_objective(const DesignVector& design,
                         const std::vector<DesignVector>& evaluated, int m);

enum class ExplorationStrategy { Random, Novelty };

struct ExplorationResult {
  DesignVector design;
  bool fell_back_to_random = false;
};

/// Random -> uniform draw; Novelty -> PSO-maximized novelty objective,
/// falling back to random (flagged) when no designs have been evaluated yet.
ExplorationResult select_exploration_design(
    ExplorationStrategy strategy, const DesignSpace& space,
    const std::vector<DesignVector>& evaluated, int m_neighbors,
    const PsoConfig& optimizer_cfg, RngStream& rng);

}  // namespace coadapt
