#include "coadapt/design_eval.hpp"

#include <algorithm>
#include <cmath>

namespace coadapt {

double q_objective(const DesignVector& design, const ObjectiveContext& ctx) {
  if (ctx.networks == nullptr) {
    throw std::invalid_argument("q_objective: missing network snapshot");
  }
  if (ctx.start_batch.empty()) {
    throw std::runtime_error("q_objective: empty start-state batch");
  }
  const NetworkSet& net = *ctx.networks;
  Matrix actions = net.act_batch(ctx.start_batch, design);
  Vector q = net.q_value_batch(ctx.start_batch, actions, design);
  return q.mean();
}

double rollout_return(const Environment& env, const NetworkSet& net,
                      const DesignVector& design, bool stochastic,
                      RngStream& rng) {
  State s = env.reset(design, rng);
  double episode_return = 0.0;
  for (int t = 1; t <= env.spec().horizon; ++t) {
    const Action a = net.act(s, design, stochastic, rng);
    StepResult step = env.step(s, a, design, t);
    episode_return += step.reward;
    s = std::move(step.s_next);
    if (step.done) break;
  }
  return episode_return;
}

double rollout_objective(const DesignVector& design, const Environment& env,
                         const NetworkSet& net, int n_episodes, RngStream& rng,
                         RolloutCounter& counter) {
  if (n_episodes < 1) {
    throw std::invalid_argument("rollout_objective: n_episodes must be >= 1");
  }
  double total = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    total += rollout_return(env, net, design, /*stochastic=*/false, rng);
  }
  counter.add(n_episodes);
  return total / static_cast<double>(n_episodes);
}

double novelty_objective(const DesignVector& design,
                         const std::vector<DesignVector>& evaluated, int m) {
  if (evaluated.empty()) {
    throw std::runtime_error("novelty_objective: empty evaluated set");
  }
  if (m < 1) throw std::invalid_argument("novelty_objective: m must be >= 1");

  std::vector<double> dists;
  dists.reserve(evaluated.size());
  for (const auto& other : evaluated) {
    dists.push_back((design - other).norm());
  }
  const std::size_t k =
      std::min(static_cast<std::size_t>(m), dists.size());
  std::partial_sort(dists.begin(), dists.begin() + static_cast<long>(k),
                    dists.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += dists[i];
  return sum / static_cast<double>(k);
}

ExplorationResult select_exploration_design(
    ExplorationStrategy strategy, const DesignSpace& space,
    const std::vector<DesignVector>& evaluated, int m_neighbors,
    const PsoConfig& optimizer_cfg, RngStream& rng) {
  if (strategy == ExplorationStrategy::Novelty && !evaluated.empty()) {
    auto objective = [&](const DesignVector& x) {
      return novelty_objective(x, evaluated, m_neighbors);
    };
    OptResult res = pso_maximize(objective, space, optimizer_cfg, rng);
    return ExplorationResult{clamp(res.best_design, space), false};
  }
  const bool fallback = strategy == ExplorationStrategy::Novelty;
  return ExplorationResult{sample_uniform(space, rng), fallback};
}

}  // namespace coadapt
