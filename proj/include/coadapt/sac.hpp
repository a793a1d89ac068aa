#pragma once

#include "coadapt/core.hpp"
#include "coadapt/mlp.hpp"
#include "coadapt/replay.hpp"

#include <optional>
#include <vector>

namespace coadapt {

struct SacConfig {
  std::vector<int> hidden = {200, 200, 200};
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double init_alpha = 1.0;
  bool auto_alpha = true;        // entropy temperature tuning
  bool twin_critic = true;       // single-critic ablation when false
  int updates_individual = 1000; // SAC updates per episode, individual nets
  int updates_population = 250;  // SAC updates per episode, population nets
  int batch_size = 256;
  double pop_frac = 0.1;         // population share of individual batches
};

/// Tanh-squashed Gaussian policy conditioned on (state, normalized design).
/// The trunk outputs per-action mean and log-std; log-std is clamped to
/// [-20, 2] with zero gradient outside.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int state_dim, int design_dim, int action_dim,
                 const std::vector<int>& hidden, RngStream& rng);

  int action_dim() const { return action_dim_; }
  const Mlp& trunk() const { return trunk_; }
  Mlp& trunk() { return trunk_; }

  struct Sample {
    Matrix action;       // n x adim, tanh-squashed
    Vector log_prob;     // n
    Matrix mean, u, sigma, eps;
    Matrix log_std_mask; // 1 where log-std was inside the clamp range
    MlpCache cache;
  };

  /// Reparameterized sample for each input row (rows = [state, design_norm]).
  Sample sample(const Matrix& input, RngStream& rng) const;

  /// tanh(mean) per input row.
  Matrix mean_action(const Matrix& input) const;

  /// Log-density of given squashed actions (|a| < 1) under the policy;
  /// used for density checks, not for training.
  Vector log_prob(const Matrix& input, const Matrix& actions) const;

  /// Backprop the policy loss. d_action is dL/da from paths that consume the
  /// squashed action (the critic); d_log_prob is dL/dlogp per row. Parameter
  /// gradients are accumulated into grads.
  void backward(const Sample& sample, const Matrix& d_action,
                const Vector& d_log_prob, MlpGrads& grads) const;

 private:
  int action_dim_ = 0;
  Mlp trunk_;
};

struct SacLosses {
  double critic = 0.0;
  double policy = 0.0;
  double temperature = 0.0;
  double alpha = 0.0;  // temperature after the update
};

/// One actor plus twin critics with target copies and a learned entropy
/// temperature. Designs are normalized to [-1, 1] before entering any net.
class NetworkSet {
 public:
  NetworkSet() = default;
  NetworkSet(int state_dim, int action_dim, const DesignSpace& design_space,
             const SacConfig& cfg, RngStream& init_rng);

  Action act(const State& s, const DesignVector& design, bool stochastic,
             RngStream& rng) const;

  /// Deterministic (mean) actions for a batch of states under one design.
  Matrix act_batch(const std::vector<State>& states,
                   const DesignVector& design) const;

  /// min over the twin critics at (s, a, design).
  double q_value(const State& s, const Action& a,
                 const DesignVector& design) const;

  /// Batched q_value for one design.
  Vector q_value_batch(const std::vector<State>& states, const Matrix& actions,
                       const DesignVector& design) const;

  /// One SAC gradient step on critics, policy and temperature, then a soft
  /// target update. Every batch item carries its own design.
  SacLosses update(const std::vector<DesignTransition>& batch, RngStream& rng);

  const SacConfig& config() const { return cfg_; }
  double alpha() const { return std::exp(log_alpha_); }
  double log_alpha() const { return log_alpha_; }
  void set_log_alpha(double v) { log_alpha_ = v; }
  long update_count() const { return update_count_; }
  void set_update_count(long n) { update_count_ = n; }

  GaussianPolicy& policy() { return policy_; }
  const GaussianPolicy& policy() const { return policy_; }
  Mlp& critic1() { return q1_; }
  Mlp& critic2() { return q2_; }
  Mlp& target1() { return q1_target_; }
  Mlp& target2() { return q2_target_; }
  const Mlp& critic1() const { return q1_; }
  const Mlp& critic2() const { return q2_; }
  const Mlp& target1() const { return q1_target_; }
  const Mlp& target2() const { return q2_target_; }

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const DesignSpace& design_space() const { return design_space_; }

 private:
  Matrix policy_input(const std::vector<State>& states,
                      const Matrix& designs_norm) const;

  int state_dim_ = 0;
  int action_dim_ = 0;
  DesignSpace design_space_;
  SacConfig cfg_;

  GaussianPolicy policy_;
  Mlp q1_, q2_, q1_target_, q2_target_;
  AdamOptimizer opt_policy_, opt_q1_, opt_q2_;
  ScalarAdam opt_alpha_;
  double log_alpha_ = 0.0;
  double target_entropy_ = 0.0;
  long update_count_ = 0;
};

/// Population networks (trained on all designs) plus individual networks
/// (cloned from the population at each design switch).
struct AgentPair {
  NetworkSet population;
  NetworkSet individual;

  AgentPair() = default;
  AgentPair(int state_dim, int action_dim, const DesignSpace& design_space,
            const SacConfig& cfg, RngStream& init_rng);

  /// individual <- population, bit-exact (parameters, targets, temperature,
  /// optimizer state, counters). Idempotent.
  void clone_population_to_individual();

  /// Per-episode training: updates_individual mixed-batch steps on the
  /// individual nets and updates_population population-batch steps on the
  /// population nets. population_only trains and uses a single set.
  void train_for_episode(const IndividualBuffer& ind_buf,
                         const PopulationBuffer& pop_buf,
                         const DesignVector& current_design, RngStream& rng,
                         bool population_only = false);
};

}  // namespace coadapt
