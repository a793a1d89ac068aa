#pragma once

#include "coadapt/core.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace coadapt {

/// Static description of a design-parameterized environment.
struct EnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  DesignSpace design_space;
  int horizon = 0;   // steps per episode
  double dt = 0.0;   // seconds
};

struct StepResult {
  State s_next;
  double reward = 0.0;
  bool done = false;
};

/// Episodic environment whose dynamics, reward and start state may all
/// depend on the design vector. Implementations must be deterministic
/// given (s, a, design); start-state randomness goes through the RngStream.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  /// Canonical "original" design (all-ones scaling for the reference envs).
  virtual DesignVector original_design() const = 0;

  /// Draw s0 from p(s0 | design).
  virtual State reset(const DesignVector& design, RngStream& rng) const = 0;

  /// Advance one step. step_index is 1-based; done is set at the horizon.
  virtual StepResult step(const State& s, const Action& a,
                          const DesignVector& design, int step_index) const = 0;
};

/// r = max(delta_x / 10, 0); forward-motion reward clipped at zero.
double reward_forward_clipped(double delta_x);

/// r = ((h > 0.8) * (max(delta_x, 0) + 1) - 0.1 * |y_rot|) / 10;
/// forward reward gated on a hard minimum torso height.
double reward_upright_forward(double h_torso, double delta_x,
                              double y_rot_norm);

/// 1-D cart with gain ratio xi1/xi2. State (x, v), one action.
/// Optimal design is the corner (2.0, 0.5): return is monotone in the gain.
class GainLineEnv final : public Environment {
 public:
  GainLineEnv();
  const EnvSpec& spec() const override { return spec_; }
  DesignVector original_design() const override;
  State reset(const DesignVector& design, RngStream& rng) const override;
  StepResult step(const State& s, const Action& a, const DesignVector& design,
                  int step_index) const override;

 private:
  EnvSpec spec_;
};

/// Planar point mass with design-dependent gain, energy cost and drag.
/// State (x, y, vx, vy), two actions. Start x offset depends on xi1, so the
/// start-state distribution is design-conditioned.
class GainField2DEnv final : public Environment {
 public:
  GainField2DEnv();
  const EnvSpec& spec() const override { return spec_; }
  DesignVector original_design() const override;
  State reset(const DesignVector& design, RngStream& rng) const override;
  StepResult step(const State& s, const Action& a, const DesignVector& design,
                  int step_index) const override;

 private:
  EnvSpec spec_;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// Register a factory under a string id; overwrites an existing entry.
void register_environment(const std::string& id, EnvFactory factory);

/// Instantiate by id ("gainline", "gainfield2d", or registered third-party).
std::unique_ptr<Environment> make_environment(const std::string& id);

/// Ids currently registered, sorted.
std::vector<std::string> registered_environments();

}  // namespace coadapt
