#include "coadapt/env.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace coadapt {

namespace {

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::domain_error(std::string(what) + ": non-finite components");
  }
}

void check_inputs(const State& s, const Action& a, const DesignVector& design,
                  const EnvSpec& spec) {
  if (s.size() != spec.state_dim || a.size() != spec.action_dim ||
      design.size() != spec.design_space.dim()) {
    throw std::invalid_argument("step: dimension mismatch");
  }
  check_finite(s, "step state");
  check_finite(a, "step action");
  check_finite(design, "step design");
}

void check_design(const DesignVector& design, const EnvSpec& spec) {
  if (design.size() != spec.design_space.dim()) {
    throw std::invalid_argument("reset: design dimension mismatch");
  }
  if (!spec.design_space.contains(design, 1e-12)) {
    throw std::domain_error("reset: design outside bounds");
  }
}

}  // namespace

double reward_forward_clipped(double delta_x) {
  if (!std::isfinite(delta_x)) {
    throw std::domain_error("reward_forward_clipped: non-finite input");
  }
  return std::max(delta_x / 10.0, 0.0);
}

double reward_upright_forward(double h_torso, double delta_x,
                              double y_rot_norm) {
  if (!std::isfinite(h_torso) || !std::isfinite(delta_x) ||
      !std::isfinite(y_rot_norm) || y_rot_norm < 0.0) {
    throw std::domain_error("reward_upright_forward: invalid input");
  }
  const double upright = h_torso > 0.8 ? 1.0 : 0.0;
  return (upright * (std::max(delta_x, 0.0) + 1.0) - 0.1 * y_rot_norm) / 10.0;
}

// ---------------------------------------------------------------------------
// GainLine

GainLineEnv::GainLineEnv() {
  Vector lo(2), hi(2);
  lo << 0.5, 0.5;
  hi << 2.0, 2.0;
  spec_ = EnvSpec{2, 1, DesignSpace(lo, hi), 100, 0.1};
}

DesignVector GainLineEnv::original_design() const {
  return Vector::Ones(2);
}

State GainLineEnv::reset(const DesignVector& design, RngStream&) const {
  check_design(design, spec_);
  return Vector::Zero(2);
}

StepResult GainLineEnv::step(const State& s, const Action& a,
                             const DesignVector& design,
                             int step_index) const {
  check_inputs(s, a, design, spec_);
  const double gain = design[0] / design[1];
  const double v_next = 0.9 * s[1] + spec_.dt * gain * a[0];
  const double x_next = s[0] + spec_.dt * v_next;
  State s_next(2);
  s_next << x_next, v_next;
  return StepResult{std::move(s_next), reward_forward_clipped(x_next - s[0]),
                    step_index >= spec_.horizon};
}

// ---------------------------------------------------------------------------
// GainField2D

GainField2DEnv::GainField2DEnv() {
  Vector lo = Vector::Constant(3, 0.5);
  Vector hi = Vector::Constant(3, 2.0);
  spec_ = EnvSpec{4, 2, DesignSpace(lo, hi), 100, 0.1};
}

DesignVector GainField2DEnv::original_design() const {
  return Vector::Ones(3);
}

State GainField2DEnv::reset(const DesignVector& design, RngStream& rng) const {
  check_design(design, spec_);
  State s = Vector::Zero(4);
  s[0] = 0.1 * (design[0] - 1.0);
  s[1] = rng.uniform(-0.1, 0.1);
  return s;
}

StepResult GainField2DEnv::step(const State& s, const Action& a,
                                const DesignVector& design,
                                int step_index) const {
  check_inputs(s, a, design, spec_);
  const double gain = design[0];
  const double energy_coeff = design[1] + 1.0 / design[1];
  const double drag = 0.05 * design[2];

  State s_next(4);
  for (int axis = 0; axis < 2; ++axis) {
    const double v_next = (1.0 - drag) * s[2 + axis] + spec_.dt * gain * a[axis];
    s_next[2 + axis] = v_next;
    s_next[axis] = s[axis] + spec_.dt * v_next;
  }
  const double delta_x = s_next[0] - s[0];
  const double reward =
      std::max(delta_x, 0.0) - 0.05 * energy_coeff * a.squaredNorm();
  return StepResult{std::move(s_next), reward, step_index >= spec_.horizon};
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::map<std::string, EnvFactory>& registry() {
  static std::map<std::string, EnvFactory> envs = {
      {"gainline", [] { return std::make_unique<GainLineEnv>(); }},
      {"gainfield2d", [] { return std::make_unique<GainField2DEnv>(); }},
  };
  return envs;
}

}  // namespace

void register_environment(const std::string& id, EnvFactory factory) {
  registry()[id] = std::move(factory);
}

std::unique_ptr<Environment> make_environment(const std::string& id) {
  auto it = registry().find(id);
  if (it == registry().end()) {
    throw std::invalid_argument("unknown environment id: " + id);
  }
  return it->second();
}

std::vector<std::string> registered_environments() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : registry()) ids.push_back(id);
  return ids;
}

}  // namespace coadapt
