#include "coadapt/sac.hpp"

#include <cmath>

namespace coadapt {

namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

Matrix hcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Matrix hcat(const Matrix& a, const Matrix& b, const Matrix& c) {
  Matrix out(a.rows(), a.cols() + b.cols() + c.cols());
  out << a, b, c;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianPolicy

GaussianPolicy::GaussianPolicy(int state_dim, int design_dim, int action_dim,
                               const std::vector<int>& hidden, RngStream& rng)
    : action_dim_(action_dim) {
  std::vector<int> sizes;
  sizes.push_back(state_dim + design_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2 * action_dim);
  trunk_ = Mlp(sizes, rng);
}

GaussianPolicy::Sample GaussianPolicy::sample(const Matrix& input,
                                              RngStream& rng) const {
  const int n = static_cast<int>(input.rows());
  const int ad = action_dim_;

  Sample s;
  Matrix out = trunk_.forward(input, s.cache);
  s.mean = out.leftCols(ad);
  Matrix raw = out.rightCols(ad);
  Matrix log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.log_std_mask = ((raw.array() > kLogStdMin) && (raw.array() < kLogStdMax))
                       .cast<double>()
                       .matrix();
  s.sigma = log_std.array().exp().matrix();

  s.eps.resize(n, ad);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < ad; ++j) s.eps(i, j) = rng.normal();
  }
  s.u = s.mean + s.sigma.cwiseProduct(s.eps);
  s.action = s.u.array().tanh().matrix();

  Matrix per_dim = (-0.5 * s.eps.array().square() - log_std.array() -
                    kHalfLog2Pi -
                    (1.0 - s.action.array().square() + kSquashEps).log())
                       .matrix();
  s.log_prob = per_dim.rowwise().sum();
  return s;
}

Matrix GaussianPolicy::mean_action(const Matrix& input) const {
  Matrix out = trunk_.forward(input);
  return out.leftCols(action_dim_).array().tanh().matrix();
}

Vector GaussianPolicy::log_prob(const Matrix& input,
                                const Matrix& actions) const {
  Matrix out = trunk_.forward(input);
  Matrix mean = out.leftCols(action_dim_);
  Matrix log_std =
      out.rightCols(action_dim_).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  Matrix sigma = log_std.array().exp().matrix();
  Matrix u = actions.array().atanh().matrix();
  Matrix z = (u - mean).cwiseQuotient(sigma);
  Matrix per_dim = (-0.5 * z.array().square() - log_std.array() - kHalfLog2Pi -
                    (1.0 - actions.array().square() + kSquashEps).log())
                       .matrix();
  return per_dim.rowwise().sum();
}

void GaussianPolicy::backward(const Sample& sample, const Matrix& d_action,
                              const Vector& d_log_prob, MlpGrads& grads) const {
  const Eigen::ArrayXXd a = sample.action.array();
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - a.square();
  // d(log_prob)/du from the tanh correction term.
  const Eigen::ArrayXXd c = 2.0 * a * one_minus_a2 / (one_minus_a2 + kSquashEps);

  Eigen::ArrayXXd dlp = d_log_prob.replicate(1, action_dim_).array();
  Matrix d_u = (d_action.array() * one_minus_a2 + dlp * c).matrix();
  Matrix d_log_std =
      ((d_u.array() * (sample.sigma.cwiseProduct(sample.eps)).array() - dlp) *
       sample.log_std_mask.array())
          .matrix();

  Matrix d_out = hcat(d_u, d_log_std);
  trunk_.backward(sample.cache, d_out, grads);
}

// ---------------------------------------------------------------------------
// NetworkSet

NetworkSet::NetworkSet(int state_dim, int action_dim,
                       const DesignSpace& design_space, const SacConfig& cfg,
                       RngStream& init_rng)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      design_space_(design_space),
      cfg_(cfg) {
  const int dd = design_space.dim();
  policy_ = GaussianPolicy(state_dim, dd, action_dim, cfg.hidden, init_rng);

  std::vector<int> critic_sizes;
  critic_sizes.push_back(state_dim + action_dim + dd);
  critic_sizes.insert(critic_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  critic_sizes.push_back(1);
  q1_ = Mlp(critic_sizes, init_rng);
  q2_ = Mlp(critic_sizes, init_rng);
  q1_target_ = q1_;
  q2_target_ = q2_;

  opt_policy_ = AdamOptimizer(policy_.trunk(), cfg.lr);
  opt_q1_ = AdamOptimizer(q1_, cfg.lr);
  opt_q2_ = AdamOptimizer(q2_, cfg.lr);
  opt_alpha_ = ScalarAdam(cfg.lr);
  log_alpha_ = std::log(cfg.init_alpha);
  target_entropy_ = -static_cast<double>(action_dim);
}

Matrix NetworkSet::policy_input(const std::vector<State>& states,
                                const Matrix& designs_norm) const {
  const int n = static_cast<int>(states.size());
  Matrix in(n, state_dim_ + design_space_.dim());
  for (int i = 0; i < n; ++i) {
    in.row(i).head(state_dim_) = states[static_cast<std::size_t>(i)];
    in.row(i).tail(design_space_.dim()) = designs_norm.row(i);
  }
  return in;
}

Action NetworkSet::act(const State& s, const DesignVector& design,
                       bool stochastic, RngStream& rng) const {
  if (s.size() != state_dim_ || design.size() != design_space_.dim()) {
    throw std::invalid_argument("act: dimension mismatch");
  }
  Matrix in(1, state_dim_ + design_space_.dim());
  in.row(0).head(state_dim_) = s;
  in.row(0).tail(design_space_.dim()) = design_space_.normalize(design);

  Action a;
  if (stochastic) {
    a = policy_.sample(in, rng).action.row(0);
  } else {
    a = policy_.mean_action(in).row(0);
  }
  if (!a.allFinite()) {
    throw std::runtime_error("act: non-finite action from policy network");
  }
  return a;
}

Matrix NetworkSet::act_batch(const std::vector<State>& states,
                             const DesignVector& design) const {
  const int n = static_cast<int>(states.size());
  Matrix designs_norm =
      design_space_.normalize(design).transpose().replicate(n, 1);
  return policy_.mean_action(policy_input(states, designs_norm));
}

double NetworkSet::q_value(const State& s, const Action& a,
                           const DesignVector& design) const {
  std::vector<State> states{s};
  Matrix actions = a.transpose();
  return q_value_batch(states, actions, design)[0];
}

Vector NetworkSet::q_value_batch(const std::vector<State>& states,
                                 const Matrix& actions,
                                 const DesignVector& design) const {
  const int n = static_cast<int>(states.size());
  const int dd = design_space_.dim();
  Matrix in(n, state_dim_ + action_dim_ + dd);
  Vector dn = design_space_.normalize(design);
  for (int i = 0; i < n; ++i) {
    in.row(i).head(state_dim_) = states[static_cast<std::size_t>(i)];
    in.row(i).segment(state_dim_, action_dim_) = actions.row(i);
    in.row(i).tail(dd) = dn;
  }
  Vector v1 = q1_.forward(in).col(0);
  if (!cfg_.twin_critic) return v1;
  Vector v2 = q2_.forward(in).col(0);
  return v1.cwiseMin(v2);
}

SacLosses NetworkSet::update(const std::vector<DesignTransition>& batch,
                             RngStream& rng) {
  if (batch.empty()) throw std::invalid_argument("sac update: empty batch");
  const int n = static_cast<int>(batch.size());
  const int sd = state_dim_, ad = action_dim_, dd = design_space_.dim();

  Matrix S(n, sd), A(n, ad), S2(n, sd), XiN(n, dd);
  Vector R(n), NotDone(n);
  for (int i = 0; i < n; ++i) {
    const auto& item = batch[static_cast<std::size_t>(i)];
    S.row(i) = item.transition.s;
    A.row(i) = item.transition.a;
    S2.row(i) = item.transition.s_next;
    R[i] = item.transition.r;
    NotDone[i] = item.transition.done ? 0.0 : 1.0;
    XiN.row(i) = design_space_.normalize(item.design);
  }

  const double alpha = std::exp(log_alpha_);
  const double inv_n = 1.0 / static_cast<double>(n);
  SacLosses losses;

  // Soft Bellman target from the target critics and a fresh next action.
  GaussianPolicy::Sample next = policy_.sample(hcat(S2, XiN), rng);
  Matrix target_in = hcat(S2, next.action, XiN);
  Vector qt = q1_target_.forward(target_in).col(0);
  if (cfg_.twin_critic) {
    qt = qt.cwiseMin(q2_target_.forward(target_in).col(0));
  }
  Vector y = R.array() + cfg_.gamma * NotDone.array() *
                             (qt.array() - alpha * next.log_prob.array());

  // Critic step: 0.5 * MSE against y on each critic.
  Matrix critic_in = hcat(S, A, XiN);
  auto critic_step = [&](Mlp& q, AdamOptimizer& opt) {
    MlpCache cache;
    Vector err = q.forward(critic_in, cache).col(0) - y;
    MlpGrads grads = q.zero_grads();
    q.backward(cache, (err * inv_n), grads);
    opt.step(q, grads);
    return 0.5 * inv_n * err.squaredNorm();
  };
  losses.critic = critic_step(q1_, opt_q1_);
  if (cfg_.twin_critic) losses.critic += critic_step(q2_, opt_q2_);

  // Policy step: mean(alpha * logp - min Q(s, a_new, xi)).
  GaussianPolicy::Sample cur = policy_.sample(hcat(S, XiN), rng);
  Matrix policy_q_in = hcat(S, cur.action, XiN);
  MlpCache pc1, pc2;
  Vector v1 = q1_.forward(policy_q_in, pc1).col(0);
  Vector qmin = v1;
  Vector v2;
  if (cfg_.twin_critic) {
    v2 = q2_.forward(policy_q_in, pc2).col(0);
    qmin = v1.cwiseMin(v2);
  }
  losses.policy = inv_n * (alpha * cur.log_prob - qmin).sum();

  // dL/da through the critic achieving the row-wise min; critic parameters
  // stay fixed on this step.
  Matrix d_action = Matrix::Zero(n, ad);
  {
    MlpGrads scratch = q1_.zero_grads();
    Vector d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
      const bool use_q1 = !cfg_.twin_critic || v1[i] <= v2[i];
      d1[i] = use_q1 ? -inv_n : 0.0;
      d2[i] = use_q1 ? 0.0 : -inv_n;
    }
    Matrix din1 = q1_.backward(pc1, d1, scratch);
    d_action += din1.middleCols(sd, ad);
    if (cfg_.twin_critic) {
      MlpGrads scratch2 = q2_.zero_grads();
      Matrix din2 = q2_.backward(pc2, d2, scratch2);
      d_action += din2.middleCols(sd, ad);
    }
  }
  Vector d_log_prob = Vector::Constant(n, alpha * inv_n);
  MlpGrads pgrads = policy_.trunk().zero_grads();
  policy_.backward(cur, d_action, d_log_prob, pgrads);
  opt_policy_.step(policy_.trunk(), pgrads);

  // Temperature step toward target entropy -action_dim.
  if (cfg_.auto_alpha) {
    const double mean_term =
        inv_n * (cur.log_prob.array() + target_entropy_).sum();
    losses.temperature = -log_alpha_ * mean_term;
    log_alpha_ = opt_alpha_.step(log_alpha_, -mean_term);
  }
  losses.alpha = std::exp(log_alpha_);

  soft_update(q1_target_, q1_, cfg_.tau);
  if (cfg_.twin_critic) soft_update(q2_target_, q2_, cfg_.tau);
  ++update_count_;

  if (!std::isfinite(losses.critic) || !std::isfinite(losses.policy) ||
      !std::isfinite(losses.alpha)) {
    throw std::runtime_error(
        "sac update: non-finite loss (critic=" + std::to_string(losses.critic) +
        ", policy=" + std::to_string(losses.policy) +
        ", alpha=" + std::to_string(losses.alpha) + ")");
  }
  return losses;
}

// ---------------------------------------------------------------------------
// AgentPair

AgentPair::AgentPair(int state_dim, int action_dim,
                     const DesignSpace& design_space, const SacConfig& cfg,
                     RngStream& init_rng)
    : population(state_dim, action_dim, design_space, cfg, init_rng),
      individual(state_dim, action_dim, design_space, cfg, init_rng) {
  clone_population_to_individual();
}

void AgentPair::clone_population_to_individual() { individual = population; }

void AgentPair::train_for_episode(const IndividualBuffer& ind_buf,
                                  const PopulationBuffer& pop_buf,
                                  const DesignVector& current_design,
                                  RngStream& rng, bool population_only) {
  const SacConfig& cfg = population.config();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  if (population_only) {
    if (pop_buf.empty()) return;
    for (int k = 0; k < cfg.updates_individual; ++k) {
      population.update(sample_population(pop_buf, batch, rng), rng);
    }
    return;
  }

  for (int k = 0; k < cfg.updates_individual; ++k) {
    individual.update(
        sample_mixed(ind_buf, pop_buf, current_design, batch, cfg.pop_frac, rng),
        rng);
  }
  if (!pop_buf.empty()) {
    for (int k = 0; k < cfg.updates_population; ++k) {
      population.update(sample_population(pop_buf, batch, rng), rng);
    }
  }
}

}  // namespace coadapt
