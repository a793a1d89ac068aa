#include "coadapt/optim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace coadapt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const DesignVector& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kNegInf;
}

}  // namespace

OptResult pso_maximize(const Objective& f, const DesignSpace& space,
                       const PsoConfig& cfg, RngStream& rng) {
  if (cfg.n_particles < 2) {
    throw std::invalid_argument("pso: need at least 2 particles");
  }
  if (cfg.n_iterations < 1) {
    throw std::invalid_argument("pso: need at least 1 iteration");
  }
  const int dim = space.dim();
  const int np = cfg.n_particles;
  const Vector v_max = cfg.velocity_clamp * space.span();

  std::vector<DesignVector> pos(static_cast<std::size_t>(np));
  std::vector<Vector> vel(static_cast<std::size_t>(np),
                          Vector::Zero(dim));
  std::vector<DesignVector> pbest_pos(static_cast<std::size_t>(np));
  std::vector<double> pbest_val(static_cast<std::size_t>(np), kNegInf);

  OptResult result;
  result.best_value = kNegInf;

  auto evaluate_all = [&] {
    for (int p = 0; p < np; ++p) {
      const auto i = static_cast<std::size_t>(p);
      const double v = safe_eval(f, pos[i]);
      ++result.evaluations;
      if (v > pbest_val[i]) {
        pbest_val[i] = v;
        pbest_pos[i] = pos[i];
      }
      if (v > result.best_value) {
        result.best_value = v;
        result.best_design = pos[i];
      }
    }
  };

  for (auto& p : pos) p = sample_uniform(space, rng);
  evaluate_all();
  if (result.best_value == kNegInf) {
    throw std::runtime_error("pso: objective non-finite on all particles");
  }
  result.history.push_back(result.best_value);

  for (int it = 0; it < cfg.n_iterations; ++it) {
    for (int p = 0; p < np; ++p) {
      const auto i = static_cast<std::size_t>(p);
      for (int d = 0; d < dim; ++d) {
        const double r1 = rng.uniform(0.0, 1.0);
        const double r2 = rng.uniform(0.0, 1.0);
        double v = cfg.inertia * vel[i][d] +
                   cfg.cognitive * r1 * (pbest_pos[i][d] - pos[i][d]) +
                   cfg.social * r2 * (result.best_design[d] - pos[i][d]);
        vel[i][d] = std::clamp(v, -v_max[d], v_max[d]);
      }
      pos[i] = clamp(pos[i] + vel[i], space);
    }
    evaluate_all();
    result.history.push_back(result.best_value);
  }
  return result;
}

// ---------------------------------------------------------------------------
// CMA-ES

CmaEs::CmaEs(const DesignSpace& space, const CmaEsConfig& cfg, RngStream& rng)
    : space_(space), cfg_(cfg), rng_(&rng), dim_(space.dim()) {
  if (cfg.lambda < 4) throw std::invalid_argument("cma-es: lambda must be >= 4");
  const double n = static_cast<double>(dim_);
  mu_ = cfg.lambda / 2;
  weights_ = Vector(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_[i] = std::log(mu_ + 0.5) - std::log(static_cast<double>(i + 1));
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  cc_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  cs_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                 ((n + 2.0) * (n + 2.0) + mu_eff_));
  damps_ =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
      cs_;
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  init_distribution(space.center());
}

void CmaEs::init_distribution(const Vector& mean) {
  mean_ = mean;
  sigma_ = cfg_.sigma0 > 0.0 ? cfg_.sigma0 : 0.3 * space_.span().mean();
  cov_ = Matrix::Identity(dim_, dim_);
  // Scale the initial axes to the box so dimensions with unequal spans are
  // searched proportionally.
  const Vector rel = space_.span() / space_.span().mean();
  cov_.diagonal() = rel.array().square();
  pc_ = Vector::Zero(dim_);
  ps_ = Vector::Zero(dim_);
  generation_ = 0;
  degenerate_ = false;
}

void CmaEs::restart() { init_distribution(sample_uniform(space_, *rng_)); }

std::vector<DesignVector> CmaEs::ask() {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
  if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite() ||
      eig.eigenvalues().minCoeff() <= 0.0 ||
      eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff() > 1e14 ||
      !std::isfinite(sigma_) || sigma_ < 1e-14) {
    degenerate_ = true;
    throw std::runtime_error("cma-es: degenerate covariance");
  }
  const Matrix& B = eig.eigenvectors();
  const Vector D = eig.eigenvalues().cwiseSqrt();

  pending_z_.clear();
  pending_x_.clear();
  for (int k = 0; k < cfg_.lambda; ++k) {
    Vector z(dim_);
    for (int d = 0; d < dim_; ++d) z[d] = rng_->normal();
    Vector y = B * (D.cwiseProduct(z));
    DesignVector x = clamp(mean_ + sigma_ * y, space_);
    pending_z_.push_back(std::move(z));
    pending_x_.push_back(std::move(x));
  }
  return pending_x_;
}

void CmaEs::tell(const std::vector<double>& values) {
  if (values.size() != pending_x_.size() || pending_x_.empty()) {
    throw std::invalid_argument("cma-es: tell() without matching ask()");
  }
  evaluations_ += static_cast<long>(values.size());

  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = std::isfinite(values[static_cast<std::size_t>(a)])
                          ? values[static_cast<std::size_t>(a)]
                          : kNegInf;
    const double vb = std::isfinite(values[static_cast<std::size_t>(b)])
                          ? values[static_cast<std::size_t>(b)]
                          : kNegInf;
    return va > vb;
  });

  const auto top = static_cast<std::size_t>(order[0]);
  if (std::isfinite(values[top]) && (!has_best_ || values[top] > best_value_)) {
    best_value_ = values[top];
    best_design_ = pending_x_[top];
    has_best_ = true;
  }

  const Vector mean_old = mean_;
  Vector mean_new = Vector::Zero(dim_);
  for (int i = 0; i < mu_; ++i) {
    mean_new += weights_[i] * pending_x_[static_cast<std::size_t>(order[i])];
  }

  // Repaired steps relative to the old mean.
  std::vector<Vector> y(static_cast<std::size_t>(mu_));
  for (int i = 0; i < mu_; ++i) {
    y[static_cast<std::size_t>(i)] =
        (pending_x_[static_cast<std::size_t>(order[i])] - mean_old) / sigma_;
  }
  Vector y_w = (mean_new - mean_old) / sigma_;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
  const Matrix& B = eig.eigenvectors();
  Vector d_inv = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  Matrix inv_sqrt_c = B * d_inv.asDiagonal() * B.transpose();

  ps_ = (1.0 - cs_) * ps_ +
        std::sqrt(cs_ * (2.0 - cs_) * mu_eff_) * (inv_sqrt_c * y_w);
  ++generation_;
  const double ps_norm = ps_.norm();
  const double hsig_denom = std::sqrt(
      1.0 - std::pow(1.0 - cs_, 2.0 * static_cast<double>(generation_)));
  const bool hsig = ps_norm / hsig_denom / chi_n_ <
                    1.4 + 2.0 / (static_cast<double>(dim_) + 1.0);

  pc_ = (1.0 - cc_) * pc_;
  if (hsig) pc_ += std::sqrt(cc_ * (2.0 - cc_) * mu_eff_) * y_w;

  Matrix rank_mu = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < mu_; ++i) {
    const Vector& yi = y[static_cast<std::size_t>(i)];
    rank_mu += weights_[i] * (yi * yi.transpose());
  }
  const double hsig_corr = hsig ? 0.0 : cc_ * (2.0 - cc_);
  cov_ = (1.0 - c1_ - cmu_) * cov_ +
         c1_ * (pc_ * pc_.transpose() + hsig_corr * cov_) + cmu_ * rank_mu;

  sigma_ *= std::exp((cs_ / damps_) * (ps_norm / chi_n_ - 1.0));
  mean_ = mean_new;

  if (!cov_.allFinite() || !mean_.allFinite() || !std::isfinite(sigma_)) {
    degenerate_ = true;
  }
  pending_x_.clear();
  pending_z_.clear();
}

OptResult cma_es_maximize(const Objective& f, const DesignSpace& space,
                          const CmaEsConfig& cfg, RngStream& rng) {
  if (cfg.n_iterations < 1) {
    throw std::invalid_argument("cma-es: need at least 1 iteration");
  }

  OptResult result;
  result.best_value = kNegInf;
  bool restarted = false;
  CmaEs es(space, cfg, rng);

  int it = 0;
  while (it < cfg.n_iterations) {
    std::vector<DesignVector> candidates;
    try {
      candidates = es.ask();
    } catch (const std::runtime_error&) {
      if (restarted) throw;
      restarted = true;
      es.restart();
      continue;
    }
    std::vector<double> values;
    values.reserve(candidates.size());
    for (const auto& x : candidates) values.push_back(safe_eval(f, x));
    es.tell(values);
    result.evaluations = es.evaluations();
    if (es.best_value() > result.best_value ||
        result.best_design.size() == 0) {
      result.best_value = es.best_value();
      result.best_design = es.best_design();
    }
    result.history.push_back(result.best_value);
    ++it;
  }
  if (!std::isfinite(result.best_value)) {
    throw std::runtime_error("cma-es: objective non-finite on all candidates");
  }
  return result;
}

}  // namespace coadapt
