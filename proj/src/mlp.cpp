#include "coadapt/mlp.hpp"

#include <cmath>

namespace coadapt {

void MlpGrads::add_scaled(const MlpGrads& other, double scale) {
  for (std::size_t l = 0; l < dW.size(); ++l) {
    dW[l] += scale * other.dW[l];
    db[l] += scale * other.db[l];
  }
}

Mlp::Mlp(const std::vector<int>& sizes, RngStream& rng) : sizes_(sizes) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  }
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be > 0");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Matrix w(in, out);
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < out; ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    Vector b(out);
    for (int j = 0; j < out; ++j) b[j] = rng.uniform(-bound, bound);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

Matrix Mlp::forward(const Matrix& x) const {
  Matrix h = x;
  for (int l = 0; l < n_layers(); ++l) {
    h = (h * weights_[l]).rowwise() + biases_[l].transpose();
    if (l + 1 < n_layers()) h = h.cwiseMax(0.0);
  }
  return h;
}

Matrix Mlp::forward(const Matrix& x, MlpCache& cache) const {
  cache.input = x;
  cache.pre.assign(n_layers(), Matrix());
  cache.post.assign(n_layers(), Matrix());
  const Matrix* h = &cache.input;
  for (int l = 0; l < n_layers(); ++l) {
    cache.pre[l] = (*h * weights_[l]).rowwise() + biases_[l].transpose();
    cache.post[l] =
        l + 1 < n_layers() ? cache.pre[l].cwiseMax(0.0) : cache.pre[l];
    h = &cache.post[l];
  }
  return cache.post.back();
}

Matrix Mlp::backward(const MlpCache& cache, const Matrix& d_out,
                     MlpGrads& grads) const {
  Matrix delta = d_out;
  for (int l = n_layers() - 1; l >= 0; --l) {
    if (l + 1 < n_layers()) {
      // Rectifier: pass gradient only where the pre-activation was positive.
      delta = ((cache.pre[l].array() > 0.0).cast<double>() * delta.array())
                  .matrix();
    }
    const Matrix& in = l == 0 ? cache.input : cache.post[l - 1];
    grads.dW[l] += in.transpose() * delta;
    grads.db[l] += delta.colwise().sum().transpose();
    if (l > 0) delta = (delta * weights_[l].transpose()).eval();
  }
  return delta * weights_[0].transpose();
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  for (int l = 0; l < n_layers(); ++l) {
    g.dW.push_back(Matrix::Zero(weights_[l].rows(), weights_[l].cols()));
    g.db.push_back(Vector::Zero(biases_[l].size()));
  }
  return g;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < n_layers(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size()) +
         static_cast<std::size_t>(biases_[l].size());
  }
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (int l = 0; l < n_layers(); ++l) {
    for (int i = 0; i < weights_[l].rows(); ++i) {
      for (int j = 0; j < weights_[l].cols(); ++j) flat.push_back(weights_[l](i, j));
    }
    for (int j = 0; j < biases_[l].size(); ++j) flat.push_back(biases_[l][j]);
  }
  return flat;
}

void Mlp::unflatten(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("Mlp::unflatten: size mismatch");
  }
  std::size_t k = 0;
  for (int l = 0; l < n_layers(); ++l) {
    for (int i = 0; i < weights_[l].rows(); ++i) {
      for (int j = 0; j < weights_[l].cols(); ++j) weights_[l](i, j) = flat[k++];
    }
    for (int j = 0; j < biases_[l].size(); ++j) biases_[l][j] = flat[k++];
  }
}

void Mlp::set_all(double value) {
  for (int l = 0; l < n_layers(); ++l) {
    weights_[l].setConstant(value);
    biases_[l].setConstant(value);
  }
}

void soft_update(Mlp& target, const Mlp& live, double tau) {
  if (target.sizes() != live.sizes()) {
    throw std::invalid_argument("soft_update: shape mismatch");
  }
  for (int l = 0; l < target.n_layers(); ++l) {
    target.weight(l) = (1.0 - tau) * target.weight(l) + tau * live.weight(l);
    target.bias(l) = (1.0 - tau) * target.bias(l) + tau * live.bias(l);
  }
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (int l = 0; l < net.n_layers(); ++l) {
    mW_.push_back(Matrix::Zero(net.weight(l).rows(), net.weight(l).cols()));
    vW_.push_back(Matrix::Zero(net.weight(l).rows(), net.weight(l).cols()));
    mb_.push_back(Vector::Zero(net.bias(l).size()));
    vb_.push_back(Vector::Zero(net.bias(l).size()));
  }
}

void AdamOptimizer::step(Mlp& net, const MlpGrads& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (int l = 0; l < net.n_layers(); ++l) {
    mW_[l] = beta1_ * mW_[l] + (1.0 - beta1_) * grads.dW[l];
    vW_[l] = (beta2_ * vW_[l].array() +
              (1.0 - beta2_) * grads.dW[l].array().square())
                 .matrix();
    net.weight(l).array() -=
        lr_ * (mW_[l].array() / bc1) / ((vW_[l].array() / bc2).sqrt() + eps_);

    mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.db[l];
    vb_[l] = (beta2_ * vb_[l].array() +
              (1.0 - beta2_) * grads.db[l].array().square())
                 .matrix();
    net.bias(l).array() -=
        lr_ * (mb_[l].array() / bc1) / ((vb_[l].array() / bc2).sqrt() + eps_);
  }
}

void AdamOptimizer::reset() {
  t_ = 0;
  for (auto& m : mW_) m.setZero();
  for (auto& v : vW_) v.setZero();
  for (auto& m : mb_) m.setZero();
  for (auto& v : vb_) v.setZero();
}

double ScalarAdam::step(double value, double grad) {
  ++t_;
  m_ = 0.9 * m_ + 0.1 * grad;
  v_ = 0.999 * v_ + 0.001 * grad * grad;
  const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
  return value - lr_ * (m_ / bc1) / (std::sqrt(v_ / bc2) + 1e-8);
}

}  // namespace coadapt
