#pragma once

#include "coadapt/core.hpp"

#include <vector>

namespace coadapt {

struct MlpGrads {
  std::vector<Matrix> dW;
  std::vector<Vector> db;

  void add_scaled(const MlpGrads& other, double scale);
};

/// Activations cached by a forward pass, consumed by backward().
struct MlpCache {
  Matrix input;                 // rows = batch
  std::vector<Matrix> pre;      // pre-activation per layer
  std::vector<Matrix> post;     // post-activation per layer (last == output)
};

/// Fully connected network, rectifier hidden units, linear output.
/// Rows of the input matrix are batch samples.
class Mlp {
 public:
  Mlp() = default;

  /// sizes = {input, hidden..., output}; fan-in-scaled uniform init.
  Mlp(const std::vector<int>& sizes, RngStream& rng);

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, MlpCache& cache) const;

  /// Backprop of upstream gradient d_out (same shape as the output).
  /// Returns the gradient w.r.t. the input; parameter gradients go to grads.
  Matrix backward(const MlpCache& cache, const Matrix& d_out,
                  MlpGrads& grads) const;

  MlpGrads zero_grads() const;

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  int n_layers() const { return static_cast<int>(weights_.size()); }

  const Matrix& weight(int l) const { return weights_[l]; }
  const Vector& bias(int l) const { return biases_[l]; }
  Matrix& weight(int l) { return weights_[l]; }
  Vector& bias(int l) { return biases_[l]; }

  std::size_t parameter_count() const;
  /// Row-major weights then bias, layer by layer.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);

  void set_all(double value);

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;  // weights_[l] is (in_l x out_l): y = x*W + b
  std::vector<Vector> biases_;
};

/// target <- (1 - tau) * target + tau * live. Shapes must match.
void soft_update(Mlp& target, const Mlp& live, double tau);

/// Adam with bias correction, one instance per Mlp.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(const Mlp& net, double lr = 3e-4,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);

  void step(Mlp& net, const MlpGrads& grads);
  void reset();
  double lr() const { return lr_; }

 private:
  double lr_ = 3e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<Matrix> mW_, vW_;
  std::vector<Vector> mb_, vb_;
};

/// Scalar Adam (used for the entropy temperature).
class ScalarAdam {
 public:
  explicit ScalarAdam(double lr = 3e-4) : lr_(lr) {}
  double step(double value, double grad);
  void reset() { t_ = 0; m_ = 0.0; v_ = 0.0; }

 private:
  double lr_;
  long t_ = 0;
  double m_ = 0.0, v_ = 0.0;
};

}  // namespace coadapt
