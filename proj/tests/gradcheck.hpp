#pragma once
// Central finite-difference checks of the analytic quaternion-layer and
// attention gradients.
//
// Relative error of one parameter tensor is
//   ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12)
// and a check reports the worst tensor.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>

#include "phyfid/promptnet.hpp"

namespace testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& engine,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = d(engine);
  return m;
}

inline double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
  const double denom = std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / denom;
}

/// Numeric gradient of loss() with respect to every entry of `param`,
/// perturbing it in place.
template <class M>
Eigen::MatrixXd numeric_gradient(M& param, const std::function<double()>& loss, double h = 1e-4) {
  Eigen::MatrixXd g(param.rows(), param.cols());
  for (Eigen::Index j = 0; j < param.cols(); ++j)
    for (Eigen::Index i = 0; i < param.rows(); ++i) {
      const double keep = param(i, j);
      param(i, j) = keep + h;
      const double up = loss();
      param(i, j) = keep - h;
      const double down = loss();
      param(i, j) = keep;
      g(i, j) = (up - down) / (2 * h);
    }
  return g;
}

inline double dot(const phyfid::qnn::QTensor& a, const phyfid::qnn::QTensor& b) {
  return a.r.dot(b.r) + a.x.dot(b.x) + a.y.dot(b.y) + a.z.dot(b.z);
}

/// Worst relative error over the four weight blocks and four input blocks.
inline double quaternion_layer_gradcheck(std::uint64_t seed, int in_dim, int out_dim,
                                         phyfid::qnn::Activation f) {
  using namespace phyfid::qnn;
  std::mt19937_64 engine(seed);
  QuaternionLayerWeights w = QuaternionLayerWeights::random(in_dim, out_dim, engine());
  QTensor q{random_matrix(in_dim, 1, engine), random_matrix(in_dim, 1, engine),
            random_matrix(in_dim, 1, engine), random_matrix(in_dim, 1, engine)};
  const QTensor g_out{random_matrix(out_dim, 1, engine), random_matrix(out_dim, 1, engine),
                      random_matrix(out_dim, 1, engine), random_matrix(out_dim, 1, engine)};
  const auto analytic = quaternion_layer_backward(w, q, f, g_out);
  const std::function<double()> loss = [&] { return dot(g_out, quaternion_layer(w, q, f)); };

  double worst = 0.0;
  auto check = [&](auto& param, const auto& grad) {
    worst = std::max(worst, relative_error(grad, numeric_gradient(param, loss)));
  };
  check(w.w_r, analytic.d_weights.w_r);
  check(w.w_x, analytic.d_weights.w_x);
  check(w.w_y, analytic.d_weights.w_y);
  check(w.w_z, analytic.d_weights.w_z);
  check(q.r, analytic.d_input.r);
  check(q.x, analytic.d_input.x);
  check(q.y, analytic.d_input.y);
  check(q.z, analytic.d_input.z);
  return worst;
}

/// Worst relative error over inputs, LoRA factors and W_V. B factors are
/// random so that gradients with respect to A are non-trivial.
inline double attention_gradcheck(std::uint64_t seed, int n, int m, int d_eps, int d_tau, int d,
                                  int d_v, int rank) {
  using namespace phyfid::qnn;
  std::mt19937_64 engine(seed);
  AttentionWeights w{LoraAdapter::wrap(random_matrix(d, d_eps, engine), rank, 2.0 * rank, engine()),
                     LoraAdapter::wrap(random_matrix(d, d_tau, engine), rank, 1.0, engine()),
                     random_matrix(d_v, d_tau, engine)};
  w.w_q.b = random_matrix(d, rank, engine);
  w.w_k.b = random_matrix(d, rank, engine);
  Eigen::MatrixXd z = random_matrix(n, d_eps, engine);
  Eigen::MatrixXd y = random_matrix(m, d_tau, engine);
  const Eigen::MatrixXd g_out = random_matrix(n, d_v, engine);
  const auto analytic = lora_cross_attention_backward(z, y, w, g_out);
  const std::function<double()> loss = [&] {
    return lora_cross_attention(z, y, w).output.cwiseProduct(g_out).sum();
  };

  double worst = 0.0;
  auto check = [&](auto& param, const auto& grad) {
    worst = std::max(worst, relative_error(grad, numeric_gradient(param, loss)));
  };
  check(z, analytic.d_z);
  check(y, analytic.d_y);
  check(w.w_q.a, analytic.d_a_q);
  check(w.w_q.b, analytic.d_b_q);
  check(w.w_k.a, analytic.d_a_k);
  check(w.w_k.b, analytic.d_b_k);
  check(w.w_v, analytic.d_w_v);
  return worst;
}

}  // namespace testing
