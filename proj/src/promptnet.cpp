#include "phyfid/promptnet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>

#include "phyfid/error.hpp"
#include "rng.hpp"

namespace phyfid::qnn {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Eigen::MatrixXd uniform_matrix(int rows, int cols, double bound, std::mt19937_64& engine) {
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill order is part of the seeded-fixture contract.
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = detail::uniform(engine, -bound, bound);
  }
  return m;
}

Eigen::VectorXd apply(Activation f, const Eigen::VectorXd& pre) {
  return pre.unaryExpr([f](double x) { return activate(f, x); });
}

Eigen::VectorXd derivative(Activation f, const Eigen::VectorXd& pre) {
  return pre.unaryExpr([f](double x) { return activate_derivative(f, x); });
}

// Pre-activation Hamilton product of the weight blocks with q.
QTensor hamilton_linear(const QuaternionLayerWeights& w, const QTensor& q) {
  QTensor out;
  out.r = w.w_r * q.r - w.w_x * q.x - w.w_y * q.y - w.w_z * q.z;
  out.x = w.w_r * q.x + w.w_x * q.r + w.w_y * q.z - w.w_z * q.y;
  out.y = w.w_r * q.y - w.w_x * q.z + w.w_y * q.r + w.w_z * q.x;
  out.z = w.w_r * q.z + w.w_x * q.y - w.w_y * q.x + w.w_z * q.r;
  return out;
}

}  // namespace

double activate(Activation f, double x) {
  switch (f) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activate_derivative(Activation f, double x) {
  switch (f) {
    case Activation::identity: return 1.0;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

void QTensor::validate() const {
  if (x.size() != r.size() || y.size() != r.size() || z.size() != r.size()) {
    throw ShapeError("quaternion blocks differ in width");
  }
}

QTensor QTensor::zeros(int dim) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  return {zero, zero, zero, zero};
}

void QuaternionLayerWeights::validate() const {
  for (const auto* m : {&w_x, &w_y, &w_z}) {
    if (m->rows() != w_r.rows() || m->cols() != w_r.cols()) {
      throw ShapeError("quaternion weight blocks differ: " + shape(w_r) + " vs " + shape(*m));
    }
  }
}

QuaternionLayerWeights QuaternionLayerWeights::zeros(int in_dim, int out_dim) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(out_dim, in_dim);
  return {zero, zero, zero, zero};
}

QuaternionLayerWeights QuaternionLayerWeights::random(int in_dim, int out_dim,
                                                      std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  QuaternionLayerWeights w;
  w.w_r = uniform_matrix(out_dim, in_dim, bound, engine);
  w.w_x = uniform_matrix(out_dim, in_dim, bound, engine);
  w.w_y = uniform_matrix(out_dim, in_dim, bound, engine);
  w.w_z = uniform_matrix(out_dim, in_dim, bound, engine);
  return w;
}

QTensor quaternion_layer(const QuaternionLayerWeights& w, const QTensor& q, Activation f) {
  w.validate();
  q.validate();
  if (q.dim() != w.in_dim()) {
    throw ShapeError("quaternion layer expects width " + std::to_string(w.in_dim()) + ", got " +
                     std::to_string(q.dim()));
  }
  const QTensor pre = hamilton_linear(w, q);
  return {apply(f, pre.r), apply(f, pre.x), apply(f, pre.y), apply(f, pre.z)};
}

QuaternionLayerGrad quaternion_layer_backward(const QuaternionLayerWeights& w, const QTensor& q,
                                              Activation f, const QTensor& grad_out) {
  w.validate();
  q.validate();
  grad_out.validate();
  if (q.dim() != w.in_dim() || grad_out.dim() != w.out_dim()) {
    throw ShapeError("quaternion layer gradient shapes do not compose");
  }
  const QTensor pre = hamilton_linear(w, q);
  const Eigen::VectorXd gr = grad_out.r.cwiseProduct(derivative(f, pre.r));
  const Eigen::VectorXd gx = grad_out.x.cwiseProduct(derivative(f, pre.x));
  const Eigen::VectorXd gy = grad_out.y.cwiseProduct(derivative(f, pre.y));
  const Eigen::VectorXd gz = grad_out.z.cwiseProduct(derivative(f, pre.z));

  QuaternionLayerGrad g;
  auto& dw = g.d_weights;
  dw.w_r = gr * q.r.transpose() + gx * q.x.transpose() + gy * q.y.transpose() +
           gz * q.z.transpose();
  dw.w_x = -gr * q.x.transpose() + gx * q.r.transpose() - gy * q.z.transpose() +
           gz * q.y.transpose();
  dw.w_y = -gr * q.y.transpose() + gx * q.z.transpose() + gy * q.r.transpose() -
           gz * q.x.transpose();
  dw.w_z = -gr * q.z.transpose() - gx * q.y.transpose() + gy * q.x.transpose() +
           gz * q.r.transpose();

  auto& dq = g.d_input;
  dq.r = w.w_r.transpose() * gr + w.w_x.transpose() * gx + w.w_y.transpose() * gy +
         w.w_z.transpose() * gz;
  dq.x = -w.w_x.transpose() * gr + w.w_r.transpose() * gx + w.w_z.transpose() * gy -
         w.w_y.transpose() * gz;
  dq.y = -w.w_y.transpose() * gr - w.w_z.transpose() * gx + w.w_r.transpose() * gy +
         w.w_x.transpose() * gz;
  dq.z = -w.w_z.transpose() * gr + w.w_y.transpose() * gx - w.w_x.transpose() * gy +
         w.w_r.transpose() * gz;
  return g;
}

Eigen::VectorXd LinearMap::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != weight.cols()) {
    throw ShapeError("linear map expects width " + std::to_string(weight.cols()) + ", got " +
                     std::to_string(x.size()));
  }
  if (bias.size() == 0) return weight * x;
  if (bias.size() != weight.rows()) throw ShapeError("linear map bias width mismatch");
  return weight * x + bias;
}

EmbeddingBundle EmbeddingBundle::synthetic(int d_v, int d_k, int d, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  EmbeddingBundle b;
  b.f_o = uniform_matrix(d_v, 1, 1.0, engine);
  b.e_p = uniform_matrix(d_k, 1, 1.0, engine);
  b.t_l = uniform_matrix(d, 1, 1.0, engine);
  return b;
}

ProjectedEmbeddings project_embeddings(const Eigen::VectorXd& f_o, const Eigen::VectorXd& e_p,
                                       const LinearMap& l_d1, const LinearMap& l_d2) {
  ProjectedEmbeddings out{l_d1(f_o), l_d2(e_p)};
  if (out.f_o.size() != out.e_p.size()) {
    throw ShapeError("projections disagree on prompt width: " + std::to_string(out.f_o.size()) +
                     " vs " + std::to_string(out.e_p.size()));
  }
  return out;
}

QTensor assemble_prompt_quaternion(const Eigen::VectorXd& t_l, const Eigen::VectorXd& e_p_hat,
                                   const Eigen::VectorXd& f_o_hat) {
  if (e_p_hat.size() != t_l.size() || f_o_hat.size() != t_l.size()) {
    throw ShapeError("prompt quaternion blocks differ in width");
  }
  return {t_l, e_p_hat, f_o_hat, Eigen::VectorXd::Zero(t_l.size())};
}

PseudoPrompt pseudo_prompt(const QuaternionLayerWeights& q_t, const EmbeddingBundle& bundle,
                           const LinearMap& l_d1, const LinearMap& l_d2, Activation f,
                           PromptBlock block) {
  const ProjectedEmbeddings proj = project_embeddings(bundle.f_o, bundle.e_p, l_d1, l_d2);
  const QTensor q = assemble_prompt_quaternion(bundle.t_l, proj.e_p, proj.f_o);
  PseudoPrompt out;
  out.full = quaternion_layer(q_t, q, f);
  out.block = block;
  switch (block) {
    case PromptBlock::r: out.e_l = out.full.r; break;
    case PromptBlock::x: out.e_l = out.full.x; break;
    case PromptBlock::y: out.e_l = out.full.y; break;
    case PromptBlock::z: out.e_l = out.full.z; break;
  }
  return out;
}

void LoraAdapter::validate() const {
  if (a.rows() < 1) throw ShapeError("LoRA rank must be >= 1");
  if (a.cols() != base.cols() || b.rows() != base.rows() || b.cols() != a.rows()) {
    throw ShapeError("LoRA factors " + shape(b) + " * " + shape(a) + " do not match base " +
                     shape(base));
  }
}

LoraAdapter LoraAdapter::wrap(Eigen::MatrixXd base, int rank, double alpha,
                              std::uint64_t seed) {
  if (rank < 1) throw ConfigError("LoRA rank must be >= 1");
  std::mt19937_64 engine(seed);
  LoraAdapter out;
  const auto d_in = static_cast<int>(base.cols());
  out.a = uniform_matrix(rank, d_in, 1.0 / std::sqrt(static_cast<double>(d_in)), engine);
  out.b = Eigen::MatrixXd::Zero(base.rows(), rank);
  out.scale = alpha / rank;
  out.base = std::move(base);
  return out;
}

Eigen::VectorXd lora_apply(const LoraAdapter& adapter, const Eigen::VectorXd& x) {
  adapter.validate();
  if (x.size() != adapter.in_dim()) {
    throw ShapeError("LoRA input width " + std::to_string(x.size()) + ", expected " +
                     std::to_string(adapter.in_dim()));
  }
  return adapter.base * x + adapter.scale * (adapter.b * (adapter.a * x));
}

Eigen::MatrixXd lora_project(const LoraAdapter& adapter, const Eigen::MatrixXd& rows) {
  adapter.validate();
  if (rows.cols() != adapter.in_dim()) {
    throw ShapeError("LoRA input width " + std::to_string(rows.cols()) + ", expected " +
                     std::to_string(adapter.in_dim()));
  }
  return rows * adapter.base.transpose() +
         adapter.scale * ((rows * adapter.a.transpose()) * adapter.b.transpose());
}

void AttentionWeights::validate() const {
  w_q.validate();
  w_k.validate();
  if (w_q.out_dim() != w_k.out_dim() || w_q.out_dim() < 1) {
    throw ShapeError("query and key projections must share a positive width");
  }
  if (w_v.cols() != w_k.in_dim()) {
    throw ShapeError("value projection input width " + std::to_string(w_v.cols()) +
                     " does not match key source width " + std::to_string(w_k.in_dim()));
  }
}

namespace {

Eigen::MatrixXd effective(const LoraAdapter& a) { return a.base + a.scale * a.b * a.a; }

}  // namespace

AttentionResult lora_cross_attention(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                     const AttentionWeights& weights) {
  weights.validate();
  if (y.cols() != weights.w_k.in_dim()) {
    throw ShapeError("prompt width " + std::to_string(y.cols()) + ", expected " +
                     std::to_string(weights.w_k.in_dim()));
  }
  if (y.rows() < 1) throw ShapeError("prompt needs at least one token");
  AttentionResult out;
  out.q = lora_project(weights.w_q, z);
  out.k = lora_project(weights.w_k, y);
  out.v = y * weights.w_v.transpose();

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(weights.width()));
  Eigen::MatrixXd logits = (out.q * out.k.transpose()) * inv_sqrt_d;
  out.probabilities.resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - peak).exp().matrix();
    out.probabilities.row(i) = e / e.sum();
  }
  out.output = out.probabilities * out.v;
  return out;
}

AttentionGrad lora_cross_attention_backward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                            const AttentionWeights& weights,
                                            const Eigen::MatrixXd& grad_out) {
  const AttentionResult fwd = lora_cross_attention(z, y, weights);
  if (grad_out.rows() != fwd.output.rows() || grad_out.cols() != fwd.output.cols()) {
    throw ShapeError("attention gradient shape " + shape(grad_out) + ", expected " +
                     shape(fwd.output));
  }
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(weights.width()));
  const Eigen::MatrixXd& p = fwd.probabilities;

  const Eigen::MatrixXd d_p = grad_out * fwd.v.transpose();
  const Eigen::MatrixXd d_v = p.transpose() * grad_out;
  const Eigen::VectorXd row_dot = (d_p.cwiseProduct(p)).rowwise().sum();
  const Eigen::MatrixXd d_logits = p.cwiseProduct(d_p.colwise() - row_dot);
  const Eigen::MatrixXd d_q = d_logits * fwd.k * inv_sqrt_d;
  const Eigen::MatrixXd d_k = d_logits.transpose() * fwd.q * inv_sqrt_d;

  const Eigen::MatrixXd d_wq = d_q.transpose() * z;  // d x d_eps
  const Eigen::MatrixXd d_wk = d_k.transpose() * y;  // d x d_tau

  AttentionGrad g;
  g.d_w_v = d_v.transpose() * y;
  g.d_b_q = weights.w_q.scale * d_wq * weights.w_q.a.transpose();
  g.d_a_q = weights.w_q.scale * weights.w_q.b.transpose() * d_wq;
  g.d_b_k = weights.w_k.scale * d_wk * weights.w_k.a.transpose();
  g.d_a_k = weights.w_k.scale * weights.w_k.b.transpose() * d_wk;
  g.d_z = d_q * effective(weights.w_q);
  g.d_y = d_v * weights.w_v + d_k * effective(weights.w_k);
  return g;
}

FitResult fit_prompt_layer(int dim, int steps, double learning_rate, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  const EmbeddingBundle bundle = EmbeddingBundle::synthetic(2 * dim, dim + 3, dim, engine());
  const LinearMap l_d1{uniform_matrix(dim, 2 * dim, 1.0 / std::sqrt(2.0 * dim), engine), {}};
  const LinearMap l_d2{uniform_matrix(dim, dim + 3, 1.0 / std::sqrt(dim + 3.0), engine), {}};
  const Eigen::VectorXd target = uniform_matrix(dim, 1, 0.5, engine);

  const ProjectedEmbeddings proj = project_embeddings(bundle.f_o, bundle.e_p, l_d1, l_d2);
  const QTensor input = assemble_prompt_quaternion(bundle.t_l, proj.e_p, proj.f_o);

  FitResult fit;
  fit.weights = QuaternionLayerWeights::random(dim, dim, engine());
  for (int step = 0; step <= steps; ++step) {
    const QTensor out = quaternion_layer(fit.weights, input, Activation::tanh);
    const Eigen::VectorXd residual = out.r - target;
    fit.loss.push_back(0.5 * residual.squaredNorm());
    if (step == steps) break;
    QTensor grad = QTensor::zeros(dim);
    grad.r = residual;
    const auto g = quaternion_layer_backward(fit.weights, input, Activation::tanh, grad);
    fit.weights.w_r -= learning_rate * g.d_weights.w_r;
    fit.weights.w_x -= learning_rate * g.d_weights.w_x;
    fit.weights.w_y -= learning_rate * g.d_weights.w_y;
    fit.weights.w_z -= learning_rate * g.d_weights.w_z;
  }
  return fit;
}

}  // namespace phyfid::qnn
