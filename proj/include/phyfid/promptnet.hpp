#pragma once

// Quaternion layers, the pseudo-language prompt projection and a
// LoRA-adapted cross-attention block, with analytic gradients.

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace phyfid::qnn {

enum class Activation { identity, relu, tanh, sigmoid };

double activate(Activation f, double x);
/// f'(x) evaluated at the pre-activation value.
double activate_derivative(Activation f, double x);

/// Four equally sized real blocks r + x i + y j + z k.
struct QTensor {
  Eigen::VectorXd r, x, y, z;

  int dim() const { return static_cast<int>(r.size()); }
  /// Throws ShapeError unless all four blocks share one width.
  void validate() const;
  static QTensor zeros(int dim);
};

struct QuaternionLayerWeights {
  Eigen::MatrixXd w_r, w_x, w_y, w_z;  // each out_dim x in_dim

  int in_dim() const { return static_cast<int>(w_r.cols()); }
  int out_dim() const { return static_cast<int>(w_r.rows()); }
  void validate() const;
  static QuaternionLayerWeights zeros(int in_dim, int out_dim);
  /// Blocks drawn from U(-1/sqrt(in_dim), 1/sqrt(in_dim)).
  static QuaternionLayerWeights random(int in_dim, int out_dim, std::uint64_t seed);
};

/// Split activation of the Hamilton product W ⊗ Q lifted to matrices:
///   r' = Wr r - Wx x - Wy y - Wz z
///   x' = Wr x + Wx r + Wy z - Wz y
///   y' = Wr y - Wx z + Wy r + Wz x
///   z' = Wr z + Wx y - Wy x + Wz r
QTensor quaternion_layer(const QuaternionLayerWeights& w, const QTensor& q, Activation f);

struct QuaternionLayerGrad {
  QuaternionLayerWeights d_weights;
  QTensor d_input;
};

/// Gradients of <grad_out, quaternion_layer(w, q, f)>.
QuaternionLayerGrad quaternion_layer_backward(const QuaternionLayerWeights& w, const QTensor& q,
                                              Activation f, const QTensor& grad_out);

struct LinearMap {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out; empty means no bias

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

/// Stand-ins for the vision features, the knowledge embedding and the
/// learnable text embedding.
struct EmbeddingBundle {
  Eigen::VectorXd f_o;  // vision features, width d_v
  Eigen::VectorXd e_p;  // knowledge embedding, width d_k
  Eigen::VectorXd t_l;  // text embedding, width d

  Eigen::VectorXd z_0() const { return Eigen::VectorXd::Zero(t_l.size()); }
  static EmbeddingBundle synthetic(int d_v, int d_k, int d, std::uint64_t seed);
};

struct ProjectedEmbeddings {
  Eigen::VectorXd f_o;  // L_d1(F_o)
  Eigen::VectorXd e_p;  // L_d2(E_p)
};

ProjectedEmbeddings project_embeddings(const Eigen::VectorXd& f_o, const Eigen::VectorXd& e_p,
                                       const LinearMap& l_d1, const LinearMap& l_d2);

/// r = T_L, x = projected E_p, y = projected F_o, z = 0.
QTensor assemble_prompt_quaternion(const Eigen::VectorXd& t_l, const Eigen::VectorXd& e_p_hat,
                                   const Eigen::VectorXd& f_o_hat);

enum class PromptBlock { r, x, y, z };

struct PseudoPrompt {
  Eigen::VectorXd e_l;  // selected block of `full`
  QTensor full;
  PromptBlock block = PromptBlock::r;
};

PseudoPrompt pseudo_prompt(const QuaternionLayerWeights& q_t, const EmbeddingBundle& bundle,
                           const LinearMap& l_d1, const LinearMap& l_d2, Activation f,
                           PromptBlock block = PromptBlock::r);

/// W + scale * B A, with A rank x d_in and B d_out x rank.
struct LoraAdapter {
  Eigen::MatrixXd base;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  double scale = 1.0;

  int rank() const { return static_cast<int>(a.rows()); }
  int in_dim() const { return static_cast<int>(base.cols()); }
  int out_dim() const { return static_cast<int>(base.rows()); }
  void validate() const;
  /// A ~ U(-1/sqrt(d_in), 1/sqrt(d_in)), B = 0, scale = alpha / rank.
  static LoraAdapter wrap(Eigen::MatrixXd base, int rank, double alpha, std::uint64_t seed);
};

/// (W + scale B A) x, evaluated as W x + scale B (A x).
Eigen::VectorXd lora_apply(const LoraAdapter& adapter, const Eigen::VectorXd& x);
/// Row-wise lora_apply: X (W + scale B A)^T.
Eigen::MatrixXd lora_project(const LoraAdapter& adapter, const Eigen::MatrixXd& rows);

struct AttentionWeights {
  LoraAdapter w_q;    // d x d_eps
  LoraAdapter w_k;    // d x d_tau
  Eigen::MatrixXd w_v;  // d_v x d_tau

  int width() const { return w_q.out_dim(); }
  void validate() const;
};

struct AttentionResult {
  Eigen::MatrixXd output;         // N x d_v
  Eigen::MatrixXd probabilities;  // N x M, rows sum to 1
  Eigen::MatrixXd q, k, v;
};

/// softmax(Q K^T / sqrt(d)) V with Q = LoRA(W_Q) z, K = LoRA(W_K) y, V = W_V y
/// applied row-wise to z (N x d_eps) and y (M x d_tau).
AttentionResult lora_cross_attention(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                     const AttentionWeights& weights);

struct AttentionGrad {
  Eigen::MatrixXd d_z, d_y;
  Eigen::MatrixXd d_a_q, d_b_q;
  Eigen::MatrixXd d_a_k, d_b_k;
  Eigen::MatrixXd d_w_v;
};

/// Gradients of <grad_out, output> with respect to inputs, the trainable LoRA
/// factors and W_V.
AttentionGrad lora_cross_attention_backward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                            const AttentionWeights& weights,
                                            const Eigen::MatrixXd& grad_out);

struct FitResult {
  std::vector<double> loss;
  QuaternionLayerWeights weights;
};

/// Gradient descent on the quaternion layer so the pseudo prompt of a fixed
/// synthetic bundle approaches a random target (0.5 * squared error).
FitResult fit_prompt_layer(int dim, int steps, double learning_rate, std::uint64_t seed);

}  // namespace phyfid::qnn
