#pragma once

#include "meshwave/wavelets.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace meshwave {

using Matrix = Eigen::MatrixXd;

inline constexpr double kSeluScale = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
inline constexpr double kNormEpsilon = 1e-5;

double selu(double x);
Matrix selu(const Matrix& x);
// d selu / dx evaluated at the pre-activation.
Matrix selu_derivative(const Matrix& x);

// ---------------------------------------------------------------------------
// Parameters

struct Affine {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out
};

// Per-shape, per-feature standardization with a learnable affine.
struct NormParams {
  Matrix gain;  // 1 x D
  Matrix bias;  // 1 x D
};

struct LayerParams {
  std::vector<Matrix> theta;  // M * J matrices (D_in x D_out), index m * J + j
  NormParams norm;
  Index directions = 0;
  Index scales = 0;

  const Matrix& weight(Index m, Index j) const { return theta[static_cast<std::size_t>(m * scales + j)]; }
  Matrix& weight(Index m, Index j) { return theta[static_cast<std::size_t>(m * scales + j)]; }
};

struct PerturbationParams {
  std::vector<int> permutation;  // fixed row shuffle: out row i reads input row permutation[i]
  Matrix scale;                  // 1 x D
  NormParams norm;
};

struct ModelShape {
  int input_dim = 3;
  int hidden_dim = 64;
  int feature_dim = 128;
  int layer_count = 4;
  int directions = 4;
  int scales = 4;
  int classes = 0;
  bool perturb = false;
  int perturb_rows = 0;  // vertex count the permutation is defined on
};

struct Model {
  ModelShape shape;
  Affine encoder_in;
  Affine encoder_out;
  std::vector<LayerParams> layers;
  std::optional<PerturbationParams> perturbation;
  Affine classifier;

  // Visits every learnable matrix in a fixed order with a stable name.
  template <class F>
  void for_each_parameter(F&& f);
  template <class F>
  void for_each_parameter(F&& f) const;

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::size_t parameter_count() const;
};

// Weights uniform in +-1/sqrt(fan_in) (fan_in of a Theta matrix is M*J*D_in),
// biases 0, norm gain 1, perturbation scale 1; permutation drawn from `seed`.
Model init_model(const ModelShape& shape, std::uint64_t seed);

// Same structure, every learnable matrix zero.
Model zeros_like(const Model& model);

std::vector<int> make_permutation(Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Layers

struct NormCache {
  Matrix normalized;
  Eigen::RowVectorXd inv_std;
};

Matrix norm_forward(const Matrix& x, const NormParams& params, NormCache* cache = nullptr);
// Accumulates parameter gradients into `grads`; returns dL/dx.
Matrix norm_backward(const Matrix& dy, const NormParams& params, const NormCache& cache, NormParams& grads);

struct AmlconvCache {
  std::vector<Matrix> filtered;  // normalized Psi^T X per (m, j)
  Matrix pre;                    // sum_mj filtered * Theta
  NormCache norm;
};

// Norm(SELU(sum_m sum_j PsiBar_{m,t_j}^T X Theta_{m,j}))
Matrix amlconv_forward(const LayerParams& params, const Matrix& x, const FilterBank& bank,
                       AmlconvCache* cache = nullptr);
Matrix amlconv_backward(const LayerParams& params, const FilterBank& bank, const AmlconvCache& cache, const Matrix& dy,
                        LayerParams& grads);

struct PerturbCache {
  Matrix permuted;
  Matrix pre;
  NormCache norm;
};

// Norm(SELU(X[pi] diag(theta_p)))
Matrix perturb_forward(const PerturbationParams& params, const Matrix& x, PerturbCache* cache = nullptr);
Matrix perturb_backward(const PerturbationParams& params, const PerturbCache& cache, const Matrix& dy,
                        PerturbationParams& grads);

// ---------------------------------------------------------------------------
// Model

// Encoder -> AMLCONV stack -> optional perturbation -> classifier. Returns logits.
Matrix model_forward(const Model& model, const Matrix& coords, const FilterBank& bank);

// Output of the last AMLCONV layer (pre-perturbation, pre-classifier).
Matrix model_descriptors(const Model& model, const Matrix& coords, const FilterBank& bank);

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits
  double accuracy = 0.0;
};

// Mean over vertices of -log softmax(logits)[v, label(v)].
LossResult loss_ce(const Matrix& logits, std::span<const int> labels);

// Full forward + backward; gradients are accumulated into `grads`.
LossResult model_loss_and_grad(const Model& model, const Matrix& coords, const FilterBank& bank,
                               std::span<const int> labels, Model& grads);

// ---------------------------------------------------------------------------
// Optimization

struct AdamOptions {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Matrix> first;
  std::vector<Matrix> second;
  long step = 0;
};

// Adam with L2 weight decay added to the gradient. The state is sized on
// first use.
void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads, AdamState& state,
               const AdamOptions& options);

struct TrainSample {
  Matrix coords;  // N x 3
  const FilterBank* bank = nullptr;
  std::vector<int> labels;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainOptions {
  int epochs = 200;
  AdamOptions adam;
  std::uint64_t seed = 0;
  bool shuffle = true;
  // Called after each epoch; returning false stops training.
  std::function<bool(const EpochRecord&, const Model&)> on_epoch;
};

// One Adam step per shape (full-shape batches), sample order shuffled per
// epoch from `seed`.
std::vector<EpochRecord> train(Model& model, std::span<const TrainSample> samples, const TrainOptions& options);

// ---------------------------------------------------------------------------

template <class F>
void visit_norm(NormParams& p, const std::string& prefix, F& f) {
  f(prefix + ".gain", p.gain);
  f(prefix + ".bias", p.bias);
}

template <class F>
void Model::for_each_parameter(F&& f) {
  f(std::string("encoder.0.weight"), encoder_in.weight);
  f(std::string("encoder.0.bias"), encoder_in.bias);
  f(std::string("encoder.1.weight"), encoder_out.weight);
  f(std::string("encoder.1.bias"), encoder_out.bias);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "amlconv." + std::to_string(l);
    for (Index m = 0; m < layers[l].directions; ++m) {
      for (Index j = 0; j < layers[l].scales; ++j) {
        f(prefix + ".theta." + std::to_string(m) + "." + std::to_string(j), layers[l].weight(m, j));
      }
    }
    visit_norm(layers[l].norm, prefix + ".norm", f);
  }
  if (perturbation) {
    f(std::string("perturb.scale"), perturbation->scale);
    visit_norm(perturbation->norm, "perturb.norm", f);
  }
  f(std::string("classifier.weight"), classifier.weight);
  f(std::string("classifier.bias"), classifier.bias);
}

template <class F>
void Model::for_each_parameter(F&& f) const {
  const_cast<Model*>(this)->for_each_parameter(
      [&f](const std::string& name, Matrix& value) { f(name, static_cast<const Matrix&>(value)); });
}

}  // namespace meshwave
