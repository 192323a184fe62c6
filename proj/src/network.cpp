#include "meshwave/network.hpp"

#include "meshwave/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace meshwave {

double selu(double x) { return x > 0.0 ? kSeluScale * x : kSeluScale * kSeluAlpha * std::expm1(x); }

Matrix selu(const Matrix& x) {
  return x.unaryExpr([](double v) { return selu(v); });
}

Matrix selu_derivative(const Matrix& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * std::exp(v); });
}

// ---------------------------------------------------------------------------

std::vector<Matrix*> Model::parameters() {
  std::vector<Matrix*> out;
  for_each_parameter([&out](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> Model::parameters() const {
  std::vector<const Matrix*> out;
  for_each_parameter([&out](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t count = 0;
  for_each_parameter([&count](const std::string&, const Matrix& m) { count += static_cast<std::size_t>(m.size()); });
  return count;
}

namespace {

Matrix uniform(Index rows, Index cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) out(r, c) = dist(rng);
  }
  return out;
}

Affine init_affine(int in, int out, std::mt19937_64& rng) {
  return {uniform(in, out, 1.0 / std::sqrt(static_cast<double>(in)), rng), Matrix::Zero(1, out)};
}

NormParams init_norm(int dim) { return {Matrix::Ones(1, dim), Matrix::Zero(1, dim)}; }

void check_shape(const ModelShape& s) {
  if (s.input_dim < 1 || s.hidden_dim < 1 || s.feature_dim < 1 || s.layer_count < 1 || s.directions < 1 ||
      s.scales < 1 || s.classes < 1) {
    throw Error(ErrorCode::ShapeMismatch, "model dimensions must be positive");
  }
  if (s.perturb && s.perturb_rows < 1) {
    throw Error(ErrorCode::PermutationLengthMismatch, "perturbation layer needs a positive row count");
  }
}

Matrix affine_forward(const Affine& a, const Matrix& x) {
  Matrix out = x * a.weight;
  out.rowwise() += a.bias.row(0);
  return out;
}

// Returns dL/dx and accumulates into `grads`.
Matrix affine_backward(const Affine& a, const Matrix& x, const Matrix& dy, Affine& grads) {
  grads.weight.noalias() += x.transpose() * dy;
  grads.bias += dy.colwise().sum();
  return dy * a.weight.transpose();
}

}  // namespace

std::vector<int> make_permutation(Index n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  return perm;
}

Model init_model(const ModelShape& shape, std::uint64_t seed) {
  check_shape(shape);
  std::mt19937_64 rng(seed);
  Model model;
  model.shape = shape;
  model.encoder_in = init_affine(shape.input_dim, shape.hidden_dim, rng);
  model.encoder_out = init_affine(shape.hidden_dim, shape.feature_dim, rng);
  const double fan_in = static_cast<double>(shape.directions) * shape.scales * shape.feature_dim;
  for (int l = 0; l < shape.layer_count; ++l) {
    LayerParams layer;
    layer.directions = shape.directions;
    layer.scales = shape.scales;
    for (int f = 0; f < shape.directions * shape.scales; ++f) {
      layer.theta.push_back(uniform(shape.feature_dim, shape.feature_dim, 1.0 / std::sqrt(fan_in), rng));
    }
    layer.norm = init_norm(shape.feature_dim);
    model.layers.push_back(std::move(layer));
  }
  model.classifier = init_affine(shape.feature_dim, shape.classes, rng);
  if (shape.perturb) {
    PerturbationParams p;
    // Separate stream: the other weights are identical with and without the layer.
    p.permutation = make_permutation(shape.perturb_rows, seed ^ 0x9e3779b97f4a7c15ULL);
    p.scale = Matrix::Ones(1, shape.feature_dim);
    p.norm = init_norm(shape.feature_dim);
    model.perturbation = std::move(p);
  }
  return model;
}

Model zeros_like(const Model& model) {
  Model out = model;
  out.for_each_parameter([](const std::string&, Matrix& m) { m.setZero(); });
  return out;
}

// ---------------------------------------------------------------------------

Matrix norm_forward(const Matrix& x, const NormParams& params, NormCache* cache) {
  const Index n = x.rows();
  if (n < 2) throw Error(ErrorCode::SingleVertexShape, "normalization needs at least two vertices");
  if (params.gain.cols() != x.cols() || params.bias.cols() != x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "norm parameters have " + std::to_string(params.gain.cols()) +
                                              " features, input has " + std::to_string(x.cols()));
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Matrix centered = x.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / static_cast<double>(n);
  const Eigen::RowVectorXd inv_std = (var.array() + kNormEpsilon).rsqrt();
  centered.array().rowwise() *= inv_std.array();
  Matrix out = centered.array().rowwise() * params.gain.row(0).array();
  out.rowwise() += params.bias.row(0);
  if (cache) {
    cache->normalized = std::move(centered);
    cache->inv_std = inv_std;
  }
  return out;
}

Matrix norm_backward(const Matrix& dy, const NormParams& params, const NormCache& cache, NormParams& grads) {
  const Matrix& xhat = cache.normalized;
  grads.gain += (dy.array() * xhat.array()).colwise().sum().matrix();
  grads.bias += dy.colwise().sum();
  Matrix dxhat = dy.array().rowwise() * params.gain.row(0).array();
  const double n = static_cast<double>(dy.rows());
  const Eigen::RowVectorXd mean_d = dxhat.colwise().sum() / n;
  const Eigen::RowVectorXd mean_dx = (dxhat.array() * xhat.array()).colwise().sum().matrix() / n;
  dxhat.rowwise() -= mean_d;
  dxhat.array() -= xhat.array().rowwise() * mean_dx.array();
  dxhat.array().rowwise() *= cache.inv_std.array();
  return dxhat;
}

namespace {

void check_layer(const LayerParams& params, const Matrix& x, const FilterBank& bank) {
  if (params.directions != bank.direction_count() || params.scales != bank.scale_count()) {
    throw Error(ErrorCode::ShapeMismatch, "layer expects " + std::to_string(params.directions) + "x" +
                                              std::to_string(params.scales) + " filters, bank has " +
                                              std::to_string(bank.direction_count()) + "x" +
                                              std::to_string(bank.scale_count()));
  }
  if (x.rows() != bank.vertex_count()) {
    throw Error(ErrorCode::ShapeMismatch, "feature map has " + std::to_string(x.rows()) + " rows, bank has " +
                                              std::to_string(bank.vertex_count()));
  }
  if (params.theta.empty() || params.theta.front().rows() != x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "feature width does not match the layer input width");
  }
}

}  // namespace

Matrix amlconv_forward(const LayerParams& params, const Matrix& x, const FilterBank& bank, AmlconvCache* cache) {
  check_layer(params, x, bank);
  const Index d_out = params.theta.front().cols();
  Matrix pre = Matrix::Zero(x.rows(), d_out);
  if (cache) cache->filtered.clear();
  for (Index m = 0; m < params.directions; ++m) {
    const Matrix z = bank.project(m, x);
    for (Index j = 0; j < params.scales; ++j) {
      Matrix filtered = bank.filter_projected(m, j, z, true);
      pre.noalias() += filtered * params.weight(m, j);
      if (cache) cache->filtered.push_back(std::move(filtered));
    }
  }
  Matrix out = norm_forward(selu(pre), params.norm, cache ? &cache->norm : nullptr);
  if (cache) cache->pre = std::move(pre);
  return out;
}

Matrix amlconv_backward(const LayerParams& params, const FilterBank& bank, const AmlconvCache& cache, const Matrix& dy,
                        LayerParams& grads) {
  const Matrix dpre = norm_backward(dy, params.norm, cache.norm, grads.norm).cwiseProduct(selu_derivative(cache.pre));
  const Index d_in = params.theta.front().rows();
  Matrix dx = Matrix::Zero(dy.rows(), d_in);
  for (Index m = 0; m < params.directions; ++m) {
    Matrix dz = Matrix::Zero(bank.k(), d_in);
    for (Index j = 0; j < params.scales; ++j) {
      const Matrix& filtered = cache.filtered[static_cast<std::size_t>(m * params.scales + j)];
      grads.weight(m, j).noalias() += filtered.transpose() * dpre;
      dz += bank.adjoint_projected(m, j, dpre * params.weight(m, j).transpose(), true);
    }
    dx.noalias() += bank.lift(m, dz);
  }
  return dx;
}

Matrix perturb_forward(const PerturbationParams& params, const Matrix& x, PerturbCache* cache) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (params.permutation.size() != n) {
    throw Error(ErrorCode::PermutationLengthMismatch, "permutation defined for " +
                                                          std::to_string(params.permutation.size()) +
                                                          " vertices, feature map has " + std::to_string(n));
  }
  if (params.scale.cols() != x.cols()) throw Error(ErrorCode::ShapeMismatch, "perturbation scale width");
  Matrix permuted(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) permuted.row(static_cast<Index>(i)) = x.row(params.permutation[i]);
  Matrix pre = permuted.array().rowwise() * params.scale.row(0).array();
  Matrix out = norm_forward(selu(pre), params.norm, cache ? &cache->norm : nullptr);
  if (cache) {
    cache->permuted = std::move(permuted);
    cache->pre = std::move(pre);
  }
  return out;
}

Matrix perturb_backward(const PerturbationParams& params, const PerturbCache& cache, const Matrix& dy,
                        PerturbationParams& grads) {
  const Matrix dpre = norm_backward(dy, params.norm, cache.norm, grads.norm).cwiseProduct(selu_derivative(cache.pre));
  grads.scale += (dpre.array() * cache.permuted.array()).colwise().sum().matrix();
  const Matrix dperm = dpre.array().rowwise() * params.scale.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (std::size_t i = 0; i < params.permutation.size(); ++i) {
    dx.row(params.permutation[i]) = dperm.row(static_cast<Index>(i));
  }
  return dx;
}

// ---------------------------------------------------------------------------

namespace {

struct ForwardTrace {
  Matrix input;
  Matrix enc_pre0, enc_act0, enc_pre1;
  std::vector<Matrix> layer_inputs;
  std::vector<AmlconvCache> layers;
  Matrix descriptors;
  PerturbCache perturb;
  Matrix classifier_input;
  Matrix logits;
};

void check_coords(const Model& model, const Matrix& coords, const FilterBank& bank) {
  if (coords.cols() != model.shape.input_dim) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(coords.cols()) + " columns, model expects " +
                                              std::to_string(model.shape.input_dim));
  }
  if (coords.rows() != bank.vertex_count()) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(coords.rows()) + " rows, bank has " +
                                              std::to_string(bank.vertex_count()));
  }
}

Matrix run_descriptors(const Model& model, const Matrix& coords, const FilterBank& bank, ForwardTrace* trace) {
  check_coords(model, coords, bank);
  Matrix pre0 = affine_forward(model.encoder_in, coords);
  Matrix act0 = selu(pre0);
  Matrix pre1 = affine_forward(model.encoder_out, act0);
  Matrix x = selu(pre1);
  if (trace) {
    trace->input = coords;
    trace->enc_pre0 = std::move(pre0);
    trace->enc_act0 = std::move(act0);
    trace->enc_pre1 = std::move(pre1);
    trace->layers.resize(model.layers.size());
    trace->layer_inputs.clear();
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    if (trace) trace->layer_inputs.push_back(x);
    x = amlconv_forward(model.layers[l], x, bank, trace ? &trace->layers[l] : nullptr);
  }
  return x;
}

Matrix run_forward(const Model& model, const Matrix& coords, const FilterBank& bank, ForwardTrace* trace) {
  Matrix x = run_descriptors(model, coords, bank, trace);
  if (trace) trace->descriptors = x;
  if (model.perturbation) x = perturb_forward(*model.perturbation, x, trace ? &trace->perturb : nullptr);
  Matrix logits = affine_forward(model.classifier, x);
  if (trace) trace->classifier_input = std::move(x);
  return logits;
}

}  // namespace

Matrix model_forward(const Model& model, const Matrix& coords, const FilterBank& bank) {
  return run_forward(model, coords, bank, nullptr);
}

Matrix model_descriptors(const Model& model, const Matrix& coords, const FilterBank& bank) {
  return run_descriptors(model, coords, bank, nullptr);
}

LossResult loss_ce(const Matrix& logits, std::span<const int> labels) {
  const Index n = logits.rows();
  const Index c = logits.cols();
  if (static_cast<Index>(labels.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows of logits");
  }
  LossResult result;
  result.grad.resize(n, c);
  double total = 0.0;
  Index correct = 0;
  for (Index v = 0; v < n; ++v) {
    const int label = labels[static_cast<std::size_t>(v)];
    if (label < 0 || label >= c) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " at vertex " + std::to_string(v));
    }
    Index arg = 0;
    const double peak = logits.row(v).maxCoeff(&arg);
    if (arg == label) ++correct;
    auto row = result.grad.row(v);
    row = (logits.row(v).array() - peak).exp().matrix();
    const double sum = row.sum();
    total += std::log(sum) - (logits(v, label) - peak);
    row /= sum;
    row(label) -= 1.0;
  }
  result.grad /= static_cast<double>(n);
  result.loss = total / static_cast<double>(n);
  result.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return result;
}

LossResult model_loss_and_grad(const Model& model, const Matrix& coords, const FilterBank& bank,
                               std::span<const int> labels, Model& grads) {
  ForwardTrace trace;
  const Matrix logits = run_forward(model, coords, bank, &trace);
  LossResult result = loss_ce(logits, labels);

  Matrix d = affine_backward(model.classifier, trace.classifier_input, result.grad, grads.classifier);
  if (model.perturbation) d = perturb_backward(*model.perturbation, trace.perturb, d, *grads.perturbation);
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    d = amlconv_backward(model.layers[l], bank, trace.layers[l], d, grads.layers[l]);
  }
  d = d.cwiseProduct(selu_derivative(trace.enc_pre1));
  d = affine_backward(model.encoder_out, trace.enc_act0, d, grads.encoder_out);
  d = d.cwiseProduct(selu_derivative(trace.enc_pre0));
  affine_backward(model.encoder_in, trace.input, d, grads.encoder_in);
  return result;
}

// ---------------------------------------------------------------------------

void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads, AdamState& state,
               const AdamOptions& options) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(params.size()) + " parameters, " +
                                              std::to_string(grads.size()) + " gradients");
  }
  if (state.first.empty()) {
    for (const Matrix* p : params) {
      state.first.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.second.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.first.size() != params.size()) throw Error(ErrorCode::ShapeMismatch, "optimizer state size");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i]->rows() || params[i]->cols() != grads[i]->cols() ||
        state.first[i].rows() != params[i]->rows() || state.first[i].cols() != params[i]->cols()) {
      throw Error(ErrorCode::ShapeMismatch, "parameter " + std::to_string(i) + " shape");
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix g = *grads[i] + options.weight_decay * p;
    state.first[i] = options.beta1 * state.first[i] + (1.0 - options.beta1) * g;
    state.second[i] = options.beta2 * state.second[i] + (1.0 - options.beta2) * g.cwiseAbs2();
    p.array() -= options.lr * (state.first[i].array() / c1) /
                 ((state.second[i].array() / c2).sqrt() + options.epsilon);
  }
}

std::vector<EpochRecord> train(Model& model, std::span<const TrainSample> samples, const TrainOptions& options) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "no training samples");
  for (const TrainSample& s : samples) {
    if (s.bank == nullptr) throw Error(ErrorCode::ShapeMismatch, "training sample without a filter bank");
  }
  AdamState state;
  Model grads = zeros_like(model);
  std::vector<std::size_t> order(samples.size());
  std::vector<EpochRecord> history;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    if (options.shuffle && order.size() > 1) {
      std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(epoch));
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(order[i], order[pick(rng)]);
      }
    }
    double loss_sum = 0.0;
    double correct = 0.0;
    double vertices = 0.0;
    for (std::size_t idx : order) {
      const TrainSample& s = samples[idx];
      grads.for_each_parameter([](const std::string&, Matrix& m) { m.setZero(); });
      const LossResult r = model_loss_and_grad(model, s.coords, *s.bank, s.labels, grads);
      if (!std::isfinite(r.loss)) {
        std::ostringstream msg;
        msg << "loss " << r.loss << " at epoch " << epoch << ", sample " << idx;
        throw Error(ErrorCode::NonFiniteLoss, msg.str());
      }
      loss_sum += r.loss;
      const double n = static_cast<double>(s.labels.size());
      correct += r.accuracy * n;
      vertices += n;
      adam_step(model.parameters(), std::as_const(grads).parameters(), state, options.adam);
    }
    EpochRecord record{epoch, loss_sum / static_cast<double>(samples.size()), correct / vertices};
    history.push_back(record);
    if (options.on_epoch && !options.on_epoch(record, model)) break;
  }
  return history;
}

}  // namespace meshwave
