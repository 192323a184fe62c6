#include "support.hpp"

#include "meshwave/network.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace meshwave;
using namespace meshwave::testing;

namespace {

const TriMesh& small_mesh() {
  static const TriMesh m = jitter(icosphere(1), 0.03, 21);  // 42 vertices
  return m;
}

const FilterBank& small_bank() {
  static const FilterBank b = make_bank(small_mesh(), 2, 2, 30);
  return b;
}

const FilterBank& mesh30_bank() {
  static const FilterBank b = make_bank(jitter(grid(5, 4, 1.2, 1.0), 0.03, 17), 2, 3, 30);
  return b;
}

ModelShape tiny_shape(bool perturb, int classes, int rows) {
  ModelShape s;
  s.hidden_dim = 6;
  s.feature_dim = 8;
  s.layer_count = 2;
  s.directions = 2;
  s.scales = 2;
  s.classes = classes;
  s.perturb = perturb;
  s.perturb_rows = rows;
  return s;
}

// Randomizes every parameter so that no gradient is trivially zero.
void randomize(Model& model, std::uint64_t seed) {
  std::uint64_t k = seed;
  model.for_each_parameter([&k](const std::string& name, Matrix& m) {
    Matrix r = random_matrix(m.rows(), m.cols(), ++k);
    if (name.find("gain") != std::string::npos || name.find("scale") != std::string::npos) {
      m = Matrix::Ones(m.rows(), m.cols()) + 0.3 * r;
    } else {
      m = 0.5 * r / std::sqrt(double(std::max<Index>(m.rows(), 1)));
    }
  });
}

std::vector<int> identity_labels(Index n) {
  std::vector<int> l(static_cast<std::size_t>(n));
  std::iota(l.begin(), l.end(), 0);
  return l;
}

double standardize_check(const Matrix& y) {
  double worst = 0.0;
  for (Index d = 0; d < y.cols(); ++d) {
    const double mean = y.col(d).mean();
    const double var = (y.col(d).array() - mean).square().mean();
    worst = std::max({worst, std::abs(mean) / 1e-10, std::abs(var - 1.0) / 1e-6});
  }
  return worst;
}

}  // namespace

TEST_CASE("selu values") {
  CHECK(selu(0.0) == 0.0);
  CHECK(std::abs(selu(1.0) - 1.05070098) < 1e-8);
  CHECK(std::abs(selu(-20.0) + 1.75809934) < 1e-7);
  const Matrix x = random_matrix(5, 4, 3);
  const Matrix d = selu_derivative(x);
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6, v = x.data()[i];
    CHECK(d.data()[i] == doctest::Approx((selu(v + h) - selu(v - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("norm standardizes each feature") {
  const Matrix x = 10.0 * random_matrix(40, 5, 1) + Matrix::Constant(40, 5, 7.0);
  NormParams p{Matrix::Ones(1, 5), Matrix::Zero(1, 5)};
  CHECK(standardize_check(norm_forward(x, p)) <= 1.0);
  Matrix c = x;
  c.col(2).setConstant(4.0);
  p.bias(0, 2) = 0.75;
  const Matrix y = norm_forward(c, p);
  CHECK((y.col(2).array() - 0.75).abs().maxCoeff() < 1e-12);
  MW_CHECK_THROWS_CODE(norm_forward(Matrix::Ones(1, 5), p), ErrorCode::SingleVertexShape);
}

TEST_CASE("norm gradients") {
  Matrix x = random_matrix(12, 4, 2);
  NormParams p{Matrix::Ones(1, 4) + 0.2 * random_matrix(1, 4, 3), 0.1 * random_matrix(1, 4, 4)};
  const Matrix w = random_matrix(12, 4, 5);
  auto loss = [&] { return (norm_forward(x, p).array() * w.array()).sum(); };
  NormCache cache;
  norm_forward(x, p, &cache);
  NormParams g{Matrix::Zero(1, 4), Matrix::Zero(1, 4)};
  const Matrix dx = norm_backward(w, p, cache, g);
  CHECK(max_gradient_error(dx, numeric_gradient(x, loss)) < 1e-4);
  CHECK(max_gradient_error(g.gain, numeric_gradient(p.gain, loss)) < 1e-4);
  CHECK(max_gradient_error(g.bias, numeric_gradient(p.bias, loss)) < 1e-4);
}

TEST_CASE("amlconv with zero weights outputs the norm bias") {
  const FilterBank& bank = small_bank();
  LayerParams p;
  p.directions = 2;
  p.scales = 2;
  p.theta.assign(4, Matrix::Zero(3, 5));
  p.norm = {Matrix::Ones(1, 5), random_matrix(1, 5, 1)};
  const Matrix y = amlconv_forward(p, random_matrix(bank.vertex_count(), 3, 2), bank);
  for (Index v = 0; v < y.rows(); ++v) CHECK((y.row(v) - p.norm.bias).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amlconv with one identity filter is norm(selu(filter))") {
  const FilterBank full = small_bank();
  const FilterBank bank(std::vector<Spectrum>{full.spectrum(0)}, KernelSpec{{full.kernel().scales[0]}, full.kernel().cutoff, false});
  LayerParams p;
  p.directions = 1;
  p.scales = 1;
  p.theta = {Matrix::Identity(4, 4)};
  p.norm = {Matrix::Ones(1, 4), Matrix::Zero(1, 4)};
  const Matrix x = random_matrix(bank.vertex_count(), 4, 6);
  const Matrix expect = norm_forward(selu(apply_filter(bank, 0, 0, x, true)), p.norm);
  CHECK((amlconv_forward(p, x, bank) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amlconv gradients on a 30-vertex mesh") {
  const FilterBank& bank = mesh30_bank();
  LayerParams p;
  p.directions = 2;
  p.scales = 3;
  for (int i = 0; i < 6; ++i) p.theta.push_back(0.5 * random_matrix(4, 3, 10 + i));
  p.norm = {Matrix::Ones(1, 3) + 0.1 * random_matrix(1, 3, 1), 0.1 * random_matrix(1, 3, 2)};
  Matrix x = random_matrix(30, 4, 3);
  const Matrix w = random_matrix(30, 3, 4);
  auto loss = [&] { return (amlconv_forward(p, x, bank).array() * w.array()).sum(); };
  AmlconvCache cache;
  amlconv_forward(p, x, bank, &cache);
  LayerParams g = p;
  for (Matrix& t : g.theta) t.setZero();
  g.norm = {Matrix::Zero(1, 3), Matrix::Zero(1, 3)};
  const Matrix dx = amlconv_backward(p, bank, cache, w, g);
  CHECK(max_gradient_error(dx, numeric_gradient(x, loss)) < 1e-4);
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    CAPTURE(i);
    CHECK(max_gradient_error(g.theta[i], numeric_gradient(p.theta[i], loss)) < 1e-4);
  }
  CHECK(max_gradient_error(g.norm.gain, numeric_gradient(p.norm.gain, loss)) < 1e-4);
}

TEST_CASE("perturbation with identity permutation standardizes selu") {
  const Matrix x = random_matrix(20, 4, 7);
  PerturbationParams p;
  p.permutation = identity_labels(20);
  p.scale = Matrix::Ones(1, 4);
  p.norm = {Matrix::Ones(1, 4), Matrix::Zero(1, 4)};
  const Matrix y = perturb_forward(p, x);
  CHECK((y - norm_forward(selu(x), p.norm)).cwiseAbs().maxCoeff() < 1e-14);
  MW_CHECK_THROWS_CODE(perturb_forward(p, random_matrix(19, 4, 1)), ErrorCode::PermutationLengthMismatch);
}

TEST_CASE("permutations compose") {
  const std::vector<int> pi = make_permutation(25, 3);
  std::vector<int> sorted = pi;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == identity_labels(25));
  CHECK(make_permutation(25, 3) == pi);
  CHECK(make_permutation(25, 4) != pi);
  // With theta_p = 1 and a linear stand-in, two passes read rows pi[pi[i]].
  const Matrix x = random_matrix(25, 2, 5);
  Matrix once(25, 2), twice(25, 2);
  for (int i = 0; i < 25; ++i) once.row(i) = x.row(pi[i]);
  for (int i = 0; i < 25; ++i) twice.row(i) = once.row(pi[i]);
  for (int i = 0; i < 25; ++i) CHECK(twice.row(i) == x.row(pi[pi[i]]));
  PerturbationParams p;
  p.permutation = pi;
  p.scale = Matrix::Ones(1, 2);
  p.norm = {Matrix::Ones(1, 2), Matrix::Zero(1, 2)};
  PerturbCache cache;
  perturb_forward(p, x, &cache);
  CHECK(cache.permuted == once);
}

TEST_CASE("perturbation gradients") {
  PerturbationParams p;
  p.permutation = make_permutation(15, 9);
  p.scale = Matrix::Ones(1, 3) + 0.3 * random_matrix(1, 3, 1);
  p.norm = {Matrix::Ones(1, 3) + 0.1 * random_matrix(1, 3, 2), 0.1 * random_matrix(1, 3, 3)};
  Matrix x = random_matrix(15, 3, 4);
  const Matrix w = random_matrix(15, 3, 5);
  auto loss = [&] { return (perturb_forward(p, x).array() * w.array()).sum(); };
  PerturbCache cache;
  perturb_forward(p, x, &cache);
  PerturbationParams g = p;
  g.scale.setZero();
  g.norm = {Matrix::Zero(1, 3), Matrix::Zero(1, 3)};
  const Matrix dx = perturb_backward(p, cache, w, g);
  CHECK(max_gradient_error(g.scale, numeric_gradient(p.scale, loss)) < 1e-4);
  CHECK(max_gradient_error(dx, numeric_gradient(x, loss)) < 1e-4);
}

TEST_CASE("cross entropy") {
  const std::vector<int> labels{0, 2, 1, 3};
  const LossResult uniform = loss_ce(Matrix::Zero(4, 5), labels);
  CHECK(uniform.loss == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  Matrix margin = Matrix::Zero(4, 5);
  for (int v = 0; v < 4; ++v) margin(v, labels[static_cast<std::size_t>(v)]) = 20.0;
  const LossResult sharp = loss_ce(margin, labels);
  CHECK(sharp.loss < 1e-8);
  CHECK(sharp.accuracy == 1.0);
  Matrix logits = random_matrix(4, 5, 8);
  const LossResult r = loss_ce(logits, labels);
  const Matrix numeric = numeric_gradient(logits, [&] { return loss_ce(logits, labels).loss; }, 1e-6);
  CHECK(max_gradient_error(r.grad, numeric, 1e-9) < 1e-5);
  MW_CHECK_THROWS_CODE(loss_ce(logits, std::vector<int>{0, 1, 5, 0}), ErrorCode::LabelOutOfRange);
  MW_CHECK_THROWS_CODE(loss_ce(logits, std::vector<int>{0, 1, -1, 0}), ErrorCode::LabelOutOfRange);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient without decay") {
    Matrix p = random_matrix(3, 2, 1);
    const Matrix keep = p;
    const Matrix g = Matrix::Zero(3, 2);
    AdamState state;
    adam_step({&p}, {&g}, state, AdamOptions{1e-3, 0.0});
    CHECK(p == keep);
  }
  SUBCASE("first step is bounded by lr") {
    Matrix p = random_matrix(3, 2, 1);
    const Matrix keep = p;
    const Matrix g = 100.0 * random_matrix(3, 2, 2);
    AdamState state;
    adam_step({&p}, {&g}, state, AdamOptions{});
    CHECK((p - keep).cwiseAbs().maxCoeff() <= 1e-3 * (1 + 1e-6));
  }
  SUBCASE("two steps on p^2") {
    Matrix p = Matrix::Ones(1, 1);
    Matrix g(1, 1);
    AdamState state;
    const AdamOptions o{0.1, 0.0};
    double f = 1.0;
    for (int i = 0; i < 2; ++i) {
      g(0, 0) = 2 * p(0, 0);
      adam_step({&p}, {&g}, state, o);
      CHECK(p(0, 0) * p(0, 0) < f);
      f = p(0, 0) * p(0, 0);
    }
    // by hand: m = 0.36, v = 0.007236, bias corrections 0.19 and 0.001999
    const double step2 = 0.1 * (0.36 / 0.19) / (std::sqrt(0.007236 / 0.001999) + 1e-8);
    CHECK(p(0, 0) == doctest::Approx(0.9 - step2).epsilon(1e-9));
  }
  SUBCASE("shape mismatch") {
    Matrix p = Matrix::Zero(2, 2);
    const Matrix g = Matrix::Zero(2, 3);
    AdamState state;
    MW_CHECK_THROWS_CODE(adam_step({&p}, {&g}, state, AdamOptions{}), ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("model structure") {
  ModelShape s;
  s.classes = 42;
  s.perturb = true;
  s.perturb_rows = 42;
  const Model m = init_model(s, 5);
  CHECK(m.layers.size() == 4);
  CHECK(m.encoder_in.weight.rows() == 3);
  CHECK(m.encoder_in.weight.cols() == 64);
  CHECK(m.encoder_out.weight.cols() == 128);
  CHECK(m.layers[0].theta.size() == 16);
  CHECK(m.layers[3].weight(3, 3).rows() == 128);
  CHECK(m.classifier.weight.cols() == 42);
  std::set<std::string> names;
  std::size_t count = 0;
  m.for_each_parameter([&](const std::string& name, const Matrix& p) {
    names.insert(name);
    count += static_cast<std::size_t>(p.size());
    CHECK(p.allFinite());
  });
  CHECK(names.size() == m.parameters().size());
  CHECK(count == m.parameter_count());
  const std::size_t expected = (3 * 64 + 64) + (64 * 128 + 128) + 4 * (16 * 128 * 128 + 2 * 128) + 3 * 128 +
                               (128 * 42 + 42);
  CHECK(m.parameter_count() == expected);
  // weights within +-1/sqrt(fan_in)
  CHECK(m.encoder_in.weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(3.0));
  CHECK(m.layers[1].theta[5].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(16.0 * 128.0));
  CHECK(m.perturbation->scale == Matrix::Ones(1, 128));
  const Model z = zeros_like(m);
  z.for_each_parameter([](const std::string&, const Matrix& p) { CHECK(p.isZero(0.0)); });
}

TEST_CASE("perturbation layer does not shift the other weights") {
  const Model a = init_model(tiny_shape(false, 42, 0), 9);
  const Model b = init_model(tiny_shape(true, 42, 42), 9);
  CHECK(a.encoder_in.weight == b.encoder_in.weight);
  CHECK(a.layers[1].theta[2] == b.layers[1].theta[2]);
  CHECK(a.classifier.weight == b.classifier.weight);
}

TEST_CASE("model forward shape and determinism") {
  const FilterBank& bank = small_bank();
  const Matrix x = coords_of(small_mesh());
  const Model m = init_model(tiny_shape(true, 42, 42), 3);
  const Matrix a = model_forward(m, x, bank);
  const Matrix b = model_forward(init_model(tiny_shape(true, 42, 42), 3), x, bank);
  CHECK(a.rows() == 42);
  CHECK(a.cols() == 42);
  CHECK(a == b);
  CHECK(model_descriptors(m, x, bank).cols() == 8);
  MW_CHECK_THROWS_CODE(model_forward(m, Matrix::Zero(42, 2), bank), ErrorCode::ShapeMismatch);
}

TEST_CASE("identity perturbation adds one norm-selu stage") {
  const FilterBank& bank = small_bank();
  const Matrix x = coords_of(small_mesh());
  Model m = init_model(tiny_shape(true, 42, 42), 4);
  randomize(m, 4);
  m.perturbation->permutation = identity_labels(42);
  m.perturbation->scale.setOnes();
  const Matrix desc = model_descriptors(m, x, bank);
  const Matrix expect =
      (norm_forward(selu(desc), m.perturbation->norm) * m.classifier.weight).rowwise() + m.classifier.bias.row(0);
  CHECK((model_forward(m, x, bank) - expect).cwiseAbs().maxCoeff() < 1e-12);
  Model vanilla = m;
  vanilla.perturbation.reset();
  vanilla.shape.perturb = false;
  CHECK(model_descriptors(vanilla, x, bank) == desc);
}

TEST_CASE("full pipeline gradients") {
  const FilterBank& bank = small_bank();
  const Matrix x = coords_of(small_mesh());
  const std::vector<int> labels = identity_labels(42);
  for (bool perturb : {false, true}) {
    CAPTURE(perturb);
    Model m = init_model(tiny_shape(perturb, 42, 42), 17);
    randomize(m, 17);
    Model g = zeros_like(m);
    model_loss_and_grad(m, x, bank, labels, g);
    std::vector<Matrix*> params = m.parameters();
    const std::vector<const Matrix*> grads = std::as_const(g).parameters();
    std::vector<std::string> names;
    m.for_each_parameter([&](const std::string& n, Matrix&) { names.push_back(n); });
    for (std::size_t i = 0; i < params.size(); ++i) {
      CAPTURE(names[i]);
      const Matrix numeric = numeric_gradient(*params[i], [&] { return loss_ce(model_forward(m, x, bank), labels).loss; });
      CHECK(tensor_gradient_error(*grads[i], numeric) < 1e-4);
    }
  }
}

TEST_CASE("training contract") {
  const FilterBank& bank = small_bank();
  const TrainSample sample{coords_of(small_mesh()), &bank, identity_labels(42)};
  const std::vector<TrainSample> samples{sample, sample};
  TrainOptions o;
  o.epochs = 6;
  o.seed = 2;
  Model a = init_model(tiny_shape(true, 42, 42), 1);
  const std::vector<int> before = a.perturbation->permutation;
  const std::vector<EpochRecord> ha = train(a, samples, o);
  REQUIRE(ha.size() == 6);
  for (const EpochRecord& r : ha) {
    CHECK(std::isfinite(r.loss));
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
  }
  CHECK(ha.back().loss < ha.front().loss);
  CHECK(a.perturbation->permutation == before);
  Model b = init_model(tiny_shape(true, 42, 42), 1);
  const std::vector<EpochRecord> hb = train(b, samples, o);
  CHECK(ha.back().loss == hb.back().loss);
  CHECK(a.classifier.weight == b.classifier.weight);

  o.on_epoch = [](const EpochRecord& r, const Model&) { return r.epoch < 3; };
  Model c = init_model(tiny_shape(true, 42, 42), 1);
  CHECK(train(c, samples, o).size() == 3);

  MW_CHECK_THROWS_CODE(train(c, std::span<const TrainSample>{}, o), ErrorCode::EmptyDataset);
  Model d = init_model(tiny_shape(false, 42, 0), 1);
  d.classifier.bias(0, 0) = std::numeric_limits<double>::quiet_NaN();
  MW_CHECK_THROWS_CODE(train(d, samples, o), ErrorCode::NonFiniteLoss);
}

TEST_CASE("permutation is fixed for its vertex count") {
  const FilterBank& bank = small_bank();
  const Model m = init_model(tiny_shape(true, 42, 30), 1);
  MW_CHECK_THROWS_CODE(model_forward(m, coords_of(small_mesh()), bank), ErrorCode::PermutationLengthMismatch);
}
