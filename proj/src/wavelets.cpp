#include "meshwave/wavelets.hpp"

#include "meshwave/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace meshwave {

double kernel_g(double x) {
  if (x < 0.0) throw Error(ErrorCode::NegativeInput, "g(" + std::to_string(x) + ")");
  return std::numbers::e * x * x * std::exp(-x * x);
}

double kernel_h(double x, double cutoff) {
  if (x < 0.0) throw Error(ErrorCode::NegativeInput, "h(" + std::to_string(x) + ")");
  if (!(cutoff > 0.0)) throw Error(ErrorCode::NonpositiveCutoff, "cutoff = " + std::to_string(cutoff));
  const double r = x / cutoff;
  return std::exp(-(r * r) * (r * r));
}

std::vector<double> select_scales(double lambda_max, int count) {
  if (!(lambda_max > 0.0)) throw Error(ErrorCode::NonpositiveLambdaMax, "lambda_max = " + std::to_string(lambda_max));
  if (count < 1) throw Error(ErrorCode::ConfigInvalid, "scale count must be >= 1");
  if (count == 1) return {2.0 / lambda_max};
  std::vector<double> scales(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    scales[static_cast<std::size_t>(j)] = std::pow(40.0, static_cast<double>(j) / (count - 1)) / lambda_max;
  }
  return scales;
}

KernelSpec KernelSpec::for_spectra(const std::vector<Spectrum>& spectra, int scale_count, bool tighten) {
  if (spectra.empty()) throw Error(ErrorCode::SpectrumMismatch, "no spectra");
  double lambda_max = 0.0;
  for (const auto& s : spectra) lambda_max = std::max(lambda_max, s.lambda_max());
  KernelSpec spec;
  spec.scales = select_scales(lambda_max, scale_count);
  spec.cutoff = 0.4 * lambda_max;
  spec.tighten = tighten;
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

void check_spectra(const std::vector<Spectrum>& spectra) {
  if (spectra.empty()) throw Error(ErrorCode::SpectrumMismatch, "filter bank needs at least one direction");
  const Index n = spectra.front().vertex_count();
  const Index k = spectra.front().k();
  for (const auto& s : spectra) {
    if (s.vertex_count() != n || s.k() != k || s.mass.size() != n) {
      throw Error(ErrorCode::SpectrumMismatch, "spectra differ in vertex count or K");
    }
    if ((s.mass - spectra.front().mass).cwiseAbs().maxCoeff() > 0.0) {
      throw Error(ErrorCode::SpectrumMismatch, "spectra carry different mass vectors");
    }
  }
}

DirectionFilters build_direction(const Spectrum& spectrum, const KernelSpec& kernel) {
  const Index k = spectrum.k();
  const Index n = spectrum.vertex_count();
  const Index scales = kernel.scale_count();
  DirectionFilters out;
  out.scaling_response.resize(k);
  out.responses.assign(static_cast<std::size_t>(scales), Eigen::VectorXd(k));
  for (Index i = 0; i < k; ++i) {
    const double lambda = std::max(spectrum.eigenvalues[i], 0.0);
    out.scaling_response[i] = kernel_h(lambda, kernel.cutoff);
    for (Index j = 0; j < scales; ++j) {
      out.responses[static_cast<std::size_t>(j)][i] = kernel_g(kernel.scales[static_cast<std::size_t>(j)] * lambda);
    }
  }
  if (kernel.tighten) {
    Eigen::VectorXd frame = out.scaling_response.array().square();
    for (const auto& r : out.responses) frame.array() += r.array().square();
    const Eigen::VectorXd root = frame.cwiseSqrt();
    out.scaling_response.array() /= root.array();
    for (auto& r : out.responses) r.array() /= root.array();
  }
  Eigen::VectorXd frame = out.scaling_response.array().square();
  for (const auto& r : out.responses) frame.array() += r.array().square();
  out.frame_low = frame.minCoeff();
  out.frame_high = frame.maxCoeff();

  // Mass-weighted L1 norms of the kernel columns K = Phi G Phi^T, 256 columns
  // at a time.
  constexpr Index kBlock = 256;
  const Eigen::MatrixXd& phi = spectrum.eigenvectors;
  out.l1_norms.assign(static_cast<std::size_t>(scales), Eigen::VectorXd(n));
  for (Index j = 0; j < scales; ++j) {
    const Eigen::VectorXd& g = out.responses[static_cast<std::size_t>(j)];
    Eigen::VectorXd& norms = out.l1_norms[static_cast<std::size_t>(j)];
    for (Index start = 0; start < n; start += kBlock) {
      const Index count = std::min(kBlock, n - start);
      const Eigen::MatrixXd coeff = g.asDiagonal() * phi.middleRows(start, count).transpose();
      const Eigen::MatrixXd columns = phi * coeff;
      norms.segment(start, count) = (columns.cwiseAbs().transpose() * spectrum.mass);
    }
    Index worst = 0;
    if (norms.minCoeff(&worst) < 1e-14) {
      throw Error(ErrorCode::ZeroColumnNorm, "wavelet column " + std::to_string(worst) + " of scale " +
                                                 std::to_string(j) + " has vanishing L1 norm");
    }
  }
  return out;
}

}  // namespace

FilterBank::FilterBank(std::vector<Spectrum> spectra, KernelSpec kernel)
    : spectra_(std::move(spectra)), kernel_(std::move(kernel)) {
  check_spectra(spectra_);
  if (kernel_.scales.empty()) throw Error(ErrorCode::ConfigInvalid, "kernel has no scales");
  filters_.reserve(spectra_.size());
  for (const auto& s : spectra_) filters_.push_back(build_direction(s, kernel_));
}

FilterBank::FilterBank(std::vector<Spectrum> spectra, KernelSpec kernel, std::vector<DirectionFilters> filters)
    : spectra_(std::move(spectra)), kernel_(std::move(kernel)), filters_(std::move(filters)) {
  check_spectra(spectra_);
  if (filters_.size() != spectra_.size()) throw Error(ErrorCode::SpectrumMismatch, "filter/direction count differs");
  for (const auto& f : filters_) {
    if (static_cast<Index>(f.responses.size()) != kernel_.scale_count() ||
        static_cast<Index>(f.l1_norms.size()) != kernel_.scale_count()) {
      throw Error(ErrorCode::SpectrumMismatch, "filter scale count differs from kernel");
    }
  }
}

FilterBank build_filterbank(std::vector<Spectrum> spectra, const KernelSpec& kernel) {
  return FilterBank(std::move(spectra), kernel);
}

void FilterBank::check_direction_scale(Index m, Index j) const {
  if (m < 0 || m >= direction_count() || j < 0 || j >= scale_count()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "filter (" + std::to_string(m) + ", " + std::to_string(j) + ") outside " +
                    std::to_string(direction_count()) + " x " + std::to_string(scale_count()));
  }
}

Eigen::VectorXd FilterBank::row_scale(Index m, Index j, bool normalized) const {
  check_direction_scale(m, j);
  if (!normalized) return Eigen::VectorXd::Ones(vertex_count());
  return filters(m).l1_norms[static_cast<std::size_t>(j)].cwiseInverse();
}

Eigen::MatrixXd FilterBank::project(Index m, const Eigen::MatrixXd& x) const {
  if (x.rows() != vertex_count()) {
    throw Error(ErrorCode::ShapeMismatch,
                "feature map has " + std::to_string(x.rows()) + " rows, bank has " + std::to_string(vertex_count()));
  }
  return spectrum(m).eigenvectors.transpose() * (mass().asDiagonal() * x);
}

Eigen::MatrixXd FilterBank::filter_projected(Index m, Index j, const Eigen::MatrixXd& z, bool normalized) const {
  const Eigen::VectorXd scale = row_scale(m, j, normalized);
  const Eigen::VectorXd& g = filters(m).responses[static_cast<std::size_t>(j)];
  Eigen::MatrixXd out = spectrum(m).eigenvectors * (g.asDiagonal() * z);
  out.array().colwise() *= scale.array();
  return out;
}

Eigen::MatrixXd FilterBank::adjoint_projected(Index m, Index j, const Eigen::MatrixXd& y, bool normalized) const {
  if (y.rows() != vertex_count()) throw Error(ErrorCode::ShapeMismatch, "adjoint input row count");
  const Eigen::VectorXd scale = row_scale(m, j, normalized);
  const Eigen::VectorXd& g = filters(m).responses[static_cast<std::size_t>(j)];
  return g.asDiagonal() * (spectrum(m).eigenvectors.transpose() * (scale.asDiagonal() * y));
}

Eigen::MatrixXd FilterBank::lift(Index m, const Eigen::MatrixXd& z) const {
  return mass().asDiagonal() * (spectrum(m).eigenvectors * z);
}

Eigen::VectorXd wavelet_at(const FilterBank& bank, Index direction, Index scale, Index vertex) {
  bank.check_direction_scale(direction, scale);
  if (vertex < 0 || vertex >= bank.vertex_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "vertex " + std::to_string(vertex));
  }
  const Spectrum& s = bank.spectrum(direction);
  const Eigen::VectorXd& g = bank.filters(direction).responses[static_cast<std::size_t>(scale)];
  const Eigen::VectorXd coeff = g.cwiseProduct(s.eigenvectors.row(vertex).transpose());
  return s.mass[vertex] * (s.eigenvectors * coeff);
}

Eigen::VectorXd scaling_at(const FilterBank& bank, Index direction, Index vertex) {
  if (direction < 0 || direction >= bank.direction_count() || vertex < 0 || vertex >= bank.vertex_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "scaling function index");
  }
  const Spectrum& s = bank.spectrum(direction);
  const Eigen::VectorXd coeff = bank.filters(direction).scaling_response.cwiseProduct(s.eigenvectors.row(vertex).transpose());
  return s.mass[vertex] * (s.eigenvectors * coeff);
}

WaveletCoefficients analyze(const FilterBank& bank, const Eigen::VectorXd& f) {
  if (f.size() != bank.vertex_count()) {
    throw Error(ErrorCode::LengthMismatch,
                "signal length " + std::to_string(f.size()) + " vs " + std::to_string(bank.vertex_count()));
  }
  const Index dirs = bank.direction_count();
  const Index scales = bank.scale_count();
  WaveletCoefficients out;
  out.wavelet.resize(static_cast<std::size_t>(dirs));
  out.scaling.resize(bank.vertex_count(), dirs);
  out.projections.resize(bank.k(), dirs);
  const Eigen::VectorXd af = bank.mass().cwiseProduct(f);
  for (Index m = 0; m < dirs; ++m) {
    const Spectrum& s = bank.spectrum(m);
    const DirectionFilters& filt = bank.filters(m);
    const Eigen::VectorXd sigma = s.eigenvectors.transpose() * af;
    out.projections.col(m) = sigma;
    auto& w = out.wavelet[static_cast<std::size_t>(m)];
    w.resize(bank.vertex_count(), scales);
    for (Index j = 0; j < scales; ++j) {
      w.col(j) = s.mass.cwiseProduct(s.eigenvectors * filt.responses[static_cast<std::size_t>(j)].cwiseProduct(sigma));
    }
    out.scaling.col(m) = s.mass.cwiseProduct(s.eigenvectors * filt.scaling_response.cwiseProduct(sigma));
  }
  return out;
}

Eigen::VectorXd synthesize(const FilterBank& bank, const WaveletCoefficients& coeffs, Index direction) {
  if (!bank.kernel().tighten) throw Error(ErrorCode::NotTightFrame, "synthesis requires a tightened filter bank");
  if (direction < 0 || direction >= bank.direction_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "direction " + std::to_string(direction));
  }
  const Spectrum& s = bank.spectrum(direction);
  const DirectionFilters& filt = bank.filters(direction);
  const auto& w = coeffs.wavelet.at(static_cast<std::size_t>(direction));
  if (w.rows() != bank.vertex_count() || w.cols() != bank.scale_count()) {
    throw Error(ErrorCode::ShapeMismatch, "coefficient shape does not match the bank");
  }
  // sum_v a(v)^-1 c(v) Psi_{t,v} = Phi G Phi^T c
  Eigen::VectorXd spectral = filt.scaling_response.cwiseProduct(s.eigenvectors.transpose() * coeffs.scaling.col(direction));
  for (Index j = 0; j < bank.scale_count(); ++j) {
    spectral += filt.responses[static_cast<std::size_t>(j)].cwiseProduct(s.eigenvectors.transpose() * w.col(j));
  }
  return s.eigenvectors * spectral;
}

Eigen::MatrixXd apply_filter(const FilterBank& bank, Index direction, Index scale, const Eigen::MatrixXd& x,
                             bool normalized) {
  if (x.rows() != bank.vertex_count()) {
    throw Error(ErrorCode::ShapeMismatch,
                "feature map has " + std::to_string(x.rows()) + " rows, bank has " + std::to_string(bank.vertex_count()));
  }
  return bank.filter_projected(direction, scale, bank.project(direction, x), normalized);
}

Eigen::MatrixXd adjoint_apply_filter(const FilterBank& bank, Index direction, Index scale, const Eigen::MatrixXd& y,
                                     bool normalized) {
  return bank.lift(direction, bank.adjoint_projected(direction, scale, y, normalized));
}

Eigen::VectorXd frame_function(const FilterBank& bank, Index direction) {
  const DirectionFilters& filt = bank.filters(direction);
  Eigen::VectorXd frame = filt.scaling_response.array().square();
  for (const auto& r : filt.responses) frame.array() += r.array().square();
  return frame;
}

}  // namespace meshwave
