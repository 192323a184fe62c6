#pragma once

#include "meshwave/spectrum.hpp"

#include <Eigen/Core>

#include <vector>

namespace meshwave {

// Band-pass Mexican-hat magnitude profile g(x) = e x^2 exp(-x^2): g(0) = 0,
// single peak g(1) = 1.
double kernel_g(double x);

// Low-pass scaling kernel h(x) = exp(-(x / cutoff)^4).
double kernel_h(double x, double cutoff);

// Log-spaced scales whose band-pass peaks (at lambda = 1/t) cover
// [lambda_max / 40, lambda_max]; t_1 = 2 / lambda_max when J = 1.
std::vector<double> select_scales(double lambda_max, int count);

struct KernelSpec {
  std::vector<double> scales;  // t_1 < ... < t_J
  double cutoff = 1.0;         // scaling kernel cutoff
  bool tighten = false;        // divide responses pointwise by sqrt(h^2 + sum_j g^2)

  Index scale_count() const noexcept { return static_cast<Index>(scales.size()); }

  // Scales from select_scales and cutoff = 0.4 * lambda_max, with lambda_max the
  // largest computed eigenvalue over all spectra.
  static KernelSpec for_spectra(const std::vector<Spectrum>& spectra, int scale_count, bool tighten);
};

// Per-direction filter data.
struct DirectionFilters {
  std::vector<Eigen::VectorXd> responses;    // J vectors of length K: g(t_j lambda_k) (tightened if configured)
  Eigen::VectorXd scaling_response;          // K: h(lambda_k)
  std::vector<Eigen::VectorXd> l1_norms;     // J vectors of length N: sum_u a(u) |K_j(u, v)|
  double frame_low = 0.0;
  double frame_high = 0.0;
};

// Mexican-hat wavelet filter bank over M directional spectra and J scales.
//
// The localized wavelet at v is
//   Psi_{t,v}(u) = sum_k a(v) g(t lambda_k) phi_k(v) phi_k(u) = a(v) K_t(u, v).
// The filtering operator used by the network is the mass-weighted one,
//   (Psi^T X)(v) = sum_u a(u) K_t(v, u) X(u),   Psi^T X = Phi G Phi^T A X,
// i.e. Psi = A Phi G Phi^T, whose columns have L1 norms
//   n_t(v) = sum_u a(u) |K_t(u, v)|.
// Neither N x N matrix is stored; everything goes through the truncated
// eigenbasis at O(N K D) cost.
class FilterBank {
 public:
  FilterBank() = default;
  FilterBank(std::vector<Spectrum> spectra, KernelSpec kernel);

  // Reassembles a bank from cached filter data (no L1 recomputation).
  FilterBank(std::vector<Spectrum> spectra, KernelSpec kernel, std::vector<DirectionFilters> filters);

  Index direction_count() const noexcept { return static_cast<Index>(spectra_.size()); }
  Index scale_count() const noexcept { return kernel_.scale_count(); }
  Index filter_count() const noexcept { return direction_count() * scale_count(); }
  Index vertex_count() const noexcept { return spectra_.empty() ? 0 : spectra_.front().vertex_count(); }
  Index k() const noexcept { return spectra_.empty() ? 0 : spectra_.front().k(); }

  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Spectrum& spectrum(Index m) const { return spectra_.at(static_cast<std::size_t>(m)); }
  const std::vector<Spectrum>& spectra() const noexcept { return spectra_; }
  const DirectionFilters& filters(Index m) const { return filters_.at(static_cast<std::size_t>(m)); }
  const std::vector<DirectionFilters>& all_filters() const noexcept { return filters_; }
  const Eigen::VectorXd& mass() const { return spectra_.front().mass; }

  // Phi_m^T A X (K x D); shared by every scale of a direction.
  Eigen::MatrixXd project(Index m, const Eigen::MatrixXd& x) const;

  // Psi_{m,t_j}^T X given Z = Phi_m^T A X: Phi G Z, rows divided by the L1
  // norms when normalized.
  Eigen::MatrixXd filter_projected(Index m, Index j, const Eigen::MatrixXd& z, bool normalized) const;

  // Adjoint pieces: G Phi^T (N^-1 Y) in spectral coordinates, and the lift
  // A Phi Z back to vertices.
  Eigen::MatrixXd adjoint_projected(Index m, Index j, const Eigen::MatrixXd& y, bool normalized) const;
  Eigen::MatrixXd lift(Index m, const Eigen::MatrixXd& z) const;

  // Row scaling applied after Phi G Z: 1, or 1 / n_t(v) when normalized.
  Eigen::VectorXd row_scale(Index m, Index j, bool normalized) const;

 private:
  void check_direction_scale(Index m, Index j) const;
  friend Eigen::VectorXd wavelet_at(const FilterBank&, Index, Index, Index);

  std::vector<Spectrum> spectra_;
  KernelSpec kernel_;
  std::vector<DirectionFilters> filters_;
};

FilterBank build_filterbank(std::vector<Spectrum> spectra, const KernelSpec& kernel);

// Explicit localized wavelet Psi_{m,t_j,v} (length N, un-normalized).
Eigen::VectorXd wavelet_at(const FilterBank& bank, Index direction, Index scale, Index vertex);

// Same for the scaling function xi_{m,v}.
Eigen::VectorXd scaling_at(const FilterBank& bank, Index direction, Index vertex);

struct WaveletCoefficients {
  std::vector<Eigen::MatrixXd> wavelet;  // per direction, N x J: W_f(m, t_j, v)
  Eigen::MatrixXd scaling;               // N x M: S_f(m, v)
  Eigen::MatrixXd projections;           // K x M: sigma_{m,k} = <f, phi_{m,k}>_A
};

WaveletCoefficients analyze(const FilterBank& bank, const Eigen::VectorXd& f);

// f^ = sum_j sum_v a(v)^-1 W_f(m, t_j, v) Psi_{m,t_j,v} + sum_v a(v)^-1 S_f(m, v) xi_{m,v}.
// Requires a tight bank; exact on the span of the computed eigenvectors.
Eigen::VectorXd synthesize(const FilterBank& bank, const WaveletCoefficients& coeffs, Index direction);

// Psi_{m,t_j}^T X (or the L1-normalized variant).
Eigen::MatrixXd apply_filter(const FilterBank& bank, Index direction, Index scale, const Eigen::MatrixXd& x,
                             bool normalized);

// Adjoint of apply_filter under the Frobenius inner product.
Eigen::MatrixXd adjoint_apply_filter(const FilterBank& bank, Index direction, Index scale, const Eigen::MatrixXd& y,
                                     bool normalized);

// Frame function h(lambda)^2 + sum_j g(t_j lambda)^2 at each sampled eigenvalue.
Eigen::VectorXd frame_function(const FilterBank& bank, Index direction);

}  // namespace meshwave
