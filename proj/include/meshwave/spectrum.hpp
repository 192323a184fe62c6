#pragma once

#include "meshwave/operators.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace meshwave {

// First K generalized eigenpairs W phi = lambda A phi, ascending, with
// mass-orthonormal eigenvectors.
struct Spectrum {
  Eigen::VectorXd eigenvalues;   // K, non-decreasing
  Eigen::MatrixXd eigenvectors;  // N x K, columns phi_k
  Eigen::VectorXd mass;          // N
  AnisoConfig config;
  std::uint64_t mesh_hash = 0;

  Index vertex_count() const noexcept { return eigenvectors.rows(); }
  Index k() const noexcept { return eigenvalues.size(); }
  double lambda_max() const { return eigenvalues[eigenvalues.size() - 1]; }
};

struct EigsOptions {
  int block_size = 8;
  double tolerance = 1e-10;      // target residual for early termination
  double accept_residual = 1e-8; // residual accepted when the iteration cap is hit
  int max_dimension_factor = 20; // basis size cap = factor * K
  std::uint64_t seed = 0x5eed1234abcdULL;
};

struct EigsReport {
  int basis_dimension = 0;
  int restarts = 0;
  double max_residual = 0.0;
};

// Smallest-K eigenpairs via block shift-invert Lanczos in the A-inner product
// with full reorthogonalization. The shift is
//   sigma = -1e-6 * mean(diag W) / mean(A),
// so W - sigma A is positive definite and factored once with sparse LDL^T.
// Eigenvectors are sign-canonicalized (largest-|.| component positive).
Spectrum solve_eigs(const OperatorPair& ops, int k, const EigsOptions& options = {}, EigsReport* report = nullptr);

// || W phi - lambda A phi ||_2 / (max(lambda, 1) ||phi||_2) per computed pair.
Eigen::VectorXd eigen_residuals(const OperatorPair& ops, const Spectrum& spectrum);

// max_ij | phi_i^T A phi_j - delta_ij |
double mass_orthonormality_error(const Spectrum& spectrum);

// Largest-magnitude component made positive (first index on ties).
void canonicalize_signs(Eigen::MatrixXd& vectors);

}  // namespace meshwave
