#include "meshwave/spectrum.hpp"

#include "meshwave/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace meshwave {

namespace {

// Growable A-orthonormal basis with the projected stiffness Q^T W Q kept
// up to date as columns are appended.
class KrylovBasis {
 public:
  KrylovBasis(const SparseMatrix& stiffness, const Eigen::VectorXd& mass, Index capacity)
      : stiffness_(stiffness), mass_(mass), capacity_(capacity) {
    q_.resize(mass.size(), std::min<Index>(capacity, 64));
    projected_.resize(q_.cols(), q_.cols());
  }

  Index size() const noexcept { return m_; }
  Index capacity() const noexcept { return capacity_; }
  bool full() const noexcept { return m_ >= capacity_; }
  auto columns(Index start, Index count) const { return q_.middleCols(start, count); }
  auto basis() const { return q_.leftCols(m_); }
  auto projected() const { return projected_.topLeftCorner(m_, m_); }

  // A-orthogonalizes the block against the basis (two passes), then
  // orthonormalizes it column by column. Columns whose remaining A-norm falls
  // below `drop_tol` times their incoming norm are dropped. Returns the
  // number of columns appended.
  Index append(Eigen::MatrixXd block, double drop_tol) {
    const Eigen::VectorXd incoming = (block.array().square().colwise() * mass_.array()).colwise().sum().sqrt();
    for (int pass = 0; pass < 2 && m_ > 0; ++pass) {
      const Eigen::MatrixXd coeff = basis().transpose() * (mass_.asDiagonal() * block);
      block.noalias() -= basis() * coeff;
    }
    const Index first_new = m_;
    for (Index c = 0; c < block.cols() && !full(); ++c) {
      Eigen::VectorXd u = block.col(c);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index d = first_new; d < m_; ++d) {
          u -= q_.col(d) * q_.col(d).dot(mass_.cwiseProduct(u));
        }
      }
      const double norm = std::sqrt(u.dot(mass_.cwiseProduct(u)));
      if (!(norm > drop_tol * incoming[c]) || norm == 0.0) continue;
      push(u / norm);
    }
    return m_ - first_new;
  }

 private:
  void push(const Eigen::VectorXd& q) {
    if (m_ == q_.cols()) {
      const Index grown = std::min<Index>(capacity_, 2 * q_.cols());
      q_.conservativeResize(Eigen::NoChange, grown);
      projected_.conservativeResize(grown, grown);
    }
    q_.col(m_) = q;
    const Eigen::VectorXd wq = stiffness_ * q;
    const Eigen::VectorXd row = q_.leftCols(m_ + 1).transpose() * wq;
    projected_.block(0, m_, m_ + 1, 1) = row;
    projected_.block(m_, 0, 1, m_ + 1) = row.transpose();
    ++m_;
  }

  const SparseMatrix& stiffness_;
  const Eigen::VectorXd& mass_;
  Index capacity_;
  Index m_ = 0;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd projected_;
};

Eigen::MatrixXd random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd block(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) block(r, c) = dist(rng);
  }
  return block;
}

struct RitzPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd residuals;
};

RitzPairs rayleigh_ritz(const KrylovBasis& basis, const OperatorPair& ops, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(basis.projected());
  RitzPairs out;
  out.values = eig.eigenvalues().head(k);
  out.vectors = basis.basis() * eig.eigenvectors().leftCols(k);
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd y = out.vectors.col(i);
    const Eigen::VectorXd r = ops.stiffness * y - out.values[i] * ops.mass.cwiseProduct(y);
    out.residuals[i] = r.norm() / (std::max(out.values[i], 1.0) * y.norm());
  }
  return out;
}

}  // namespace

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

Spectrum solve_eigs(const OperatorPair& ops, int k, const EigsOptions& options, EigsReport* report) {
  const Index n = ops.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::KTooLarge, "requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) +
                                          "-vertex operator");
  }
  const Eigen::VectorXd& mass = ops.mass;
  const double sigma = -1e-6 * ops.stiffness.diagonal().mean() / mass.mean();

  SparseMatrix shifted = ops.stiffness;
  shifted.diagonal() -= sigma * mass;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success || (factor.vectorD().array() <= 0.0).any()) {
    throw Error(ErrorCode::FactorizationFailed, "LDL^T of W - sigma A failed (sigma = " + std::to_string(sigma) + ")");
  }

  const Index block = std::min<Index>(options.block_size, n);
  const Index capacity =
      std::min<Index>(n, std::max<Index>(static_cast<Index>(options.max_dimension_factor) * k, k + 2 * block));
  const Index check_interval = std::max<Index>(2 * block, k / 4);
  constexpr double kDropTol = 1e-10;

  std::mt19937_64 rng(options.seed);
  KrylovBasis basis(ops.stiffness, mass, capacity);
  EigsReport local;

  Index processed = 0;
  Index next_check = std::min<Index>(capacity, k + block);
  RitzPairs ritz;
  bool converged = false;

  while (true) {
    if (processed == basis.size() && !basis.full()) {
      // Krylov space exhausted (or start): continue from fresh random directions.
      if (basis.size() > 0) ++local.restarts;
      basis.append(random_block(n, block, rng), kDropTol);
    }
    if (processed < basis.size()) {
      const Index count = std::min<Index>(block, basis.size() - processed);
      Eigen::MatrixXd next = factor.solve(mass.asDiagonal() * basis.columns(processed, count));
      processed += count;
      basis.append(std::move(next), kDropTol);
    }

    const bool exhausted = basis.full() && processed == basis.size();
    if (basis.size() >= next_check || exhausted) {
      ritz = rayleigh_ritz(basis, ops, k);
      if (ritz.residuals.maxCoeff() < options.tolerance) {
        converged = true;
        break;
      }
      next_check = basis.size() + check_interval;
    }
    if (exhausted) break;
  }

  local.basis_dimension = static_cast<int>(basis.size());
  local.max_residual = ritz.residuals.maxCoeff();
  if (report) *report = local;
  // A complete basis makes the Ritz pairs exact up to rounding.
  if (!converged && basis.size() < n && local.max_residual >= options.accept_residual) {
    std::ostringstream msg;
    msg << "basis dimension " << basis.size() << " reached; max residual " << local.max_residual;
    throw Error(ErrorCode::NotConverged, msg.str());
  }

  Spectrum spectrum;
  spectrum.eigenvalues = ritz.values;
  spectrum.eigenvectors = std::move(ritz.vectors);
  canonicalize_signs(spectrum.eigenvectors);
  spectrum.mass = mass;
  spectrum.config = ops.config;
  spectrum.mesh_hash = ops.mesh_hash;
  return spectrum;
}

Eigen::VectorXd eigen_residuals(const OperatorPair& ops, const Spectrum& spectrum) {
  Eigen::VectorXd res(spectrum.k());
  for (Index i = 0; i < spectrum.k(); ++i) {
    const Eigen::VectorXd y = spectrum.eigenvectors.col(i);
    const double lambda = spectrum.eigenvalues[i];
    res[i] = (ops.stiffness * y - lambda * ops.mass.cwiseProduct(y)).norm() / (std::max(lambda, 1.0) * y.norm());
  }
  return res;
}

double mass_orthonormality_error(const Spectrum& spectrum) {
  const Eigen::MatrixXd gram =
      spectrum.eigenvectors.transpose() * spectrum.mass.asDiagonal() * spectrum.eigenvectors;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace meshwave
