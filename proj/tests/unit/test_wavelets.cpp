#include "support.hpp"

#include "meshwave/wavelets.hpp"

#include <Eigen/QR>
#include <doctest.h>

using namespace meshwave;
using namespace meshwave::testing;

namespace {

std::vector<Spectrum> spectra_of(const TriMesh& m, int directions, double alpha, int k) {
  const PrincipalFrames fr = estimate_frames(m);
  std::vector<Spectrum> out;
  for (int d = 0; d < directions; ++d) {
    out.push_back(solve_eigs(assemble_albo(m, fr, AnisoConfig::direction(alpha, d, directions)), k));
  }
  return out;
}

FilterBank bank_of(const TriMesh& m, int directions, int scales, bool tighten, int k, double alpha = 50.0) {
  std::vector<Spectrum> s = spectra_of(m, directions, alpha, k);
  const KernelSpec kernel = KernelSpec::for_spectra(s, scales, tighten);
  return build_filterbank(std::move(s), kernel);
}

// Explicit Psi with Psi(u, v) = sum_k a(v) g(t lambda_k) phi_k(u) phi_k(v),
// using the bank's (possibly tightened) responses.
Eigen::MatrixXd dense_psi(const FilterBank& bank, Index m, Index j) {
  const Spectrum& s = bank.spectrum(m);
  const Eigen::VectorXd& g = bank.filters(m).responses[static_cast<std::size_t>(j)];
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(s.vertex_count(), s.vertex_count());
  for (Index v = 0; v < psi.cols(); ++v) {
    for (Index u = 0; u < psi.rows(); ++u) {
      double acc = 0.0;
      for (Index k = 0; k < s.k(); ++k) acc += g[k] * s.eigenvectors(u, k) * s.eigenvectors(v, k);
      psi(u, v) = s.mass[v] * acc;
    }
  }
  return psi;
}

// Filtering matrix P = A K with K(u, v) = Psi_{t,v}(u) / a(v), so that the
// network filter is P^T X.
Eigen::MatrixXd dense_operator(const FilterBank& bank, Index m, Index j) {
  const Eigen::VectorXd& a = bank.mass();
  return a.asDiagonal() * dense_psi(bank, m, j) * a.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd l1_normalized(const Eigen::MatrixXd& p) {
  return p * p.cwiseAbs().colwise().sum().cwiseInverse().asDiagonal();
}

const TriMesh& mesh30() {
  static const TriMesh m = jitter(grid(5, 4, 1.2, 1.0), 0.03, 17);
  return m;
}

}  // namespace

TEST_CASE("band-pass kernel") {
  CHECK(kernel_g(0.0) == 0.0);
  CHECK(kernel_g(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(kernel_g(2.0) - 4.0 * std::exp(-3.0)) < 1e-15);
  CHECK(std::abs(kernel_g(2.0) - 0.199148) < 1e-6);
  for (double x : {0.1, 0.5, 0.9, 1.1, 3.0}) {
    CHECK(kernel_g(x) > 0.0);
    CHECK(kernel_g(x) < 1.0);
  }
  MW_CHECK_THROWS_CODE(kernel_g(-1.0), ErrorCode::NegativeInput);
}

TEST_CASE("scaling kernel") {
  CHECK(kernel_h(0.0, 2.0) == 1.0);
  CHECK(std::abs(kernel_h(2.0, 2.0) - std::exp(-1.0)) < 1e-15);
  CHECK(kernel_h(20.0, 2.0) < 1e-300);
  double prev = 1.0;
  for (double x = 0.0; x < 5.0; x += 0.25) {
    CHECK(kernel_h(x, 1.5) <= prev);
    prev = kernel_h(x, 1.5);
  }
  MW_CHECK_THROWS_CODE(kernel_h(-1.0, 1.0), ErrorCode::NegativeInput);
  MW_CHECK_THROWS_CODE(kernel_h(1.0, 0.0), ErrorCode::NonpositiveCutoff);
}

TEST_CASE("scale selection") {
  const std::vector<double> two = select_scales(10.0, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(0.1));
  CHECK(two[1] == doctest::Approx(4.0));
  const std::vector<double> one = select_scales(10.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.2));
  const std::vector<double> four = select_scales(3.7, 4);
  for (std::size_t j = 0; j < four.size(); ++j) {
    CHECK(four[j] > 0);
    if (j) CHECK(four[j] > four[j - 1]);
  }
  CHECK(1.0 / four.front() == doctest::Approx(3.7));
  CHECK(1.0 / four.back() == doctest::Approx(3.7 / 40));
  MW_CHECK_THROWS_CODE(select_scales(0.0, 3), ErrorCode::NonpositiveLambdaMax);
}

TEST_CASE("filter bank shape") {
  const FilterBank bank = bank_of(icosphere(2), 4, 4, false, 60);
  CHECK(bank.filter_count() == 16);
  CHECK(bank.direction_count() == 4);
  CHECK(bank.scale_count() == 4);
  CHECK(bank.k() == 60);
  CHECK(bank.kernel().cutoff == doctest::Approx(0.4 * bank.spectrum(0).lambda_max()).epsilon(0.5));
  for (Index m = 0; m < 4; ++m) {
    for (const Eigen::VectorXd& n : bank.filters(m).l1_norms) CHECK((n.array() > 0).all());
  }
}

TEST_CASE("tight frame function") {
  const FilterBank bank = bank_of(jitter(icosphere(2), 0.03, 3), 1, 4, true, 40);
  const Eigen::VectorXd frame = frame_function(bank, 0);
  CHECK((frame.array() - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(std::abs(bank.filters(0).frame_low - 1.0) < 1e-10);
  CHECK(std::abs(bank.filters(0).frame_high - 1.0) < 1e-10);
}

TEST_CASE("frame bounds without tightening") {
  const FilterBank bank = bank_of(jitter(icosphere(2), 0.03, 3), 2, 4, false, 40);
  for (Index m = 0; m < 2; ++m) {
    const Eigen::VectorXd frame = frame_function(bank, m);
    CHECK(bank.filters(m).frame_low == doctest::Approx(frame.minCoeff()));
    CHECK(bank.filters(m).frame_high == doctest::Approx(frame.maxCoeff()));
    const Spectrum& s = bank.spectrum(m);
    for (Index k = 0; k < s.k(); ++k) {
      double g = std::pow(kernel_h(std::max(s.eigenvalues[k], 0.0), bank.kernel().cutoff), 2);
      for (double t : bank.kernel().scales) g += std::pow(kernel_g(std::max(t * s.eigenvalues[k], 0.0)), 2);
      CHECK(frame[k] == doctest::Approx(g).epsilon(1e-12));
    }
  }
}

TEST_CASE("factored wavelets equal the brute-force sum") {
  const TriMesh& m = mesh30();
  REQUIRE(m.vertex_count() == 30);
  const FilterBank bank = bank_of(m, 2, 3, false, 30);
  for (Index d = 0; d < 2; ++d) {
    for (Index j = 0; j < 3; ++j) {
      const Eigen::MatrixXd psi = dense_psi(bank, d, j);
      for (Index v = 0; v < 30; ++v) CHECK((wavelet_at(bank, d, j, v) - psi.col(v)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("apply_filter equals the dense oracle on all 16 filters") {
  const FilterBank bank = bank_of(mesh30(), 4, 4, false, 30);
  const Eigen::MatrixXd x = random_matrix(30, 5, 1);
  for (Index d = 0; d < 4; ++d) {
    for (Index j = 0; j < 4; ++j) {
      const Eigen::MatrixXd p = dense_operator(bank, d, j);
      const Eigen::MatrixXd pbar = l1_normalized(p);
      CHECK((apply_filter(bank, d, j, x, false) - p.transpose() * x).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((apply_filter(bank, d, j, x, true) - pbar.transpose() * x).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((pbar.cwiseAbs().colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
      const Eigen::VectorXd l1 = p.cwiseAbs().colwise().sum().transpose();
      CHECK((bank.filters(d).l1_norms[static_cast<std::size_t>(j)] - l1).cwiseAbs().maxCoeff() < 1e-12 * l1.maxCoeff());
    }
  }
}

TEST_CASE("L1 normalizers on a truncated spectrum") {
  const FilterBank bank = bank_of(jitter(icosphere(3), 0.01, 2), 1, 4, false, 40);
  const Eigen::VectorXd& a = bank.mass();
  for (Index j = 0; j < 4; ++j) {
    for (Index v : {0, 17, 300, 641}) {
      const Eigen::VectorXd w = wavelet_at(bank, 0, j, v);
      CHECK(a.dot(w.cwiseAbs()) / a[v] / bank.filters(0).l1_norms[static_cast<std::size_t>(j)][v] ==
            doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("apply_filter annihilates constants and is linear") {
  const FilterBank bank = bank_of(jitter(icosphere(2), 0.03, 5), 2, 4, false, 30);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(bank.vertex_count(), 3, 2.5);
  const Eigen::MatrixXd x = random_matrix(bank.vertex_count(), 3, 2);
  const Eigen::MatrixXd y = random_matrix(bank.vertex_count(), 3, 3);
  for (Index d = 0; d < 2; ++d) {
    for (Index j = 0; j < 4; ++j) {
      for (bool normalized : {false, true}) {
        CHECK(apply_filter(bank, d, j, ones, normalized).cwiseAbs().maxCoeff() < 1e-9);
        const Eigen::MatrixXd lhs = apply_filter(bank, d, j, 0.7 * x - 1.3 * y, normalized);
        const Eigen::MatrixXd rhs =
            0.7 * apply_filter(bank, d, j, x, normalized) - 1.3 * apply_filter(bank, d, j, y, normalized);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("adjoint identity") {
  const FilterBank bank = bank_of(jitter(icosphere(2), 0.03, 5), 2, 3, false, 30);
  const Eigen::MatrixXd x = random_matrix(bank.vertex_count(), 4, 5);
  const Eigen::MatrixXd y = random_matrix(bank.vertex_count(), 4, 6);
  for (Index d = 0; d < 2; ++d) {
    for (Index j = 0; j < 3; ++j) {
      for (bool normalized : {false, true}) {
        const double lhs = (apply_filter(bank, d, j, x, normalized).array() * y.array()).sum();
        const double rhs = (x.array() * adjoint_apply_filter(bank, d, j, y, normalized).array()).sum();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("eigenvector inner products recover the responses") {
  const FilterBank bank = bank_of(mesh30(), 1, 4, false, 12);
  const Spectrum& s = bank.spectrum(0);
  for (Index j = 0; j < 4; ++j) {
    const Eigen::VectorXd& g = bank.filters(0).responses[static_cast<std::size_t>(j)];
    for (Index v : {0, 7, 29}) {
      const Eigen::VectorXd w = wavelet_at(bank, 0, j, v);
      for (Index k = 0; k < s.k(); ++k) {
        const double ip = s.eigenvectors.col(k).dot(s.mass.cwiseProduct(w));
        CHECK(std::abs(ip - s.mass[v] * g[k] * s.eigenvectors(v, k)) < 1e-10);
      }
      // no component along the constant mode
      CHECK(std::abs(Eigen::VectorXd::Ones(30).dot(s.mass.cwiseProduct(w))) < 1e-10);
    }
  }
}

TEST_CASE("wavelets are invariant to rigid motion") {
  const TriMesh m = jitter(icosphere(2), 0.04, 8);
  const TriMesh moved = transformed(m, rotation(0.5, 0.1, 2.2), Vec3(1, 1, 1));
  const FilterBank a = bank_of(m, 1, 4, false, 20, 0.0);
  const FilterBank b = bank_of(moved, 1, 4, false, 20, 0.0);
  for (Index j = 0; j < 4; ++j) {
    for (Index v : {0, 50, 161}) CHECK((wavelet_at(a, 0, j, v) - wavelet_at(b, 0, j, v)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("wavelets are invariant to mixing inside an eigenvalue cluster") {
  // Icosphere LBO: l = 1 (3-fold) and l = 2 (5-fold) clusters are exact by symmetry.
  const TriMesh m = icosphere(2);
  std::vector<Spectrum> spectra{solve_eigs(assemble_lbo(m), 9)};
  Spectrum mixed = spectra[0];
  const Eigen::MatrixXd q3 = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(3, 3, 1)).householderQ();
  const Eigen::MatrixXd q5 = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(5, 5, 2)).householderQ();
  mixed.eigenvectors.middleCols(1, 3) = spectra[0].eigenvectors.middleCols(1, 3) * q3;
  mixed.eigenvectors.middleCols(4, 5) = spectra[0].eigenvectors.middleCols(4, 5) * q5;
  const KernelSpec kernel{{0.1, 0.3}, 4.0, false};
  const FilterBank a = build_filterbank(spectra, kernel);
  const FilterBank b = build_filterbank({mixed}, kernel);
  CHECK((a.spectrum(0).eigenvectors - b.spectrum(0).eigenvectors).cwiseAbs().maxCoeff() > 1e-3);
  for (Index j = 0; j < 2; ++j) {
    for (Index v : {0, 11, 100}) CHECK((wavelet_at(a, 0, j, v) - wavelet_at(b, 0, j, v)).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd x = random_matrix(m.vertex_count(), 2, 4);
    CHECK((apply_filter(a, 0, j, x, true) - apply_filter(b, 0, j, x, true)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("analysis of eigenvectors and constants") {
  const FilterBank bank = bank_of(mesh30(), 1, 4, false, 15);
  const Spectrum& s = bank.spectrum(0);
  for (Index k : {1, 4, 14}) {
    const WaveletCoefficients c = analyze(bank, s.eigenvectors.col(k));
    for (Index j = 0; j < 4; ++j) {
      const Eigen::VectorXd expect =
          s.mass.cwiseProduct(s.eigenvectors.col(k)) * bank.filters(0).responses[static_cast<std::size_t>(j)][k];
      CHECK((c.wavelet[0].col(j) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(s.k());
    unit[k] = 1.0;
    CHECK((c.projections.col(0) - unit).cwiseAbs().maxCoeff() < 1e-10);
  }
  const WaveletCoefficients c = analyze(bank, Eigen::VectorXd::Constant(30, 3.0));
  CHECK(c.wavelet[0].cwiseAbs().maxCoeff() < 1e-10);
  CHECK(c.scaling.cwiseAbs().maxCoeff() > 1e-3);
  MW_CHECK_THROWS_CODE(analyze(bank, Eigen::VectorXd::Zero(29)), ErrorCode::LengthMismatch);
}

TEST_CASE("analysis matches the dense oracle") {
  const FilterBank bank = bank_of(mesh30(), 2, 3, false, 20);
  const Eigen::VectorXd f = random_matrix(30, 1, 9).col(0);
  const WaveletCoefficients c = analyze(bank, f);
  REQUIRE(c.wavelet.size() == 2);
  CHECK(c.scaling.rows() == 30);
  CHECK(c.scaling.cols() == 2);
  for (Index d = 0; d < 2; ++d) {
    for (Index j = 0; j < 3; ++j) {
      // W_f(v) = <f, Psi_{t,v}>_A
      const Eigen::VectorXd expect = dense_psi(bank, d, j).transpose() * bank.mass().cwiseProduct(f);
      CHECK((c.wavelet[d].col(j) - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("Parseval reconstruction") {
  const TriMesh m = jitter(icosphere(2), 0.03, 12);
  const FilterBank bank = bank_of(m, 2, 4, true, 40);
  for (Index d = 0; d < 2; ++d) {
    const Spectrum& s = bank.spectrum(d);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Eigen::VectorXd f = s.eigenvectors * random_matrix(s.k(), 1, 100 + seed).col(0);
      const Eigen::VectorXd r = synthesize(bank, analyze(bank, f), d);
      CHECK((r - f).norm() / f.norm() < 1e-6);
    }
    const Eigen::VectorXd phi0 = s.eigenvectors.col(0);
    const WaveletCoefficients c = analyze(bank, phi0);
    CHECK((synthesize(bank, c, d) - phi0).cwiseAbs().maxCoeff() < 1e-8);
    // energy outside the span: A-orthogonal projection
    const Eigen::VectorXd g = random_matrix(m.vertex_count(), 1, 77).col(0);
    const Eigen::VectorXd proj = s.eigenvectors * (s.eigenvectors.transpose() * s.mass.cwiseProduct(g));
    CHECK((synthesize(bank, analyze(bank, g), d) - proj).norm() / proj.norm() < 1e-6);
  }
}

TEST_CASE("synthesis requires a tight bank") {
  const FilterBank bank = bank_of(mesh30(), 1, 2, false, 10);
  const WaveletCoefficients c = analyze(bank, Eigen::VectorXd::Ones(30));
  MW_CHECK_THROWS_CODE(synthesize(bank, c, 0), ErrorCode::NotTightFrame);
}

TEST_CASE("mismatched spectra and bad indices") {
  std::vector<Spectrum> s = spectra_of(mesh30(), 1, 0.0, 10);
  s.push_back(solve_eigs(assemble_lbo(icosphere(1)), 10));
  MW_CHECK_THROWS_CODE(build_filterbank(s, KernelSpec{{1.0}, 1.0, false}), ErrorCode::SpectrumMismatch);
  const FilterBank bank = bank_of(mesh30(), 1, 2, false, 10);
  MW_CHECK_THROWS_CODE(wavelet_at(bank, 0, 0, 30), ErrorCode::IndexOutOfRange);
  MW_CHECK_THROWS_CODE(wavelet_at(bank, 1, 0, 0), ErrorCode::IndexOutOfRange);
  MW_CHECK_THROWS_CODE(apply_filter(bank, 0, 0, Eigen::MatrixXd::Zero(29, 2), true), ErrorCode::ShapeMismatch);
}
