#include "eigen_solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace flode {

namespace {

std::vector<int> sort_order(const Eigen::VectorXcd& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values(a).real() != values(b).real())
      return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });
  return order;
}

Spectrum reorder(const Eigen::VectorXcd& values, const Eigen::MatrixXcd& vectors,
                 bool symmetric) {
  const auto order = sort_order(values);
  Spectrum s;
  s.symmetric = symmetric;
  s.eigenvalues.resize(values.size());
  for (long i = 0; i < values.size(); ++i)
    s.eigenvalues(i) = values(order[i]);
  if (vectors.size() > 0) {
    s.eigenvectors.resize(vectors.rows(), vectors.cols());
    for (long i = 0; i < vectors.cols(); ++i)
      s.eigenvectors.col(i) = vectors.col(order[i]);
  }
  return s;
}

bool nearly_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

}  // namespace

double Spectrum::spectral_radius() const {
  double r = 0.0;
  for (long i = 0; i < eigenvalues.size(); ++i)
    r = std::max(r, std::abs(eigenvalues(i)));
  return r;
}

Spectrum eigen_spectrum(const Eigen::MatrixXd& m, bool want_vectors) {
  if (m.rows() != m.cols())
    fail(ErrorCode::invalid_argument, "eigen_spectrum needs a square matrix");
  if (!m.allFinite())
    fail(ErrorCode::invalid_argument, "eigen_spectrum: non-finite entries");

  if (nearly_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        m, want_vectors ? Eigen::ComputeEigenvectors
                        : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      fail(ErrorCode::numeric_failure, "symmetric eigensolver did not converge");
    Spectrum s;
    s.symmetric = true;
    s.eigenvalues = solver.eigenvalues().cast<std::complex<double>>();
    if (want_vectors)
      s.eigenvectors = solver.eigenvectors().cast<std::complex<double>>();
    return s;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, want_vectors);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numeric_failure, "Schur iteration did not converge");
  return reorder(solver.eigenvalues(),
                 want_vectors ? Eigen::MatrixXcd(solver.eigenvectors())
                              : Eigen::MatrixXcd(),
                 false);
}

Spectrum eigen_spectrum(const Eigen::MatrixXcd& m, bool want_vectors) {
  if (m.rows() != m.cols())
    fail(ErrorCode::invalid_argument, "eigen_spectrum needs a square matrix");
  if (!m.allFinite())
    fail(ErrorCode::invalid_argument, "eigen_spectrum: non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, want_vectors);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numeric_failure, "complex eigensolver did not converge");
  return reorder(solver.eigenvalues(),
                 want_vectors ? solver.eigenvectors() : Eigen::MatrixXcd(),
                 false);
}

Spectrum diagonal_spectrum(const Eigen::VectorXcd& diag) {
  Eigen::MatrixXcd vectors =
      Eigen::MatrixXcd::Identity(diag.size(), diag.size());
  return reorder(diag, vectors, false);
}

CycleSpectrum cycle_analytic_spectrum(int n) {
  if (n < 3)
    fail(ErrorCode::invalid_argument, "cycle spectrum requires n >= 3");
  CycleSpectrum cs;
  cs.eigenvalues_by_j.resize(n);
  cs.vectors_by_j.resize(n, n);
  cs.real_basis.resize(n, 2 * n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int j = 0; j < n; ++j) {
    cs.eigenvalues_by_j(j) = std::cos(2.0 * M_PI * j / n);
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * M_PI * j * k / n;
      cs.vectors_by_j(k, j) =
          std::complex<double>(std::cos(angle), std::sin(angle)) * scale;
      cs.real_basis(k, j) = std::cos(angle) * scale;
      cs.real_basis(k, n + j) = std::sin(angle) * scale;
    }
  }
  cs.sorted.symmetric = true;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return cs.eigenvalues_by_j(a) < cs.eigenvalues_by_j(b);
  });
  cs.sorted.eigenvalues.resize(n);
  cs.sorted.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    cs.sorted.eigenvalues(i) = cs.eigenvalues_by_j(order[i]);
    cs.sorted.eigenvectors.col(i) = cs.vectors_by_j.col(order[i]);
  }
  return cs;
}

}  // namespace flode
