#pragma once

#include <Eigen/Core>
#include <complex>

namespace flode {

// Eigenvalues in ascending order by real part, ties broken by imaginary
// part. Symmetric inputs go through the symmetric solver, so their spectrum
// is exactly real and the eigenvector matrix orthogonal.
struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns follow eigenvalue order; may be empty
  bool symmetric = false;

  std::complex<double> lambda_min() const { return eigenvalues(0); }
  std::complex<double> lambda_max() const {
    return eigenvalues(eigenvalues.size() - 1);
  }
  double spectral_radius() const;
};

Spectrum eigen_spectrum(const Eigen::MatrixXd& m, bool want_vectors);
Spectrum eigen_spectrum(const Eigen::MatrixXcd& m, bool want_vectors);

// Spectrum of a W given as a complex diagonal (channel mixing matrices are
// diagonal throughout).
Spectrum diagonal_spectrum(const Eigen::VectorXcd& diag);

// Analytic eigendecomposition of the cycle graph C_n: lambda_j = cos(2 pi j / n)
// with Fourier eigenvectors v_j(k) = omega^{jk} / sqrt(n), plus the real
// cos/sin basis.
struct CycleSpectrum {
  Eigen::VectorXd eigenvalues_by_j;   // lambda_j, j = 0..n-1
  Eigen::MatrixXcd vectors_by_j;      // column j = v_j
  Eigen::MatrixXd real_basis;         // columns: Re v_j, then Im v_j
  Spectrum sorted;                    // same pairs, spectrum ordering
};

CycleSpectrum cycle_analytic_spectrum(int n);

}  // namespace flode
