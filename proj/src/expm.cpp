#include "expm.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "error.hpp"

namespace flode {

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::invalid_argument, "expm needs a square matrix");
  if (!a.allFinite())
    fail(ErrorCode::invalid_argument, "expm: non-finite entries");

  const long n = a.rows();
  using Matrix = Eigen::MatrixXcd;
  const Matrix id = Matrix::Identity(n, n);

  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Matrix scaled = a / std::pow(2.0, squarings);

  static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};

  const Matrix a2 = scaled * scaled;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix u =
      scaled * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;

  Eigen::PartialPivLU<Matrix> lu(v - u);
  Matrix result = lu.solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace flode
