#pragma once

#include <Eigen/Core>
#include <complex>

namespace flode {

// Matrix exponential by scaling-and-squaring with a degree-13 Pade
// approximant and 1-norm based scaling. Oracle-scale only (dense).
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace flode
