#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lcra {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline double to_db(double x) { return 10.0 * std::log10(x); }
inline double from_db(double x) { return std::pow(10.0, x / 10.0); }

}  // namespace lcra
