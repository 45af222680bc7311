#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lqs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

}  // namespace lqs
