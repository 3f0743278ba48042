#pragma once

#include <Eigen/Core>

namespace lattice {

/// A point theta in R^d.
using ParamVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace lattice
