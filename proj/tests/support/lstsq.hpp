#pragma once

#include <Eigen/Dense>

namespace oracle {

// argmin_c ||A c - b|| by column-pivoted Householder QR.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace oracle
