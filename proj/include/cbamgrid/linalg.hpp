#pragma once

#include <string>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"

namespace cbamgrid::linalg {

using ad::Tensor;

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Solves A x = b for square A by Gaussian elimination with partial pivoting.
// Raises Estimation on a singular system.
std::vector<double> solve(Tensor a, std::vector<double> b);

struct LstsqResult {
    std::vector<double> beta;
    double rss = 0.0;
};

// Least squares via normal equations. `names` labels the columns of X; a
// rank-deficient system raises Estimation naming the dependent column(s).
LstsqResult lstsq(const Tensor& x, const std::vector<double>& y,
                  const std::vector<std::string>& names);

}  // namespace cbamgrid::linalg
