#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cliff/multivector.hpp"

namespace cliff {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct NotInvertibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix of y -> x y on the blade basis.
Mat left_mul_matrix(const Multivector& x);

// Matrix of y -> y x on the blade basis.
Mat right_mul_matrix(const Multivector& x);

// Diagonal matrix of the main involution on blades.
Mat alpha_matrix(const MetricSignature& sig);

// diag(+1 x p, -1 x q, 0 x r).
Mat signature_matrix(const MetricSignature& sig);

// Number of singular values above sv_tol.
int numeric_rank(const Mat& m, double sv_tol);

// smax / smin; infinity when smin == 0.
double condition_number(const Mat& m);

// det of the square submatrix C[rows, cols].
double minor_det(const Mat& c, const std::vector<int>& rows,
                 const std::vector<int>& cols);

// y with x y = y x = 1, via the 2^n-dimensional solve L_x y = e_0.
// Throws NotInvertibleError when L_x has condition number above 1e12 or
// either side fails to verify.
Multivector general_inverse(const Multivector& x);

}  // namespace cliff
