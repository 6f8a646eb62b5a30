#include "cliff/linalg.hpp"

namespace cliff {

Mat left_mul_matrix(const Multivector& x) {
  const auto& tab = cayley_table(x.signature());
  const std::size_t dim = tab.dim;
  Mat m = Mat::Zero(dim, dim);
  for (std::uint32_t b = 0; b < dim; ++b)
    for (std::uint32_t a = 0; a < dim; ++a) {
      const double va = x[a];
      if (va == 0.0) continue;
      const double s = tab.sign(a, b);
      if (s != 0.0) m(a ^ b, b) += s * va;
    }
  return m;
}

Mat right_mul_matrix(const Multivector& x) {
  const auto& tab = cayley_table(x.signature());
  const std::size_t dim = tab.dim;
  Mat m = Mat::Zero(dim, dim);
  for (std::uint32_t b = 0; b < dim; ++b)
    for (std::uint32_t a = 0; a < dim; ++a) {
      const double va = x[a];
      if (va == 0.0) continue;
      const double s = tab.sign(b, a);
      if (s != 0.0) m(a ^ b, b) += s * va;
    }
  return m;
}

Mat alpha_matrix(const MetricSignature& sig) {
  const auto& tab = cayley_table(sig);
  Mat m = Mat::Zero(tab.dim, tab.dim);
  for (std::size_t i = 0; i < tab.dim; ++i)
    m(i, i) = (tab.grade[i] & 1) ? -1.0 : 1.0;
  return m;
}

Mat signature_matrix(const MetricSignature& sig) {
  Mat m = Mat::Zero(sig.dim(), sig.dim());
  for (int i = 0; i < sig.dim(); ++i) m(i, i) = sig.metric(i);
  return m;
}

int numeric_rank(const Mat& m, double sv_tol) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > sv_tol) ++rank;
  return rank;
}

double condition_number(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

double minor_det(const Mat& c, const std::vector<int>& rows,
                 const std::vector<int>& cols) {
  const int m = static_cast<int>(rows.size());
  if (m == 0) return 1.0;
  Mat sub(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub(i, j) = c(rows[i], cols[j]);
  return sub.determinant();
}

Multivector general_inverse(const Multivector& x) {
  const std::size_t dim = x.size();
  const Mat lx = left_mul_matrix(x);
  if (dim <= 256) {
    if (condition_number(lx) > 1e12)
      throw NotInvertibleError("left-multiplication matrix is singular");
  }
  Eigen::PartialPivLU<Mat> lu(lx);
  Vec rhs = Vec::Zero(dim);
  rhs[0] = 1.0;
  const Vec y = lu.solve(rhs);
  Multivector inv(x.signature());
  for (std::size_t i = 0; i < dim; ++i) inv[i] = y[i];
  const Multivector one = Multivector::one(x.signature());
  if (max_abs_diff(x * inv, one) > 1e-6 || max_abs_diff(inv * x, one) > 1e-6)
    throw NotInvertibleError("inverse verification failed");
  return inv;
}

}  // namespace cliff
