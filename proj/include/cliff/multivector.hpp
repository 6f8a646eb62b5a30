#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cliff/random.hpp"
#include "cliff/signature.hpp"

namespace cliff {

struct SignatureMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline int blade_grade(std::uint32_t mask) { return std::popcount(mask); }

// Sign of e_A e_B from the reordering rule: one transposition per pair
// (i in A, j in B) with i > j, times q(e_i) for every shared index.
double blade_sign(std::uint32_t a, std::uint32_t b, const MetricSignature& sig);

struct BladeProduct {
  double sign;         // -1, 0 or +1
  std::uint32_t mask;  // A xor B
};

BladeProduct blade_product(std::uint32_t a, std::uint32_t b,
                           const MetricSignature& sig);

// Per-signature lookup tables shared by products, layers and autodiff.
// Signs are tabulated for n <= 8 (4^n entries) and computed on the fly
// beyond that.
struct CayleyTable {
  MetricSignature sig;
  int n;
  std::size_t dim;                  // 2^n
  std::vector<double> metric;       // q(e_i) per index
  std::vector<std::int8_t> grade;   // popcount per mask
  std::vector<double> blade_q;      // prod_{i in A} q(e_i) per mask
  std::vector<std::int8_t> signs;   // empty when n > 8

  explicit CayleyTable(const MetricSignature& s);

  double sign(std::uint32_t a, std::uint32_t b) const {
    if (!signs.empty()) return signs[(std::size_t{a} << n) | b];
    return blade_sign(a, b, sig);
  }
};

const CayleyTable& cayley_table(const MetricSignature& sig);

// Dense element of Cl(V, q): 2^n real coefficients indexed by blade
// bitmask. Immutable by convention; all operations return new values.
class Multivector {
 public:
  explicit Multivector(MetricSignature sig)
      : sig_(sig), c_(sig.algebra_dim(), 0.0) {}

  static Multivector scalar(const MetricSignature& sig, double value) {
    Multivector x(sig);
    x.c_[0] = value;
    return x;
  }

  static Multivector one(const MetricSignature& sig) {
    return scalar(sig, 1.0);
  }

  static Multivector blade(const MetricSignature& sig, std::uint32_t mask,
                           double value = 1.0) {
    Multivector x(sig);
    if (mask >= sig.algebra_dim())
      throw std::out_of_range("blade mask out of range");
    x.c_[mask] = value;
    return x;
  }

  static Multivector basis_vector(const MetricSignature& sig, int i) {
    return blade(sig, std::uint32_t{1} << i);
  }

  // Grade-1 element from coordinates (size n).
  static Multivector vector(const MetricSignature& sig,
                            const std::vector<double>& coords);

  const MetricSignature& signature() const { return sig_; }
  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t mask) const { return c_[mask]; }
  double& operator[](std::size_t mask) { return c_[mask]; }
  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }

  Multivector& operator+=(const Multivector& rhs);
  Multivector& operator-=(const Multivector& rhs);
  Multivector& operator*=(double s);

  friend Multivector operator+(Multivector a, const Multivector& b) {
    a += b;
    return a;
  }
  friend Multivector operator-(Multivector a, const Multivector& b) {
    a -= b;
    return a;
  }
  friend Multivector operator-(Multivector a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend Multivector operator*(Multivector a, double s) {
    a *= s;
    return a;
  }
  friend Multivector operator*(double s, Multivector a) {
    a *= s;
    return a;
  }
  friend Multivector operator*(const Multivector& a, const Multivector& b) {
    return geometric_product(a, b);
  }

  friend Multivector geometric_product(const Multivector& x,
                                       const Multivector& y);

 private:
  MetricSignature sig_;
  std::vector<double> c_;
};

// Keeps exactly the blades of grade m; zero for m outside [0, n].
Multivector grade_projection(const Multivector& x, int m);

Multivector even_part(const Multivector& x);
Multivector odd_part(const Multivector& x);

// Main involution, reversion, and Clifford conjugation.
Multivector alpha(const Multivector& x);
Multivector beta(const Multivector& x);
Multivector gamma_conj(const Multivector& x);

// Projection onto the zero component (scalar coefficient).
double zero_projection(const Multivector& x);

// Extended bilinear / quadratic form on the algebra:
// b(x, y) = sum_A x_A y_A prod_{i in A} q(e_i).
double extended_bilinear(const Multivector& x, const Multivector& y);
double extended_quadratic(const Multivector& x);

double sup_norm(const Multivector& x);
double max_abs_diff(const Multivector& x, const Multivector& y);

// 0 for even, 1 for odd, -1 when both parts exceed tol.
int parity_of(const Multivector& x, double tol = 1e-12);

// Coefficients i.i.d. uniform in [lo, hi].
Multivector random_multivector(const MetricSignature& sig, Rng& rng,
                               double lo = -1.0, double hi = 1.0);

// Ascending masks of the given grade; the canonical basis order for
// grade-restricted matrices.
std::vector<std::uint32_t> grade_masks(int n, int m);

std::string blade_name(std::uint32_t mask);

}  // namespace cliff
