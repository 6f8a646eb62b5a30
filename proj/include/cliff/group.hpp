#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cliff/linalg.hpp"
#include "cliff/multivector.hpp"
#include "cliff/random.hpp"

namespace cliff {

struct NullVectorSamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotRadicalPreservingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecompositionFailedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One factor of a Clifford-group element in the canonical form
// c * v_1 ... v_k * gamma_1 ... gamma_m.
struct VersorGenerator {
  enum class Kind { kScalar, kVector, kGamma };

  static VersorGenerator make_scalar(double c);
  static VersorGenerator make_vector(std::vector<double> coords);
  // gamma_i = 1 + e_i * sum_j coeffs[j] * f_j over the radical basis.
  static VersorGenerator make_gamma(int basis_index,
                                    std::vector<double> coeffs);

  Kind kind = Kind::kScalar;
  double scale = 1.0;
  std::vector<double> coords;        // kVector
  int gamma_index = -1;              // kGamma, non-radical basis index
  std::vector<double> gamma_coeffs;  // kGamma, one per radical index
};

// Clifford-group element held as its generator list together with the
// expanded multivector and a cached inverse. Parity-homogeneous by
// construction; parity = number of vector generators mod 2.
class Versor {
 public:
  explicit Versor(MetricSignature sig);  // identity
  Versor(MetricSignature sig, std::vector<VersorGenerator> generators);

  static Versor reflection(const MetricSignature& sig,
                           const std::vector<double>& normal);

  const MetricSignature& signature() const { return sig_; }
  const std::vector<VersorGenerator>& generators() const { return gens_; }
  const Multivector& expanded() const { return expanded_; }
  const Multivector& inverse() const { return inverse_; }
  int parity() const { return parity_; }

  Versor inverted() const;

  friend Versor operator*(const Versor& a, const Versor& b);

 private:
  MetricSignature sig_;
  std::vector<VersorGenerator> gens_;
  Multivector expanded_;
  Multivector inverse_;
  int parity_ = 0;
};

// rho(w)(x) = w x^[0] w^-1 + alpha(w) x^[1] w^-1.
Multivector twisted_conjugation(const Versor& w, const Multivector& x);

// Same action for an arbitrary invertible parity-homogeneous element.
Multivector twisted_conjugation(const Multivector& w, const Multivector& x);

// k reflection vectors (coordinates sup-normalized, |q(v)| > 0.1 by
// rejection), optional scalar in +-[0.5, 2], optional gamma generators
// with coefficients ~ U(-1, 1).
Versor sample_versor(const MetricSignature& sig, int k, bool include_gamma,
                     bool include_scalar, Rng& rng);

// Matrix of rho(w) restricted to grade m, on the ascending-mask blade
// basis of that grade. C(n,m) x C(n,m).
Mat rho_matrix(const Versor& w, int m);

struct MembershipResult {
  bool member = false;
  std::string reason;  // empty when member
};

// Parity homogeneity, invertibility, and grade-1 preservation of rho(x).
MembershipResult is_clifford_group_member(const Multivector& x, double tol);

Multivector spinor_norm(const Multivector& x);    // beta(x) x
Multivector clifford_norm(const Multivector& x);  // gamma(x) x

// Extended quadratic form of the expanded element; a group homomorphism
// on the Clifford group.
double qbar_group_hom(const Versor& w);

bool pin_member(const Versor& w, double tol);
bool spin_member(const Versor& w, double tol);

struct OrthogonalMap {
  MetricSignature sig;
  Mat matrix;  // n x n on grade-1 coordinates

  // ||M^T Delta M - Delta||_max
  double orthogonality_residual() const;
  // deviation of the radical columns from identity
  double radical_preservation_residual() const;
};

OrthogonalMap rho_orthogonal_map(const Versor& w);

// Constructive Cartan-Dieudonne lift: reflections for the non-degenerate
// block, gamma generators for the radical-mixing block. The returned
// versor satisfies rho_matrix(w, 1) == phi.matrix up to roundoff.
Versor lift_orthogonal(const OrthogonalMap& phi, double tol = 1e-9);

}  // namespace cliff
