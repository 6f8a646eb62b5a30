#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cliff/group.hpp"
#include "test_util.hpp"

using namespace cliff;

namespace {

Mat reflection_matrix(const MetricSignature& sig,
                      const std::vector<double>& v) {
  const int n = sig.dim();
  double qv = 0.0;
  for (int i = 0; i < n; ++i) qv += v[i] * v[i] * sig.metric(i);
  Mat m = Mat::Identity(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m(i, j) -= 2.0 * v[i] * v[j] * sig.metric(j) / qv;
  return m;
}

}  // namespace

TEST_CASE("twisted conjugation reflects vectors") {
  MetricSignature euc3(3, 0, 0);
  const Versor w = Versor::reflection(euc3, {1.0, 0.0, 0.0});
  const Multivector e1 = Multivector::basis_vector(euc3, 0);
  const Multivector e2 = Multivector::basis_vector(euc3, 1);
  CHECK(max_abs_diff(twisted_conjugation(w, e2), e2) < 1e-14);
  CHECK(max_abs_diff(twisted_conjugation(w, e1), -e1) < 1e-14);
}

TEST_CASE("degenerate gamma generator acts as v - 2 b(e,v) f") {
  MetricSignature sig(2, 0, 1);
  const Versor gamma(sig, {VersorGenerator::make_gamma(0, {1.0})});
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Multivector v = grade_projection(random_multivector(sig, rng), 1);
    Multivector expected = v;
    const double b_e_v = v[0b001];  // b(e1, v) with q(e1) = +1
    expected[0b100] -= 2.0 * b_e_v;
    CHECK(max_abs_diff(twisted_conjugation(gamma, v), expected) < 1e-10);
  }
}

TEST_CASE("general inverse spec examples") {
  MetricSignature euc3(3, 0, 0);
  const Multivector e1 = Multivector::basis_vector(euc3, 0);
  CHECK(max_abs_diff(general_inverse(e1), e1) < 1e-12);

  MetricSignature line(1, 0, 0);
  Multivector zd = Multivector::one(line);
  zd[0b1] = 1.0;  // 1 + e1, a zero divisor
  CHECK_THROWS_AS(general_inverse(zd), NotInvertibleError);

  MetricSignature euc2(2, 0, 0);
  Multivector a = Multivector::one(euc2);
  a[0b11] = 1.0;  // 1 + e12
  Multivector expected = Multivector::scalar(euc2, 0.5);
  expected[0b11] = -0.5;
  CHECK(max_abs_diff(general_inverse(a), expected) < 1e-12);
}

TEST_CASE("sampled versors: reflection parity and determinant") {
  MetricSignature euc3(3, 0, 0);
  Rng rng(7);

  const Versor identity = sample_versor(euc3, 0, false, false, rng);
  CHECK(identity.generators().empty());
  Rng rng2(8);
  const Multivector x = random_multivector(euc3, rng2);
  CHECK(max_abs_diff(twisted_conjugation(identity, x), x) == 0.0);

  for (int t = 0; t < 20; ++t) {
    const Versor w1 = sample_versor(euc3, 1, false, true, rng);
    const Mat m1 = rho_matrix(w1, 1);
    CHECK(m1.determinant() == doctest::Approx(-1.0).epsilon(1e-9));

    const Versor w2 = sample_versor(euc3, 2, false, true, rng);
    const Mat m2 = rho_matrix(w2, 1);
    CHECK(m2.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((m2.transpose() * m2 - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("scalar versors act as the identity") {
  for (const auto& sig : test_signatures()) {
    const Versor c(sig, {VersorGenerator::make_scalar(2.0)});
    Rng rng(9);
    const Multivector x = random_multivector(sig, rng);
    CHECK(max_abs_diff(twisted_conjugation(c, x), x) < 1e-14);
  }
}

TEST_CASE("rho matrix spec examples") {
  MetricSignature euc2(2, 0, 0);
  Rng rng(10);
  const Versor any = sample_versor(euc2, 2, false, true, rng);
  const Mat m0 = rho_matrix(any, 0);
  CHECK(m0.rows() == 1);
  CHECK(m0(0, 0) == doctest::Approx(1.0));

  const std::vector<double> v1{1.0, 0.3};
  const std::vector<double> v2{-0.2, 0.9};
  const Versor rotor(euc2, {VersorGenerator::make_vector(v1),
                            VersorGenerator::make_vector(v2)});
  const Mat composed = reflection_matrix(euc2, v1) * reflection_matrix(euc2, v2);
  CHECK((rho_matrix(rotor, 1) - composed).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rho_matrix(rotor, 1).determinant() == doctest::Approx(1.0));

  MetricSignature euc3(3, 0, 0);
  const Versor refl = Versor::reflection(euc3, {1.0, 0.0, 0.0});
  const Mat top = rho_matrix(refl, 3);
  CHECK(top.rows() == 1);
  CHECK(top(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("rho is block diagonal across grades") {
  Rng rng(11);
  for (const auto& sig : test_signatures()) {
    const Versor w = sample_versor(sig, 2, true, true, rng);
    const Multivector x = random_multivector(sig, rng);
    const Multivector img = twisted_conjugation(w, x);
    for (int m = 0; m <= sig.dim(); ++m) {
      const Multivector lhs = twisted_conjugation(w, grade_projection(x, m));
      CHECK(max_abs_diff(lhs, grade_projection(img, m)) < 1e-9);
    }
  }
}

TEST_CASE("clifford group membership") {
  MetricSignature euc3(3, 0, 0);
  Multivector mixed(euc3);
  mixed[0b001] = 1.0;
  mixed[0b110] = 1.0;  // e1 + e2 e3
  CHECK_FALSE(is_clifford_group_member(mixed, 1e-9).member);
  CHECK(is_clifford_group_member(mixed, 1e-9).reason == "mixed parity");

  CHECK(is_clifford_group_member(Multivector::basis_vector(euc3, 0), 1e-9)
            .member);

  MetricSignature deg(1, 0, 2);
  Multivector g = Multivector::one(deg);
  g[0b110] = 0.7;  // 1 + f1 f2
  const auto res = is_clifford_group_member(g, 1e-9);
  CHECK(res.member);
  Rng rng(12);
  const Multivector x = random_multivector(deg, rng);
  CHECK(max_abs_diff(twisted_conjugation(g, x), x) < 1e-12);

  Multivector zd = Multivector::one(MetricSignature(1, 0, 0));
  zd[0b1] = 1.0;
  CHECK(is_clifford_group_member(zd, 1e-9).reason == "mixed parity");
}

TEST_CASE("spinor and clifford norms") {
  MetricSignature sig(2, 0, 1);
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const Multivector v = grade_projection(random_multivector(sig, rng), 1);
    const Multivector sn = spinor_norm(v);
    CHECK(std::abs(zero_projection(sn) - extended_quadratic(v)) < 1e-12);
    CHECK(max_abs_diff(sn, Multivector::scalar(sig, extended_quadratic(v))) <
          1e-12);
    // CN(v) = gamma(v) v = -v^2 = -q(v) on vectors
    CHECK(max_abs_diff(clifford_norm(v),
                       Multivector::scalar(sig, -extended_quadratic(v))) <
          1e-12);
  }

  // CN is multiplicative on sampled group elements
  for (int t = 0; t < 20; ++t) {
    const Versor w1 = sample_versor(sig, t % 3, true, true, rng);
    const Versor w2 = sample_versor(sig, (t + 1) % 3, true, true, rng);
    const Multivector lhs = clifford_norm((w1 * w2).expanded());
    const Multivector rhs =
        clifford_norm(w1.expanded()) * clifford_norm(w2.expanded());
    CHECK(max_abs_diff(lhs, rhs) < 1e-9 * std::max(1.0, sup_norm(rhs)));
  }

  const Versor gamma(sig, {VersorGenerator::make_gamma(0, {0.8})});
  CHECK(qbar_group_hom(gamma) == doctest::Approx(1.0));

  const Versor c(sig, {VersorGenerator::make_scalar(-1.7)});
  CHECK(qbar_group_hom(c) == doctest::Approx(1.7 * 1.7));
}

TEST_CASE("qbar is multiplicative on the group") {
  Rng rng(14);
  for (const auto& sig : test_signatures()) {
    for (int t = 0; t < 30; ++t) {
      const Versor w1 = sample_versor(sig, t % 3, true, true, rng);
      const Versor w2 = sample_versor(sig, (t + 1) % 3, true, true, rng);
      const double lhs = qbar_group_hom(w1 * w2);
      const double rhs = qbar_group_hom(w1) * qbar_group_hom(w2);
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("pin and spin predicates") {
  MetricSignature euc3(3, 0, 0);
  const Versor e1 = Versor::reflection(euc3, {1.0, 0.0, 0.0});
  CHECK(pin_member(e1, 1e-9));
  CHECK_FALSE(spin_member(e1, 1e-9));

  MetricSignature lor(1, 1, 0);
  const Versor e12(lor, {VersorGenerator::make_vector({1.0, 0.0}),
                         VersorGenerator::make_vector({0.0, 1.0})});
  CHECK(qbar_group_hom(e12) == doctest::Approx(-1.0));
  CHECK(pin_member(e12, 1e-9));
  CHECK(spin_member(e12, 1e-9));

  const Versor scaled(euc3, {VersorGenerator::make_scalar(2.0),
                             VersorGenerator::make_vector({1.0, 0.0, 0.0})});
  CHECK_FALSE(pin_member(scaled, 1e-9));
}

TEST_CASE("composition and inverse of the action") {
  Rng rng(15);
  for (const auto& sig : test_signatures()) {
    for (int t = 0; t < 15; ++t) {
      const Versor w1 = sample_versor(sig, 1 + (t % 2), true, true, rng);
      const Versor w2 = sample_versor(sig, 2 - (t % 2), true, true, rng);
      const Multivector x = random_multivector(sig, rng);
      const Multivector lhs =
          twisted_conjugation(w2, twisted_conjugation(w1, x));
      const Multivector rhs = twisted_conjugation(w2 * w1, x);
      CHECK(max_abs_diff(lhs, rhs) < 1e-9);

      const Versor winv = w1.inverted();
      CHECK(max_abs_diff(
                twisted_conjugation(winv, twisted_conjugation(w1, x)), x) <
            1e-9);
    }
  }
}

TEST_CASE("lift of the identity and of a coordinate reflection") {
  MetricSignature euc3(3, 0, 0);
  OrthogonalMap id{euc3, Mat::Identity(3, 3)};
  const Versor w_id = lift_orthogonal(id);
  CHECK(w_id.generators().empty());

  Mat m = Mat::Identity(3, 3);
  m(0, 0) = -1.0;
  const Versor w = lift_orthogonal({euc3, m});
  CHECK((rho_matrix(w, 1) - m).cwiseAbs().maxCoeff() < 1e-12);
  const Versor e1 = Versor::reflection(euc3, {1.0, 0.0, 0.0});
  CHECK((rho_matrix(w, 1) - rho_matrix(e1, 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lift of a plane rotation") {
  MetricSignature euc3(3, 0, 0);
  const double theta = 0.83;
  Mat m = Mat::Identity(3, 3);
  m(0, 0) = std::cos(theta);
  m(0, 1) = -std::sin(theta);
  m(1, 0) = std::sin(theta);
  m(1, 1) = std::cos(theta);
  const Versor w = lift_orthogonal({euc3, m});
  CHECK((rho_matrix(w, 1) - m).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("lift rejects radical-mixing GL blocks") {
  MetricSignature sig(2, 0, 1);
  Mat m = Mat::Identity(3, 3);
  m(2, 2) = 2.0;  // scales the radical direction
  CHECK_THROWS_AS(lift_orthogonal({sig, m}), NotRadicalPreservingError);
}

TEST_CASE("lift roundtrip over random group elements") {
  Rng rng(16);
  for (const auto& sig : test_signatures()) {
    for (int t = 0; t < 25; ++t) {
      const Versor w = sample_versor(sig, t % 4, true, true, rng);
      const OrthogonalMap phi = rho_orthogonal_map(w);
      CHECK(phi.orthogonality_residual() < 1e-9);
      CHECK(phi.radical_preservation_residual() < 1e-9);
      const Versor lifted = lift_orthogonal(phi);
      CHECK((rho_matrix(lifted, 1) - phi.matrix).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("radical vectors are fixed by every versor") {
  Rng rng(17);
  for (const auto& sig : test_signatures()) {
    if (sig.radical_dim() == 0) continue;
    for (int t = 0; t < 20; ++t) {
      const Versor w = sample_versor(sig, t % 3, true, true, rng);
      Multivector f(sig);
      for (int j = 0; j < sig.radical_dim(); ++j)
        f[std::uint32_t{1} << (sig.nondegenerate_dim() + j)] =
            rng.uniform(-1.0, 1.0);
      CHECK(max_abs_diff(twisted_conjugation(w, f), f) < 1e-9);
    }
  }
}

TEST_CASE("versor structural invariants") {
  Rng rng(18);
  for (const auto& sig : test_signatures()) {
    for (int t = 0; t < 10; ++t) {
      const Versor w = sample_versor(sig, t % 4, true, true, rng);
      CHECK(parity_of(w.expanded(), 1e-12) == w.parity());
      const Multivector one = Multivector::one(sig);
      CHECK(max_abs_diff(w.expanded() * w.inverse(), one) < 1e-9);
      CHECK(max_abs_diff(w.inverse() * w.expanded(), one) < 1e-9);
    }
  }
}

TEST_CASE("null vector sampling fails cleanly in a totally degenerate space") {
  MetricSignature rad(0, 0, 2);
  Rng rng(19);
  CHECK_THROWS_AS(sample_versor(rad, 1, false, false, rng),
                  NullVectorSamplingError);
}
