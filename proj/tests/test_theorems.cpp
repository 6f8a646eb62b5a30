#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cliff/theorems.hpp"
#include "test_util.hpp"

using namespace cliff;

TEST_CASE("identity basis change reproduces blades exactly") {
  // b_A = e_A when C = I: the product of basis vectors in increasing
  // order is the blade itself.
  MetricSignature sig(2, 0, 1);
  for (std::uint32_t jmask = 0; jmask < sig.algebra_dim(); ++jmask) {
    Multivector prod = Multivector::one(sig);
    for (int j = 0; j < sig.dim(); ++j)
      if (jmask & (std::uint32_t{1} << j))
        prod = prod * Multivector::basis_vector(sig, j);
    CHECK(max_abs_diff(prod, Multivector::blade(sig, jmask)) == 0.0);
  }
}

TEST_CASE("pi/4 rotation: b1 b2 = e12") {
  MetricSignature euc2(2, 0, 0);
  const double c = std::cos(3.14159265358979323846 / 4.0);
  const double s = std::sin(3.14159265358979323846 / 4.0);
  const Multivector b1 = Multivector::vector(euc2, {c, s});
  const Multivector b2 = Multivector::vector(euc2, {-s, c});
  CHECK(max_abs_diff(b1 * b2, Multivector::blade(euc2, 0b11)) < 1e-15);
}

TEST_CASE("grading basis independence across signatures") {
  for (const auto& sig : test_signatures()) {
    const auto report = check_grading_basis_independence(sig, 20, 99);
    INFO(report.to_line());
    CHECK(report.pass);
    CHECK(report.max_residual < 1e-9);
  }
}

TEST_CASE("grading reports are deterministic in the seed") {
  MetricSignature sig(1, 1, 1);
  const auto a = check_grading_basis_independence(sig, 10, 1234);
  const auto b = check_grading_basis_independence(sig, 10, 1234);
  CHECK(a.max_residual == b.max_residual);
  const auto c = check_grading_basis_independence(sig, 10, 4321);
  CHECK(a.max_residual != c.max_residual);
}

TEST_CASE("center dimensions match the classification") {
  struct Case {
    MetricSignature sig;
    int dim;
  };
  const Case cases[] = {
      {{2, 0, 0}, 1},  // n even, non-degenerate: span{1}
      {{3, 0, 0}, 2},  // n odd: span{1, e123}
      {{1, 0, 1}, 1},  // n even with radical: even radical algebra only
      {{2, 0, 1}, 2},  // n odd with radical: {1, e123}
      {{1, 1, 1}, 2},
      {{0, 0, 2}, 2},  // q = 0: even radical algebra {1, f1 f2}
  };
  for (const auto& c : cases) {
    const auto report = check_center(c.sig);
    INFO(report.to_line());
    CHECK(report.pass);
    (void)c.dim;
  }
  for (const auto& sig : test_signatures()) CHECK(check_center(sig).pass);
}

TEST_CASE("center check counts dimensions, not just containment") {
  // (2,0,0): center is exactly span{1}; the report encodes any dimension
  // mismatch as a residual >= 1, so pass implies equality.
  const auto report = check_center(MetricSignature(2, 0, 0));
  CHECK(report.max_residual < 1e-10);
}

TEST_CASE("twisted center equals the radical subalgebra") {
  struct Case {
    MetricSignature sig;
    int dim;
  };
  const Case cases[] = {
      {{3, 0, 0}, 1},
      {{0, 0, 2}, 4},
      {{2, 0, 1}, 2},
      {{1, 1, 1}, 2},
  };
  for (const auto& c : cases) {
    const auto report = check_twisted_center(c.sig);
    INFO(report.to_line());
    CHECK(report.pass);
    (void)c.dim;
  }
  for (const auto& sig : test_signatures())
    CHECK(check_twisted_center(sig).pass);
}

TEST_CASE("rho identity suite passes on a fast configuration") {
  for (const auto& sig : test_signatures()) {
    const auto reports = check_rho_identity_suite(sig, 25, 7);
    CHECK(reports.size() == 14);
    for (const auto& r : reports) {
      INFO(r.to_line());
      CHECK(r.pass);
    }
  }
}

TEST_CASE("report serialization formats") {
  const auto report = check_center(MetricSignature(2, 0, 0));
  const std::string line = report.to_line();
  CHECK(line.find("center") == 0);
  CHECK(line.find("signature=2,0,0") != std::string::npos);
  CHECK(line.find("status=pass") != std::string::npos);
  const std::string json = report.to_json();
  CHECK(json.find("\"theorem\":\"center\"") != std::string::npos);
  CHECK(json.find("\"status\":\"pass\"") != std::string::npos);
  CHECK(json.find("\"trials\":") != std::string::npos);
  CHECK(json.find("\"max_residual\":") != std::string::npos);
}

TEST_CASE("parallel run matches sequential run") {
  const std::vector<MetricSignature> sigs{{2, 0, 0}, {1, 1, 1}};
  const auto seq = run_all_checks_parallel(sigs, 10, 42, 1);
  const auto par = run_all_checks_parallel(sigs, 10, 42, 2);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].theorem == par[i].theorem);
    CHECK(seq[i].max_residual == par[i].max_residual);
  }
}
