#include "cliff/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "cliff/linalg.hpp"

namespace cliff {

namespace {

constexpr double kRankTol = 1e-10;  // singular values below count as zero

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

TheoremReport make_report(std::string id, const MetricSignature& sig,
                          long trials, double residual, double tol) {
  TheoremReport r;
  r.theorem = std::move(id);
  r.signature = sig;
  r.trials = trials;
  r.max_residual = residual;
  r.tolerance = tol;
  r.pass = residual < tol;
  return r;
}

// Masks of blades lying in the even radical subalgebra.
std::vector<std::uint32_t> even_radical_masks(const MetricSignature& sig) {
  std::vector<std::uint32_t> masks;
  const std::uint32_t rad = sig.radical_mask();
  for (std::uint32_t a = 0; a < sig.algebra_dim(); ++a)
    if ((a & ~rad) == 0 && (std::popcount(a) & 1) == 0) masks.push_back(a);
  return masks;
}

std::vector<std::uint32_t> radical_masks(const MetricSignature& sig) {
  std::vector<std::uint32_t> masks;
  const std::uint32_t rad = sig.radical_mask();
  for (std::uint32_t a = 0; a < sig.algebra_dim(); ++a)
    if ((a & ~rad) == 0) masks.push_back(a);
  return masks;
}

// A random unit of the even radical subalgebra.
Multivector random_even_radical_unit(const MetricSignature& sig, Rng& rng) {
  Multivector g(sig);
  for (std::uint32_t mask : even_radical_masks(sig))
    g[mask] = rng.uniform(-1.0, 1.0);
  const double c = rng.uniform(0.5, 2.0);
  g[0] = rng.coin() ? c : -c;
  return g;
}

struct PolyTerm {
  double coeff;
  std::vector<int> word;  // variable indices, length <= 3
};

std::vector<PolyTerm> random_polynomial(int num_vars, Rng& rng) {
  std::vector<PolyTerm> terms(5);
  for (auto& t : terms) {
    t.coeff = rng.uniform(-1.0, 1.0);
    const int len = rng.uniform_int(0, 3);
    for (int i = 0; i < len; ++i)
      t.word.push_back(rng.uniform_int(0, num_vars - 1));
  }
  return terms;
}

Multivector eval_polynomial(const std::vector<PolyTerm>& poly,
                            const std::vector<Multivector>& args,
                            const MetricSignature& sig) {
  Multivector acc(sig);
  for (const auto& t : poly) {
    Multivector term = Multivector::scalar(sig, t.coeff);
    for (int v : t.word) term = term * args[v];
    acc += term;
  }
  return acc;
}

}  // namespace

std::string TheoremReport::to_line() const {
  return theorem + " signature=" + signature.str() +
         " trials=" + std::to_string(trials) +
         " max_residual=" + format_g(max_residual) +
         " tolerance=" + format_g(tolerance) +
         " status=" + (pass ? "pass" : "fail");
}

std::string TheoremReport::to_json() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", max_residual);
  return std::string("{\"theorem\":\"") + theorem + "\",\"signature\":\"" +
         signature.str() + "\",\"trials\":" + std::to_string(trials) +
         ",\"max_residual\":" + buf + ",\"tolerance\":" +
         format_g(tolerance) + ",\"status\":\"" + (pass ? "pass" : "fail") +
         "\"}";
}

TheoremReport check_grading_basis_independence(const MetricSignature& sig,
                                               int trials,
                                               std::uint64_t seed) {
  Rng rng(seed ^ hash64("grading-basis-independence") ^
          hash64(sig.str().c_str()));
  const int n = sig.dim();
  const int r = sig.radical_dim();
  double residual = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Versor w = sample_versor(sig, rng.uniform_int(0, 3), true, true, rng);
    Mat c = rho_matrix(w, 1);
    if (r > 0) {
      // compose with a random GL(r) block on the radical coordinates
      Mat g(r, r);
      do {
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
      } while (std::abs(g.determinant()) < 0.1);
      Mat block = Mat::Identity(n, n);
      block.bottomRightCorner(r, r) = g;
      c = c * block;
    }
    std::vector<Multivector> basis;
    for (int j = 0; j < n; ++j) {
      std::vector<double> coords(n);
      for (int i = 0; i < n; ++i) coords[i] = c(i, j);
      basis.push_back(Multivector::vector(sig, coords));
    }
    const auto& tab = cayley_table(sig);
    for (std::uint32_t jmask = 0; jmask < sig.algebra_dim(); ++jmask) {
      Multivector bj = Multivector::one(sig);
      std::vector<int> cols;
      for (int j = 0; j < n; ++j)
        if (jmask & (std::uint32_t{1} << j)) {
          bj = bj * basis[j];
          cols.push_back(j);
        }
      const int grade_j = std::popcount(jmask);
      // Boost-heavy bases grow without bound in indefinite signatures, so
      // residuals are measured relative to the scale the roundoff lives
      // at: the product magnitude and the minor-determinant input growth.
      const double cmax = std::max(1.0, c.cwiseAbs().maxCoeff());
      const double scale =
          std::max(std::max(1.0, sup_norm(bj)), std::pow(cmax, grade_j));
      for (std::uint32_t imask = 0; imask < sig.algebra_dim(); ++imask) {
        if (tab.grade[imask] != grade_j) {
          residual = std::max(residual, std::abs(bj[imask]) / scale);
          continue;
        }
        std::vector<int> rows;
        for (int i = 0; i < n; ++i)
          if (imask & (std::uint32_t{1} << i)) rows.push_back(i);
        const double expected = minor_det(c, rows, cols);
        residual = std::max(residual, std::abs(bj[imask] - expected) / scale);
      }
    }
  }
  return make_report("grading-basis-independence", sig, trials, residual,
                     1e-9);
}

TheoremReport check_center(const MetricSignature& sig) {
  const int n = sig.dim();
  const std::size_t dim = sig.algebra_dim();
  Mat stacked(n * dim, dim);
  for (int i = 0; i < n; ++i) {
    const Multivector e = Multivector::basis_vector(sig, i);
    stacked.middleRows(i * dim, dim) = left_mul_matrix(e) - right_mul_matrix(e);
  }
  const int nullity = static_cast<int>(dim) - numeric_rank(stacked, kRankTol);

  std::vector<std::uint32_t> predicted = even_radical_masks(sig);
  if (n % 2 == 1) predicted.push_back((std::uint32_t{1} << n) - 1);

  double residual = std::abs(nullity - static_cast<int>(predicted.size()));
  for (std::uint32_t mask : predicted) {
    Vec v = Vec::Zero(dim);
    v[mask] = 1.0;
    residual = std::max(residual, (stacked * v).cwiseAbs().maxCoeff());
  }
  return make_report("center", sig, 1, residual, 1e-8);
}

TheoremReport check_twisted_center(const MetricSignature& sig) {
  const int n = sig.dim();
  const std::size_t dim = sig.algebra_dim();
  const Mat da = alpha_matrix(sig);
  Mat stacked(n * dim, dim);
  for (int i = 0; i < n; ++i) {
    const Multivector e = Multivector::basis_vector(sig, i);
    stacked.middleRows(i * dim, dim) =
        right_mul_matrix(e) * da - left_mul_matrix(e);
  }
  const int nullity = static_cast<int>(dim) - numeric_rank(stacked, kRankTol);

  const auto predicted = radical_masks(sig);
  double residual = std::abs(nullity - static_cast<int>(predicted.size()));
  for (std::uint32_t mask : predicted) {
    Vec v = Vec::Zero(dim);
    v[mask] = 1.0;
    residual = std::max(residual, (stacked * v).cwiseAbs().maxCoeff());
  }
  return make_report("twisted-center", sig, 1, residual, 1e-8);
}

std::vector<TheoremReport> check_rho_identity_suite(const MetricSignature& sig,
                                                    int trials,
                                                    std::uint64_t seed) {
  Rng rng(seed ^ hash64("rho-identities") ^ hash64(sig.str().c_str()));
  const int n = sig.dim();

  double r_add = 0, r_mult = 0, r_scalar = 0, r_comp = 0, r_inv = 0;
  double r_bbar = 0, r_qbar = 0, r_grade = 0, r_poly = 0, r_kernel = 0;
  double r_radical = 0, r_range = 0, r_lift = 0, r_norm = 0;

  for (int t = 0; t < trials; ++t) {
    const Versor w1 = sample_versor(sig, rng.uniform_int(0, 3), true, true, rng);
    const Versor w2 = sample_versor(sig, rng.uniform_int(0, 3), true, true, rng);
    const Multivector x = random_multivector(sig, rng);
    const Multivector y = random_multivector(sig, rng);

    const Multivector rx = twisted_conjugation(w1, x);
    const Multivector ry = twisted_conjugation(w1, y);

    r_add = std::max(r_add,
                     max_abs_diff(twisted_conjugation(w1, x + y), rx + ry));
    r_mult = std::max(r_mult,
                      max_abs_diff(twisted_conjugation(w1, x * y), rx * ry));

    const double c = rng.uniform(-2.0, 2.0);
    r_scalar = std::max(
        r_scalar, max_abs_diff(twisted_conjugation(w1, Multivector::scalar(
                                                           sig, c)),
                               Multivector::scalar(sig, c)));

    r_comp = std::max(r_comp, max_abs_diff(twisted_conjugation(w2, rx),
                                           twisted_conjugation(w2 * w1, x)));
    r_inv = std::max(
        r_inv, max_abs_diff(twisted_conjugation(w1.inverted(), rx), x));

    r_bbar = std::max(r_bbar, std::abs(extended_bilinear(rx, ry) -
                                       extended_bilinear(x, y)));
    r_qbar = std::max(
        r_qbar, std::abs(extended_quadratic(rx) - extended_quadratic(x)));

    for (int m = 0; m <= n; ++m)
      r_grade = std::max(
          r_grade, max_abs_diff(twisted_conjugation(w1, grade_projection(x, m)),
                                grade_projection(rx, m)));

    {
      std::vector<Multivector> args{x, y, random_multivector(sig, rng)};
      const auto poly = random_polynomial(3, rng);
      std::vector<Multivector> targs;
      for (const auto& a : args) targs.push_back(twisted_conjugation(w1, a));
      const Multivector lhs =
          twisted_conjugation(w1, eval_polynomial(poly, args, sig));
      const Multivector rhs = eval_polynomial(poly, targs, sig);
      r_poly = std::max(r_poly, max_abs_diff(lhs, rhs));
      const int k = rng.uniform_int(0, n);
      r_poly = std::max(r_poly, max_abs_diff(grade_projection(lhs, k),
                                             grade_projection(rhs, k)));
    }

    {
      const Multivector g = random_even_radical_unit(sig, rng);
      r_kernel = std::max(r_kernel, max_abs_diff(twisted_conjugation(g, x), x));
    }

    if (sig.radical_dim() > 0) {
      Multivector f(sig);
      for (int j = 0; j < sig.radical_dim(); ++j)
        f[std::uint32_t{1} << (sig.nondegenerate_dim() + j)] =
            rng.uniform(-1.0, 1.0);
      r_radical =
          std::max(r_radical, max_abs_diff(twisted_conjugation(w1, f), f));
    }

    const OrthogonalMap phi = rho_orthogonal_map(w1);
    r_range = std::max(r_range, phi.orthogonality_residual());
    r_range = std::max(r_range, phi.radical_preservation_residual());

    const Versor lifted = lift_orthogonal(phi, 1e-7);
    r_lift = std::max(
        r_lift,
        (rho_matrix(lifted, 1) - phi.matrix).cwiseAbs().maxCoeff());

    r_norm = std::max(r_norm, std::abs(qbar_group_hom(w1 * w2) -
                                       qbar_group_hom(w1) * qbar_group_hom(w2)));
  }

  std::vector<TheoremReport> reports;
  reports.push_back(make_report("rho-additivity", sig, trials, r_add, 1e-8));
  reports.push_back(
      make_report("rho-multiplicativity", sig, trials, r_mult, 1e-8));
  reports.push_back(make_report("rho-scalar-fix", sig, trials, r_scalar, 1e-8));
  reports.push_back(make_report("rho-composition", sig, trials, r_comp, 1e-8));
  reports.push_back(make_report("rho-inverse", sig, trials, r_inv, 1e-8));
  reports.push_back(
      make_report("rho-orthogonality-bbar", sig, trials, r_bbar, 1e-8));
  reports.push_back(
      make_report("rho-qbar-preservation", sig, trials, r_qbar, 1e-8));
  reports.push_back(
      make_report("rho-grade-equivariance", sig, trials, r_grade, 1e-8));
  reports.push_back(
      make_report("rho-polynomial-equivariance", sig, trials, r_poly, 1e-7));
  reports.push_back(
      make_report("rho-kernel-radical-units", sig, trials, r_kernel, 1e-8));
  reports.push_back(
      make_report("rho-radical-fixed", sig, trials, r_radical, 1e-8));
  reports.push_back(
      make_report("rho-range-orthogonal", sig, trials, r_range, 1e-8));
  reports.push_back(
      make_report("rho-lift-roundtrip", sig, trials, r_lift, 1e-6));
  reports.push_back(
      make_report("rho-norm-multiplicativity", sig, trials, r_norm, 1e-8));
  return reports;
}

std::vector<TheoremReport> run_all_checks(const MetricSignature& sig,
                                          int trials, std::uint64_t seed) {
  std::vector<TheoremReport> out;
  out.push_back(check_grading_basis_independence(sig, trials, seed));
  out.push_back(check_center(sig));
  out.push_back(check_twisted_center(sig));
  auto rho = check_rho_identity_suite(sig, trials, seed);
  out.insert(out.end(), rho.begin(), rho.end());
  return out;
}

std::vector<TheoremReport> run_all_checks_parallel(
    const std::vector<MetricSignature>& sigs, int trials, std::uint64_t seed,
    int threads) {
  std::vector<std::vector<TheoremReport>> buckets(sigs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < sigs.size(); ++i)
      buckets[i] = run_all_checks(sigs[i], trials, seed);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    const int workers =
        std::min<int>(threads, static_cast<int>(sigs.size()));
    std::mutex mu;
    for (int wi = 0; wi < workers; ++wi)
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t mine;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= sigs.size()) return;
            mine = next++;
          }
          buckets[mine] = run_all_checks(sigs[mine], trials, seed);
        }
      });
    for (auto& th : pool) th.join();
  }
  std::vector<TheoremReport> out;
  for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace cliff
