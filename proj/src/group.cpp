#include "cliff/group.hpp"

#include <cmath>

namespace cliff {

namespace {

double vector_q(const std::vector<double>& coords, const MetricSignature& sig) {
  double q = 0.0;
  for (int i = 0; i < sig.dim(); ++i) q += coords[i] * coords[i] * sig.metric(i);
  return q;
}

Multivector expand_generator(const VersorGenerator& g,
                             const MetricSignature& sig, bool inverse) {
  switch (g.kind) {
    case VersorGenerator::Kind::kScalar:
      return Multivector::scalar(sig, inverse ? 1.0 / g.scale : g.scale);
    case VersorGenerator::Kind::kVector: {
      const double q = vector_q(g.coords, sig);
      if (q == 0.0)
        throw std::invalid_argument("vector generator is null (q(v) = 0)");
      Multivector v = Multivector::vector(sig, g.coords);
      return inverse ? v * (1.0 / q) : v;
    }
    case VersorGenerator::Kind::kGamma:
    default: {
      Multivector x = Multivector::one(sig);
      const int base = sig.nondegenerate_dim();
      const double s = inverse ? -1.0 : 1.0;
      for (int j = 0; j < sig.radical_dim(); ++j) {
        const std::uint32_t mask = (std::uint32_t{1} << g.gamma_index) |
                                   (std::uint32_t{1} << (base + j));
        x[mask] = s * g.gamma_coeffs[j];
      }
      return x;
    }
  }
}

int generator_parity(const VersorGenerator& g) {
  return g.kind == VersorGenerator::Kind::kVector ? 1 : 0;
}

}  // namespace

VersorGenerator VersorGenerator::make_scalar(double c) {
  if (c == 0.0) throw std::invalid_argument("scalar generator must be nonzero");
  VersorGenerator g;
  g.kind = Kind::kScalar;
  g.scale = c;
  return g;
}

VersorGenerator VersorGenerator::make_vector(std::vector<double> coords) {
  VersorGenerator g;
  g.kind = Kind::kVector;
  g.coords = std::move(coords);
  return g;
}

VersorGenerator VersorGenerator::make_gamma(int basis_index,
                                            std::vector<double> coeffs) {
  VersorGenerator g;
  g.kind = Kind::kGamma;
  g.gamma_index = basis_index;
  g.gamma_coeffs = std::move(coeffs);
  return g;
}

Versor::Versor(MetricSignature sig)
    : sig_(sig), expanded_(Multivector::one(sig)),
      inverse_(Multivector::one(sig)) {}

Versor::Versor(MetricSignature sig, std::vector<VersorGenerator> generators)
    : sig_(sig), gens_(std::move(generators)),
      expanded_(Multivector::one(sig)), inverse_(Multivector::one(sig)) {
  for (const auto& g : gens_) {
    if (g.kind == VersorGenerator::Kind::kVector &&
        static_cast<int>(g.coords.size()) != sig_.dim())
      throw std::invalid_argument("vector generator has wrong dimension");
    if (g.kind == VersorGenerator::Kind::kGamma) {
      if (g.gamma_index < 0 || g.gamma_index >= sig_.nondegenerate_dim())
        throw std::invalid_argument("gamma index must be non-radical");
      if (static_cast<int>(g.gamma_coeffs.size()) != sig_.radical_dim())
        throw std::invalid_argument("gamma coefficient count must equal r");
    }
    expanded_ = expanded_ * expand_generator(g, sig_, false);
    parity_ = (parity_ + generator_parity(g)) & 1;
  }
  for (auto it = gens_.rbegin(); it != gens_.rend(); ++it)
    inverse_ = inverse_ * expand_generator(*it, sig_, true);

  const Multivector one = Multivector::one(sig_);
  const double scale =
      std::max(1.0, sup_norm(expanded_) * sup_norm(inverse_));
  if (max_abs_diff(expanded_ * inverse_, one) > 1e-9 * scale ||
      max_abs_diff(inverse_ * expanded_, one) > 1e-9 * scale)
    throw std::invalid_argument("versor inverse verification failed");
}

Versor Versor::reflection(const MetricSignature& sig,
                          const std::vector<double>& normal) {
  return Versor(sig, {VersorGenerator::make_vector(normal)});
}

Versor Versor::inverted() const {
  std::vector<VersorGenerator> gens;
  gens.reserve(gens_.size());
  for (auto it = gens_.rbegin(); it != gens_.rend(); ++it) {
    VersorGenerator g = *it;
    switch (g.kind) {
      case VersorGenerator::Kind::kScalar:
        g.scale = 1.0 / g.scale;
        break;
      case VersorGenerator::Kind::kVector: {
        const double q = vector_q(g.coords, sig_);
        for (auto& c : g.coords) c /= q;
        break;
      }
      case VersorGenerator::Kind::kGamma:
        for (auto& c : g.gamma_coeffs) c = -c;
        break;
    }
    gens.push_back(std::move(g));
  }
  return Versor(sig_, std::move(gens));
}

Versor operator*(const Versor& a, const Versor& b) {
  if (a.sig_ != b.sig_)
    throw SignatureMismatchError("versor product across signatures");
  std::vector<VersorGenerator> gens = a.gens_;
  gens.insert(gens.end(), b.gens_.begin(), b.gens_.end());
  return Versor(a.sig_, std::move(gens));
}

Multivector twisted_conjugation(const Versor& w, const Multivector& x) {
  if (w.signature() != x.signature())
    throw SignatureMismatchError("versor and operand signatures differ");
  const Multivector y = w.parity() ? alpha(x) : x;
  return w.expanded() * y * w.inverse();
}

Multivector twisted_conjugation(const Multivector& w, const Multivector& x) {
  if (w.signature() != x.signature())
    throw SignatureMismatchError("operand signatures differ");
  const int par = parity_of(w, 1e-12);
  if (par < 0)
    throw std::invalid_argument(
        "twisted conjugation requires a parity-homogeneous element");
  const Multivector winv = general_inverse(w);
  return w * (par ? alpha(x) : x) * winv;
}

Versor sample_versor(const MetricSignature& sig, int k, bool include_gamma,
                     bool include_scalar, Rng& rng) {
  if (k < 0) throw std::invalid_argument("reflection count must be >= 0");
  std::vector<VersorGenerator> gens;
  if (include_scalar) {
    const double mag = rng.uniform(0.5, 2.0);
    gens.push_back(VersorGenerator::make_scalar(rng.coin() ? mag : -mag));
  }
  const int n = sig.dim();
  for (int l = 0; l < k; ++l) {
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      std::vector<double> coords(n);
      double sup = 0.0;
      for (int i = 0; i < n; ++i) {
        coords[i] = rng.uniform(-1.0, 1.0);
        sup = std::max(sup, std::abs(coords[i]));
      }
      if (sup < 1e-12) continue;
      for (auto& c : coords) c /= sup;
      if (std::abs(vector_q(coords, sig)) > 0.1) {
        gens.push_back(VersorGenerator::make_vector(std::move(coords)));
        found = true;
      }
    }
    if (!found)
      throw NullVectorSamplingError(
          "could not sample a non-null vector in 1000 draws");
  }
  if (include_gamma && sig.radical_dim() > 0) {
    for (int i = 0; i < sig.nondegenerate_dim(); ++i) {
      std::vector<double> coeffs(sig.radical_dim());
      for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
      gens.push_back(VersorGenerator::make_gamma(i, std::move(coeffs)));
    }
  }
  return Versor(sig, std::move(gens));
}

Mat rho_matrix(const Versor& w, int m) {
  const int n = w.signature().dim();
  const auto masks = grade_masks(n, m);
  Mat r(masks.size(), masks.size());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const Multivector image =
        twisted_conjugation(w, Multivector::blade(w.signature(), masks[j]));
    for (std::size_t i = 0; i < masks.size(); ++i) r(i, j) = image[masks[i]];
  }
  return r;
}

MembershipResult is_clifford_group_member(const Multivector& x, double tol) {
  if (parity_of(x, tol) < 0) return {false, "mixed parity"};
  Multivector inv(x.signature());
  try {
    inv = general_inverse(x);
  } catch (const NotInvertibleError&) {
    return {false, "not invertible"};
  }
  const int par = parity_of(x, tol);
  for (int i = 0; i < x.signature().dim(); ++i) {
    const Multivector e = Multivector::basis_vector(x.signature(), i);
    const Multivector image = x * (par ? alpha(e) : e) * inv;
    if (max_abs_diff(image, grade_projection(image, 1)) > tol)
      return {false, "rho image of a vector leaves grade 1"};
  }
  return {true, ""};
}

Multivector spinor_norm(const Multivector& x) { return beta(x) * x; }

Multivector clifford_norm(const Multivector& x) { return gamma_conj(x) * x; }

double qbar_group_hom(const Versor& w) {
  return extended_quadratic(w.expanded());
}

bool pin_member(const Versor& w, double tol) {
  return std::abs(std::abs(qbar_group_hom(w)) - 1.0) <= tol;
}

bool spin_member(const Versor& w, double tol) {
  return w.parity() == 0 && pin_member(w, tol);
}

double OrthogonalMap::orthogonality_residual() const {
  const Mat delta = signature_matrix(sig);
  return (matrix.transpose() * delta * matrix - delta).cwiseAbs().maxCoeff();
}

double OrthogonalMap::radical_preservation_residual() const {
  const int n = sig.dim();
  const int m = sig.nondegenerate_dim();
  double res = 0.0;
  for (int j = m; j < n; ++j)
    for (int i = 0; i < n; ++i)
      res = std::max(res, std::abs(matrix(i, j) - (i == j ? 1.0 : 0.0)));
  return res;
}

OrthogonalMap rho_orthogonal_map(const Versor& w) {
  return {w.signature(), rho_matrix(w, 1)};
}

namespace {

// b(v, x) over the non-degenerate block.
double block_bilinear(const Vec& v, const Vec& x, const MetricSignature& sig) {
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += v[i] * x[i] * sig.metric(i);
  return acc;
}

void apply_reflection(Mat& r, const Vec& v, const MetricSignature& sig) {
  const double qv = block_bilinear(v, v, sig);
  for (int j = 0; j < r.cols(); ++j) {
    Vec col = r.col(j);
    r.col(j) = col - (2.0 * block_bilinear(v, col, sig) / qv) * v;
  }
}

VersorGenerator embedded_reflection(const Vec& v, const MetricSignature& sig) {
  const int m = static_cast<int>(v.size());
  const double qv = std::abs(block_bilinear(v, v, sig));
  const double scale = 1.0 / std::sqrt(qv);
  std::vector<double> coords(sig.dim(), 0.0);
  for (int i = 0; i < m; ++i) coords[i] = v[i] * scale;
  return VersorGenerator::make_vector(std::move(coords));
}

}  // namespace

Versor lift_orthogonal(const OrthogonalMap& phi, double tol) {
  const MetricSignature& sig = phi.sig;
  const int n = sig.dim();
  const int m = sig.nondegenerate_dim();
  const int r = sig.radical_dim();
  if (phi.matrix.rows() != n || phi.matrix.cols() != n)
    throw std::invalid_argument("orthogonal map has wrong dimensions");
  if (phi.radical_preservation_residual() > tol)
    throw NotRadicalPreservingError(
        "map does not restrict to the identity on the radical");
  if (phi.orthogonality_residual() > std::max(tol, 1e-8))
    throw DecompositionFailedError("input matrix is not orthogonal");

  std::vector<VersorGenerator> gens;
  Mat rblock = phi.matrix.topLeftCorner(m, m);
  int reflections = 0;
  for (int j = 0; j < m; ++j) {
    Vec c = rblock.col(j);
    Vec d = Vec::Zero(m);
    d[j] = 1.0;
    if ((c - d).cwiseAbs().maxCoeff() < 1e-9) continue;
    const Vec diff = c - d;
    const Vec sum = c + d;
    const double q_diff = std::abs(block_bilinear(diff, diff, sig));
    const double q_sum = std::abs(block_bilinear(sum, sum, sig));
    // q(c-d) + q(c+d) = 4 q(e_j), so at least one side is well
    // conditioned; prefer c-d unless it is degenerate or much worse.
    if (q_diff >= std::max(1e-8, 0.01 * q_sum)) {
      apply_reflection(rblock, diff, sig);
      gens.push_back(embedded_reflection(diff, sig));
      ++reflections;
    } else {
      apply_reflection(rblock, sum, sig);
      gens.push_back(embedded_reflection(sum, sig));
      apply_reflection(rblock, d, sig);
      gens.push_back(embedded_reflection(d, sig));
      reflections += 2;
    }
    if (reflections > 2 * n)
      throw DecompositionFailedError("reflection count exceeded 2n");
  }
  if ((rblock - Mat::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-7)
    throw DecompositionFailedError(
        "reflections failed to reduce the block to the identity");

  for (int i = 0; i < m; ++i) {
    std::vector<double> coeffs(r, 0.0);
    bool nonzero = false;
    for (int j = 0; j < r; ++j) {
      const double entry = phi.matrix(m + j, i);
      if (entry != 0.0) {
        coeffs[j] = -entry / (2.0 * sig.metric(i));
        nonzero = true;
      }
    }
    if (nonzero) gens.push_back(VersorGenerator::make_gamma(i, coeffs));
  }
  return Versor(sig, std::move(gens));
}

}  // namespace cliff
