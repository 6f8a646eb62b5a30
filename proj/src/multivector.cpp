#include "cliff/multivector.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace cliff {

namespace {

void check_same_signature(const Multivector& a, const Multivector& b) {
  if (a.signature() != b.signature())
    throw SignatureMismatchError("operands have different metric signatures");
}

}  // namespace

MetricSignature MetricSignature::parse(const std::string& text) {
  int vals[3];
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    if (pos >= text.size()) throw SignatureError("expected \"p,q,r\"");
    std::size_t used = 0;
    int v;
    try {
      v = std::stoi(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw SignatureError("expected \"p,q,r\", got \"" + text + "\"");
    }
    if (v < 0) throw SignatureError("signature counts must be non-negative");
    vals[k] = v;
    pos += used;
    if (k < 2) {
      if (pos >= text.size() || text[pos] != ',')
        throw SignatureError("expected \"p,q,r\", got \"" + text + "\"");
      ++pos;
    }
  }
  if (pos != text.size())
    throw SignatureError("expected \"p,q,r\", got \"" + text + "\"");
  return MetricSignature(vals[0], vals[1], vals[2]);
}

double blade_sign(std::uint32_t a, std::uint32_t b,
                  const MetricSignature& sig) {
  int swaps = 0;
  std::uint32_t t = a >> 1;
  while (t != 0) {
    swaps += std::popcount(t & b);
    t >>= 1;
  }
  double s = (swaps & 1) ? -1.0 : 1.0;
  std::uint32_t common = a & b;
  while (common != 0) {
    const int i = std::countr_zero(common);
    s *= sig.metric(i);
    common &= common - 1;
  }
  return s;
}

BladeProduct blade_product(std::uint32_t a, std::uint32_t b,
                           const MetricSignature& sig) {
  return {blade_sign(a, b, sig), a ^ b};
}

CayleyTable::CayleyTable(const MetricSignature& s)
    : sig(s), n(s.dim()), dim(s.algebra_dim()) {
  metric.resize(n);
  for (int i = 0; i < n; ++i) metric[i] = s.metric(i);
  grade.resize(dim);
  blade_q.resize(dim);
  for (std::size_t m = 0; m < dim; ++m) {
    grade[m] = static_cast<std::int8_t>(std::popcount(m));
    double q = 1.0;
    std::uint32_t bits = static_cast<std::uint32_t>(m);
    while (bits != 0) {
      q *= metric[std::countr_zero(bits)];
      bits &= bits - 1;
    }
    blade_q[m] = q;
  }
  if (n <= 8) {
    signs.resize(dim * dim);
    for (std::uint32_t a = 0; a < dim; ++a)
      for (std::uint32_t b = 0; b < dim; ++b)
        signs[(std::size_t{a} << n) | b] =
            static_cast<std::int8_t>(blade_sign(a, b, s));
  }
}

const CayleyTable& cayley_table(const MetricSignature& sig) {
  static std::mutex mu;
  static std::map<std::array<int, 3>, std::unique_ptr<CayleyTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::array<int, 3>{sig.p(), sig.q_neg(), sig.r()};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<CayleyTable>(sig)).first;
  return *it->second;
}

Multivector Multivector::vector(const MetricSignature& sig,
                                const std::vector<double>& coords) {
  if (static_cast<int>(coords.size()) != sig.dim())
    throw std::invalid_argument("coordinate count does not match dimension");
  Multivector x(sig);
  for (int i = 0; i < sig.dim(); ++i) x.c_[std::uint32_t{1} << i] = coords[i];
  return x;
}

Multivector& Multivector::operator+=(const Multivector& rhs) {
  check_same_signature(*this, rhs);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& rhs) {
  check_same_signature(*this, rhs);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
  return *this;
}

Multivector& Multivector::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Multivector geometric_product(const Multivector& x, const Multivector& y) {
  check_same_signature(x, y);
  const auto& tab = cayley_table(x.signature());
  Multivector res(x.signature());
  const std::size_t dim = tab.dim;
  const double* xa = x.c_.data();
  const double* yb = y.c_.data();
  double* out = res.c_.data();
  if (!tab.signs.empty()) {
    const int n = tab.n;
    for (std::size_t a = 0; a < dim; ++a) {
      const double va = xa[a];
      if (va == 0.0) continue;
      const std::int8_t* row = tab.signs.data() + (a << n);
      for (std::size_t b = 0; b < dim; ++b) {
        const double vb = yb[b];
        if (vb == 0.0) continue;
        const int s = row[b];
        if (s != 0) out[a ^ b] += s * va * vb;
      }
    }
  } else {
    for (std::size_t a = 0; a < dim; ++a) {
      const double va = xa[a];
      if (va == 0.0) continue;
      for (std::size_t b = 0; b < dim; ++b) {
        const double vb = yb[b];
        if (vb == 0.0) continue;
        const double s = blade_sign(static_cast<std::uint32_t>(a),
                                    static_cast<std::uint32_t>(b),
                                    x.signature());
        if (s != 0.0) out[a ^ b] += s * va * vb;
      }
    }
  }
  return res;
}

Multivector grade_projection(const Multivector& x, int m) {
  Multivector res(x.signature());
  if (m < 0 || m > x.signature().dim()) return res;
  const auto& tab = cayley_table(x.signature());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (tab.grade[i] == m) res[i] = x[i];
  return res;
}

Multivector even_part(const Multivector& x) {
  Multivector res(x.signature());
  const auto& tab = cayley_table(x.signature());
  for (std::size_t i = 0; i < x.size(); ++i)
    if ((tab.grade[i] & 1) == 0) res[i] = x[i];
  return res;
}

Multivector odd_part(const Multivector& x) {
  Multivector res(x.signature());
  const auto& tab = cayley_table(x.signature());
  for (std::size_t i = 0; i < x.size(); ++i)
    if ((tab.grade[i] & 1) == 1) res[i] = x[i];
  return res;
}

namespace {

// (-1)^k, (-1)^{k(k-1)/2}, (-1)^{k(k+1)/2} per blade grade k.
Multivector apply_grade_sign(const Multivector& x, int which) {
  Multivector res(x.signature());
  const auto& tab = cayley_table(x.signature());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int k = tab.grade[i];
    int exponent = 0;
    switch (which) {
      case 0: exponent = k; break;
      case 1: exponent = (k * (k - 1)) / 2; break;
      default: exponent = (k * (k + 1)) / 2; break;
    }
    res[i] = (exponent & 1) ? -x[i] : x[i];
  }
  return res;
}

}  // namespace

Multivector alpha(const Multivector& x) { return apply_grade_sign(x, 0); }
Multivector beta(const Multivector& x) { return apply_grade_sign(x, 1); }
Multivector gamma_conj(const Multivector& x) { return apply_grade_sign(x, 2); }

double zero_projection(const Multivector& x) { return x[0]; }

double extended_bilinear(const Multivector& x, const Multivector& y) {
  check_same_signature(x, y);
  const auto& tab = cayley_table(x.signature());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i] * tab.blade_q[i];
  return acc;
}

double extended_quadratic(const Multivector& x) {
  return extended_bilinear(x, x);
}

double sup_norm(const Multivector& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

double max_abs_diff(const Multivector& x, const Multivector& y) {
  check_same_signature(x, y);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i] - y[i]);
    if (a > m) m = a;
  }
  return m;
}

int parity_of(const Multivector& x, double tol) {
  const double e = sup_norm(even_part(x));
  const double o = sup_norm(odd_part(x));
  if (e > tol && o > tol) return -1;
  return o > tol ? 1 : 0;
}

Multivector random_multivector(const MetricSignature& sig, Rng& rng, double lo,
                               double hi) {
  Multivector x(sig);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

std::vector<std::uint32_t> grade_masks(int n, int m) {
  std::vector<std::uint32_t> masks;
  const std::uint32_t dim = std::uint32_t{1} << n;
  for (std::uint32_t a = 0; a < dim; ++a)
    if (std::popcount(a) == m) masks.push_back(a);
  return masks;
}

std::string blade_name(std::uint32_t mask) {
  if (mask == 0) return "1";
  std::string name = "e";
  for (int i = 0; i < 32; ++i)
    if (mask & (std::uint32_t{1} << i)) name += std::to_string(i + 1);
  return name;
}

}  // namespace cliff
