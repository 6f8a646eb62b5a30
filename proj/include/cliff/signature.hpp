#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cliff {

// Maximum supported vector-space dimension; keeps the dense 2^n
// representation at or below 4096 coefficients.
inline constexpr int kMaxDim = 12;

struct SignatureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Real metric signature (p, q, r): p basis vectors squaring to +1,
// q_neg to -1, r to 0. Basis order is fixed as +1 block, -1 block,
// then the radical block last; group code relies on this ordering.
class MetricSignature {
 public:
  MetricSignature(int p, int q_neg, int r) : p_(p), q_neg_(q_neg), r_(r) {
    if (p < 0 || q_neg < 0 || r < 0)
      throw SignatureError("signature counts must be non-negative");
    if (p + q_neg + r > kMaxDim)
      throw SignatureError("signature dimension exceeds " +
                           std::to_string(kMaxDim));
  }

  int p() const { return p_; }
  int q_neg() const { return q_neg_; }
  int r() const { return r_; }

  int dim() const { return p_ + q_neg_ + r_; }
  int nondegenerate_dim() const { return p_ + q_neg_; }
  int radical_dim() const { return r_; }
  std::size_t algebra_dim() const { return std::size_t{1} << dim(); }

  // q(e_i) for the 0-based basis index i.
  double metric(int i) const {
    if (i < p_) return 1.0;
    if (i < p_ + q_neg_) return -1.0;
    return 0.0;
  }

  bool is_radical_index(int i) const { return i >= p_ + q_neg_; }

  // Bitmask selecting the radical basis indices.
  std::uint32_t radical_mask() const {
    std::uint32_t all = (std::uint32_t{1} << dim()) - 1;
    std::uint32_t nondeg = (std::uint32_t{1} << nondegenerate_dim()) - 1;
    return all & ~nondeg;
  }

  std::string str() const {
    return std::to_string(p_) + "," + std::to_string(q_neg_) + "," +
           std::to_string(r_);
  }

  // Parses "p,q,r".
  static MetricSignature parse(const std::string& text);

  friend bool operator==(const MetricSignature& a, const MetricSignature& b) {
    return a.p_ == b.p_ && a.q_neg_ == b.q_neg_ && a.r_ == b.r_;
  }
  friend bool operator!=(const MetricSignature& a, const MetricSignature& b) {
    return !(a == b);
  }

 private:
  int p_;
  int q_neg_;
  int r_;
};

}  // namespace cliff
