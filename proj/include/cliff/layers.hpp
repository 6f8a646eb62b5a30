#pragma once

#include <array>
#include <string>
#include <vector>

#include "cliff/multivector.hpp"
#include "cliff/random.hpp"

namespace cliff {

struct ShapeMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A tuple of multivector channels over one signature.
using MVChannels = std::vector<Multivector>;

// Grade-triple sparsity of the geometric product for one signature:
// (i, j, k) is present iff some blade pair of grades (i, j) multiplies
// into grade k with nonzero sign. Cached per signature.
struct ProductMask {
  std::vector<std::array<int, 3>> triples;
  // per blade pair (a << n) | b: index into `triples`, -1 when the pair
  // vanishes. Populated for n <= 8.
  std::vector<int> triple_of;

  int index_of(int i, int j, int k) const;  // -1 when absent

  static const ProductMask& get(const MetricSignature& sig);
};

struct LinearParams {
  int c_out = 0;
  int c_in = 0;
  int grades = 0;  // n + 1
  std::vector<double> phi;   // [c_out][c_in][grade]
  std::vector<double> bias;  // [c_out], applied to grade 0; empty = none

  static LinearParams zeros(const MetricSignature& sig, int c_out, int c_in,
                            bool with_bias);
  double& at(int o, int i, int k) {
    return phi[(o * c_in + i) * grades + k];
  }
  double at(int o, int i, int k) const {
    return phi[(o * c_in + i) * grades + k];
  }
};

struct ProductParams {
  bool elementwise = true;
  int c_out = 0;
  int c_in = 0;  // equals c_out for element-wise
  int n_triples = 0;
  std::vector<double> phi;  // elementwise: [c][triple]; full: [c_out][c_in][triple]

  static ProductParams zeros(const MetricSignature& sig, int c_out, int c_in,
                             bool elementwise);
  double& at(int o, int i, int t) {
    return phi[(o * (elementwise ? 1 : c_in) + (elementwise ? 0 : i)) *
                   n_triples +
               t];
  }
  double at(int o, int i, int t) const {
    return phi[(o * (elementwise ? 1 : c_in) + (elementwise ? 0 : i)) *
                   n_triples +
               t];
  }
};

struct NormParams {
  std::vector<double> a;  // grades 1..n
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Denominator of the grade-wise normalization with the zero guard:
// sigma(a_m) (qbar - 1) + 1, clamped away from zero at eps with the sign
// preserved (sign(0) = +1).
double norm_denominator(double a_m, double qbar, double eps = 1e-6);

MVChannels embed(const MetricSignature& sig,
                 const std::vector<double>& scalars,
                 const std::vector<std::vector<double>>& vectors);
double extract_scalar(const MVChannels& y, int c);
std::vector<double> extract_vector(const MVChannels& y, int c);

MVChannels mv_linear(const LinearParams& p, const MVChannels& x);

MVChannels geometric_product_layer_elementwise(const ProductParams& p,
                                               const MVChannels& x,
                                               const MVChannels& y);

MVChannels geometric_product_layer_full(const ProductParams& p,
                                        const MVChannels& x,
                                        const MVChannels& y);

MVChannels mv_normalize(const NormParams& p, const MVChannels& x);

// Grade 0: ReLU on the scalar coefficient; grade m >= 1: scale by
// sigmoid(qbar(x^(m))).
MVChannels gated_nonlinearity(const MVChannels& x);

// ---- layer stacks -------------------------------------------------------

enum class LayerType { kLinear, kGpElementwise, kGpFull, kNormalize, kGate };

struct LayerSpec {
  LayerType type = LayerType::kLinear;
  int c_in = 0;
  int c_out = 0;
  bool bias = true;  // linear only
};

enum class HeadKind { kScalar, kPseudoscalar };

struct LayerStack {
  MetricSignature sig{0, 0, 0};
  std::vector<LayerSpec> layers;
  HeadKind head = HeadKind::kScalar;
  int head_channel = 0;

  int input_channels() const;
  int output_channels() const;

  std::string to_json_string() const;
  static LayerStack from_json_string(const std::string& text);
};

// Flat parameter vector for a stack, with per-layer segment offsets.
// Product layers own an internal bias-free linear map computing the
// second product operand.
struct StackParams {
  struct Segment {
    std::size_t mix_offset = 0;   // internal linear of product layers
    std::size_t phi_offset = 0;   // main coefficients
    std::size_t bias_offset = 0;  // linear bias (when present)
    std::size_t norm_offset = 0;  // normalization scalars
  };
  std::vector<double> values;
  std::vector<Segment> segments;

  static StackParams init(const LayerStack& stack, Rng& rng);
  // Layout wrapped around existing values (e.g. loaded from a file).
  static StackParams with_values(const LayerStack& stack,
                                 std::vector<double> values);
  static std::size_t count(const LayerStack& stack);

  LinearParams linear_view(const LayerStack& stack, int layer) const;
  LinearParams mix_view(const LayerStack& stack, int layer) const;
  ProductParams product_view(const LayerStack& stack, int layer) const;
  NormParams norm_view(const LayerStack& stack, int layer) const;
};

// Sequential application of the stack.
MVChannels cgenn_forward(const LayerStack& stack, const StackParams& params,
                         const MVChannels& x);

// Reads the configured head coefficient from the forward output.
double forward_head(const LayerStack& stack, const StackParams& params,
                    const MVChannels& x);

}  // namespace cliff
