#pragma once

#include <cstdint>
#include <vector>

#include "cliff/layers.hpp"
#include "cliff/multivector.hpp"

namespace cliff {

struct NonScalarLossError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Optimizable scalars and their accumulated gradients.
struct ParamStore {
  std::vector<double> w;
  std::vector<double> g;

  explicit ParamStore(std::vector<double> values)
      : w(std::move(values)), g(w.size(), 0.0) {}
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

// Reverse-mode tape over multivector-valued nodes. The graph is built
// once; forward() re-evaluates it for new leaf values and backward()
// accumulates adjoints in exact reverse append order, writing parameter
// gradients into the ParamStore.
class Tape {
 public:
  explicit Tape(MetricSignature sig);

  const MetricSignature& signature() const { return sig_; }

  // ---- leaves ----
  int input_mv();
  int input_scalar();
  int const_scalar(double value);
  int param(int param_index);

  void set_input(int node, const Multivector& value);
  void set_scalar(int node, double value);

  // ---- multivector ops ----
  int add(int a, int b);
  int sub(int a, int b);
  int geometric_product(int a, int b);
  int grade_proj(int a, int m);
  int mul_scalar(int mv, int s);   // s * x, s a scalar node
  int scalar_to_mv(int s);         // grade-0 embedding
  int coeff(int mv, std::uint32_t mask);  // scalar extraction
  int qbar(int mv);                // extended quadratic form, scalar

  // ---- scalar ops ----
  int add_s(int a, int b);
  int sub_s(int a, int b);
  int mul_s(int a, int b);
  int sigmoid_s(int a);
  int relu_s(int a);
  int recip_guard(int a, double eps = 1e-6);

  // ---- fused layer ops (one node per output channel) ----
  // phi_param[i * grades + k] indexes the store; bias_param < 0 = none.
  int linear_channel(const std::vector<int>& inputs,
                     const std::vector<int>& phi_params, int bias_param);
  // sum over pairs p of sum_{ijk} phi[p*T + t] (x_p^(i) y_p^(j))^(k);
  // xy_pairs = [x0, y0, x1, y1, ...].
  int product_sum(const std::vector<int>& xy_pairs,
                  const std::vector<int>& phi_params);
  // norm_params: a_1..a_n.
  int normalize_channel(int input, const std::vector<int>& norm_params);
  int gate_channel(int input);

  // ---- execution ----
  void forward(const ParamStore& store);
  // Seeds d(loss)/d(loss) = 1; requires a scalar loss node.
  void backward(ParamStore& store, int loss_node);

  Multivector value_mv(int node) const;
  double value_scalar(int node) const;
  Multivector adjoint_mv(int node) const;
  double adjoint_scalar(int node) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    kInputMV, kInputScalar, kConstScalar, kParam,
    kAdd, kSub, kGeomProd, kGradeProj, kMulScalar, kScalarToMV, kCoeff,
    kQbar, kAddS, kSubS, kMulS, kSigmoidS, kReluS, kRecipGuard,
    kLinear, kProductSum, kNormalize, kGate,
  };

  struct Node {
    Op op;
    bool scalar;
    std::vector<int> in;
    std::vector<int> pidx;
    int grade = 0;
    std::uint32_t mask = 0;
    double imm = 0.0;
    std::vector<double> val;
    std::vector<double> adj;
    std::vector<double> scratch;
  };

  int push(Node n);
  Node make_mv(Op op);
  Node make_scalar(Op op);
  void eval(Node& n, const ParamStore& store);
  void propagate(Node& n, ParamStore& store);

  MetricSignature sig_;
  const CayleyTable* tab_;
  const ProductMask* pmask_;
  std::vector<Node> nodes_;
};

// Graph of a whole layer stack wired to a StackParams-compatible store.
struct StackGraph {
  std::vector<int> inputs;
  std::vector<int> outputs;
  int head = -1;  // scalar node reading the configured head coefficient
};

StackGraph build_stack_graph(Tape& tape, const LayerStack& stack,
                             const StackParams& layout);

}  // namespace cliff
