#include "cliff/autodiff.hpp"

#include <cmath>

namespace cliff {

Tape::Tape(MetricSignature sig)
    : sig_(sig), tab_(&cayley_table(sig)), pmask_(&ProductMask::get(sig)) {}

Tape::Node Tape::make_mv(Op op) {
  Node n;
  n.op = op;
  n.scalar = false;
  n.val.assign(tab_->dim, 0.0);
  n.adj.assign(tab_->dim, 0.0);
  return n;
}

Tape::Node Tape::make_scalar(Op op) {
  Node n;
  n.op = op;
  n.scalar = true;
  n.val.assign(1, 0.0);
  n.adj.assign(1, 0.0);
  return n;
}

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input_mv() { return push(make_mv(Op::kInputMV)); }

int Tape::input_scalar() { return push(make_scalar(Op::kInputScalar)); }

int Tape::const_scalar(double value) {
  Node n = make_scalar(Op::kConstScalar);
  n.val[0] = value;
  n.imm = value;
  return push(std::move(n));
}

int Tape::param(int param_index) {
  Node n = make_scalar(Op::kParam);
  n.pidx = {param_index};
  return push(std::move(n));
}

void Tape::set_input(int node, const Multivector& value) {
  if (value.signature() != sig_)
    throw SignatureMismatchError("tape input signature mismatch");
  nodes_[node].val = value.coeffs();
}

void Tape::set_scalar(int node, double value) { nodes_[node].val[0] = value; }

int Tape::add(int a, int b) {
  Node n = make_mv(Op::kAdd);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  Node n = make_mv(Op::kSub);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::geometric_product(int a, int b) {
  Node n = make_mv(Op::kGeomProd);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::grade_proj(int a, int m) {
  Node n = make_mv(Op::kGradeProj);
  n.in = {a};
  n.grade = m;
  return push(std::move(n));
}

int Tape::mul_scalar(int mv, int s) {
  Node n = make_mv(Op::kMulScalar);
  n.in = {mv, s};
  return push(std::move(n));
}

int Tape::scalar_to_mv(int s) {
  Node n = make_mv(Op::kScalarToMV);
  n.in = {s};
  return push(std::move(n));
}

int Tape::coeff(int mv, std::uint32_t mask) {
  Node n = make_scalar(Op::kCoeff);
  n.in = {mv};
  n.mask = mask;
  return push(std::move(n));
}

int Tape::qbar(int mv) {
  Node n = make_scalar(Op::kQbar);
  n.in = {mv};
  return push(std::move(n));
}

int Tape::add_s(int a, int b) {
  Node n = make_scalar(Op::kAddS);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::sub_s(int a, int b) {
  Node n = make_scalar(Op::kSubS);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::mul_s(int a, int b) {
  Node n = make_scalar(Op::kMulS);
  n.in = {a, b};
  return push(std::move(n));
}

int Tape::sigmoid_s(int a) {
  Node n = make_scalar(Op::kSigmoidS);
  n.in = {a};
  return push(std::move(n));
}

int Tape::relu_s(int a) {
  Node n = make_scalar(Op::kReluS);
  n.in = {a};
  return push(std::move(n));
}

int Tape::recip_guard(int a, double eps) {
  Node n = make_scalar(Op::kRecipGuard);
  n.in = {a};
  n.imm = eps;
  return push(std::move(n));
}

int Tape::linear_channel(const std::vector<int>& inputs,
                         const std::vector<int>& phi_params, int bias_param) {
  const int grades = sig_.dim() + 1;
  if (phi_params.size() != inputs.size() * static_cast<std::size_t>(grades))
    throw ShapeMismatchError("linear_channel: phi size mismatch");
  Node n = make_mv(Op::kLinear);
  n.in = inputs;
  n.pidx = phi_params;
  n.imm = bias_param >= 0 ? 1.0 : 0.0;
  if (bias_param >= 0) n.pidx.push_back(bias_param);
  return push(std::move(n));
}

int Tape::product_sum(const std::vector<int>& xy_pairs,
                      const std::vector<int>& phi_params) {
  if (xy_pairs.size() % 2 != 0)
    throw ShapeMismatchError("product_sum: inputs must come in (x, y) pairs");
  const std::size_t pairs = xy_pairs.size() / 2;
  if (phi_params.size() != pairs * pmask_->triples.size())
    throw ShapeMismatchError("product_sum: phi size mismatch");
  Node n = make_mv(Op::kProductSum);
  n.in = xy_pairs;
  n.pidx = phi_params;
  return push(std::move(n));
}

int Tape::normalize_channel(int input, const std::vector<int>& norm_params) {
  if (norm_params.size() != static_cast<std::size_t>(sig_.dim()))
    throw ShapeMismatchError("normalize_channel: need one scalar per grade");
  Node n = make_mv(Op::kNormalize);
  n.in = {input};
  n.pidx = norm_params;
  n.scratch.assign(3 * (sig_.dim() + 1), 0.0);  // qbar, denom, guarded
  return push(std::move(n));
}

int Tape::gate_channel(int input) {
  Node n = make_mv(Op::kGate);
  n.in = {input};
  n.scratch.assign(2 * (sig_.dim() + 1), 0.0);  // qbar, gate value
  return push(std::move(n));
}

void Tape::eval(Node& n, const ParamStore& store) {
  const std::size_t dim = tab_->dim;
  const int grades = sig_.dim() + 1;
  switch (n.op) {
    case Op::kInputMV:
    case Op::kInputScalar:
      break;
    case Op::kConstScalar:
      n.val[0] = n.imm;
      break;
    case Op::kParam:
      n.val[0] = store.w[n.pidx[0]];
      break;
    case Op::kAdd: {
      const auto& a = nodes_[n.in[0]].val;
      const auto& b = nodes_[n.in[1]].val;
      for (std::size_t i = 0; i < dim; ++i) n.val[i] = a[i] + b[i];
      break;
    }
    case Op::kSub: {
      const auto& a = nodes_[n.in[0]].val;
      const auto& b = nodes_[n.in[1]].val;
      for (std::size_t i = 0; i < dim; ++i) n.val[i] = a[i] - b[i];
      break;
    }
    case Op::kGeomProd: {
      const auto& x = nodes_[n.in[0]].val;
      const auto& y = nodes_[n.in[1]].val;
      std::fill(n.val.begin(), n.val.end(), 0.0);
      const int nn = tab_->n;
      for (std::uint32_t a = 0; a < dim; ++a) {
        const double xa = x[a];
        if (xa == 0.0) continue;
        for (std::uint32_t b = 0; b < dim; ++b) {
          const double yb = y[b];
          if (yb == 0.0) continue;
          const double s = tab_->signs.empty()
                               ? blade_sign(a, b, sig_)
                               : tab_->signs[(std::size_t{a} << nn) | b];
          if (s != 0.0) n.val[a ^ b] += s * xa * yb;
        }
      }
      break;
    }
    case Op::kGradeProj: {
      const auto& x = nodes_[n.in[0]].val;
      for (std::size_t i = 0; i < dim; ++i)
        n.val[i] = tab_->grade[i] == n.grade ? x[i] : 0.0;
      break;
    }
    case Op::kMulScalar: {
      const auto& x = nodes_[n.in[0]].val;
      const double s = nodes_[n.in[1]].val[0];
      for (std::size_t i = 0; i < dim; ++i) n.val[i] = s * x[i];
      break;
    }
    case Op::kScalarToMV:
      std::fill(n.val.begin(), n.val.end(), 0.0);
      n.val[0] = nodes_[n.in[0]].val[0];
      break;
    case Op::kCoeff:
      n.val[0] = nodes_[n.in[0]].val[n.mask];
      break;
    case Op::kQbar: {
      const auto& x = nodes_[n.in[0]].val;
      double acc = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        acc += x[i] * x[i] * tab_->blade_q[i];
      n.val[0] = acc;
      break;
    }
    case Op::kAddS:
      n.val[0] = nodes_[n.in[0]].val[0] + nodes_[n.in[1]].val[0];
      break;
    case Op::kSubS:
      n.val[0] = nodes_[n.in[0]].val[0] - nodes_[n.in[1]].val[0];
      break;
    case Op::kMulS:
      n.val[0] = nodes_[n.in[0]].val[0] * nodes_[n.in[1]].val[0];
      break;
    case Op::kSigmoidS:
      n.val[0] = sigmoid(nodes_[n.in[0]].val[0]);
      break;
    case Op::kReluS: {
      const double v = nodes_[n.in[0]].val[0];
      n.val[0] = v > 0.0 ? v : 0.0;
      break;
    }
    case Op::kRecipGuard: {
      double d = nodes_[n.in[0]].val[0];
      if (std::abs(d) < n.imm) d = d < 0.0 ? -n.imm : n.imm;
      n.val[0] = 1.0 / d;
      break;
    }
    case Op::kLinear: {
      std::fill(n.val.begin(), n.val.end(), 0.0);
      const std::size_t cin = n.in.size();
      for (std::size_t i = 0; i < cin; ++i) {
        const auto& x = nodes_[n.in[i]].val;
        const int* phi = n.pidx.data() + i * grades;
        for (std::size_t m = 0; m < dim; ++m)
          n.val[m] += store.w[phi[tab_->grade[m]]] * x[m];
      }
      if (n.imm != 0.0) n.val[0] += store.w[n.pidx.back()];
      break;
    }
    case Op::kProductSum: {
      std::fill(n.val.begin(), n.val.end(), 0.0);
      const std::size_t pairs = n.in.size() / 2;
      const std::size_t t_count = pmask_->triples.size();
      const int nn = tab_->n;
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto& x = nodes_[n.in[2 * p]].val;
        const auto& y = nodes_[n.in[2 * p + 1]].val;
        const int* phi = n.pidx.data() + p * t_count;
        for (std::uint32_t a = 0; a < dim; ++a) {
          const double xa = x[a];
          if (xa == 0.0) continue;
          for (std::uint32_t b = 0; b < dim; ++b) {
            const double yb = y[b];
            if (yb == 0.0) continue;
            const std::size_t pair_idx = (std::size_t{a} << nn) | b;
            const int t = pmask_->triple_of[pair_idx];
            if (t < 0) continue;
            const double s = tab_->signs.empty()
                                 ? blade_sign(a, b, sig_)
                                 : tab_->signs[pair_idx];
            n.val[a ^ b] += store.w[phi[t]] * s * xa * yb;
          }
        }
      }
      break;
    }
    case Op::kNormalize: {
      const auto& x = nodes_[n.in[0]].val;
      const int nn = sig_.dim();
      double* qb = n.scratch.data();
      double* denom = qb + (nn + 1);
      double* guarded = denom + (nn + 1);
      std::fill(n.scratch.begin(), n.scratch.end(), 0.0);
      for (std::size_t m = 1; m < dim; ++m)
        qb[tab_->grade[m]] += x[m] * x[m] * tab_->blade_q[m];
      denom[0] = 1.0;
      for (int m = 1; m <= nn; ++m) {
        const double raw =
            sigmoid(store.w[n.pidx[m - 1]]) * (qb[m] - 1.0) + 1.0;
        if (std::abs(raw) < 1e-6) {
          denom[m] = raw < 0.0 ? -1e-6 : 1e-6;
          guarded[m] = 1.0;
        } else {
          denom[m] = raw;
        }
      }
      n.val[0] = x[0];
      for (std::size_t m = 1; m < dim; ++m)
        n.val[m] = x[m] / denom[tab_->grade[m]];
      break;
    }
    case Op::kGate: {
      const auto& x = nodes_[n.in[0]].val;
      const int nn = sig_.dim();
      double* qb = n.scratch.data();
      double* gate = qb + (nn + 1);
      std::fill(n.scratch.begin(), n.scratch.end(), 0.0);
      for (std::size_t m = 1; m < dim; ++m)
        qb[tab_->grade[m]] += x[m] * x[m] * tab_->blade_q[m];
      for (int m = 1; m <= nn; ++m) gate[m] = sigmoid(qb[m]);
      n.val[0] = x[0] > 0.0 ? x[0] : 0.0;
      for (std::size_t m = 1; m < dim; ++m)
        n.val[m] = gate[tab_->grade[m]] * x[m];
      break;
    }
  }
}

void Tape::propagate(Node& n, ParamStore& store) {
  const std::size_t dim = tab_->dim;
  const int grades = sig_.dim() + 1;
  switch (n.op) {
    case Op::kInputMV:
    case Op::kInputScalar:
    case Op::kConstScalar:
      break;
    case Op::kParam:
      store.g[n.pidx[0]] += n.adj[0];
      break;
    case Op::kAdd: {
      auto& a = nodes_[n.in[0]].adj;
      auto& b = nodes_[n.in[1]].adj;
      for (std::size_t i = 0; i < dim; ++i) {
        a[i] += n.adj[i];
        b[i] += n.adj[i];
      }
      break;
    }
    case Op::kSub: {
      auto& a = nodes_[n.in[0]].adj;
      auto& b = nodes_[n.in[1]].adj;
      for (std::size_t i = 0; i < dim; ++i) {
        a[i] += n.adj[i];
        b[i] -= n.adj[i];
      }
      break;
    }
    case Op::kGeomProd: {
      const auto& x = nodes_[n.in[0]].val;
      const auto& y = nodes_[n.in[1]].val;
      auto& xadj = nodes_[n.in[0]].adj;
      auto& yadj = nodes_[n.in[1]].adj;
      const int nn = tab_->n;
      for (std::uint32_t a = 0; a < dim; ++a)
        for (std::uint32_t b = 0; b < dim; ++b) {
          const double s = tab_->signs.empty()
                               ? blade_sign(a, b, sig_)
                               : tab_->signs[(std::size_t{a} << nn) | b];
          if (s == 0.0) continue;
          const double za = n.adj[a ^ b];
          if (za == 0.0) continue;
          xadj[a] += s * y[b] * za;
          yadj[b] += s * x[a] * za;
        }
      break;
    }
    case Op::kGradeProj: {
      auto& xadj = nodes_[n.in[0]].adj;
      for (std::size_t i = 0; i < dim; ++i)
        if (tab_->grade[i] == n.grade) xadj[i] += n.adj[i];
      break;
    }
    case Op::kMulScalar: {
      const auto& x = nodes_[n.in[0]].val;
      const double s = nodes_[n.in[1]].val[0];
      auto& xadj = nodes_[n.in[0]].adj;
      double sadj = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        xadj[i] += s * n.adj[i];
        sadj += x[i] * n.adj[i];
      }
      nodes_[n.in[1]].adj[0] += sadj;
      break;
    }
    case Op::kScalarToMV:
      nodes_[n.in[0]].adj[0] += n.adj[0];
      break;
    case Op::kCoeff:
      nodes_[n.in[0]].adj[n.mask] += n.adj[0];
      break;
    case Op::kQbar: {
      const auto& x = nodes_[n.in[0]].val;
      auto& xadj = nodes_[n.in[0]].adj;
      for (std::size_t i = 0; i < dim; ++i)
        xadj[i] += 2.0 * x[i] * tab_->blade_q[i] * n.adj[0];
      break;
    }
    case Op::kAddS:
      nodes_[n.in[0]].adj[0] += n.adj[0];
      nodes_[n.in[1]].adj[0] += n.adj[0];
      break;
    case Op::kSubS:
      nodes_[n.in[0]].adj[0] += n.adj[0];
      nodes_[n.in[1]].adj[0] -= n.adj[0];
      break;
    case Op::kMulS:
      nodes_[n.in[0]].adj[0] += nodes_[n.in[1]].val[0] * n.adj[0];
      nodes_[n.in[1]].adj[0] += nodes_[n.in[0]].val[0] * n.adj[0];
      break;
    case Op::kSigmoidS: {
      const double v = n.val[0];
      nodes_[n.in[0]].adj[0] += v * (1.0 - v) * n.adj[0];
      break;
    }
    case Op::kReluS:
      if (nodes_[n.in[0]].val[0] > 0.0) nodes_[n.in[0]].adj[0] += n.adj[0];
      break;
    case Op::kRecipGuard: {
      const double d = nodes_[n.in[0]].val[0];
      // inside the guard band the output is constant
      if (std::abs(d) >= n.imm)
        nodes_[n.in[0]].adj[0] += -n.val[0] * n.val[0] * n.adj[0];
      break;
    }
    case Op::kLinear: {
      const std::size_t cin = n.in.size();
      for (std::size_t i = 0; i < cin; ++i) {
        const auto& x = nodes_[n.in[i]].val;
        auto& xadj = nodes_[n.in[i]].adj;
        const int* phi = n.pidx.data() + i * grades;
        for (std::size_t m = 0; m < dim; ++m) {
          const double za = n.adj[m];
          if (za == 0.0) continue;
          const int pi = phi[tab_->grade[m]];
          xadj[m] += store.w[pi] * za;
          store.g[pi] += x[m] * za;
        }
      }
      if (n.imm != 0.0) store.g[n.pidx.back()] += n.adj[0];
      break;
    }
    case Op::kProductSum: {
      const std::size_t pairs = n.in.size() / 2;
      const std::size_t t_count = pmask_->triples.size();
      const int nn = tab_->n;
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto& x = nodes_[n.in[2 * p]].val;
        const auto& y = nodes_[n.in[2 * p + 1]].val;
        auto& xadj = nodes_[n.in[2 * p]].adj;
        auto& yadj = nodes_[n.in[2 * p + 1]].adj;
        const int* phi = n.pidx.data() + p * t_count;
        for (std::uint32_t a = 0; a < dim; ++a)
          for (std::uint32_t b = 0; b < dim; ++b) {
            const std::size_t pair_idx = (std::size_t{a} << nn) | b;
            const int t = pmask_->triple_of[pair_idx];
            if (t < 0) continue;
            const double za = n.adj[a ^ b];
            if (za == 0.0) continue;
            const double s = tab_->signs.empty()
                                 ? blade_sign(a, b, sig_)
                                 : tab_->signs[pair_idx];
            const double pv = store.w[phi[t]];
            xadj[a] += pv * s * y[b] * za;
            yadj[b] += pv * s * x[a] * za;
            store.g[phi[t]] += s * x[a] * y[b] * za;
          }
      }
      break;
    }
    case Op::kNormalize: {
      const auto& x = nodes_[n.in[0]].val;
      auto& xadj = nodes_[n.in[0]].adj;
      const int nn = sig_.dim();
      const double* qb = n.scratch.data();
      const double* denom = qb + (nn + 1);
      const double* guarded = denom + (nn + 1);
      std::vector<double> dot(nn + 1, 0.0);  // sum_m adj_A x_A per grade
      for (std::size_t m = 1; m < dim; ++m)
        dot[tab_->grade[m]] += n.adj[m] * x[m];
      xadj[0] += n.adj[0];
      for (std::size_t m = 1; m < dim; ++m) {
        const int g = tab_->grade[m];
        xadj[m] += n.adj[m] / denom[g];
        if (guarded[g] == 0.0) {
          const double sig_a = sigmoid(store.w[n.pidx[g - 1]]);
          xadj[m] -= dot[g] / (denom[g] * denom[g]) * sig_a * 2.0 * x[m] *
                     tab_->blade_q[m];
        }
      }
      for (int g = 1; g <= nn; ++g) {
        if (guarded[g] != 0.0) continue;
        const double sig_a = sigmoid(store.w[n.pidx[g - 1]]);
        store.g[n.pidx[g - 1]] -= dot[g] / (denom[g] * denom[g]) * sig_a *
                                  (1.0 - sig_a) * (qb[g] - 1.0);
      }
      break;
    }
    case Op::kGate: {
      const auto& x = nodes_[n.in[0]].val;
      auto& xadj = nodes_[n.in[0]].adj;
      const int nn = sig_.dim();
      const double* gate = n.scratch.data() + (nn + 1);
      std::vector<double> dot(nn + 1, 0.0);
      for (std::size_t m = 1; m < dim; ++m)
        dot[tab_->grade[m]] += n.adj[m] * x[m];
      if (x[0] > 0.0) xadj[0] += n.adj[0];
      for (std::size_t m = 1; m < dim; ++m) {
        const int g = tab_->grade[m];
        const double gv = gate[g];
        xadj[m] += gv * n.adj[m] +
                   dot[g] * gv * (1.0 - gv) * 2.0 * x[m] * tab_->blade_q[m];
      }
      break;
    }
  }
}

void Tape::forward(const ParamStore& store) {
  for (auto& n : nodes_) eval(n, store);
}

void Tape::backward(ParamStore& store, int loss_node) {
  if (loss_node < 0 || loss_node >= static_cast<int>(nodes_.size()))
    throw std::out_of_range("loss node id out of range");
  if (!nodes_[loss_node].scalar)
    throw NonScalarLossError("backward requires a scalar loss node");
  for (auto& n : nodes_) std::fill(n.adj.begin(), n.adj.end(), 0.0);
  nodes_[loss_node].adj[0] = 1.0;
  for (int i = loss_node; i >= 0; --i) propagate(nodes_[i], store);
}

Multivector Tape::value_mv(int node) const {
  const Node& n = nodes_[node];
  if (n.scalar) throw std::invalid_argument("node is scalar-valued");
  Multivector x(sig_);
  x.coeffs() = n.val;
  return x;
}

double Tape::value_scalar(int node) const {
  const Node& n = nodes_[node];
  if (!n.scalar) throw std::invalid_argument("node is multivector-valued");
  return n.val[0];
}

Multivector Tape::adjoint_mv(int node) const {
  const Node& n = nodes_[node];
  if (n.scalar) throw std::invalid_argument("node is scalar-valued");
  Multivector x(sig_);
  x.coeffs() = n.adj;
  return x;
}

double Tape::adjoint_scalar(int node) const {
  const Node& n = nodes_[node];
  if (!n.scalar) throw std::invalid_argument("node is multivector-valued");
  return n.adj[0];
}

StackGraph build_stack_graph(Tape& tape, const LayerStack& stack,
                             const StackParams& layout) {
  const int grades = stack.sig.dim() + 1;
  const int triples =
      static_cast<int>(ProductMask::get(stack.sig).triples.size());
  StackGraph graph;
  for (int c = 0; c < stack.input_channels(); ++c)
    graph.inputs.push_back(tape.input_mv());
  std::vector<int> cur = graph.inputs;

  for (std::size_t li = 0; li < stack.layers.size(); ++li) {
    const auto& l = stack.layers[li];
    const auto& seg = layout.segments[li];
    std::vector<int> next;
    switch (l.type) {
      case LayerType::kLinear: {
        for (int o = 0; o < l.c_out; ++o) {
          std::vector<int> phi(static_cast<std::size_t>(l.c_in) * grades);
          for (int i = 0; i < l.c_in; ++i)
            for (int k = 0; k < grades; ++k)
              phi[i * grades + k] = static_cast<int>(
                  seg.phi_offset + (o * l.c_in + i) * grades + k);
          const int bias =
              l.bias ? static_cast<int>(seg.bias_offset + o) : -1;
          next.push_back(tape.linear_channel(cur, phi, bias));
        }
        break;
      }
      case LayerType::kGpElementwise:
      case LayerType::kGpFull: {
        std::vector<int> mix;
        for (int o = 0; o < l.c_in; ++o) {
          std::vector<int> phi(static_cast<std::size_t>(l.c_in) * grades);
          for (int i = 0; i < l.c_in; ++i)
            for (int k = 0; k < grades; ++k)
              phi[i * grades + k] = static_cast<int>(
                  seg.mix_offset + (o * l.c_in + i) * grades + k);
          mix.push_back(tape.linear_channel(cur, phi, -1));
        }
        if (l.type == LayerType::kGpElementwise) {
          for (int c = 0; c < l.c_out; ++c) {
            std::vector<int> phi(triples);
            for (int t = 0; t < triples; ++t)
              phi[t] = static_cast<int>(seg.phi_offset + c * triples + t);
            next.push_back(tape.product_sum({cur[c], mix[c]}, phi));
          }
        } else {
          for (int o = 0; o < l.c_out; ++o) {
            std::vector<int> xy;
            std::vector<int> phi(static_cast<std::size_t>(l.c_in) * triples);
            for (int i = 0; i < l.c_in; ++i) {
              xy.push_back(cur[i]);
              xy.push_back(mix[i]);
              for (int t = 0; t < triples; ++t)
                phi[i * triples + t] = static_cast<int>(
                    seg.phi_offset + (o * l.c_in + i) * triples + t);
            }
            next.push_back(tape.product_sum(xy, phi));
          }
        }
        break;
      }
      case LayerType::kNormalize: {
        std::vector<int> norm(stack.sig.dim());
        for (int m = 0; m < stack.sig.dim(); ++m)
          norm[m] = static_cast<int>(seg.norm_offset + m);
        for (int c = 0; c < l.c_out; ++c)
          next.push_back(tape.normalize_channel(cur[c], norm));
        break;
      }
      case LayerType::kGate: {
        for (int c = 0; c < l.c_out; ++c)
          next.push_back(tape.gate_channel(cur[c]));
        break;
      }
    }
    cur = std::move(next);
  }

  graph.outputs = cur;
  const std::uint32_t head_mask =
      stack.head == HeadKind::kPseudoscalar
          ? static_cast<std::uint32_t>(stack.sig.algebra_dim() - 1)
          : 0u;
  graph.head = tape.coeff(cur.at(stack.head_channel), head_mask);
  return graph;
}

}  // namespace cliff
