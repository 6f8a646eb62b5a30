#include "cliff/layers.hpp"

#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>

namespace cliff {

namespace {

void check_channels(const MVChannels& x, int expected, const char* what) {
  if (static_cast<int>(x.size()) != expected)
    throw ShapeMismatchError(std::string(what) + ": expected " +
                             std::to_string(expected) + " channels, got " +
                             std::to_string(x.size()));
}

const MetricSignature& channels_signature(const MVChannels& x,
                                          const char* what) {
  if (x.empty())
    throw ShapeMismatchError(std::string(what) + ": empty channel tuple");
  for (const auto& ch : x)
    if (ch.signature() != x.front().signature())
      throw SignatureMismatchError(std::string(what) +
                                   ": channels span multiple signatures");
  return x.front().signature();
}

}  // namespace

int ProductMask::index_of(int i, int j, int k) const {
  for (std::size_t t = 0; t < triples.size(); ++t)
    if (triples[t][0] == i && triples[t][1] == j && triples[t][2] == k)
      return static_cast<int>(t);
  return -1;
}

const ProductMask& ProductMask::get(const MetricSignature& sig) {
  static std::mutex mu;
  static std::map<std::array<int, 3>, std::unique_ptr<ProductMask>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::array<int, 3>{sig.p(), sig.q_neg(), sig.r()};
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto mask = std::make_unique<ProductMask>();
  const auto& tab = cayley_table(sig);
  const std::size_t dim = tab.dim;
  const int n = tab.n;
  std::map<std::array<int, 3>, int> seen;
  std::vector<std::array<int, 3>> pair_triple(dim * dim);
  for (std::uint32_t a = 0; a < dim; ++a)
    for (std::uint32_t b = 0; b < dim; ++b) {
      const std::size_t idx = (std::size_t{a} << n) | b;
      if (tab.sign(a, b) == 0.0) {
        pair_triple[idx] = {-1, -1, -1};
        continue;
      }
      const std::array<int, 3> t{tab.grade[a], tab.grade[b],
                                 tab.grade[a ^ b]};
      pair_triple[idx] = t;
      seen.emplace(t, 0);
    }
  int counter = 0;
  for (auto& [triple, index] : seen) {
    index = counter++;
    mask->triples.push_back(triple);
  }
  mask->triple_of.resize(dim * dim);
  for (std::size_t idx = 0; idx < dim * dim; ++idx)
    mask->triple_of[idx] =
        pair_triple[idx][0] < 0 ? -1 : seen.at(pair_triple[idx]);
  it = cache.emplace(key, std::move(mask)).first;
  return *it->second;
}

LinearParams LinearParams::zeros(const MetricSignature& sig, int c_out,
                                 int c_in, bool with_bias) {
  LinearParams p;
  p.c_out = c_out;
  p.c_in = c_in;
  p.grades = sig.dim() + 1;
  p.phi.assign(static_cast<std::size_t>(c_out) * c_in * p.grades, 0.0);
  if (with_bias) p.bias.assign(c_out, 0.0);
  return p;
}

ProductParams ProductParams::zeros(const MetricSignature& sig, int c_out,
                                   int c_in, bool elementwise) {
  ProductParams p;
  p.elementwise = elementwise;
  p.c_out = c_out;
  p.c_in = c_in;
  p.n_triples = static_cast<int>(ProductMask::get(sig).triples.size());
  const std::size_t rows =
      elementwise ? c_out : static_cast<std::size_t>(c_out) * c_in;
  p.phi.assign(rows * p.n_triples, 0.0);
  return p;
}

double norm_denominator(double a_m, double qbar, double eps) {
  const double d = sigmoid(a_m) * (qbar - 1.0) + 1.0;
  if (std::abs(d) < eps) return d < 0.0 ? -eps : eps;
  return d;
}

MVChannels embed(const MetricSignature& sig, const std::vector<double>& scalars,
                 const std::vector<std::vector<double>>& vectors) {
  MVChannels out;
  out.reserve(scalars.size() + vectors.size());
  for (double s : scalars) out.push_back(Multivector::scalar(sig, s));
  for (const auto& v : vectors) out.push_back(Multivector::vector(sig, v));
  return out;
}

double extract_scalar(const MVChannels& y, int c) { return y.at(c)[0]; }

std::vector<double> extract_vector(const MVChannels& y, int c) {
  const auto& mv = y.at(c);
  std::vector<double> coords(mv.signature().dim());
  for (int i = 0; i < mv.signature().dim(); ++i)
    coords[i] = mv[std::uint32_t{1} << i];
  return coords;
}

MVChannels mv_linear(const LinearParams& p, const MVChannels& x) {
  const auto& sig = channels_signature(x, "mv_linear");
  check_channels(x, p.c_in, "mv_linear");
  if (p.grades != sig.dim() + 1)
    throw ShapeMismatchError("mv_linear: grade count mismatch");
  const auto& tab = cayley_table(sig);
  MVChannels out;
  out.reserve(p.c_out);
  for (int o = 0; o < p.c_out; ++o) {
    Multivector z(sig);
    for (int i = 0; i < p.c_in; ++i) {
      const double* phi = &p.phi[(o * p.c_in + i) * p.grades];
      const auto& xc = x[i].coeffs();
      for (std::size_t mask = 0; mask < tab.dim; ++mask)
        z[mask] += phi[tab.grade[mask]] * xc[mask];
    }
    if (!p.bias.empty()) z[0] += p.bias[o];
    out.push_back(std::move(z));
  }
  return out;
}

namespace {

// z += sum over blade pairs of phi[triple(a,b)] sign(a,b) x_a y_b.
void accumulate_product(const MetricSignature& sig, const double* phi,
                        const Multivector& x, const Multivector& y,
                        Multivector& z) {
  const auto& tab = cayley_table(sig);
  const auto& mask = ProductMask::get(sig);
  const std::size_t dim = tab.dim;
  const int n = tab.n;
  for (std::uint32_t a = 0; a < dim; ++a) {
    const double xa = x[a];
    if (xa == 0.0) continue;
    for (std::uint32_t b = 0; b < dim; ++b) {
      const double yb = y[b];
      if (yb == 0.0) continue;
      const int t = mask.triple_of[(std::size_t{a} << n) | b];
      if (t < 0) continue;
      z[a ^ b] += phi[t] * tab.sign(a, b) * xa * yb;
    }
  }
}

}  // namespace

MVChannels geometric_product_layer_elementwise(const ProductParams& p,
                                               const MVChannels& x,
                                               const MVChannels& y) {
  const auto& sig = channels_signature(x, "gp_elementwise");
  check_channels(x, p.c_out, "gp_elementwise x");
  check_channels(y, p.c_out, "gp_elementwise y");
  MVChannels out;
  out.reserve(p.c_out);
  for (int c = 0; c < p.c_out; ++c) {
    Multivector z(sig);
    accumulate_product(sig, &p.phi[static_cast<std::size_t>(c) * p.n_triples],
                       x[c], y[c], z);
    out.push_back(std::move(z));
  }
  return out;
}

MVChannels geometric_product_layer_full(const ProductParams& p,
                                        const MVChannels& x,
                                        const MVChannels& y) {
  const auto& sig = channels_signature(x, "gp_full");
  check_channels(x, p.c_in, "gp_full x");
  check_channels(y, p.c_in, "gp_full y");
  MVChannels out;
  out.reserve(p.c_out);
  for (int o = 0; o < p.c_out; ++o) {
    Multivector z(sig);
    for (int i = 0; i < p.c_in; ++i)
      accumulate_product(
          sig,
          &p.phi[(static_cast<std::size_t>(o) * p.c_in + i) * p.n_triples],
          x[i], y[i], z);
    out.push_back(std::move(z));
  }
  return out;
}

MVChannels mv_normalize(const NormParams& p, const MVChannels& x) {
  const auto& sig = channels_signature(x, "mv_normalize");
  const int n = sig.dim();
  if (static_cast<int>(p.a.size()) != n)
    throw ShapeMismatchError("mv_normalize: need one scalar per grade 1..n");
  const auto& tab = cayley_table(sig);
  MVChannels out;
  out.reserve(x.size());
  for (const auto& ch : x) {
    std::vector<double> qbar(n + 1, 0.0);
    for (std::size_t mask = 1; mask < tab.dim; ++mask)
      qbar[tab.grade[mask]] += ch[mask] * ch[mask] * tab.blade_q[mask];
    std::vector<double> inv_denom(n + 1, 1.0);
    for (int m = 1; m <= n; ++m)
      inv_denom[m] = 1.0 / norm_denominator(p.a[m - 1], qbar[m]);
    Multivector z(sig);
    z[0] = ch[0];
    for (std::size_t mask = 1; mask < tab.dim; ++mask)
      z[mask] = ch[mask] * inv_denom[tab.grade[mask]];
    out.push_back(std::move(z));
  }
  return out;
}

MVChannels gated_nonlinearity(const MVChannels& x) {
  const auto& sig = channels_signature(x, "gated_nonlinearity");
  const int n = sig.dim();
  const auto& tab = cayley_table(sig);
  MVChannels out;
  out.reserve(x.size());
  for (const auto& ch : x) {
    std::vector<double> qbar(n + 1, 0.0);
    for (std::size_t mask = 1; mask < tab.dim; ++mask)
      qbar[tab.grade[mask]] += ch[mask] * ch[mask] * tab.blade_q[mask];
    Multivector z(sig);
    z[0] = ch[0] > 0.0 ? ch[0] : 0.0;
    for (std::size_t mask = 1; mask < tab.dim; ++mask)
      z[mask] = sigmoid(qbar[tab.grade[mask]]) * ch[mask];
    out.push_back(std::move(z));
  }
  return out;
}

// ---- layer stacks -------------------------------------------------------

int LayerStack::input_channels() const {
  if (layers.empty()) return 0;
  return layers.front().c_in;
}

int LayerStack::output_channels() const {
  if (layers.empty()) return 0;
  return layers.back().c_out;
}

namespace {

const char* type_name(LayerType t) {
  switch (t) {
    case LayerType::kLinear: return "linear";
    case LayerType::kGpElementwise: return "gp_elementwise";
    case LayerType::kGpFull: return "gp_full";
    case LayerType::kNormalize: return "normalize";
    case LayerType::kGate: return "gate";
  }
  return "?";
}

LayerType type_from_name(const std::string& s) {
  if (s == "linear") return LayerType::kLinear;
  if (s == "gp_elementwise") return LayerType::kGpElementwise;
  if (s == "gp_full") return LayerType::kGpFull;
  if (s == "normalize") return LayerType::kNormalize;
  if (s == "gate") return LayerType::kGate;
  throw std::invalid_argument("unknown layer type: " + s);
}

}  // namespace

std::string LayerStack::to_json_string() const {
  nlohmann::json j;
  j["signature"] = sig.str();
  j["head"] = {{"kind", head == HeadKind::kPseudoscalar ? "pseudoscalar"
                                                        : "scalar"},
               {"channel", head_channel}};
  j["layers"] = nlohmann::json::array();
  for (const auto& l : layers) {
    nlohmann::json jl;
    jl["type"] = type_name(l.type);
    switch (l.type) {
      case LayerType::kLinear:
        jl["in"] = l.c_in;
        jl["out"] = l.c_out;
        jl["bias"] = l.bias;
        break;
      case LayerType::kGpFull:
        jl["in"] = l.c_in;
        jl["out"] = l.c_out;
        break;
      default:
        jl["channels"] = l.c_in;
        break;
    }
    j["layers"].push_back(jl);
  }
  return j.dump(2);
}

LayerStack LayerStack::from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LayerStack stack;
  stack.sig = MetricSignature::parse(j.at("signature").get<std::string>());
  if (j.contains("head")) {
    const std::string kind = j["head"].value("kind", "scalar");
    if (kind == "pseudoscalar")
      stack.head = HeadKind::kPseudoscalar;
    else if (kind == "scalar")
      stack.head = HeadKind::kScalar;
    else
      throw std::invalid_argument("unknown head kind: " + kind);
    stack.head_channel = j["head"].value("channel", 0);
  }
  for (const auto& jl : j.at("layers")) {
    LayerSpec l;
    l.type = type_from_name(jl.at("type").get<std::string>());
    switch (l.type) {
      case LayerType::kLinear:
        l.c_in = jl.at("in").get<int>();
        l.c_out = jl.at("out").get<int>();
        l.bias = jl.value("bias", true);
        break;
      case LayerType::kGpFull:
        l.c_in = jl.at("in").get<int>();
        l.c_out = jl.at("out").get<int>();
        break;
      default:
        l.c_in = l.c_out = jl.at("channels").get<int>();
        break;
    }
    if (l.c_in <= 0 || l.c_out <= 0)
      throw std::invalid_argument("layer channel counts must be positive");
    if (!stack.layers.empty() && stack.layers.back().c_out != l.c_in)
      throw std::invalid_argument("layer channel counts do not chain");
    stack.layers.push_back(l);
  }
  if (stack.head_channel < 0 || stack.head_channel >= stack.output_channels())
    throw std::invalid_argument("head channel out of range");
  return stack;
}

namespace {

struct LayerCounts {
  std::size_t mix = 0;
  std::size_t phi = 0;
  std::size_t bias = 0;
  std::size_t norm = 0;
};

LayerCounts layer_counts(const LayerStack& stack, const LayerSpec& l) {
  const int grades = stack.sig.dim() + 1;
  const int triples =
      static_cast<int>(ProductMask::get(stack.sig).triples.size());
  LayerCounts c;
  switch (l.type) {
    case LayerType::kLinear:
      c.phi = static_cast<std::size_t>(l.c_out) * l.c_in * grades;
      if (l.bias) c.bias = l.c_out;
      break;
    case LayerType::kGpElementwise:
      c.mix = static_cast<std::size_t>(l.c_in) * l.c_in * grades;
      c.phi = static_cast<std::size_t>(l.c_out) * triples;
      break;
    case LayerType::kGpFull:
      c.mix = static_cast<std::size_t>(l.c_in) * l.c_in * grades;
      c.phi = static_cast<std::size_t>(l.c_out) * l.c_in * triples;
      break;
    case LayerType::kNormalize:
      c.norm = stack.sig.dim();
      break;
    case LayerType::kGate:
      break;
  }
  return c;
}

}  // namespace

std::size_t StackParams::count(const LayerStack& stack) {
  std::size_t total = 0;
  for (const auto& l : stack.layers) {
    const auto c = layer_counts(stack, l);
    total += c.mix + c.phi + c.bias + c.norm;
  }
  return total;
}

StackParams StackParams::init(const LayerStack& stack, Rng& rng) {
  StackParams p;
  p.values.reserve(count(stack));
  const int grades = stack.sig.dim() + 1;
  const int triples =
      static_cast<int>(ProductMask::get(stack.sig).triples.size());
  for (const auto& l : stack.layers) {
    const auto c = layer_counts(stack, l);
    Segment seg;
    seg.mix_offset = p.values.size();
    if (c.mix > 0) {
      const double std_dev = 1.0 / std::sqrt(double(l.c_in) * grades);
      for (std::size_t i = 0; i < c.mix; ++i)
        p.values.push_back(std_dev * rng.normal());
    }
    seg.phi_offset = p.values.size();
    if (c.phi > 0) {
      const double fan_in = l.type == LayerType::kLinear
                                ? double(l.c_in) * grades
                                : double(triples);
      const double std_dev = 1.0 / std::sqrt(fan_in);
      for (std::size_t i = 0; i < c.phi; ++i)
        p.values.push_back(std_dev * rng.normal());
    }
    seg.bias_offset = p.values.size();
    for (std::size_t i = 0; i < c.bias; ++i) p.values.push_back(0.0);
    seg.norm_offset = p.values.size();
    for (std::size_t i = 0; i < c.norm; ++i) p.values.push_back(0.0);
    p.segments.push_back(seg);
  }
  return p;
}

StackParams StackParams::with_values(const LayerStack& stack,
                                     std::vector<double> values) {
  if (values.size() != count(stack))
    throw ShapeMismatchError("parameter vector size does not match stack");
  StackParams p;
  p.values = std::move(values);
  std::size_t cursor = 0;
  for (const auto& l : stack.layers) {
    const auto c = layer_counts(stack, l);
    Segment seg;
    seg.mix_offset = cursor;
    cursor += c.mix;
    seg.phi_offset = cursor;
    cursor += c.phi;
    seg.bias_offset = cursor;
    cursor += c.bias;
    seg.norm_offset = cursor;
    cursor += c.norm;
    p.segments.push_back(seg);
  }
  return p;
}

LinearParams StackParams::linear_view(const LayerStack& stack,
                                      int layer) const {
  const auto& l = stack.layers[layer];
  LinearParams p = LinearParams::zeros(stack.sig, l.c_out, l.c_in, l.bias);
  const auto& seg = segments[layer];
  std::copy_n(values.begin() + seg.phi_offset, p.phi.size(), p.phi.begin());
  if (l.bias)
    std::copy_n(values.begin() + seg.bias_offset, p.bias.size(),
                p.bias.begin());
  return p;
}

LinearParams StackParams::mix_view(const LayerStack& stack, int layer) const {
  const auto& l = stack.layers[layer];
  LinearParams p = LinearParams::zeros(stack.sig, l.c_in, l.c_in, false);
  const auto& seg = segments[layer];
  std::copy_n(values.begin() + seg.mix_offset, p.phi.size(), p.phi.begin());
  return p;
}

ProductParams StackParams::product_view(const LayerStack& stack,
                                        int layer) const {
  const auto& l = stack.layers[layer];
  const bool elementwise = l.type == LayerType::kGpElementwise;
  ProductParams p = ProductParams::zeros(stack.sig, l.c_out, l.c_in,
                                         elementwise);
  const auto& seg = segments[layer];
  std::copy_n(values.begin() + seg.phi_offset, p.phi.size(), p.phi.begin());
  return p;
}

NormParams StackParams::norm_view(const LayerStack& stack, int layer) const {
  NormParams p;
  p.a.resize(stack.sig.dim());
  const auto& seg = segments[layer];
  std::copy_n(values.begin() + seg.norm_offset, p.a.size(), p.a.begin());
  return p;
}

MVChannels cgenn_forward(const LayerStack& stack, const StackParams& params,
                         const MVChannels& x) {
  MVChannels h = x;
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    const auto& l = stack.layers[i];
    switch (l.type) {
      case LayerType::kLinear:
        h = mv_linear(params.linear_view(stack, static_cast<int>(i)), h);
        break;
      case LayerType::kGpElementwise: {
        const MVChannels y =
            mv_linear(params.mix_view(stack, static_cast<int>(i)), h);
        h = geometric_product_layer_elementwise(
            params.product_view(stack, static_cast<int>(i)), h, y);
        break;
      }
      case LayerType::kGpFull: {
        const MVChannels y =
            mv_linear(params.mix_view(stack, static_cast<int>(i)), h);
        h = geometric_product_layer_full(
            params.product_view(stack, static_cast<int>(i)), h, y);
        break;
      }
      case LayerType::kNormalize:
        h = mv_normalize(params.norm_view(stack, static_cast<int>(i)), h);
        break;
      case LayerType::kGate:
        h = gated_nonlinearity(h);
        break;
    }
  }
  return h;
}

double forward_head(const LayerStack& stack, const StackParams& params,
                    const MVChannels& x) {
  const MVChannels out = cgenn_forward(stack, params, x);
  const std::uint32_t mask =
      stack.head == HeadKind::kPseudoscalar
          ? static_cast<std::uint32_t>(stack.sig.algebra_dim() - 1)
          : 0u;
  return out.at(stack.head_channel)[mask];
}

}  // namespace cliff
