#include "cliff/train.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>

namespace cliff {

void TrainConfig::validate() const {
  if (task != "signed-volume" && task != "o5-regression")
    throw std::invalid_argument("unknown task: " + task);
  if (train_samples <= 0 || val_samples <= 0 || test_samples <= 0)
    throw std::invalid_argument("sample counts must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (optimizer != "adam" && optimizer != "sgd")
    throw std::invalid_argument("unknown optimizer: " + optimizer);
  if (!head_override.empty() && head_override != "scalar" &&
      head_override != "pseudoscalar")
    throw std::invalid_argument("unknown head override: " + head_override);
}

LayerStack default_architecture(const std::string& task) {
  LayerStack s;
  if (task == "signed-volume") {
    // The target is a degree-3 pseudoscalar; two product layers reach it
    // exactly, so the stack stays purely polynomial.
    s.sig = MetricSignature(3, 0, 0);
    s.layers.push_back({LayerType::kLinear, 4, 8, true});
    s.layers.push_back({LayerType::kGpElementwise, 8, 8, false});
    s.layers.push_back({LayerType::kLinear, 8, 8, true});
    s.layers.push_back({LayerType::kGpFull, 8, 1, false});
    s.head = HeadKind::kPseudoscalar;
  } else if (task == "o5-regression") {
    s.sig = MetricSignature(5, 0, 0);
    s.layers.push_back({LayerType::kLinear, 2, 8, true});
    s.layers.push_back({LayerType::kNormalize, 8, 8, false});
    s.layers.push_back({LayerType::kGpElementwise, 8, 8, false});
    s.layers.push_back({LayerType::kGate, 8, 8, false});
    s.layers.push_back({LayerType::kLinear, 8, 8, true});
    s.layers.push_back({LayerType::kGpElementwise, 8, 8, false});
    s.layers.push_back({LayerType::kGate, 8, 8, false});
    s.layers.push_back({LayerType::kLinear, 8, 1, true});
    s.head = HeadKind::kScalar;
  } else {
    throw std::invalid_argument("unknown task: " + task);
  }
  return s;
}

MVChannels embed_signed_volume(const SignedVolumeSample& s) {
  const MetricSignature sig(3, 0, 0);
  std::vector<std::vector<double>> vectors;
  for (const auto& p : s.points)
    vectors.push_back({p[0], p[1], p[2]});
  return embed(sig, {}, vectors);
}

MVChannels embed_o5(const O5Sample& s) {
  const MetricSignature sig(5, 0, 0);
  return embed(sig, {},
               {{s.x1[0], s.x1[1], s.x1[2], s.x1[3], s.x1[4]},
                {s.x2[0], s.x2[1], s.x2[2], s.x2[3], s.x2[4]}});
}

double predict(const LayerStack& stack, const StackParams& params,
               const MVChannels& input) {
  return forward_head(stack, params, input);
}

namespace {

struct Adam {
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  long t = 0;

  Adam(double lr_, std::size_t size) : lr(lr_), m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& w, const std::vector<double>& g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TrainResult train(const TrainConfig& config) {
  config.validate();

  LayerStack stack = config.arch_json.empty()
                         ? default_architecture(config.task)
                         : LayerStack::from_json_string(config.arch_json);
  if (config.head_override == "scalar") stack.head = HeadKind::kScalar;
  if (config.head_override == "pseudoscalar")
    stack.head = HeadKind::kPseudoscalar;

  Rng root(config.seed);
  Rng data_rng = root.fork(1);
  Rng init_rng = root.fork(2);
  Rng shuffle_rng = root.fork(3);

  // datasets and embeddings
  std::vector<MVChannels> inputs;
  std::vector<double> targets;
  const int total =
      config.train_samples + config.val_samples + config.test_samples;
  if (config.task == "signed-volume") {
    const auto data = gen_signed_volume_dataset(total, data_rng);
    for (const auto& s : data) {
      inputs.push_back(embed_signed_volume(s));
      targets.push_back(s.volume);
    }
  } else {
    const auto data = gen_o5_regression_dataset(total, data_rng);
    for (const auto& s : data) {
      inputs.push_back(embed_o5(s));
      targets.push_back(s.f);
    }
  }
  const int n_train = config.train_samples;
  const int n_val = config.val_samples;
  const int n_test = config.test_samples;

  StackParams layout = StackParams::init(stack, init_rng);
  ParamStore store(layout.values);

  Tape tape(stack.sig);
  StackGraph graph = build_stack_graph(tape, stack, layout);
  const int target_node = tape.input_scalar();
  const int diff_node = tape.sub_s(graph.head, target_node);
  const int loss_node = tape.mul_s(diff_node, diff_node);

  auto sample_loss = [&](int index) {
    for (std::size_t c = 0; c < graph.inputs.size(); ++c)
      tape.set_input(graph.inputs[c], inputs[index][c]);
    tape.set_scalar(target_node, targets[index]);
    tape.forward(store);
    return tape.value_scalar(loss_node);
  };

  auto mean_loss = [&](int begin, int count) {
    double acc = 0.0;
    for (int i = 0; i < count; ++i) acc += sample_loss(begin + i);
    return acc / count;
  };

  Adam adam(config.lr, store.w.size());
  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int i = n_train - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_int(0, i)]);
    double epoch_loss = 0.0;
    int done = 0;
    while (done < n_train) {
      const int batch = std::min(config.batch_size, n_train - done);
      store.zero_grad();
      for (int b = 0; b < batch; ++b) {
        const double loss = sample_loss(order[done + b]);
        if (!std::isfinite(loss))
          throw DivergedLossError(
              "non-finite loss at epoch " + std::to_string(epoch) +
              ", sample " + std::to_string(order[done + b]));
        epoch_loss += loss;
        tape.backward(store, loss_node);
      }
      for (auto& g : store.g) g /= batch;
      if (config.optimizer == "adam") {
        adam.step(store.w, store.g);
      } else {
        for (std::size_t i = 0; i < store.w.size(); ++i)
          store.w[i] -= config.lr * store.g[i];
      }
      done += batch;
    }
    const double train_mse = epoch_loss / n_train;
    const double val_mse = mean_loss(n_train, n_val);
    if (!std::isfinite(val_mse))
      throw DivergedLossError("non-finite validation loss at epoch " +
                              std::to_string(epoch));
    result.history.push_back({epoch, train_mse, val_mse});
  }

  result.test_mse = mean_loss(n_train + n_val, n_test);

  double train_mean = 0.0;
  for (int i = 0; i < n_train; ++i) train_mean += targets[i];
  train_mean /= n_train;
  double base = 0.0;
  double test_mean = 0.0;
  for (int i = 0; i < n_test; ++i) {
    const double d = targets[n_train + n_val + i] - train_mean;
    base += d * d;
    test_mean += targets[n_train + n_val + i];
  }
  result.baseline_mse = base / n_test;
  test_mean /= n_test;
  double var = 0.0;
  for (int i = 0; i < n_test; ++i) {
    const double d = targets[n_train + n_val + i] - test_mean;
    var += d * d;
  }
  result.test_label_variance = var / n_test;

  result.stack = stack;
  layout.values = store.w;
  result.params = store.w;

  if (config.write_files) {
    std::filesystem::create_directories(config.out_dir);
    result.metrics_path = config.out_dir + "/metrics.csv";
    result.params_path = config.out_dir + "/params.bin";
    result.arch_path = config.out_dir + "/arch.json";

    std::ofstream csv(result.metrics_path);
    csv << "epoch,train_mse,val_mse\n";
    for (const auto& e : result.history)
      csv << e.epoch << ',' << fmt17(e.train_mse) << ',' << fmt17(e.val_mse)
          << '\n';
    csv << "test," << fmt17(result.test_mse) << '\n';

    std::ofstream arch(result.arch_path);
    arch << stack.to_json_string() << '\n';

    save_params(result.params_path, stack, result.params, config.seed);
  }
  return result;
}

// ---- parameter file io ----------------------------------------------------

namespace {

const char* layer_type_name(LayerType t) {
  switch (t) {
    case LayerType::kLinear: return "linear";
    case LayerType::kGpElementwise: return "gp_elementwise";
    case LayerType::kGpFull: return "gp_full";
    case LayerType::kNormalize: return "normalize";
    case LayerType::kGate: return "gate";
  }
  return "?";
}

}  // namespace

void save_params(const std::string& path, const LayerStack& stack,
                 const std::vector<double>& values, std::uint64_t seed) {
  nlohmann::json header;
  header["format"] = "cliffnet-params-v1";
  header["signature"] = stack.sig.str();
  header["seed"] = seed;
  header["total"] = values.size();
  header["layers"] = nlohmann::json::array();
  for (const auto& l : stack.layers)
    header["layers"].push_back({{"type", layer_type_name(l.type)},
                                {"in", l.c_in},
                                {"out", l.c_out}});
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::uint64_t hlen = htext.size();
  std::uint8_t lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = (hlen >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(lenbuf), 8);
  out.write(htext.data(), htext.size());
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(values.data()),
            values.size() * sizeof(double));
}

std::vector<double> load_params(const std::string& path,
                                const LayerStack& expected_stack) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint8_t lenbuf[8];
  in.read(reinterpret_cast<char*>(lenbuf), 8);
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i) hlen |= std::uint64_t{lenbuf[i]} << (8 * i);
  std::string htext(hlen, '\0');
  in.read(htext.data(), hlen);
  const nlohmann::json header = nlohmann::json::parse(htext);
  if (header.at("format") != "cliffnet-params-v1")
    throw std::runtime_error("unknown parameter file format");
  if (header.at("signature").get<std::string>() != expected_stack.sig.str())
    throw std::runtime_error("parameter file signature mismatch");
  const std::size_t total = header.at("total").get<std::size_t>();
  if (total != StackParams::count(expected_stack))
    throw std::runtime_error("parameter count mismatch");
  std::vector<double> values(total);
  in.read(reinterpret_cast<char*>(values.data()), total * sizeof(double));
  if (!in) throw std::runtime_error("parameter file truncated");
  return values;
}

}  // namespace cliff
