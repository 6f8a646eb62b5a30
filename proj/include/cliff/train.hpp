#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliff/autodiff.hpp"
#include "cliff/datasets.hpp"
#include "cliff/layers.hpp"

namespace cliff {

struct DivergedLossError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::string task = "signed-volume";  // or "o5-regression"
  int train_samples = 1024;
  int val_samples = 128;
  int test_samples = 256;
  int batch_size = 128;
  double lr = 1e-3;
  std::string optimizer = "adam";  // or "sgd"
  int epochs = 120;
  std::uint64_t seed = 1;
  std::string arch_json;       // empty = task default architecture
  std::string head_override;   // "", "scalar", "pseudoscalar"
  std::string out_dir = "out";
  bool write_files = true;

  void validate() const;
};

struct EpochMetrics {
  int epoch;
  double train_mse;
  double val_mse;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  double test_mse = 0.0;
  double baseline_mse = 0.0;  // constant train-mean predictor on the test set
  double test_label_variance = 0.0;
  LayerStack stack;
  std::vector<double> params;
  std::string metrics_path;
  std::string params_path;
  std::string arch_path;
};

LayerStack default_architecture(const std::string& task);

// Embeds one task sample as multivector channels.
MVChannels embed_signed_volume(const SignedVolumeSample& s);
MVChannels embed_o5(const O5Sample& s);

TrainResult train(const TrainConfig& config);

// Model evaluation with explicit parameters (used by tests and the
// equivariance checks on trained models).
double predict(const LayerStack& stack, const StackParams& params,
               const MVChannels& input);

// ---- parameter file io ----------------------------------------------------
// Layout: uint64 little-endian header length, JSON header, raw f64
// little-endian values in StackParams order.
void save_params(const std::string& path, const LayerStack& stack,
                 const std::vector<double>& values, std::uint64_t seed);
std::vector<double> load_params(const std::string& path,
                                const LayerStack& expected_stack);

}  // namespace cliff
