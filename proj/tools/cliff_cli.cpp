#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cliff/group.hpp"
#include "cliff/theorems.hpp"
#include "cliff/train.hpp"

namespace {

using namespace cliff;

std::vector<MetricSignature> default_signatures() {
  return {{3, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 3, 0},
          {5, 0, 0}, {2, 0, 1}, {1, 1, 1}};
}

std::string default_out_dir() {
  const char* env = std::getenv("CLIFF_OUT_DIR");
  return env != nullptr ? env : "out";
}

std::vector<MetricSignature> parse_signatures(
    const std::vector<std::string>& args) {
  if (args.empty()) return default_signatures();
  std::vector<MetricSignature> sigs;
  for (const auto& a : args) sigs.push_back(MetricSignature::parse(a));
  return sigs;
}

int cmd_verify(const std::vector<std::string>& sig_args, int trials,
               std::uint64_t seed, bool json, int threads) {
  const auto sigs = parse_signatures(sig_args);
  const auto reports = run_all_checks_parallel(sigs, trials, seed, threads);
  bool all_pass = true;
  for (const auto& r : reports) {
    std::cout << (json ? r.to_json() : r.to_line()) << '\n';
    all_pass = all_pass && r.pass;
  }
  if (!json)
    std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES PRESENT")
              << '\n';
  return all_pass ? 0 : 1;
}

int cmd_tables(const std::string& sig_arg, const std::string& out_path) {
  const MetricSignature sig = MetricSignature::parse(sig_arg);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "cannot open " << out_path << '\n';
      return 1;
    }
    out = &file;
  }
  const std::size_t dim = sig.algebra_dim();
  for (std::uint32_t a = 0; a < dim; ++a)
    for (std::uint32_t b = 0; b < dim; ++b) {
      const auto prod = blade_product(a, b, sig);
      *out << blade_name(a) << ',' << blade_name(b) << ','
           << static_cast<int>(prod.sign) << ',' << blade_name(prod.mask)
           << '\n';
    }
  return 0;
}

int cmd_equivariance_report(const std::vector<std::string>& sig_args,
                            int trials, std::uint64_t seed, bool json) {
  const auto sigs = parse_signatures(sig_args);
  bool all_pass = true;
  for (const auto& sig : sigs) {
    Rng rng(seed ^ hash64(sig.str().c_str()));
    LayerStack stack;
    stack.sig = sig;
    stack.layers.push_back({LayerType::kLinear, 3, 6, true});
    stack.layers.push_back({LayerType::kNormalize, 6, 6, false});
    stack.layers.push_back({LayerType::kGpElementwise, 6, 6, false});
    stack.layers.push_back({LayerType::kGate, 6, 6, false});
    stack.layers.push_back({LayerType::kGpFull, 6, 2, false});
    double resid_equiv = 0.0;
    double resid_scalar = 0.0;
    for (int t = 0; t < trials; ++t) {
      const StackParams params = StackParams::init(stack, rng);
      MVChannels x;
      for (int c = 0; c < 3; ++c) x.push_back(random_multivector(sig, rng));
      const Versor w = sample_versor(sig, t % 3, true, true, rng);
      MVChannels moved;
      for (const auto& ch : x) moved.push_back(twisted_conjugation(w, ch));
      const MVChannels lhs = cgenn_forward(stack, params, moved);
      MVChannels rhs;
      for (const auto& ch : cgenn_forward(stack, params, x))
        rhs.push_back(twisted_conjugation(w, ch));
      for (std::size_t c = 0; c < lhs.size(); ++c) {
        const double scale = std::max(1.0, sup_norm(rhs[c]));
        resid_equiv =
            std::max(resid_equiv, max_abs_diff(lhs[c], rhs[c]) / scale);
      }
      const double s0 = extract_scalar(cgenn_forward(stack, params, x), 0);
      const double s1 = extract_scalar(lhs, 0);
      resid_scalar = std::max(
          resid_scalar, std::abs(s0 - s1) / std::max(1.0, std::abs(s0)));
    }
    const bool pass = resid_equiv < 1e-7 && resid_scalar < 1e-7;
    all_pass = all_pass && pass;
    if (json) {
      nlohmann::json j{{"signature", sig.str()},
                       {"trials", trials},
                       {"equivariance_residual", resid_equiv},
                       {"scalar_invariance_residual", resid_scalar},
                       {"status", pass ? "pass" : "fail"}};
      std::cout << j.dump() << '\n';
    } else {
      std::cout << "equivariance signature=" << sig.str()
                << " trials=" << trials << " residual=" << resid_equiv
                << " scalar_invariance=" << resid_scalar
                << " status=" << (pass ? "pass" : "fail") << '\n';
    }
  }
  return all_pass ? 0 : 1;
}

void merge_config_file(const std::string& path, const CLI::App* sub,
                       TrainConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  nlohmann::json j;
  in >> j;
  auto take = [&](const char* flag, auto member, auto cast) {
    if (j.contains(member) && sub->count(flag) == 0) cast(j.at(member));
  };
  take("--task", "task", [&](const nlohmann::json& v) { cfg.task = v; });
  take("--train-samples", "train_samples",
       [&](const nlohmann::json& v) { cfg.train_samples = v; });
  take("--val-samples", "val_samples",
       [&](const nlohmann::json& v) { cfg.val_samples = v; });
  take("--test-samples", "test_samples",
       [&](const nlohmann::json& v) { cfg.test_samples = v; });
  take("--batch", "batch_size",
       [&](const nlohmann::json& v) { cfg.batch_size = v; });
  take("--lr", "lr", [&](const nlohmann::json& v) { cfg.lr = v; });
  take("--optimizer", "optimizer",
       [&](const nlohmann::json& v) { cfg.optimizer = v; });
  take("--epochs", "epochs", [&](const nlohmann::json& v) { cfg.epochs = v; });
  take("--seed", "seed", [&](const nlohmann::json& v) { cfg.seed = v; });
  take("--head", "head",
       [&](const nlohmann::json& v) { cfg.head_override = v; });
  take("--out", "out_dir", [&](const nlohmann::json& v) { cfg.out_dir = v; });
  if (j.contains("arch") && sub->count("--arch") == 0) {
    std::ifstream arch(j.at("arch").get<std::string>());
    if (!arch)
      throw CLI::ValidationError("--config", "cannot open arch file");
    std::ostringstream ss;
    ss << arch.rdbuf();
    cfg.arch_json = ss.str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford-algebra engine: verification, training, tables"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the theorem checks and report pass/fail");
  std::vector<std::string> verify_sigs;
  int verify_trials = 200;
  std::uint64_t verify_seed = 0;
  bool verify_json = false;
  int verify_threads = 1;
  verify->add_option("--signature", verify_sigs,
                     "signature \"p,q,r\" (repeatable; default: suite)");
  verify->add_option("--trials", verify_trials, "random trials per check");
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_flag("--json", verify_json, "one JSON object per theorem");
  verify->add_option("--threads", verify_threads,
                     "max concurrent signature workers");

  // train
  auto* tr = app.add_subcommand("train", "train a desk-scale task");
  TrainConfig cfg;
  cfg.task.clear();  // must come from a flag or the config file
  cfg.out_dir = default_out_dir();
  std::string config_path, arch_path;
  tr->add_option("--task", cfg.task, "signed-volume | o5-regression");
  tr->add_option("--train-samples", cfg.train_samples, "");
  tr->add_option("--val-samples", cfg.val_samples, "");
  tr->add_option("--test-samples", cfg.test_samples, "");
  tr->add_option("--batch", cfg.batch_size, "batch size");
  tr->add_option("--lr", cfg.lr, "learning rate");
  tr->add_option("--optimizer", cfg.optimizer, "adam | sgd");
  tr->add_option("--epochs", cfg.epochs, "");
  tr->add_option("--seed", cfg.seed, "");
  tr->add_option("--head", cfg.head_override,
                 "override head: scalar | pseudoscalar");
  tr->add_option("--arch", arch_path, "architecture JSON file");
  tr->add_option("--out", cfg.out_dir, "output directory");
  tr->add_option("--config", config_path,
                 "JSON config file; explicit flags win");

  // tables
  auto* tables = app.add_subcommand("tables", "emit the Cayley table as CSV");
  std::string tables_sig = "3,0,0";
  std::string tables_out;
  tables->add_option("--signature", tables_sig, "signature \"p,q,r\"");
  tables->add_option("--out", tables_out, "output file (default: stdout)");

  // equivariance-report
  auto* eq = app.add_subcommand("equivariance-report",
                                "layer-stack equivariance residuals");
  std::vector<std::string> eq_sigs;
  int eq_trials = 20;
  std::uint64_t eq_seed = 0;
  bool eq_json = false;
  eq->add_option("--signature", eq_sigs, "signature (repeatable)");
  eq->add_option("--trials", eq_trials, "");
  eq->add_option("--seed", eq_seed, "");
  eq->add_flag("--json", eq_json, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed())
      return cmd_verify(verify_sigs, verify_trials, verify_seed, verify_json,
                        verify_threads);
    if (tables->parsed()) return cmd_tables(tables_sig, tables_out);
    if (eq->parsed())
      return cmd_equivariance_report(eq_sigs, eq_trials, eq_seed, eq_json);
    if (tr->parsed()) {
      if (!config_path.empty()) merge_config_file(config_path, tr, cfg);
      if (cfg.task.empty()) {
        std::cerr << "usage error: missing --task\n";
        return 2;
      }
      if (!arch_path.empty()) {
        std::ifstream arch(arch_path);
        if (!arch) {
          std::cerr << "cannot open " << arch_path << '\n';
          return 2;
        }
        std::ostringstream ss;
        ss << arch.rdbuf();
        cfg.arch_json = ss.str();
      }
      const TrainResult res = train(cfg);
      std::cout << "metrics: " << res.metrics_path << '\n'
                << "params: " << res.params_path << '\n'
                << "test_mse: " << res.test_mse << '\n'
                << "baseline_mse: " << res.baseline_mse << '\n';
      return 0;
    }
  } catch (const SignatureError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.get_name() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
