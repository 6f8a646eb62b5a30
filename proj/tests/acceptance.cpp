// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cliff/group.hpp"
#include "cliff/theorems.hpp"
#include "cliff/train.hpp"
#include "gradcheck_util.hpp"

using namespace cliff;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::vector<MetricSignature> suite_signatures() {
  return {{3, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 3, 0},
          {5, 0, 0}, {2, 0, 1}, {1, 1, 1}};
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  const auto sigs = suite_signatures();
  constexpr int kTrials = 500;
  constexpr std::uint64_t kSeed = 17;

  // One 500-trial identity-suite run per signature backs criteria 1-3
  // and 5; each consumes the residuals of its own bullets.
  const auto t_suite = std::chrono::steady_clock::now();
  std::map<std::string, double> residual;  // bullet id -> max over sigs
  for (const auto& sig : sigs)
    for (const auto& r : check_rho_identity_suite(sig, kTrials, kSeed)) {
      auto& slot = residual[r.theorem];
      slot = std::max(slot, r.max_residual);
    }
  const double suite_time = elapsed_s(t_suite);

  {
    const double r = std::max(
        {residual["rho-additivity"], residual["rho-multiplicativity"],
         residual["rho-scalar-fix"], residual["rho-composition"],
         residual["rho-inverse"], residual["rho-orthogonality-bbar"]});
    const bool pass = r < 1e-8 && suite_time < 60.0;
    report(1, "rho identity suite, 500 trials x 7 signatures", pass,
           "max residual " + fmt(r) + " < 1e-8; " + fmt(suite_time) +
               "s < 60s");
  }
  {
    const double r = std::max(residual["rho-polynomial-equivariance"],
                              residual["rho-grade-equivariance"]);
    report(2, "polynomial and grade-projection equivariance", r < 1e-7,
           "max residual " + fmt(r) + " < 1e-7");
  }
  {
    const double r = std::max({residual["rho-orthogonality-bbar"],
                               residual["rho-qbar-preservation"],
                               residual["rho-range-orthogonal"]});
    report(3, "bbar/qbar preservation and orthogonal range", r < 1e-8,
           "max residual " + fmt(r) + " < 1e-8");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    double worst = 0.0;
    for (const auto& sig : sigs) {
      const auto c = check_center(sig);
      const auto t = check_twisted_center(sig);
      pass = pass && c.pass && t.pass;
      worst = std::max({worst, c.max_residual, t.max_residual});
    }
    const double dt = elapsed_s(t0);
    pass = pass && dt < 30.0;
    report(4, "center and twisted-center subspace dimensions", pass,
           "exact dimension match, max residual " + fmt(worst) + "; " +
               fmt(dt) + "s < 30s");
  }
  {
    const double r = residual["rho-lift-roundtrip"];
    report(5, "Cartan-Dieudonne lift roundtrip, 500 maps x 7 signatures",
           r < 1e-6, "max matrix residual " + fmt(r) + " < 1e-6");
  }

  {
    bool pass = true;
    std::string detail;
    const auto run = [&](const char* label, const LayerStack& stack,
                         std::uint64_t seed) {
      const GradCheck g = gradcheck_stack(stack, seed);
      pass = pass && g.pass();
      detail += std::string(label) + " " +
                std::to_string(g.rel_ok) + "/" + std::to_string(g.total) +
                (g.pass() ? " ok; " : " FAIL; ");
    };
    auto one = [](const MetricSignature& sig, LayerSpec spec) {
      LayerStack s;
      s.sig = sig;
      s.layers.push_back(spec);
      return s;
    };
    run("linear",
        one(MetricSignature(3, 0, 0), {LayerType::kLinear, 3, 2, true}), 101);
    run("gp-elementwise",
        one(MetricSignature(2, 0, 1), {LayerType::kGpElementwise, 3, 3, false}),
        102);
    run("gp-full",
        one(MetricSignature(1, 1, 0), {LayerType::kGpFull, 3, 2, false}), 103);
    run("normalize",
        one(MetricSignature(2, 0, 0), {LayerType::kNormalize, 2, 2, false}),
        104);
    {
      LayerStack s;
      s.sig = MetricSignature(3, 0, 0);
      s.layers.push_back({LayerType::kLinear, 2, 3, true});
      s.layers.push_back({LayerType::kGate, 3, 3, false});
      run("gate", s, 105);
    }
    {
      // three-layer composed network with a squared-error loss
      LayerStack s;
      s.sig = MetricSignature(3, 0, 0);
      s.layers.push_back({LayerType::kLinear, 2, 4, true});
      s.layers.push_back({LayerType::kGpElementwise, 4, 4, false});
      s.layers.push_back({LayerType::kLinear, 4, 1, true});
      s.head = HeadKind::kScalar;
      Rng rng(106);
      StackParams layout = StackParams::init(s, rng);
      Tape tape(s.sig);
      StackGraph graph = build_stack_graph(tape, s, layout);
      const int target = tape.const_scalar(0.4);
      const int diff = tape.sub_s(graph.head, target);
      const int loss = tape.mul_s(diff, diff);
      for (int c : graph.inputs)
        tape.set_input(c, random_multivector(s.sig, rng));
      ParamStore store(layout.values);
      const GradCheck g = run_gradcheck(tape, store, loss);
      pass = pass && g.pass();
      detail += "composed " + std::to_string(g.rel_ok) + "/" +
                std::to_string(g.total) + (g.pass() ? " ok" : " FAIL");
    }
    report(6, "analytic gradients vs central finite differences", pass,
           detail);
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig cfg;
    cfg.task = "signed-volume";
    cfg.train_samples = 1024;
    cfg.val_samples = 128;
    cfg.test_samples = 256;
    cfg.epochs = 120;
    cfg.lr = 5e-3;
    cfg.seed = 1;
    cfg.write_files = false;
    const TrainResult res = train(cfg);
    TrainConfig ablation = cfg;
    ablation.head_override = "scalar";
    const TrainResult abl = train(ablation);
    const double dt = elapsed_s(t0);
    const double var = res.test_label_variance;
    const bool pass =
        res.test_mse < 1e-2 && abl.test_mse >= 0.5 * var && dt < 300.0;
    report(7, "signed-volume task and scalar-head ablation", pass,
           "test MSE " + fmt(res.test_mse) + " < 1e-2; ablation MSE " +
               fmt(abl.test_mse) + " >= " + fmt(0.5 * var) +
               " (0.5 x label variance " + fmt(var) + "); " + fmt(dt) +
               "s < 300s");
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig cfg;
    cfg.task = "o5-regression";
    cfg.train_samples = 1000;
    cfg.val_samples = 128;
    cfg.test_samples = 256;
    cfg.epochs = 150;
    cfg.lr = 2e-3;
    cfg.seed = 1;
    cfg.write_files = false;
    const TrainResult res = train(cfg);
    const double dt = elapsed_s(t0);
    const double ratio = res.baseline_mse / res.test_mse;
    const bool pass = ratio >= 10.0 && dt < 300.0;
    report(8, "O(5) regression beats the mean predictor by 10x", pass,
           "test MSE " + fmt(res.test_mse) + ", baseline " +
               fmt(res.baseline_mse) + ", ratio " + fmt(ratio) + " >= 10; " +
               fmt(dt) + "s < 300s");
  }

  {
    const MetricSignature sig(2, 0, 1);
    Rng rng(907);
    double r_gamma = 0.0;
    double r_kernel = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int e_index = t % 2;
      const double c = rng.uniform(-2.0, 2.0);
      const Versor gamma(sig, {VersorGenerator::make_gamma(e_index, {c})});
      const Multivector v = grade_projection(random_multivector(sig, rng), 1);
      Multivector expected = v;
      const double b_e_v =
          v[std::uint32_t{1} << e_index] * sig.metric(e_index);
      expected[0b100] -= 2.0 * b_e_v * c;
      r_gamma =
          std::max(r_gamma, max_abs_diff(twisted_conjugation(gamma, v),
                                         expected));

      // even radical units of Cl(2,0,1) are the nonzero scalars
      const Multivector g =
          Multivector::scalar(sig, rng.coin() ? rng.uniform(0.5, 2.0)
                                              : -rng.uniform(0.5, 2.0));
      const Multivector x = random_multivector(sig, rng);
      r_kernel = std::max(r_kernel,
                          max_abs_diff(twisted_conjugation(g, x), x));
    }
    const bool pass = r_gamma < 1e-10 && r_kernel < 1e-10;
    report(9, "degenerate metric: gamma reflection formula and kernel", pass,
           "gamma residual " + fmt(r_gamma) + " < 1e-10; kernel residual " +
               fmt(r_kernel) + " < 1e-10");
  }

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return 1;
}
