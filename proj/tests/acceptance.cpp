// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
// Pass --cli <path> to exercise the installed command-line binary in the
// determinism criterion; without it that criterion runs in-process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pushift/bench.hpp"
#include "pushift/data.hpp"
#include "pushift/density_ratio.hpp"
#include "pushift/optimizer.hpp"
#include "pushift/prior_cost.hpp"
#include "pushift/risk.hpp"
#include "pushift/stats.hpp"

using namespace pushift;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string name, double budget_seconds)
      : number_(number), name_(std::move(name)), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      failures_.push_back(detail);
    }
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (elapsed > budget_)
      failures_.push_back("runtime " + std::to_string(elapsed) + "s exceeds " +
                          std::to_string(budget_) + "s");
    if (failures_.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.2fs)\n", number_, name_.c_str(), elapsed);
    } else {
      ++g_failures;
      std::printf("[FAIL] criterion %2d: %s (%.2fs)\n", number_, name_.c_str(), elapsed);
      for (const auto& f : failures_) std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }

 private:
  int number_;
  std::string name_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> failures_;
};

SyntheticScenario scenario_1d(double pi = 0.3) {
  return SyntheticScenario(Vector::Constant(1, 1.0), Vector::Ones(1), Vector::Constant(1, -1.0),
                           Vector::Ones(1), pi);
}

void criterion_1_equivalence() {
  Criterion c(1, "prior/cost equivalence identities", 1.0);
  double worst = 0;
  for (int i = 1; i <= 98; ++i)
    for (int j = 1; j <= 98; ++j) {
      const double pi = i / 100.0, pip = j / 100.0;
      worst = std::max(worst, std::abs(prior_from_alpha(pi, alpha_from_shift(pi, pip)) - pip));
    }
  c.expect(worst < 1e-12, "round-trip error " + std::to_string(worst));
  c.expect(std::abs(alpha_from_shift(0.3, 0.5) - 0.3) < 1e-12, "alpha_from_shift(0.3,0.5) != 0.3");
  const auto unified = reduce(TestCondition(0.3, 0.5, 0.3));
  c.expect(std::abs(unified.pi_unif - 0.7) < 1e-12, "pi_unif != 0.7");
  c.expect(std::abs(unified.alpha_unif - 0.09 / 0.58) < 1e-12, "alpha_unif != 0.09/0.58");
  c.finish();
}

void criterion_2_bayes_signs() {
  Criterion c(2, "Bayes sign equivalence of the three problem views", 1.0);
  const auto scenario = scenario_1d();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> prior(0.05, 0.95);
  long mismatches = 0, checked = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double pi = prior(rng), pip = prior(rng), alpha = prior(rng);
    const auto unified = reduce(TestCondition(pi, pip, alpha));
    for (int k = 0; k < 1000; ++k) {
      const Vector x = Vector::Constant(1, -6.0 + 12.0 * k / 999.0);
      const double pp = synth_density(scenario, x, Component::Positive);
      const double pn = synth_density(scenario, x, Component::Negative);
      const double pt = pip * pp + (1.0 - pip) * pn;
      const double pu = pi * pp + (1.0 - pi) * pn;
      const double pm = unified.pi_unif * pp + (1.0 - unified.pi_unif) * pn;
      const double combined = pip * pp / pt - alpha;
      const double shift_view = unified.pi_unif * pp / pm - 0.5;
      const double asym_view = pi * pp / pu - unified.alpha_unif;
      if (std::abs(combined) < 1e-12 || std::abs(shift_view) < 1e-12 ||
          std::abs(asym_view) < 1e-12)
        continue;
      ++checked;
      if (sign(combined) != sign(shift_view) || sign(combined) != sign(asym_view)) ++mismatches;
    }
  }
  c.expect(checked > 15000, "too few non-tie grid points: " + std::to_string(checked));
  c.expect(mismatches == 0, std::to_string(mismatches) + " sign mismatches");
  c.finish();
}

void criterion_3_unbiasedness() {
  Criterion c(3, "unbiasedness of the shifted and asymmetric estimators", 30.0);
  const auto scenario = scenario_1d(0.3);
  const double pip = 0.5, alpha = 0.35;
  const auto map = FeatureMap::raw_with_bias(1);

  // supervised oracle on one million fresh labeled points
  const Matrix pos = [&] {
    std::mt19937_64 rng(555);
    std::normal_distribution<double> gauss(1.0, 1.0);
    Matrix m(500000, 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = gauss(rng);
    return m;
  }();
  const Matrix neg = [&] {
    std::mt19937_64 rng(556);
    std::normal_distribution<double> gauss(-1.0, 1.0);
    Matrix m(500000, 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = gauss(rng);
    return m;
  }();

  std::mt19937_64 model_rng(313);
  std::normal_distribution<double> gauss;
  for (int m_index = 0; m_index < 5; ++m_index) {
    Vector w(2);
    w << gauss(model_rng), gauss(model_rng);
    const LinearModel model(map, w);
    const Vector sp = model.predict_scores(pos);
    const Vector sn = model.predict_scores(neg);
    double mp = 0, mn = 0;
    for (Eigen::Index i = 0; i < sp.size(); ++i) {
      mp += loss_value(Loss::Squared, sp[i]);
      mn += loss_value(Loss::Squared, -sn[i]);
    }
    mp /= static_cast<double>(sp.size());
    mn /= static_cast<double>(sn.size());
    const double supervised_shift = pip * mp + (1.0 - pip) * mn;
    const double supervised_asym = 0.3 * (1.0 - alpha) * mp + 0.7 * alpha * mn;

    std::vector<double> shift_estimates, asym_estimates;
    for (int rep = 0; rep < 1000; ++rep) {
      const PUSample sample =
          draw_pu(scenario, 50, 200, derive_seed(999, static_cast<std::uint64_t>(m_index), rep));
      shift_estimates.push_back(empirical_shift_risk(model, sample, pip, Loss::Squared));
      asym_estimates.push_back(empirical_asym_risk(model, sample, alpha, Loss::Squared));
    }
    const double shift_gap = std::abs(mean(shift_estimates) - supervised_shift);
    const double asym_gap = std::abs(mean(asym_estimates) - supervised_asym);
    c.expect(shift_gap <= 3.0 * standard_error(shift_estimates),
             "model " + std::to_string(m_index) + ": shifted-mean gap " +
                 std::to_string(shift_gap) + " > 3se " +
                 std::to_string(3.0 * standard_error(shift_estimates)));
    c.expect(asym_gap <= 3.0 * standard_error(asym_estimates),
             "model " + std::to_string(m_index) + ": asymmetric-mean gap " +
                 std::to_string(asym_gap) + " > 3se " +
                 std::to_string(3.0 * standard_error(asym_estimates)));
  }
  c.finish();
}

void criterion_4_convexity() {
  Criterion c(4, "midpoint convexity for non-negative shift and low costs", 5.0);
  std::mt19937_64 rng(414);
  std::normal_distribution<double> gauss;
  const auto scenario = scenario_1d(0.3);
  const PUSample sample = draw_pu(scenario, 20, 60, 11);
  const auto map = FeatureMap::raw_with_bias(1);
  const FeaturizedPU data(map, sample);
  for (Loss loss : {Loss::Squared, Loss::Logistic, Loss::DoubleHinge}) {
    const RiskSpec shift = RiskSpec::pu_shift(loss, 0.5);  // gamma > 0
    const RiskSpec asym = RiskSpec::pu_asym(loss, 0.25);   // alpha <= 0.5
    double worst_shift = 0, worst_asym = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      Vector w1(2), w2(2);
      w1 << 3.0 * gauss(rng), 3.0 * gauss(rng);
      w2 << 3.0 * gauss(rng), 3.0 * gauss(rng);
      const Vector mid = 0.5 * (w1 + w2);
      worst_shift = std::max(worst_shift,
                             risk_value(shift, mid, data) - 0.5 * (risk_value(shift, w1, data) +
                                                                   risk_value(shift, w2, data)));
      worst_asym = std::max(worst_asym,
                            risk_value(asym, mid, data) - 0.5 * (risk_value(asym, w1, data) +
                                                                 risk_value(asym, w2, data)));
    }
    c.expect(worst_shift <= 1e-9,
             std::string(loss_name(loss)) + ": shift midpoint excess " +
                 std::to_string(worst_shift));
    c.expect(worst_asym <= 1e-9,
             std::string(loss_name(loss)) + ": asym midpoint excess " +
                 std::to_string(worst_asym));
  }

  // documented witness: pi=0.7 -> pi'=0.3 with the logistic loss is non-convex
  Matrix p(1, 1), u(1, 1);
  p << 1.0;
  u << 0.0;
  const PUSample witness(p, u, 0.7);
  const FeaturizedPU wdata(map, witness);
  const RiskSpec down = RiskSpec::pu_shift(Loss::Logistic, 0.3);
  Vector w1(2), w2(2);
  w1 << -2.0, 0.0;
  w2 << 2.0, 0.0;
  const double excess = risk_value(down, Vector(0.5 * (w1 + w2)), wdata) -
                        0.5 * (risk_value(down, w1, wdata) + risk_value(down, w2, wdata));
  c.expect(excess > 1e-6, "witness midpoint excess only " + std::to_string(excess));
  c.finish();
}

void criterion_5_gradients() {
  Criterion c(5, "risk gradients match central finite differences", 5.0);
  std::mt19937_64 rng(515);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> prior(0.1, 0.9);
  int checked = 0;
  double worst = 0;
  while (checked < 100) {
    const int dim = 1 + static_cast<int>(checked % 3);
    Matrix p(4 + checked % 5, dim), u(8 + checked % 7, dim);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = gauss(rng);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = gauss(rng);
    const PUSample sample(p, u, prior(rng));
    const auto map = FeatureMap::raw_with_bias(dim);
    Vector w(dim + 1);
    for (int i = 0; i <= dim; ++i) w[i] = gauss(rng);
    const LinearModel model(map, w);

    RiskSpec spec = RiskSpec::pu(Loss::Squared);
    switch (checked % 5) {
      case 0: spec = RiskSpec::pu(Loss::Squared); break;
      case 1: spec = RiskSpec::pu_shift(Loss::Logistic, prior(rng)); break;
      case 2: spec = RiskSpec::pu_asym(Loss::Squared, prior(rng)); break;
      case 3: spec = RiskSpec::pu(Loss::Logistic, true); break;
      case 4: spec = RiskSpec::pu_shift(Loss::DoubleHinge, prior(rng), true); break;
    }
    // keep away from double-hinge kinks and the clamp boundary
    bool near_kink = false;
    if (spec.loss == Loss::DoubleHinge) {
      const auto near = [](double z) {
        return std::abs(z - 1.0) < 1e-3 || std::abs(z + 1.0) < 1e-3;
      };
      for (Eigen::Index i = 0; i < p.rows() && !near_kink; ++i) {
        const double z = model.predict_score(p.row(i).transpose());
        near_kink = near(z) || near(-z);
      }
      for (Eigen::Index i = 0; i < u.rows() && !near_kink; ++i)
        near_kink = near(-model.predict_score(u.row(i).transpose()));
    }
    if (near_kink) continue;
    if (spec.non_negative) {
      double mp_neg = 0, mu_neg = 0;
      for (Eigen::Index i = 0; i < p.rows(); ++i)
        mp_neg += loss_value(spec.loss, -model.predict_score(p.row(i).transpose()));
      for (Eigen::Index i = 0; i < u.rows(); ++i)
        mu_neg += loss_value(spec.loss, -model.predict_score(u.row(i).transpose()));
      if (std::abs(mu_neg / u.rows() - sample.train_prior * mp_neg / p.rows()) < 1e-4) continue;
    }

    const Vector g = risk_gradient(spec, model, sample);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Vector wp = w, wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (risk_value(spec, LinearModel(map, wp), sample) -
                         risk_value(spec, LinearModel(map, wm), sample)) /
                        (2.0 * h);
      worst = std::max(worst, std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)));
    }
    ++checked;
  }
  c.expect(worst < 1e-5, "worst relative gradient error " + std::to_string(worst));
  c.finish();
}

void criterion_6_bounds_and_transform() {
  Criterion c(6, "analytic ratio bounds and the shift transform", 1.0);
  const auto scenario = scenario_1d(0.3);
  double min_margin_pu = 1e300, min_margin_up = 1e300;
  for (int k = 0; k < 10000; ++k) {
    const Vector x = Vector::Constant(1, -8.0 + 16.0 * k / 9999.0);
    const double pp = synth_density(scenario, x, Component::Positive);
    const double pu = synth_density(scenario, x, Component::Unlabeled);
    min_margin_pu = std::min(min_margin_pu, 1.0 / 0.3 - pp / pu);
    min_margin_up = std::min(min_margin_up, pu / pp - 0.3);
  }
  c.expect(min_margin_pu > 0, "p/u bound not strict");
  c.expect(min_margin_up > 0, "u/p bound not strict");

  double worst = 0;
  for (double pip : {0.5, 0.6}) {
    const double gamma = pip - scenario.train_prior;
    for (int k = 0; k < 1000; ++k) {
      const Vector x = Vector::Constant(1, -6.0 + 12.0 * k / 999.0);
      const double pp = synth_density(scenario, x, Component::Positive);
      const double pu = synth_density(scenario, x, Component::Unlabeled);
      const double pt = synth_density(scenario, x, Component::Test, pip);
      worst = std::max(worst, std::abs(shift_ratio_transform(pu / pp, scenario.train_prior,
                                                             gamma) -
                                       pt / pp));
    }
  }
  c.expect(worst < 1e-10, "transform error " + std::to_string(worst));
  c.finish();
}

void criterion_7_ulsif_quality() {
  Criterion c(7, "uLSIF fit quality (flat ratio and two-Gaussian shape)", 30.0);
  for (int seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    std::normal_distribution<double> gauss;
    Matrix x(500, 1);
    for (int i = 0; i < 500; ++i) x(i, 0) = gauss(rng);
    const RatioModel model = fit_ulsif(x, x, RatioDirection::POverU, UlsifGrid{},
                                       static_cast<std::uint64_t>(seed));
    const double deviation = (ratio_at_all(model, x).array() - 1.0).abs().mean();
    c.expect(deviation < 0.15,
             "seed " + std::to_string(seed) + ": mean |w-1| = " + std::to_string(deviation));
  }

  // n = 5000 draws per side with a 200-center basis resolve the exp(1/2 - x) shape
  UlsifGrid grid;
  grid.max_centers = 200;
  std::vector<double> truth(1000);
  Matrix grid_points(1000, 1);
  for (int k = 0; k < 1000; ++k) {
    grid_points(k, 0) = -2.0 + 5.0 * k / 999.0;
    truth[static_cast<std::size_t>(k)] = std::exp(0.5 - grid_points(k, 0));
  }
  for (int seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(200 + seed);
    std::normal_distribution<double> nu(0.0, 1.0), de(1.0, 1.0);
    Matrix xnu(5000, 1), xde(5000, 1);
    for (int i = 0; i < 5000; ++i) {
      xnu(i, 0) = nu(rng);
      xde(i, 0) = de(rng);
    }
    const RatioModel model =
        fit_ulsif(xnu, xde, RatioDirection::POverU, grid, static_cast<std::uint64_t>(seed));
    const Vector fitted = ratio_at_all(model, grid_points);
    const double r =
        pearson_correlation(std::vector<double>(fitted.begin(), fitted.end()), truth);
    c.expect(r > 0.95, "seed " + std::to_string(seed) + ": Pearson r = " + std::to_string(r));
  }
  c.finish();
}

void criterion_8_end_to_end() {
  Criterion c(8, "end-to-end benchmark: shift awareness pays off", 600.0);
  ExperimentConfig config;
  const SyntheticScenario scenario(Vector::Constant(2, 0.64), Vector::Ones(2),
                                   Vector::Constant(2, -0.64), Vector::Ones(2), 0.3);
  config.source = scenario;
  config.dataset_name = "gauss2d";
  config.methods = {Method::DrPOverU,     Method::DrUOverP,     Method::RmSquaredLin,
                    Method::RmSquaredKer, Method::RmDhLin,      Method::RmDhKer,
                    Method::RmLogisticLin, Method::RmLogisticKer};
  config.grid = {{0.3, 0.5, 0.5}, {0.3, 0.5, 0.3}};  // informed vs misspecified
  config.trials = 10;
  config.seed = 815;
  const ResultTable table = run_benchmark(config);

  double best_informed = 0, max_improvement = -1e300;
  double dr_p_informed = 0, dr_u_informed = 0;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    const auto& informed = table.cell(0, m);
    const auto& misspecified = table.cell(1, m);
    c.expect(!informed.failed && !misspecified.failed,
             std::string(method_name(config.methods[m])) + " failed: " + informed.note +
                 misspecified.note);
    if (informed.failed || misspecified.failed) continue;
    const double improvement = informed.mean_accuracy - misspecified.mean_accuracy;
    c.expect(improvement >= -0.5,
             std::string(method_name(config.methods[m])) + " lost " +
                 std::to_string(-improvement) + " points when told the true test prior");
    max_improvement = std::max(max_improvement, improvement);
    best_informed = std::max(best_informed, informed.mean_accuracy);
    if (config.methods[m] == Method::DrPOverU) dr_p_informed = informed.mean_accuracy;
    if (config.methods[m] == Method::DrUOverP) dr_u_informed = informed.mean_accuracy;
  }
  c.expect(max_improvement >= 2.0,
           "no method improved by 2 points (max " + std::to_string(max_improvement) + ")");

  const double bayes = 100.0 * bayes_accuracy(scenario, 0.5,
                                              [&](const Eigen::Ref<const Vector>& x) {
                                                return bayes_reference(scenario, 0.5, 0.5, x);
                                              });
  c.expect(std::abs(best_informed - bayes) <= 3.0,
           "best " + std::to_string(best_informed) + " vs Bayes " + std::to_string(bayes));
  c.expect(dr_p_informed >= dr_u_informed - 0.5,
           "p/u direction (" + std::to_string(dr_p_informed) + ") fell behind u/p (" +
               std::to_string(dr_u_informed) + ")");
  c.finish();
}

void criterion_9_no_retraining() {
  Criterion c(9, "ratio models fit once per trial across a given-prior sweep", 120.0);
  ExperimentConfig config;
  config.source = scenario_1d(0.4);
  config.dataset_name = "sweep";
  config.methods = {Method::DrPOverU, Method::DrUOverP, Method::RmSquaredLin};
  config.grid = {{0.4, 0.6, 0.3}, {0.4, 0.6, 0.5}, {0.4, 0.6, 0.6}};
  config.trials = 3;
  config.n_p = 50;
  config.n_u = 200;
  config.n_test = 50;
  config.train.epochs = 50;
  config.ulsif.max_centers = 40;
  config.seed = 99;
  counters::reset();
  const ResultTable table = run_benchmark(config);
  const long fits = counters::ulsif_fits();
  const long trains = counters::train_calls();
  counters::reset();
  c.expect(fits == 3 * 2, "expected 6 ratio fits, saw " + std::to_string(fits));
  c.expect(trains == 3 * 3, "expected 9 training runs, saw " + std::to_string(trains));
  for (const auto& cell : table.cells) c.expect(!cell.failed, "cell failed: " + cell.note);
  c.finish();
}

const char* kDeterminismConfig = R"({
  "dataset": {"scenario": {"pos_mean": [1], "pos_var": [1],
                            "neg_mean": [-1], "neg_var": [1], "pi": 0.5},
               "name": "determinism"},
  "methods": ["dr_p_over_u", "rm_squared_lin"],
  "grid": [{"pi": 0.5, "pi_prime": 0.6, "pi_given": 0.6}],
  "trials": 2,
  "n_p": 30, "n_u": 100, "n_test": 40,
  "train": {"epochs": 30},
  "ulsif": {"max_centers": 20},
  "seed": 31
})";

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_10_determinism(const std::string& cli_path) {
  Criterion c(10, "bench emits byte-identical CSV for a fixed seed", 120.0);
  if (!cli_path.empty()) {
    const auto dir = std::filesystem::temp_directory_path() / "pushift-acceptance";
    std::filesystem::create_directories(dir);
    const auto config_path = (dir / "config.json").string();
    std::ofstream(config_path) << kDeterminismConfig;
    const auto out1 = (dir / "run1.csv").string();
    const auto out2 = (dir / "run2.csv").string();
    const std::string base = "\"" + cli_path + "\" bench --config \"" + config_path + "\" --out ";
    const int rc1 = std::system((base + "\"" + out1 + "\"").c_str());
    const int rc2 = std::system((base + "\"" + out2 + "\"").c_str());
    c.expect(rc1 == 0 && rc2 == 0, "bench runs exited nonzero");
    const std::string a = read_all(out1), b = read_all(out2);
    c.expect(!a.empty() && a == b, "CSV outputs differ between the two runs");
    c.expect(a.find("dataset,pi,pi_prime,pi_given,method,mean,stderr,highlighted") !=
                 std::string::npos,
             "unexpected CSV header");
  } else {
    const auto config = config_from_json(kDeterminismConfig);
    const std::string a = emit_table(run_benchmark(config), TableFormat::Csv);
    const std::string b = emit_table(run_benchmark(config), TableFormat::Csv);
    c.expect(!a.empty() && a == b, "CSV outputs differ between the two runs");
  }
  c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli_path = argv[i + 1];

  criterion_1_equivalence();
  criterion_2_bayes_signs();
  criterion_3_unbiasedness();
  criterion_4_convexity();
  criterion_5_gradients();
  criterion_6_bounds_and_transform();
  criterion_7_ulsif_quality();
  criterion_8_end_to_end();
  criterion_9_no_retraining();
  criterion_10_determinism(cli_path);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
