#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pushift/bench.hpp"
#include "pushift/data.hpp"
#include "pushift/density_ratio.hpp"
#include "pushift/model.hpp"
#include "pushift/optimizer.hpp"
#include "pushift/prior_cost.hpp"

namespace {

using namespace pushift;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
}

struct DataFlags {
  std::string path;
  std::string format;  // csv | libsvm | "" = infer from extension
  bool csv_header = false;
  std::string label_map_path;

  LabeledDataset load() const {
    LabelMap labels = default_label_map();
    if (!label_map_path.empty()) {
      std::ifstream lm(label_map_path);
      if (!lm) throw DataError("cannot open label map: " + label_map_path);
      labels = parse_label_map(lm);
    }
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset: " + path);
    std::string fmt = format;
    if (fmt.empty())
      fmt = path.size() > 4 && path.substr(path.size() - 4) == ".csv" ? "csv" : "libsvm";
    LabeledDataset data =
        fmt == "csv" ? parse_csv(in, csv_header, labels) : parse_libsvm(in, labels);
    data.name = path;
    return data;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "dataset file")->required();
    cmd->add_option("--data-format", format, "csv or libsvm (default: by extension)")
        ->check(CLI::IsMember({"csv", "libsvm"}));
    cmd->add_flag("--csv-header", csv_header, "first CSV line is a header");
    cmd->add_option("--label-map", label_map_path, "label map file: '<source> <+1|-1>' per line");
  }
};

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run_convert(const std::optional<double>& pi, const std::optional<double>& pi_prime,
                const std::optional<double>& alpha, const std::string& in_path,
                const std::string& out_path) {
  std::ostringstream out;
  out << "pi,pi_prime,alpha,pi_unif,alpha_unif\n";
  const auto emit = [&](double p, double pp, double a) {
    const auto unified = reduce(TestCondition(p, pp, a));
    out << fmt12(p) << ',' << fmt12(pp) << ',' << fmt12(a) << ',' << fmt12(unified.pi_unif)
        << ',' << fmt12(unified.alpha_unif) << '\n';
  };
  if (pi || pi_prime || alpha) {
    if (!pi || !pi_prime || !alpha)
      throw CLI::ValidationError("convert", "--pi, --pi-prime and --alpha must be given together");
    emit(*pi, *pi_prime, *alpha);
  } else {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (!in_path.empty() && in_path != "-") {
      file.open(in_path);
      if (!file) throw DataError("cannot open file: " + in_path);
      in = &file;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string a, b, c;
      if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
        throw DataError("line " + std::to_string(line_no) + ": expected 'pi,pi_prime,alpha'");
      if (line_no == 1 && a == "pi") continue;  // optional header
      double pv = 0, ppv = 0, av = 0;
      try {
        pv = std::stod(a);
        ppv = std::stod(b);
        av = std::stod(c);
      } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": malformed triple '" + line + "'");
      }
      emit(pv, ppv, av);
    }
  }
  write_output(out_path, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PU classification under class-prior shift and asymmetric error"};
  app.require_subcommand(1);

  // ---- convert ----
  auto* convert = app.add_subcommand(
      "convert", "reduce (pi, pi_prime, alpha) triples to the unified condition");
  std::optional<double> cv_pi, cv_pip, cv_alpha;
  std::string cv_in, cv_out;
  convert->add_option("--pi", cv_pi, "training class prior");
  convert->add_option("--pi-prime", cv_pip, "test class prior");
  convert->add_option("--alpha", cv_alpha, "false-positive cost");
  convert->add_option("--in", cv_in, "CSV file of pi,pi_prime,alpha triples ('-' = stdin)");
  convert->add_option("--out", cv_out, "output file (default stdout)");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "emit a labeled dataset from a synthetic source");
  std::string sy_scenario, sy_out, sy_format = "csv";
  bool sy_banana = false;
  int sy_n = 1000;
  std::optional<double> sy_prior;
  std::uint64_t sy_seed = 1;
  synth->add_option("--scenario", sy_scenario, "scenario JSON file");
  synth->add_flag("--banana", sy_banana, "use the built-in two-crescent dataset");
  synth->add_option("--n", sy_n, "number of draws")->check(CLI::PositiveNumber);
  synth->add_option("--prior", sy_prior, "class prior of the draws");
  synth->add_option("--seed", sy_seed, "random seed");
  synth->add_option("--format", sy_format, "csv or libsvm")
      ->check(CLI::IsMember({"csv", "libsvm"}));
  synth->add_option("--out", sy_out, "output file (default stdout)");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "train one model and write it as JSON");
  DataFlags fit_data;
  fit_data.attach(fit);
  std::string fit_framework = "risk", fit_loss = "squared", fit_model = "lin";
  std::string fit_direction = "p-over-u", fit_out;
  double fit_pi = 0.5;
  std::optional<double> fit_pig, fit_alpha;
  int fit_np = 500, fit_nu = 2000, fit_centers = 100, fit_folds = 5;
  double fit_bw_factor = 1.0;
  bool fit_no_nn = false;
  TrainConfig fit_train;
  fit->add_option("--framework", fit_framework, "risk or ratio")
      ->check(CLI::IsMember({"risk", "ratio"}));
  fit->add_option("--pi", fit_pi, "training class prior")->required();
  fit->add_option("--pi-given", fit_pig, "test class prior the method should target");
  fit->add_option("--alpha", fit_alpha, "false-positive cost of the target task");
  fit->add_option("--loss", fit_loss, "squared, logistic or double-hinge");
  fit->add_option("--model", fit_model, "lin or ker")->check(CLI::IsMember({"lin", "ker"}));
  fit->add_option("--direction", fit_direction, "ratio direction: p-over-u or u-over-p")
      ->check(CLI::IsMember({"p-over-u", "u-over-p"}));
  fit->add_option("--np", fit_np, "positive sample size")->check(CLI::PositiveNumber);
  fit->add_option("--nu", fit_nu, "unlabeled sample size")->check(CLI::PositiveNumber);
  fit->add_option("--lr", fit_train.learning_rate, "learning rate");
  fit->add_option("--epochs", fit_train.epochs, "training epochs");
  fit->add_option("--batch", fit_train.batch_size, "mini-batch size (0 = full batch)");
  fit->add_option("--seed", fit_train.seed, "random seed");
  fit->add_flag("--no-nn", fit_no_nn, "use the plain unbiased risk (no clamp)");
  fit->add_option("--centers", fit_centers, "kernel basis budget")->check(CLI::PositiveNumber);
  fit->add_option("--bandwidth-factor", fit_bw_factor, "kernel bandwidth as a multiple of the "
                                                       "median pairwise distance");
  fit->add_option("--folds", fit_folds, "uLSIF cross-validation folds");
  fit->add_option("--out", fit_out, "output model file (default stdout)");

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "apply a model JSON to a dataset");
  DataFlags pred_data;
  pred_data.attach(predict);
  std::string pred_model, pred_out, pred_clip = "on";
  std::optional<double> pred_pi, pred_pig, pred_alpha;
  predict->add_option("--model", pred_model, "model JSON file")->required();
  predict->add_option("--pi", pred_pi, "training class prior (ratio models)");
  predict->add_option("--pi-given", pred_pig, "target test class prior");
  predict->add_option("--alpha", pred_alpha, "target false-positive cost");
  predict->add_option("--clip-ratio", pred_clip, "clip p-over-u ratios at 1/pi in the output")
      ->check(CLI::IsMember({"on", "off"}));
  predict->add_option("--out", pred_out, "output file (default stdout)");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "run a benchmark table from a config file");
  std::string bn_config, bn_out, bn_format = "csv";
  std::optional<std::uint64_t> bn_seed;
  std::optional<int> bn_trials;
  bench->add_option("--config", bn_config, "experiment config JSON")->required();
  bench->add_option("--seed", bn_seed, "override the config seed");
  bench->add_option("--trials", bn_trials, "override the trial count");
  bench->add_option("--format", bn_format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  bench->add_option("--out", bn_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);

    if (convert->parsed()) return run_convert(cv_pi, cv_pip, cv_alpha, cv_in, cv_out);

    if (synth->parsed()) {
      if (sy_banana != sy_scenario.empty())
        throw CLI::ValidationError("synth", "give exactly one of --scenario and --banana");
      LabeledDataset data;
      if (sy_banana) {
        data = make_banana(sy_n, sy_prior.value_or(0.5), sy_seed);
      } else {
        const auto scenario = scenario_from_json(read_file(sy_scenario));
        data = draw_labeled(scenario, sy_n, sy_prior.value_or(scenario.train_prior), sy_seed);
      }
      std::ostringstream out;
      if (sy_format == "csv")
        serialize_csv(data, out);
      else
        serialize_libsvm(data, out);
      write_output(sy_out, out.str());
      return kExitOk;
    }

    if (fit->parsed()) {
      const LabeledDataset data = fit_data.load();
      const double pig = fit_pig.value_or(fit_pi);
      const double alpha = fit_alpha.value_or(0.5);
      // shift-only view of the combined (pi_given, alpha) target
      const double target_prior = unify_prior(pig, alpha);
      const PUSample sample =
          make_pu_sample(data, fit_np, fit_nu, fit_pi, derive_seed(fit_train.seed, 101));
      std::string model_json;
      if (fit_framework == "risk") {
        const Loss loss = loss_from_name(fit_loss);
        const RiskSpec spec = RiskSpec::pu_shift(loss, target_prior, !fit_no_nn);
        FeatureMap map = FeatureMap::raw_with_bias(static_cast<int>(data.dim()));
        if (fit_model == "ker") {
          Matrix pooled(sample.positives.rows() + sample.unlabeled.rows(), data.dim());
          pooled << sample.positives, sample.unlabeled;
          const Matrix centers =
              pick_centers(pooled, fit_centers, derive_seed(fit_train.seed, 102));
          const double med =
              median_pairwise_distance(pooled, 500, derive_seed(fit_train.seed, 103));
          map = FeatureMap::gaussian(centers, med * fit_bw_factor);
        }
        model_json = model_to_json(train(spec, sample, map, fit_train));
      } else {
        UlsifGrid grid;
        grid.max_centers = fit_centers;
        grid.folds = fit_folds;
        const auto direction = ratio_direction_from_name(fit_direction);
        const auto& numerator =
            direction == RatioDirection::POverU ? sample.positives : sample.unlabeled;
        const auto& denominator =
            direction == RatioDirection::POverU ? sample.unlabeled : sample.positives;
        model_json = ratio_model_to_json(
            fit_ulsif(numerator, denominator, direction, grid, derive_seed(fit_train.seed, 104)));
      }
      write_output(fit_out, model_json + "\n");
      return kExitOk;
    }

    if (predict->parsed()) {
      const LabeledDataset data = pred_data.load();
      const std::string model_text = read_file(pred_model);
      const bool is_ratio = nlohmann::json::parse(model_text, nullptr, false).contains("theta");
      std::ostringstream out;
      out << "label,score\n";
      std::vector<double> predicted(static_cast<std::size_t>(data.size()));
      if (is_ratio) {
        if (!pred_pi) throw CLI::ValidationError("predict", "ratio models need --pi");
        const RatioModel model = ratio_model_from_json(model_text);
        const double pig = pred_pig.value_or(*pred_pi);
        const double alpha_unif = unify_alpha(*pred_pi, unify_prior(pig, pred_alpha.value_or(0.5)));
        Vector ratios = ratio_at_all(model, data.patterns);
        if (pred_clip == "on" && model.direction == RatioDirection::POverU)
          ratios = ratios.cwiseMin(1.0 / *pred_pi);
        for (Eigen::Index i = 0; i < data.size(); ++i) {
          const double label = dr_classify(model, *pred_pi, alpha_unif,
                                           data.patterns.row(i).transpose());
          predicted[static_cast<std::size_t>(i)] = label;
          out << (label > 0 ? "1" : "-1") << ',' << fmt12(ratios[i]) << '\n';
        }
      } else {
        const LinearModel model = model_from_json(model_text);
        const Vector scores = model.predict_scores(data.patterns);
        for (Eigen::Index i = 0; i < data.size(); ++i) {
          predicted[static_cast<std::size_t>(i)] = sign(scores[i]);
          out << (scores[i] >= 0 ? "1" : "-1") << ',' << fmt12(scores[i]) << '\n';
        }
      }
      long correct = 0;
      for (Eigen::Index i = 0; i < data.size(); ++i)
        if ((predicted[static_cast<std::size_t>(i)] > 0) ==
            (data.labels[static_cast<std::size_t>(i)] > 0))
          ++correct;
      std::cerr << "accuracy: "
                << 100.0 * static_cast<double>(correct) / static_cast<double>(data.size())
                << "%\n";
      write_output(pred_out, out.str());
      return kExitOk;
    }

    if (bench->parsed()) {
      ExperimentConfig config = config_from_json(read_file(bn_config));
      if (bn_seed) config.seed = *bn_seed;
      if (bn_trials) config.trials = *bn_trials;
      const ResultTable table = run_benchmark(config);
      write_output(bn_out, emit_table(table, bn_format == "csv" ? TableFormat::Csv
                                                                : TableFormat::Markdown));
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
