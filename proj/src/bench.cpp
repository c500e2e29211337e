#include "pushift/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pushift/prior_cost.hpp"
#include "pushift/stats.hpp"

namespace pushift {

namespace {

struct MethodInfo {
  Method method;
  const char* name;
  Loss loss;          // rm methods
  bool kernel_model;  // rm methods
};

constexpr MethodInfo kMethods[] = {
    {Method::DrPOverU, "dr_p_over_u", Loss::Squared, false},
    {Method::DrUOverP, "dr_u_over_p", Loss::Squared, false},
    {Method::RmSquaredLin, "rm_squared_lin", Loss::Squared, false},
    {Method::RmSquaredKer, "rm_squared_ker", Loss::Squared, true},
    {Method::RmDhLin, "rm_dh_lin", Loss::DoubleHinge, false},
    {Method::RmDhKer, "rm_dh_ker", Loss::DoubleHinge, true},
    {Method::RmLogisticLin, "rm_logistic_lin", Loss::Logistic, false},
    {Method::RmLogisticKer, "rm_logistic_ker", Loss::Logistic, true},
};

const MethodInfo& info(Method method) {
  for (const auto& m : kMethods)
    if (m.method == method) return m;
  throw std::logic_error("unknown method");
}

}  // namespace

Method method_from_name(std::string_view name) {
  for (const auto& m : kMethods)
    if (name == m.name) return m.method;
  throw std::invalid_argument("unknown method name: " + std::string(name));
}

std::string_view method_name(Method method) { return info(method).name; }

bool method_is_ratio(Method method) {
  return method == Method::DrPOverU || method == Method::DrUOverP;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("no methods configured");
  if (grid.empty()) throw std::invalid_argument("empty prior grid");
  if (trials < 2) throw std::invalid_argument("trials must be >= 2");
  if (n_p < 1 || n_u < 1 || n_test < 1)
    throw std::invalid_argument("sample sizes must be positive");
  for (const auto& g : grid) {
    check_probability(g.pi, "pi");
    check_probability(g.pi_prime, "pi_prime");
    check_probability(g.pi_given, "pi_given");
  }
  train.validate();
  ulsif.validate();
  if (rm_max_centers < 1) throw std::invalid_argument("rm_max_centers must be >= 1");
  if (!(rm_bandwidth_factor > 0))
    throw std::invalid_argument("rm_bandwidth_factor must be positive");
}

namespace {

double accuracy_percent(const std::vector<double>& predicted, const LabeledDataset& test) {
  long correct = 0;
  for (Eigen::Index i = 0; i < test.size(); ++i)
    if ((predicted[static_cast<std::size_t>(i)] > 0) ==
        (test.labels[static_cast<std::size_t>(i)] > 0))
      ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

ResultTable run_benchmark(const ExperimentConfig& config) {
  config.validate();

  ResultTable table;
  table.dataset_name = config.dataset_name;
  table.methods = config.methods;
  table.grid = config.grid;
  table.cells.resize(config.grid.size() * config.methods.size());
  for (std::size_t row = 0; row < config.grid.size(); ++row)
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      auto& cell = table.cells[row * config.methods.size() + m];
      cell.at = config.grid[row];
      cell.method = config.methods[m];
    }

  // rows sharing (pi, pi_prime) reuse one sample per trial
  std::vector<std::size_t> row_group(config.grid.size());
  std::vector<std::pair<double, double>> groups;
  std::vector<std::vector<std::size_t>> group_rows;
  for (std::size_t row = 0; row < config.grid.size(); ++row) {
    const std::pair<double, double> key{config.grid[row].pi, config.grid[row].pi_prime};
    auto it = std::find(groups.begin(), groups.end(), key);
    if (it == groups.end()) {
      groups.push_back(key);
      group_rows.emplace_back();
      it = groups.end() - 1;
    }
    const auto g = static_cast<std::size_t>(it - groups.begin());
    row_group[row] = g;
    group_rows[g].push_back(row);
  }

  const auto record_failure = [&](std::size_t row, std::size_t m, int trial,
                                  const std::exception& e) {
    auto& cell = table.cells[row * config.methods.size() + m];
    cell.failed = true;
    if (cell.note.empty())
      cell.note = "trial " + std::to_string(trial) + ": " + e.what();
  };

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto [pi, pi_prime] = groups[g];
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t base = derive_seed(config.seed, g, static_cast<std::uint64_t>(trial));

      PUSample sample(Matrix::Zero(1, 1), Matrix::Zero(1, 1), 0.5);
      LabeledDataset test;
      if (const auto* scenario = std::get_if<SyntheticScenario>(&config.source)) {
        SyntheticScenario shifted = *scenario;
        shifted.train_prior = pi;
        sample = draw_pu(shifted, config.n_p, config.n_u, derive_seed(base, 1));
        test = draw_labeled(shifted, config.n_test, pi_prime, derive_seed(base, 2));
      } else {
        const auto& pool = std::get<LabeledDataset>(config.source);
        PUScenarioConfig sc(config.n_p, config.n_u, config.n_test, pi, pi_prime,
                            derive_seed(base, 3));
        auto drawn = sample_pu(pool, sc);
        sample = std::move(drawn.first);
        test = std::move(drawn.second);
      }

      // ratio models: one fit per trial, thresholds move per pi_given
      std::optional<RatioModel> ratio_p, ratio_u;
      std::optional<std::string> ratio_p_error, ratio_u_error;
      for (const Method method : config.methods) {
        if (method == Method::DrPOverU) {
          try {
            ratio_p = fit_ulsif(sample.positives, sample.unlabeled, RatioDirection::POverU,
                                config.ulsif, derive_seed(base, 4));
          } catch (const std::exception& e) {
            ratio_p_error = e.what();
          }
        } else if (method == Method::DrUOverP) {
          try {
            ratio_u = fit_ulsif(sample.unlabeled, sample.positives, RatioDirection::UOverP,
                                config.ulsif, derive_seed(base, 5));
          } catch (const std::exception& e) {
            ratio_u_error = e.what();
          }
        }
      }

      // shared feature maps for the risk-minimization methods
      std::optional<FeatureMap> lin_map, ker_map;
      const bool wants_lin = std::any_of(config.methods.begin(), config.methods.end(),
                                         [](Method m) {
                                           return !method_is_ratio(m) && !info(m).kernel_model;
                                         });
      const bool wants_ker = std::any_of(config.methods.begin(), config.methods.end(),
                                         [](Method m) {
                                           return !method_is_ratio(m) && info(m).kernel_model;
                                         });
      if (wants_lin) lin_map = FeatureMap::raw_with_bias(static_cast<int>(sample.positives.cols()));
      if (wants_ker) {
        Matrix pooled(sample.positives.rows() + sample.unlabeled.rows(), sample.positives.cols());
        pooled << sample.positives, sample.unlabeled;
        const Matrix centers = pick_centers(pooled, config.rm_max_centers, derive_seed(base, 6));
        const double med = median_pairwise_distance(pooled, 500, derive_seed(base, 7));
        ker_map = FeatureMap::gaussian(centers, med * config.rm_bandwidth_factor);
      }

      for (const std::size_t row : group_rows[g]) {
        const double pi_given = config.grid[row].pi_given;
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
          const Method method = config.methods[m];
          auto& cell = table.cells[row * config.methods.size() + m];
          try {
            std::vector<double> predicted(static_cast<std::size_t>(test.size()));
            if (method_is_ratio(method)) {
              const auto& err =
                  method == Method::DrPOverU ? ratio_p_error : ratio_u_error;
              if (err) throw NumericalError(*err);
              const auto& model = method == Method::DrPOverU ? *ratio_p : *ratio_u;
              const double alpha_unif = alpha_from_shift(pi, pi_given);
              for (Eigen::Index i = 0; i < test.size(); ++i)
                predicted[static_cast<std::size_t>(i)] =
                    dr_classify(model, pi, alpha_unif, test.patterns.row(i).transpose());
            } else {
              const auto& mi = info(method);
              const FeatureMap& map = mi.kernel_model ? *ker_map : *lin_map;
              RiskSpec spec = pi_given == pi
                                  ? RiskSpec::pu(mi.loss, config.non_negative)
                                  : RiskSpec::pu_shift(mi.loss, pi_given, config.non_negative);
              TrainConfig tc = config.train;
              tc.seed = derive_seed(base, 100 + row * config.methods.size() + m);
              const LinearModel model = train(spec, sample, map, tc);
              const Vector scores = model.predict_scores(test.patterns);
              for (Eigen::Index i = 0; i < test.size(); ++i)
                predicted[static_cast<std::size_t>(i)] = sign(scores[i]);
            }
            cell.accuracies.push_back(accuracy_percent(predicted, test));
          } catch (const std::exception& e) {
            record_failure(row, m, trial, e);
          }
        }
      }
    }
  }

  for (auto& cell : table.cells) {
    if (cell.accuracies.size() < 2) {
      cell.failed = true;
      if (cell.note.empty()) cell.note = "fewer than 2 successful trials";
      continue;
    }
    cell.mean_accuracy = mean(cell.accuracies);
    cell.stderr_accuracy = standard_error(cell.accuracies);
  }

  for (std::size_t row = 0; row < config.grid.size(); ++row) {
    std::vector<ResultCell> row_cells(
        table.cells.begin() + static_cast<std::ptrdiff_t>(row * config.methods.size()),
        table.cells.begin() + static_cast<std::ptrdiff_t>((row + 1) * config.methods.size()));
    apply_highlighting(row_cells);
    std::copy(row_cells.begin(), row_cells.end(),
              table.cells.begin() + static_cast<std::ptrdiff_t>(row * config.methods.size()));
  }
  return table;
}

void apply_highlighting(std::vector<ResultCell>& row_cells, double level) {
  const ResultCell* best = nullptr;
  for (const auto& cell : row_cells)
    if (!cell.failed && (!best || cell.mean_accuracy > best->mean_accuracy)) best = &cell;
  if (!best) return;
  for (auto& cell : row_cells) {
    if (cell.failed) {
      cell.highlighted = false;
    } else if (&cell == best) {
      cell.highlighted = true;
    } else {
      // highlighted unless significantly worse than the best
      cell.highlighted = welch_one_sided_p(cell.accuracies, best->accuracies) >= level;
    }
  }
}

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string emit_table(const ResultTable& table, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::Csv) {
    out << "dataset,pi,pi_prime,pi_given,method,mean,stderr,highlighted,note\n";
    for (std::size_t row = 0; row < table.grid.size(); ++row) {
      const auto& g = table.grid[row];
      for (std::size_t m = 0; m < table.methods.size(); ++m) {
        const auto& cell = table.cell(row, m);
        out << csv_escape(table.dataset_name) << ',' << fmt("%g", g.pi) << ','
            << fmt("%g", g.pi_prime) << ',' << fmt("%g", g.pi_given) << ','
            << method_name(table.methods[m]) << ',';
        if (cell.failed)
          out << "\xE2\x80\x94,\xE2\x80\x94,0," << csv_escape(cell.note) << '\n';
        else
          out << fmt("%.1f", cell.mean_accuracy) << ",(" << fmt("%.1f", cell.stderr_accuracy)
              << ")," << (cell.highlighted ? 1 : 0) << ',' << csv_escape(cell.note) << '\n';
      }
    }
    return out.str();
  }

  out << "| dataset | pi | pi' | pi_given |";
  for (const Method m : table.methods) out << ' ' << method_name(m) << " |";
  out << "\n|---|---|---|---|";
  for (std::size_t m = 0; m < table.methods.size(); ++m) out << "---|";
  out << '\n';
  for (std::size_t row = 0; row < table.grid.size(); ++row) {
    const auto& g = table.grid[row];
    out << "| " << table.dataset_name << " | " << fmt("%g", g.pi) << " | "
        << fmt("%g", g.pi_prime) << " | " << fmt("%g", g.pi_given) << " |";
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
      const auto& cell = table.cell(row, m);
      if (cell.failed) {
        out << " \xE2\x80\x94 |";
      } else {
        const std::string text =
            fmt("%.1f", cell.mean_accuracy) + " (" + fmt("%.1f", cell.stderr_accuracy) + ")";
        out << ' ' << (cell.highlighted ? "**" + text + "**" : text) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad experiment config: ") + e.what());
  }
  try {
    ExperimentConfig config;
    for (const auto& name : j.at("methods"))
      config.methods.push_back(method_from_name(name.get<std::string>()));
    for (const auto& row : j.at("grid"))
      config.grid.push_back({row.at("pi").get<double>(), row.at("pi_prime").get<double>(),
                             row.at("pi_given").get<double>()});
    config.trials = j.value("trials", config.trials);
    config.n_p = j.value("n_p", config.n_p);
    config.n_u = j.value("n_u", config.n_u);
    config.n_test = j.value("n_test", config.n_test);
    config.seed = j.value("seed", config.seed);
    config.non_negative = j.value("non_negative", config.non_negative);
    config.clip_ratio = j.value("clip_ratio", config.clip_ratio);
    config.rm_max_centers = j.value("rm_max_centers", config.rm_max_centers);
    config.rm_bandwidth_factor = j.value("rm_bandwidth_factor", config.rm_bandwidth_factor);
    if (j.contains("train")) {
      const auto& t = j["train"];
      config.train.learning_rate = t.value("lr", config.train.learning_rate);
      config.train.epochs = t.value("epochs", config.train.epochs);
      config.train.beta1 = t.value("beta1", config.train.beta1);
      config.train.beta2 = t.value("beta2", config.train.beta2);
      config.train.epsilon = t.value("epsilon", config.train.epsilon);
      config.train.batch_size = t.value("batch", config.train.batch_size);
    }
    if (j.contains("ulsif")) {
      const auto& u = j["ulsif"];
      if (u.contains("bandwidth_factors"))
        config.ulsif.bandwidth_factors = u["bandwidth_factors"].get<std::vector<double>>();
      if (u.contains("lambdas"))
        config.ulsif.regularizations = u["lambdas"].get<std::vector<double>>();
      config.ulsif.folds = u.value("folds", config.ulsif.folds);
      config.ulsif.max_centers = u.value("max_centers", config.ulsif.max_centers);
    }

    const auto& source = j.at("dataset");
    if (source.contains("scenario")) {
      config.source = scenario_from_json(source["scenario"].dump());
      config.dataset_name = source.value("name", std::string("scenario"));
    } else if (source.contains("banana")) {
      const auto& b = source["banana"];
      config.source = make_banana(b.value("n", 5000), b.value("prior", 0.5),
                                  b.value("seed", std::uint64_t{12345}));
      config.dataset_name = source.value("name", std::string("banana"));
    } else if (source.contains("path")) {
      const std::string path = source["path"].get<std::string>();
      std::ifstream in(path);
      if (!in) throw DataError("cannot open dataset file: " + path);
      const std::string fmt_name =
          source.value("format", path.size() > 4 && path.substr(path.size() - 4) == ".csv"
                                     ? std::string("csv")
                                     : std::string("libsvm"));
      LabeledDataset data;
      if (fmt_name == "csv")
        data = parse_csv(in, source.value("header", true));
      else if (fmt_name == "libsvm")
        data = parse_libsvm(in);
      else
        throw DataError("unknown dataset format: " + fmt_name);
      data.name = source.value("name", path);
      config.dataset_name = data.name;
      config.source = std::move(data);
    } else {
      throw DataError("dataset must specify scenario, banana, or path");
    }
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad experiment config: ") + e.what());
  }
}

}  // namespace pushift
