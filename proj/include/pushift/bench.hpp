#ifndef PUSHIFT_BENCH_HPP
#define PUSHIFT_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pushift/data.hpp"
#include "pushift/density_ratio.hpp"
#include "pushift/optimizer.hpp"

namespace pushift {

// The method matrix: two density-ratio directions and risk minimization
// with three losses over two model families.
enum class Method {
  DrPOverU,
  DrUOverP,
  RmSquaredLin,
  RmSquaredKer,
  RmDhLin,
  RmDhKer,
  RmLogisticLin,
  RmLogisticKer,
};

Method method_from_name(std::string_view name);
std::string_view method_name(Method method);
bool method_is_ratio(Method method);

// One test condition: the world shifts the prior to pi_prime while the
// methods are told pi_given (possibly wrong, possibly equal to pi).
struct GridPoint {
  double pi;
  double pi_prime;
  double pi_given;
};

struct ExperimentConfig {
  std::vector<Method> methods;
  std::vector<GridPoint> grid;
  int trials = 10;
  std::variant<SyntheticScenario, LabeledDataset> source;
  std::string dataset_name = "synthetic";
  int n_p = 500;
  int n_u = 2000;
  int n_test = 500;
  TrainConfig train;
  UlsifGrid ulsif;
  int rm_max_centers = 100;
  double rm_bandwidth_factor = 1.0;
  bool non_negative = true;
  bool clip_ratio = true;
  std::uint64_t seed = 1;

  ExperimentConfig() : source(LabeledDataset{}) {}
  void validate() const;
};

struct ResultCell {
  GridPoint at{};
  Method method = Method::DrPOverU;
  std::vector<double> accuracies;  // percent, one per trial
  double mean_accuracy = 0;        // percent
  double stderr_accuracy = 0;      // percent
  bool highlighted = false;
  bool failed = false;
  std::string note;
};

struct ResultTable {
  std::string dataset_name;
  std::vector<Method> methods;
  std::vector<GridPoint> grid;
  std::vector<ResultCell> cells;  // grid-major, then method

  const ResultCell& cell(std::size_t row, std::size_t method_index) const {
    return cells[row * methods.size() + method_index];
  }
};

// Runs the trial x grid x method matrix. Within one trial, all rows sharing
// (pi, pi_prime) reuse one PU draw; ratio models are fitted once per trial
// and only re-thresholded per pi_given, while risk-minimization methods
// retrain per pi_given. A failing cell is recorded, not fatal.
ResultTable run_benchmark(const ExperimentConfig& config);

// Marks the best-mean cell of each row plus every cell a one-sided Welch
// t-test at level 0.05 cannot call significantly worse than the best.
void apply_highlighting(std::vector<ResultCell>& row_cells, double level = 0.05);

enum class TableFormat { Csv, Markdown };

std::string emit_table(const ResultTable& table, TableFormat format);

ExperimentConfig config_from_json(const std::string& text);

}  // namespace pushift

#endif  // PUSHIFT_BENCH_HPP
