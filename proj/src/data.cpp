#include "pushift/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace pushift {

namespace {

constexpr int kFloatDigits = 17;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kFloatDigits, v);
  return buf;
}

int map_label(double raw, const LabelMap& labels, std::size_t line_no) {
  const auto it = labels.find(raw);
  if (it == labels.end())
    throw DataError("line " + std::to_string(line_no) + ": unmapped label " + fmt_double(raw));
  return it->second;
}

double parse_number(const std::string& token, std::size_t line_no, const char* what) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size())
    throw DataError("line " + std::to_string(line_no) + ": malformed " + what + " '" + token +
                    "'");
  return value;
}

}  // namespace

LabelMap default_label_map() {
  return {{1.0, +1}, {-1.0, -1}, {0.0, -1}, {2.0, -1}};
}

LabelMap parse_label_map(std::istream& in) {
  LabelMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string src, dst;
    if (!(ls >> src)) continue;
    if (!(ls >> dst) || (dst != "+1" && dst != "1" && dst != "-1"))
      throw DataError("line " + std::to_string(line_no) + ": expected '<label> <+1|-1>'");
    map[parse_number(src, line_no, "label")] = dst == "-1" ? -1 : +1;
  }
  if (map.empty()) throw DataError("empty label map");
  return map;
}

LabeledDataset parse_libsvm(std::istream& in, const LabelMap& labels) {
  std::vector<std::vector<std::pair<long, double>>> rows;
  std::vector<int> ys;
  long max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    ys.push_back(map_label(parse_number(token, line_no, "label"), labels, line_no));
    std::vector<std::pair<long, double>> row;
    long prev_index = 0;
    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        throw DataError("line " + std::to_string(line_no) + ": malformed feature '" + token +
                        "'");
      const double raw_index = parse_number(token.substr(0, colon), line_no, "index");
      const long index = static_cast<long>(raw_index);
      if (index != raw_index || index < 1)
        throw DataError("line " + std::to_string(line_no) + ": feature index must be a positive " +
                        "integer, got '" + token.substr(0, colon) + "'");
      if (index <= prev_index)
        throw DataError("line " + std::to_string(line_no) + ": feature indices must be strictly " +
                        "increasing");
      row.emplace_back(index, parse_number(token.substr(colon + 1), line_no, "value"));
      prev_index = index;
      max_index = std::max(max_index, index);
    }
    rows.push_back(std::move(row));
  }
  LabeledDataset data;
  data.patterns = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
  data.labels = std::move(ys);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [index, value] : rows[i])
      data.patterns(static_cast<Eigen::Index>(i), index - 1) = value;
  return data;
}

void serialize_libsvm(const LabeledDataset& data, std::ostream& out) {
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << (data.labels[static_cast<std::size_t>(i)] > 0 ? "+1" : "-1");
    for (Eigen::Index k = 0; k < data.dim(); ++k)
      if (data.patterns(i, k) != 0.0)
        out << ' ' << (k + 1) << ':' << fmt_double(data.patterns(i, k));
    out << '\n';
  }
}

LabeledDataset parse_csv(std::istream& in, bool has_header, const LabelMap& labels) {
  std::vector<std::vector<double>> rows;
  std::vector<int> ys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ls, cell, ',')) values.push_back(parse_number(cell, line_no, "value"));
    if (values.size() < 2)
      throw DataError("line " + std::to_string(line_no) + ": need a label and at least one " +
                      "feature");
    if (!rows.empty() && values.size() - 1 != rows.front().size())
      throw DataError("line " + std::to_string(line_no) + ": inconsistent column count");
    ys.push_back(map_label(values.front(), labels, line_no));
    rows.emplace_back(values.begin() + 1, values.end());
  }
  LabeledDataset data;
  data.labels = std::move(ys);
  data.patterns.resize(static_cast<Eigen::Index>(rows.size()),
                       rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      data.patterns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return data;
}

void serialize_csv(const LabeledDataset& data, std::ostream& out) {
  out << "label";
  for (Eigen::Index k = 0; k < data.dim(); ++k) out << ",x" << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << (data.labels[static_cast<std::size_t>(i)] > 0 ? "1" : "-1");
    for (Eigen::Index k = 0; k < data.dim(); ++k) out << ',' << fmt_double(data.patterns(i, k));
    out << '\n';
  }
}

SyntheticScenario::SyntheticScenario(Vector pos_mean_, Vector pos_var_, Vector neg_mean_,
                                     Vector neg_var_, double train_prior_)
    : pos_mean(std::move(pos_mean_)), pos_var(std::move(pos_var_)), neg_mean(std::move(neg_mean_)),
      neg_var(std::move(neg_var_)), train_prior(train_prior_) {
  const auto d = pos_mean.size();
  if (d < 1 || pos_var.size() != d || neg_mean.size() != d || neg_var.size() != d)
    throw std::invalid_argument("scenario mean/variance dimensions disagree");
  if ((pos_var.array() <= 0).any() || (neg_var.array() <= 0).any())
    throw std::invalid_argument("scenario variances must be positive");
  check_probability(train_prior, "train_prior");
}

namespace {

double gaussian_density(const Eigen::Ref<const Vector>& x, const Vector& mean,
                        const Vector& var) {
  double log_p = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double d = x[k] - mean[k];
    log_p += -0.5 * std::log(2.0 * std::numbers::pi * var[k]) - d * d / (2.0 * var[k]);
  }
  return std::exp(log_p);
}

}  // namespace

double synth_density(const SyntheticScenario& scenario, const Eigen::Ref<const Vector>& x,
                     Component which, double test_prior) {
  if (x.size() != scenario.dim())
    throw std::invalid_argument("pattern dimension does not match the scenario");
  switch (which) {
    case Component::Positive:
      return gaussian_density(x, scenario.pos_mean, scenario.pos_var);
    case Component::Negative:
      return gaussian_density(x, scenario.neg_mean, scenario.neg_var);
    case Component::Unlabeled:
      return scenario.train_prior * gaussian_density(x, scenario.pos_mean, scenario.pos_var) +
             (1.0 - scenario.train_prior) *
                 gaussian_density(x, scenario.neg_mean, scenario.neg_var);
    case Component::Test:
      check_probability(test_prior, "test_prior");
      return test_prior * gaussian_density(x, scenario.pos_mean, scenario.pos_var) +
             (1.0 - test_prior) * gaussian_density(x, scenario.neg_mean, scenario.neg_var);
  }
  throw std::logic_error("unknown component");
}

double bayes_reference(const SyntheticScenario& scenario, double test_prior, double fp_cost,
                       const Eigen::Ref<const Vector>& x) {
  check_probability(test_prior, "test_prior");
  check_probability(fp_cost, "fp_cost");
  const double pp = synth_density(scenario, x, Component::Positive);
  const double pt = synth_density(scenario, x, Component::Test, test_prior);
  return sign(test_prior * pp / pt - fp_cost);
}

double bayes_accuracy(const SyntheticScenario& scenario, double test_prior,
                      const Classifier& classify, long n_draws, std::uint64_t seed) {
  check_probability(test_prior, "test_prior");
  if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(scenario.dim());
  long correct = 0;
  for (long i = 0; i < n_draws; ++i) {
    const bool positive = unit(rng) < test_prior;
    const Vector& mean = positive ? scenario.pos_mean : scenario.neg_mean;
    const Vector& var = positive ? scenario.pos_var : scenario.neg_var;
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = mean[k] + std::sqrt(var[k]) * gauss(rng);
    if ((classify(x) > 0) == positive) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_draws);
}

PUScenarioConfig::PUScenarioConfig(int n_p_, int n_u_, int n_test_, double train_prior_,
                                   double test_prior_, std::uint64_t seed_)
    : n_p(n_p_), n_u(n_u_), n_test(n_test_), train_prior(train_prior_), test_prior(test_prior_),
      seed(seed_) {
  if (n_p < 1 || n_u < 1 || n_test < 1)
    throw std::invalid_argument("sample counts must be positive");
  check_probability(train_prior, "train_prior");
  check_probability(test_prior, "test_prior");
}

namespace {

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_classes(
    const LabeledDataset& data) {
  std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> idx;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    (data.labels[static_cast<std::size_t>(i)] > 0 ? idx.first : idx.second).push_back(i);
  return idx;
}

// n uniform-with-replacement picks from the pool rows listed in idx
Matrix draw_rows(const Matrix& pool, const std::vector<Eigen::Index>& idx, int n,
                 std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
  Matrix out(n, pool.cols());
  for (int i = 0; i < n; ++i) out.row(i) = pool.row(idx[pick(rng)]);
  return out;
}

}  // namespace

PUSample make_pu_sample(const LabeledDataset& data, int n_p, int n_u, double train_prior,
                        std::uint64_t seed) {
  if (n_p < 1 || n_u < 1) throw std::invalid_argument("sample counts must be positive");
  check_probability(train_prior, "train_prior");
  const auto [pos, neg] = split_classes(data);
  if (pos.empty() || neg.empty())
    throw DataError("dataset '" + data.name + "' is missing one of the classes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix positives = draw_rows(data.patterns, pos, n_p, rng);
  Matrix unlabeled(n_u, data.dim());
  std::uniform_int_distribution<std::size_t> pick_pos(0, pos.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_neg(0, neg.size() - 1);
  for (int j = 0; j < n_u; ++j) {
    const bool positive = unit(rng) < train_prior;
    unlabeled.row(j) =
        data.patterns.row(positive ? pos[pick_pos(rng)] : neg[pick_neg(rng)]);
  }
  return PUSample(positives, std::move(unlabeled), train_prior);
}

std::pair<PUSample, LabeledDataset> sample_pu(const LabeledDataset& data,
                                              const PUScenarioConfig& config) {
  PUSample sample = make_pu_sample(data, config.n_p, config.n_u, config.train_prior,
                                   derive_seed(config.seed, 1));
  const auto [pos, neg] = split_classes(data);
  std::mt19937_64 rng(derive_seed(config.seed, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_pos(0, pos.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_neg(0, neg.size() - 1);
  LabeledDataset test;
  test.name = data.name + "-test";
  test.patterns.resize(config.n_test, data.dim());
  test.labels.resize(static_cast<std::size_t>(config.n_test));
  for (int i = 0; i < config.n_test; ++i) {
    const bool positive = unit(rng) < config.test_prior;
    test.patterns.row(i) =
        data.patterns.row(positive ? pos[pick_pos(rng)] : neg[pick_neg(rng)]);
    test.labels[static_cast<std::size_t>(i)] = positive ? +1 : -1;
  }
  return {std::move(sample), std::move(test)};
}

namespace {

Matrix draw_gaussians(const Vector& mean, const Vector& var, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(n, mean.size());
  for (int i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < mean.size(); ++k)
      out(i, k) = mean[k] + std::sqrt(var[k]) * gauss(rng);
  return out;
}

}  // namespace

PUSample draw_pu(const SyntheticScenario& scenario, int n_p, int n_u, std::uint64_t seed) {
  if (n_p < 1 || n_u < 1) throw std::invalid_argument("sample counts must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Matrix positives = draw_gaussians(scenario.pos_mean, scenario.pos_var, n_p, rng);
  Matrix unlabeled(n_u, scenario.dim());
  for (int j = 0; j < n_u; ++j) {
    const bool positive = unit(rng) < scenario.train_prior;
    const Vector& mean = positive ? scenario.pos_mean : scenario.neg_mean;
    const Vector& var = positive ? scenario.pos_var : scenario.neg_var;
    for (Eigen::Index k = 0; k < scenario.dim(); ++k)
      unlabeled(j, k) = mean[k] + std::sqrt(var[k]) * gauss(rng);
  }
  return PUSample(positives, std::move(unlabeled), scenario.train_prior);
}

LabeledDataset draw_labeled(const SyntheticScenario& scenario, int n, double prior,
                            std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  check_probability(prior, "prior");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LabeledDataset data;
  data.name = "synthetic";
  data.patterns.resize(n, scenario.dim());
  data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool positive = unit(rng) < prior;
    const Vector& mean = positive ? scenario.pos_mean : scenario.neg_mean;
    const Vector& var = positive ? scenario.pos_var : scenario.neg_var;
    for (Eigen::Index k = 0; k < scenario.dim(); ++k)
      data.patterns(i, k) = mean[k] + std::sqrt(var[k]) * gauss(rng);
    data.labels[static_cast<std::size_t>(i)] = positive ? +1 : -1;
  }
  return data;
}

LabeledDataset make_banana(int n, double prior, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  check_probability(prior, "prior");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.2);
  LabeledDataset data;
  data.name = "banana";
  data.patterns.resize(n, 2);
  data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool positive = unit(rng) < prior;
    const double t = unit(rng) * std::numbers::pi;
    double x = std::cos(t), y = std::sin(t);
    if (!positive) {
      x = 1.0 - x;
      y = 0.5 - y;
    }
    data.patterns(i, 0) = x + noise(rng);
    data.patterns(i, 1) = y + noise(rng);
    data.labels[static_cast<std::size_t>(i)] = positive ? +1 : -1;
  }
  return data;
}

std::string scenario_to_json(const SyntheticScenario& scenario) {
  nlohmann::json j;
  j["pos_mean"] = std::vector<double>(scenario.pos_mean.begin(), scenario.pos_mean.end());
  j["pos_var"] = std::vector<double>(scenario.pos_var.begin(), scenario.pos_var.end());
  j["neg_mean"] = std::vector<double>(scenario.neg_mean.begin(), scenario.neg_mean.end());
  j["neg_var"] = std::vector<double>(scenario.neg_var.begin(), scenario.neg_var.end());
  j["pi"] = scenario.train_prior;
  return j.dump(2);
}

SyntheticScenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad scenario JSON: ") + e.what());
  }
  try {
    const auto vec = [&](const char* key) {
      const auto v = j.at(key).get<std::vector<double>>();
      return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    return SyntheticScenario(vec("pos_mean"), vec("pos_var"), vec("neg_mean"), vec("neg_var"),
                             j.at("pi").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad scenario JSON: ") + e.what());
  }
}

}  // namespace pushift
