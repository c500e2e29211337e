#include "pushift/density_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "pushift/model.hpp"
#include "pushift/optimizer.hpp"

namespace pushift {

RatioDirection ratio_direction_from_name(std::string_view name) {
  if (name == "p-over-u") return RatioDirection::POverU;
  if (name == "u-over-p") return RatioDirection::UOverP;
  throw std::invalid_argument("unknown ratio direction: " + std::string(name));
}

std::string_view ratio_direction_name(RatioDirection direction) {
  return direction == RatioDirection::POverU ? "p-over-u" : "u-over-p";
}

RatioModel::RatioModel(RatioDirection direction_, Matrix centers_, double bandwidth_,
                       double regularization_, Vector coefficients_)
    : direction(direction_), centers(std::move(centers_)), bandwidth(bandwidth_),
      regularization(regularization_), coefficients(std::move(coefficients_)) {
  if (centers.rows() != coefficients.size())
    throw std::invalid_argument("coefficient count does not match center count");
  if (!(bandwidth > 0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(regularization > 0)) throw std::invalid_argument("regularization must be positive");
}

void UlsifGrid::validate() const {
  if (bandwidth_factors.empty() || regularizations.empty())
    throw std::invalid_argument("empty hyperparameter candidate list");
  for (double f : bandwidth_factors)
    if (!(f > 0)) throw std::invalid_argument("bandwidth factors must be positive");
  for (double l : regularizations)
    if (!(l > 0)) throw std::invalid_argument("regularizations must be positive");
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (max_centers < 1) throw std::invalid_argument("max_centers must be >= 1");
}

Vector ulsif_solve(const Eigen::Ref<const Matrix>& H, const Eigen::Ref<const Vector>& h,
                   double regularization) {
  if (H.rows() != H.cols() || H.rows() != h.size())
    throw std::invalid_argument("ridge system dimensions disagree");
  Matrix A = H;
  A.diagonal().array() += regularization;
  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("ridge solve failed (lambda = " + std::to_string(regularization) + ")");
  Vector theta = ldlt.solve(h);
  if (!theta.allFinite()) throw NumericalError("ridge solution is not finite");
  return theta;
}

namespace {

Matrix kernel_matrix(const Eigen::Ref<const Matrix>& points, const Matrix& centers, double sigma) {
  const double denom = 2.0 * sigma * sigma;
  const Vector c2 = centers.rowwise().squaredNorm();
  const Vector x2 = points.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * points * centers.transpose()).rowwise() + c2.transpose();
  d2.colwise() += x2;
  return (-d2 / denom).array().exp();
}

}  // namespace

RatioModel fit_ulsif(const Eigen::Ref<const Matrix>& numerator,
                     const Eigen::Ref<const Matrix>& denominator, RatioDirection direction,
                     const UlsifGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (numerator.rows() < 1 || denominator.rows() < 1)
    throw std::invalid_argument("both sample sets must be non-empty");
  if (numerator.cols() != denominator.cols())
    throw std::invalid_argument("numerator and denominator dimensionality disagree");
  counters::record_ulsif_fit();

  const Matrix centers = pick_centers(numerator, grid.max_centers, derive_seed(seed, 1));

  Matrix pooled(numerator.rows() + denominator.rows(), numerator.cols());
  pooled << numerator, denominator;
  const double med = median_pairwise_distance(pooled, 500, derive_seed(seed, 2));

  // fold assignment: round-robin, then shuffled
  const auto make_folds = [&](Eigen::Index n, std::uint64_t s) {
    std::vector<int> f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = static_cast<int>(i % grid.folds);
    std::mt19937_64 rng(s);
    std::shuffle(f.begin(), f.end(), rng);
    std::vector<std::vector<Eigen::Index>> idx(grid.folds);
    for (Eigen::Index i = 0; i < n; ++i) idx[f[i]].push_back(i);
    return idx;
  };
  const auto idx_nu = make_folds(numerator.rows(), derive_seed(seed, 3));
  const auto idx_de = make_folds(denominator.rows(), derive_seed(seed, 4));
  for (int k = 0; k < grid.folds; ++k)
    if (idx_nu[k].empty() || idx_de[k].empty() ||
        idx_nu[k].size() == static_cast<std::size_t>(numerator.rows()) ||
        idx_de[k].size() == static_cast<std::size_t>(denominator.rows()))
      throw std::invalid_argument("too few samples for the requested fold count");

  double best_score = std::numeric_limits<double>::infinity();
  double best_sigma = med, best_lambda = grid.regularizations.front();
  bool solved_any = false;

  for (double factor : grid.bandwidth_factors) {
    const double sigma = med * factor;
    const Matrix k_nu = kernel_matrix(numerator, centers, sigma);
    const Matrix k_de = kernel_matrix(denominator, centers, sigma);

    // per-fold Gram blocks, shared across lambdas
    const Matrix full_h = k_de.transpose() * k_de;
    const Vector full_g = k_nu.colwise().sum();
    std::vector<Matrix> h_ho(grid.folds);
    std::vector<Vector> g_ho(grid.folds);
    std::vector<Matrix> h_train(grid.folds);
    std::vector<Vector> g_train(grid.folds);
    for (int k = 0; k < grid.folds; ++k) {
      const Matrix k_de_ho = k_de(idx_de[k], Eigen::all);
      h_ho[k].noalias() = k_de_ho.transpose() * k_de_ho;
      g_ho[k] = k_nu(idx_nu[k], Eigen::all).colwise().sum();
      const auto de_ho = static_cast<double>(idx_de[k].size());
      const auto nu_ho = static_cast<double>(idx_nu[k].size());
      h_train[k] = (full_h - h_ho[k]) / (static_cast<double>(k_de.rows()) - de_ho);
      g_train[k] = (full_g - g_ho[k]) / (static_cast<double>(k_nu.rows()) - nu_ho);
      h_ho[k] /= de_ho;
      g_ho[k] /= nu_ho;
    }
    for (double lambda : grid.regularizations) {
      double score = 0;
      bool ok = true;
      for (int k = 0; k < grid.folds; ++k) {
        Vector theta;
        try {
          theta = ulsif_solve(h_train[k], g_train[k], lambda);
        } catch (const NumericalError&) {
          ok = false;
          break;
        }
        theta = theta.cwiseMax(0.0);  // score the deployable, clipped fit
        score += 0.5 * theta.dot(h_ho[k] * theta) - g_ho[k].dot(theta);
      }
      if (!ok) continue;
      solved_any = true;
      score /= grid.folds;
      if (score < best_score) {
        best_score = score;
        best_sigma = sigma;
        best_lambda = lambda;
      }
    }
  }
  if (!solved_any) throw NumericalError("ridge solve failed for every hyperparameter candidate");

  const Matrix k_nu = kernel_matrix(numerator, centers, best_sigma);
  const Matrix k_de = kernel_matrix(denominator, centers, best_sigma);
  const Matrix H = k_de.transpose() * k_de / static_cast<double>(k_de.rows());
  const Vector h = k_nu.colwise().mean();
  Vector theta = ulsif_solve(H, h, best_lambda).cwiseMax(0.0);
  return RatioModel(direction, centers, best_sigma, best_lambda, std::move(theta));
}

double ratio_at(const RatioModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.centers.cols())
    throw std::invalid_argument("pattern dimension does not match the ratio model");
  const double denom = 2.0 * model.bandwidth * model.bandwidth;
  double value = 0;
  for (Eigen::Index k = 0; k < model.centers.rows(); ++k)
    value += model.coefficients[k] *
             std::exp(-(x.transpose() - model.centers.row(k)).squaredNorm() / denom);
  return std::max(0.0, value);
}

Vector ratio_at_all(const RatioModel& model, const Eigen::Ref<const Matrix>& patterns) {
  if (patterns.cols() != model.centers.cols())
    throw std::invalid_argument("pattern dimension does not match the ratio model");
  return (kernel_matrix(patterns, model.centers, model.bandwidth) * model.coefficients)
      .cwiseMax(0.0);
}

double dr_classify(const RatioModel& model, double train_prior, double alpha_unif,
                   const Eigen::Ref<const Vector>& x) {
  check_probability(train_prior, "train_prior");
  check_probability(alpha_unif, "alpha_unif");
  const double w = ratio_at(model, x);
  if (model.direction == RatioDirection::POverU) return sign(train_prior * w - alpha_unif);
  return sign(train_prior / alpha_unif - w);
}

RatioBoundReport check_ratio_bounds(RatioDirection direction, std::vector<double> values,
                                    double train_prior, double tolerance, bool clip) {
  check_probability(train_prior, "train_prior");
  RatioBoundReport report;
  report.checked = static_cast<Eigen::Index>(values.size());
  Eigen::Index violations = 0;
  if (direction == RatioDirection::POverU) {
    const double upper = 1.0 / train_prior;
    for (double& v : values) {
      if (v > upper + tolerance) ++violations;
      if (clip) v = std::clamp(v, 0.0, upper);
    }
  } else {
    for (double v : values)
      if (v < train_prior - tolerance) ++violations;
  }
  report.violation_fraction =
      report.checked == 0 ? 0.0 : static_cast<double>(violations) / report.checked;
  report.values = std::move(values);
  return report;
}

RatioBoundReport check_ratio_bounds(const RatioModel& model, double train_prior,
                                    const Eigen::Ref<const Matrix>& points, double tolerance,
                                    bool clip) {
  const Vector w = ratio_at_all(model, points);
  return check_ratio_bounds(model.direction, std::vector<double>(w.begin(), w.end()), train_prior,
                            tolerance, clip);
}

double shift_ratio_transform(double u_over_p_value, double train_prior, double gamma) {
  check_probability(train_prior, "train_prior");
  if (!(gamma > -train_prior && gamma < 1.0 - train_prior))
    throw std::invalid_argument("gamma must keep the test prior inside (0,1)");
  const double s = gamma / (1.0 - train_prior);
  return s + (1.0 - s) * u_over_p_value;
}

std::string ratio_model_to_json(const RatioModel& model) {
  nlohmann::json j;
  j["direction"] = std::string(ratio_direction_name(model.direction));
  auto centers = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.centers.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < model.centers.cols(); ++k) row.push_back(model.centers(i, k));
    centers.push_back(std::move(row));
  }
  j["centers"] = std::move(centers);
  j["sigma"] = model.bandwidth;
  j["lambda"] = model.regularization;
  j["theta"] = std::vector<double>(model.coefficients.begin(), model.coefficients.end());
  return j.dump(2);
}

RatioModel ratio_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad ratio model JSON: ") + e.what());
  }
  try {
    const auto direction = ratio_direction_from_name(j.at("direction").get<std::string>());
    const auto& jc = j.at("centers");
    if (jc.empty()) throw DataError("ratio model without centers");
    Matrix centers(jc.size(), jc[0].size());
    for (std::size_t i = 0; i < jc.size(); ++i)
      for (std::size_t k = 0; k < jc[i].size(); ++k) centers(i, k) = jc[i][k].get<double>();
    const auto t = j.at("theta").get<std::vector<double>>();
    Vector theta = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
    return RatioModel(direction, std::move(centers), j.at("sigma").get<double>(),
                      j.at("lambda").get<double>(), std::move(theta));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad ratio model JSON: ") + e.what());
  }
}

}  // namespace pushift
