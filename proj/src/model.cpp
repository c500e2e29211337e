#include "pushift/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace pushift {

FeatureMap FeatureMap::raw_with_bias(int input_dim) {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  FeatureMap m;
  m.kind_ = Kind::RawWithBias;
  m.input_dim_ = input_dim;
  return m;
}

FeatureMap FeatureMap::gaussian(Matrix centers, double bandwidth) {
  if (centers.rows() < 1) throw std::invalid_argument("gaussian map needs at least one center");
  if (!(bandwidth > 0)) throw std::invalid_argument("bandwidth must be positive");
  FeatureMap m;
  m.kind_ = Kind::GaussianKernel;
  m.input_dim_ = static_cast<int>(centers.cols());
  m.centers_ = std::move(centers);
  m.bandwidth_ = bandwidth;
  return m;
}

int FeatureMap::dim() const {
  return kind_ == Kind::RawWithBias ? input_dim_ + 1 : static_cast<int>(centers_.rows()) + 1;
}

Vector FeatureMap::apply(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != input_dim_)
    throw std::invalid_argument("pattern dimension " + std::to_string(x.size()) +
                                " does not match feature map dimension " +
                                std::to_string(input_dim_));
  Vector out(dim());
  if (kind_ == Kind::RawWithBias) {
    out.head(input_dim_) = x;
  } else {
    const double denom = 2.0 * bandwidth_ * bandwidth_;
    for (Eigen::Index k = 0; k < centers_.rows(); ++k)
      out[k] = std::exp(-(x.transpose() - centers_.row(k)).squaredNorm() / denom);
  }
  out[dim() - 1] = 1.0;
  return out;
}

Matrix FeatureMap::apply_all(const Eigen::Ref<const Matrix>& patterns) const {
  if (patterns.cols() != input_dim_)
    throw std::invalid_argument("pattern dimension " + std::to_string(patterns.cols()) +
                                " does not match feature map dimension " +
                                std::to_string(input_dim_));
  Matrix out(patterns.rows(), dim());
  if (kind_ == Kind::RawWithBias) {
    out.leftCols(input_dim_) = patterns;
  } else {
    const double denom = 2.0 * bandwidth_ * bandwidth_;
    const Vector c2 = centers_.rowwise().squaredNorm();
    const Vector x2 = patterns.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * patterns * centers_.transpose()).rowwise() + c2.transpose();
    d2.colwise() += x2;
    out.leftCols(centers_.rows()) = (-d2 / denom).array().exp();
  }
  out.col(dim() - 1).setOnes();
  return out;
}

LinearModel::LinearModel(FeatureMap map_, Vector weights_)
    : map(std::move(map_)), weights(std::move(weights_)) {
  if (weights.size() != map.dim())
    throw std::invalid_argument("weight dimension " + std::to_string(weights.size()) +
                                " does not match feature dimension " + std::to_string(map.dim()));
}

double LinearModel::predict_score(const Eigen::Ref<const Vector>& x) const {
  return map.apply(x).dot(weights);
}

double LinearModel::predict_label(const Eigen::Ref<const Vector>& x) const {
  return sign(predict_score(x));
}

Vector LinearModel::predict_scores(const Eigen::Ref<const Matrix>& patterns) const {
  return map.apply_all(patterns) * weights;
}

Matrix pick_centers(const Eigen::Ref<const Matrix>& pool, int max_centers, std::uint64_t seed) {
  if (pool.rows() < 1) throw std::invalid_argument("empty center pool");
  const int n = static_cast<int>(pool.rows());
  const int b = std::min(max_centers, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < b; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Matrix centers(b, pool.cols());
  for (int i = 0; i < b; ++i) centers.row(i) = pool.row(idx[i]);
  return centers;
}

double median_pairwise_distance(const Eigen::Ref<const Matrix>& pool, int subsample_cap,
                                std::uint64_t seed) {
  if (pool.rows() < 2) return 1.0;
  const Matrix sub = pick_centers(pool, subsample_cap, seed);
  const Eigen::Index m = sub.rows();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      dists.push_back((sub.row(i) - sub.row(j)).norm());
  auto mid = dists.begin() + dists.size() / 2;
  std::nth_element(dists.begin(), mid, dists.end());
  const double med = *mid;
  return med > 0 ? med : 1.0;
}

std::vector<double> bandwidth_candidates(double median_distance) {
  if (!(median_distance > 0)) throw std::invalid_argument("median distance must be positive");
  std::vector<double> out;
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) out.push_back(median_distance * f);
  return out;
}

std::string model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["kind"] = model.map.kind() == FeatureMap::Kind::RawWithBias ? "raw_with_bias"
                                                                : "gaussian_kernel";
  auto centers = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.map.centers().rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < model.map.centers().cols(); ++k)
      row.push_back(model.map.centers()(i, k));
    centers.push_back(std::move(row));
  }
  j["centers"] = std::move(centers);
  j["bandwidth"] = model.map.bandwidth();
  j["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
  return j.dump(2);
}

LinearModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model JSON: ") + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto w = j.at("weights").get<std::vector<double>>();
    Vector weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    if (kind == "raw_with_bias")
      return LinearModel(FeatureMap::raw_with_bias(static_cast<int>(w.size()) - 1),
                         std::move(weights));
    if (kind != "gaussian_kernel") throw DataError("unknown model kind: " + kind);
    const auto& jc = j.at("centers");
    if (jc.empty()) throw DataError("gaussian model without centers");
    Matrix centers(jc.size(), jc[0].size());
    for (std::size_t i = 0; i < jc.size(); ++i)
      for (std::size_t k = 0; k < jc[i].size(); ++k) centers(i, k) = jc[i][k].get<double>();
    return LinearModel(FeatureMap::gaussian(std::move(centers), j.at("bandwidth").get<double>()),
                       std::move(weights));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model JSON: ") + e.what());
  }
}

}  // namespace pushift
