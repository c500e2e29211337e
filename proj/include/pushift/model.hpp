#ifndef PUSHIFT_MODEL_HPP
#define PUSHIFT_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pushift/common.hpp"

namespace pushift {

// Feature map behind the linear-in-parameter model: either raw input
// features with a trailing bias, or Gaussian kernel values at fixed
// centers with a trailing bias.
class FeatureMap {
 public:
  enum class Kind { RawWithBias, GaussianKernel };

  static FeatureMap raw_with_bias(int input_dim);
  static FeatureMap gaussian(Matrix centers, double bandwidth);

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  // output dimension, bias included
  int dim() const;
  const Matrix& centers() const { return centers_; }
  double bandwidth() const { return bandwidth_; }

  Vector apply(const Eigen::Ref<const Vector>& x) const;
  // one row of features per input row
  Matrix apply_all(const Eigen::Ref<const Matrix>& patterns) const;

 private:
  FeatureMap() = default;
  Kind kind_ = Kind::RawWithBias;
  int input_dim_ = 0;
  Matrix centers_;       // gaussian only
  double bandwidth_ = 0; // gaussian only
};

struct LinearModel {
  FeatureMap map;
  Vector weights;  // length map.dim()

  LinearModel(FeatureMap map, Vector weights);

  double predict_score(const Eigen::Ref<const Vector>& x) const;
  double predict_label(const Eigen::Ref<const Vector>& x) const;
  Vector predict_scores(const Eigen::Ref<const Matrix>& patterns) const;
};

// min(max_centers, n) rows of the pool, uniformly without replacement.
Matrix pick_centers(const Eigen::Ref<const Matrix>& pool, int max_centers, std::uint64_t seed);

// Median pairwise Euclidean distance on a subsample of at most
// subsample_cap patterns. Falls back to 1 when the pool is degenerate.
double median_pairwise_distance(const Eigen::Ref<const Matrix>& pool, int subsample_cap,
                                std::uint64_t seed);

// median * {1/8, 1/4, 1/2, 1, 2, 4, 8}
std::vector<double> bandwidth_candidates(double median_distance);

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);

}  // namespace pushift

#endif  // PUSHIFT_MODEL_HPP
