#ifndef PUSHIFT_DENSITY_RATIO_HPP
#define PUSHIFT_DENSITY_RATIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pushift/common.hpp"

namespace pushift {

// Which quotient the model estimates: positive-over-unlabeled (bounded by
// 1/pi) or unlabeled-over-positive (bounded below by pi, unbounded above).
enum class RatioDirection { POverU, UOverP };

RatioDirection ratio_direction_from_name(std::string_view name);
std::string_view ratio_direction_name(RatioDirection direction);

// Gaussian-kernel ratio model with non-negative coefficients.
struct RatioModel {
  RatioDirection direction = RatioDirection::POverU;
  Matrix centers;
  double bandwidth = 1.0;
  double regularization = 1.0;
  Vector coefficients;  // clipped at zero after fitting

  RatioModel() = default;
  RatioModel(RatioDirection direction, Matrix centers, double bandwidth, double regularization,
             Vector coefficients);
};

// Hyperparameter search space for the least-squares fit.
struct UlsifGrid {
  std::vector<double> bandwidth_factors{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> regularizations{1e-3, 1e-2, 1e-1, 1.0, 10.0};
  int folds = 5;
  int max_centers = 100;

  void validate() const;
};

// Ridge solution of (H + lambda I) theta = h, before any clipping.
Vector ulsif_solve(const Eigen::Ref<const Matrix>& H, const Eigen::Ref<const Vector>& h,
                   double regularization);

// Least-squares importance fitting with Gaussian kernels centered on
// numerator samples. Hyperparameters are chosen by k-fold cross-validation
// of the quadratic objective evaluated with clipped coefficients, then the
// model is refit on all data and clipped at zero.
RatioModel fit_ulsif(const Eigen::Ref<const Matrix>& numerator,
                     const Eigen::Ref<const Matrix>& denominator, RatioDirection direction,
                     const UlsifGrid& grid, std::uint64_t seed);

// max(0, sum_k theta_k * exp(-|x - c_k|^2 / (2 sigma^2)))
double ratio_at(const RatioModel& model, const Eigen::Ref<const Vector>& x);
Vector ratio_at_all(const RatioModel& model, const Eigen::Ref<const Matrix>& patterns);

// Threshold classification on the estimated ratio; the fitted model never
// changes when the test condition does, only alpha_unif moves.
//   p/u: sign[pi * w(x) - alpha_unif]      u/p: sign[pi/alpha_unif - w(x)]
double dr_classify(const RatioModel& model, double train_prior, double alpha_unif,
                   const Eigen::Ref<const Vector>& x);

struct RatioBoundReport {
  double violation_fraction = 0;
  Eigen::Index checked = 0;
  std::vector<double> values;  // clipped copies when clipping was requested
};

// Fraction of evaluation points breaking the direction's bound:
// p/u above 1/pi + tolerance, u/p below pi - tolerance. Optionally clips
// p/u values into [0, 1/pi] in the returned report.
RatioBoundReport check_ratio_bounds(const RatioModel& model, double train_prior,
                                    const Eigen::Ref<const Matrix>& points,
                                    double tolerance = 1e-9, bool clip = false);
RatioBoundReport check_ratio_bounds(RatioDirection direction, std::vector<double> values,
                                    double train_prior, double tolerance = 1e-9,
                                    bool clip = false);

// p_t/p_p from p_u/p_p: gamma/(1-pi) + (1 - gamma/(1-pi)) * value.
double shift_ratio_transform(double u_over_p_value, double train_prior, double gamma);

std::string ratio_model_to_json(const RatioModel& model);
RatioModel ratio_model_from_json(const std::string& text);

}  // namespace pushift

#endif  // PUSHIFT_DENSITY_RATIO_HPP
