#ifndef PUSHIFT_RISK_HPP
#define PUSHIFT_RISK_HPP

#include "pushift/common.hpp"
#include "pushift/losses.hpp"
#include "pushift/model.hpp"

namespace pushift {

// Positive patterns, unlabeled patterns, and the prior of the unlabeled pool.
struct PUSample {
  Matrix positives;
  Matrix unlabeled;
  double train_prior;

  PUSample(Matrix positives, Matrix unlabeled, double train_prior);
};

// Which empirical risk to minimize. The non-negative correction exists for
// Pu and PuShift; an asymmetric-cost task wanting it should be converted to
// the equivalent shifted task first (prior_from_alpha).
struct RiskSpec {
  enum class Mode { Pu, PuShift, PuAsym };

  Loss loss = Loss::Squared;
  Mode mode = Mode::Pu;
  double test_prior = 0.5;  // PuShift
  double fp_cost = 0.5;     // PuAsym
  bool non_negative = false;

  static RiskSpec pu(Loss loss, bool non_negative = false);
  static RiskSpec pu_shift(Loss loss, double test_prior, bool non_negative = false);
  static RiskSpec pu_asym(Loss loss, double fp_cost);
};

// Unbiased estimators. All may be negative except the nn variants.
double empirical_pu_risk(const LinearModel& model, const PUSample& sample, Loss loss);
double empirical_shift_risk(const LinearModel& model, const PUSample& sample, double test_prior,
                            Loss loss);
double empirical_asym_risk(const LinearModel& model, const PUSample& sample, double fp_cost,
                           Loss loss);
double nn_pu_risk(const LinearModel& model, const PUSample& sample, Loss loss);
double nn_shift_risk(const LinearModel& model, const PUSample& sample, double test_prior,
                     Loss loss);

double risk_value(const RiskSpec& spec, const LinearModel& model, const PUSample& sample);
Vector risk_gradient(const RiskSpec& spec, const LinearModel& model, const PUSample& sample);

// The shifted risk split along the linear-odd identity, with the loss's own
// slope c in the linear term:
//   risk = c*pi*mean_p[g] + gamma*mean_p[l(g) + pi/(1-pi)*l(-g)]
//        + (1 - gamma/(1-pi))*mean_u[l(-g)]
struct ShiftRiskDecomposition {
  double linear_term;
  double gamma_term;
  double unlabeled_term;

  double sum() const { return linear_term + gamma_term + unlabeled_term; }
};

ShiftRiskDecomposition decompose_shift_risk(const LinearModel& model, const PUSample& sample,
                                            double test_prior, Loss loss);

// Precomputed feature matrices for repeated risk/gradient evaluation on one
// sample; what the optimizer iterates on.
struct FeaturizedPU {
  Matrix phi_p;
  Matrix phi_u;
  double train_prior;

  FeaturizedPU(const FeatureMap& map, const PUSample& sample);
};

double risk_value(const RiskSpec& spec, const Eigen::Ref<const Vector>& weights,
                  const FeaturizedPU& data);
Vector risk_gradient(const RiskSpec& spec, const Eigen::Ref<const Vector>& weights,
                     const FeaturizedPU& data);

}  // namespace pushift

#endif  // PUSHIFT_RISK_HPP
