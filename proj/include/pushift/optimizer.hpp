#ifndef PUSHIFT_OPTIMIZER_HPP
#define PUSHIFT_OPTIMIZER_HPP

#include <cstdint>

#include "pushift/risk.hpp"

namespace pushift {

struct AmsGradState {
  Vector first_moment;
  Vector second_moment;
  Vector max_second_moment;  // elementwise non-decreasing across steps
  long step_count = 0;

  explicit AmsGradState(Eigen::Index dim)
      : first_moment(Vector::Zero(dim)), second_moment(Vector::Zero(dim)),
        max_second_moment(Vector::Zero(dim)) {}
};

struct TrainConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 500;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;

  void validate() const;
};

// m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;  vhat <- max(vhat, v);
// w <- w - lr * m / (sqrt(vhat) + eps).  Rejects non-finite gradients.
void amsgrad_step(AmsGradState& state, Vector& weights, const Eigen::Ref<const Vector>& gradient,
                  const TrainConfig& config);

// Minimizes the empirical risk over the feature map's weight space, starting
// from zero weights. Returns the iterate with the lowest full-batch objective
// recorded across epochs (the initial point included). Deterministic given
// the seed; aborts with NumericalError if the objective leaves the reals.
LinearModel train(const RiskSpec& spec, const PUSample& sample, const FeatureMap& map,
                  const TrainConfig& config);

namespace counters {
// Instrumentation for the no-retraining contract: how many ratio fits and
// risk-minimization runs happened since the last reset.
long train_calls();
long ulsif_fits();
void reset();
void record_train_call();
void record_ulsif_fit();
}  // namespace counters

}  // namespace pushift

#endif  // PUSHIFT_OPTIMIZER_HPP
