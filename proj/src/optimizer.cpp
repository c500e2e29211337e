#include "pushift/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pushift {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(beta1 >= 0 && beta1 < 1)) throw std::invalid_argument("beta1 must lie in [0,1)");
  if (!(beta2 >= 0 && beta2 < 1)) throw std::invalid_argument("beta2 must lie in [0,1)");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 0) throw std::invalid_argument("batch_size must be >= 0");
}

void amsgrad_step(AmsGradState& state, Vector& weights, const Eigen::Ref<const Vector>& gradient,
                  const TrainConfig& config) {
  if (gradient.size() != weights.size() || state.first_moment.size() != weights.size())
    throw std::invalid_argument("gradient/state dimension does not match the weights");
  if (!gradient.allFinite())
    throw NumericalError("non-finite gradient at step " + std::to_string(state.step_count + 1));
  state.first_moment = config.beta1 * state.first_moment + (1.0 - config.beta1) * gradient;
  state.second_moment = config.beta2 * state.second_moment +
                        (1.0 - config.beta2) * gradient.cwiseProduct(gradient);
  state.max_second_moment = state.max_second_moment.cwiseMax(state.second_moment);
  ++state.step_count;
  weights -= config.learning_rate *
             (state.first_moment.array() /
              (state.max_second_moment.array().sqrt() + config.epsilon))
                 .matrix();
}

LinearModel train(const RiskSpec& spec, const PUSample& sample, const FeatureMap& map,
                  const TrainConfig& config) {
  config.validate();
  counters::record_train_call();

  const FeaturizedPU data(map, sample);
  const Eigen::Index dim = map.dim();
  Vector weights = Vector::Zero(dim);
  AmsGradState state(dim);

  const auto objective = [&](const Vector& w) {
    const double value = risk_value(spec, w, data);
    if (!std::isfinite(value))
      throw NumericalError("objective diverged (epoch " + std::to_string(state.step_count) + ")");
    return value;
  };

  Vector best_weights = weights;
  double best_objective = objective(weights);

  const Eigen::Index np = data.phi_p.rows(), nu = data.phi_u.rows();
  std::mt19937_64 rng(config.seed);

  if (config.batch_size == 0) {
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      amsgrad_step(state, weights, risk_gradient(spec, weights, data), config);
      const double value = objective(weights);
      if (value < best_objective) {
        best_objective = value;
        best_weights = weights;
      }
    }
  } else {
    std::vector<Eigen::Index> order_p(np), order_u(nu);
    std::iota(order_p.begin(), order_p.end(), 0);
    std::iota(order_u.begin(), order_u.end(), 0);
    const int batches = static_cast<int>(
        (std::max(np, nu) + config.batch_size - 1) / config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order_p.begin(), order_p.end(), rng);
      std::shuffle(order_u.begin(), order_u.end(), rng);
      for (int b = 0; b < batches; ++b) {
        // positives and unlabeled advance together, wrapping the shorter list
        Matrix bp(std::min<Eigen::Index>(config.batch_size, np), data.phi_p.cols());
        Matrix bu(std::min<Eigen::Index>(config.batch_size, nu), data.phi_u.cols());
        for (Eigen::Index i = 0; i < bp.rows(); ++i)
          bp.row(i) = data.phi_p.row(order_p[(b * bp.rows() + i) % np]);
        for (Eigen::Index j = 0; j < bu.rows(); ++j)
          bu.row(j) = data.phi_u.row(order_u[(b * bu.rows() + j) % nu]);
        FeaturizedPU batch_view = data;
        batch_view.phi_p = std::move(bp);
        batch_view.phi_u = std::move(bu);
        amsgrad_step(state, weights, risk_gradient(spec, weights, batch_view), config);
      }
      const double value = objective(weights);
      if (value < best_objective) {
        best_objective = value;
        best_weights = weights;
      }
    }
  }
  return LinearModel(map, std::move(best_weights));
}

namespace counters {

namespace {
std::atomic<long> g_train_calls{0};
std::atomic<long> g_ulsif_fits{0};
}  // namespace

long train_calls() { return g_train_calls.load(); }
long ulsif_fits() { return g_ulsif_fits.load(); }
void reset() {
  g_train_calls.store(0);
  g_ulsif_fits.store(0);
}
void record_train_call() { ++g_train_calls; }
void record_ulsif_fit() { ++g_ulsif_fits; }

}  // namespace counters

}  // namespace pushift
