#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pushift/optimizer.hpp"

using namespace pushift;

TEST_CASE("amsgrad scalar step matches the hand-evaluated update") {
  TrainConfig config;
  config.learning_rate = 0.1;
  AmsGradState state(1);
  Vector w = Vector::Zero(1);
  Vector g = Vector::Constant(1, 1.0);
  amsgrad_step(state, w, g, config);
  CHECK(state.first_moment[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(state.second_moment[0] == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(state.max_second_moment[0] == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(w[0] == doctest::Approx(-0.1 * 0.1 / (std::sqrt(0.001) + 1e-8)).epsilon(1e-10));
  CHECK(w[0] == doctest::Approx(-0.3162276).epsilon(1e-6));
  CHECK(state.step_count == 1);
}

TEST_CASE("zero gradient from a fresh state leaves the weights alone") {
  TrainConfig config;
  AmsGradState state(3);
  Vector w(3);
  w << 1, -2, 3;
  const Vector before = w;
  amsgrad_step(state, w, Vector::Zero(3), config);
  CHECK((w - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the second-moment maximum never decreases") {
  TrainConfig config;
  AmsGradState state(1);
  Vector w = Vector::Zero(1);
  amsgrad_step(state, w, Vector::Constant(1, 10.0), config);
  const double peak = state.max_second_moment[0];
  amsgrad_step(state, w, Vector::Constant(1, 0.01), config);
  CHECK(state.max_second_moment[0] == peak);
  CHECK(state.second_moment[0] < peak);
}

TEST_CASE("bad gradients and dimensions are rejected") {
  TrainConfig config;
  AmsGradState state(2);
  Vector w = Vector::Zero(2);
  CHECK_THROWS_AS(amsgrad_step(state, w, Vector::Zero(3), config), std::invalid_argument);
  Vector bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(amsgrad_step(state, w, bad, config), NumericalError);
}

TEST_CASE("train config validation") {
  TrainConfig config;
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.epochs = 1;
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.learning_rate = 0.1;
  config.beta1 = 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

namespace {

PUSample separable_sample() {
  Matrix p(2, 1), u(2, 1);
  p << 2.0, 2.0;
  u << 2.0, -2.0;
  return PUSample(p, u, 0.5);
}

}  // namespace

TEST_CASE("training solves the separable 1-D task") {
  const auto sample = separable_sample();
  TrainConfig config;
  const LinearModel model =
      train(RiskSpec::pu(Loss::Squared), sample, FeatureMap::raw_with_bias(1), config);
  CHECK(model.predict_label(Vector::Constant(1, 2.0)) == 1.0);
  CHECK(model.predict_label(Vector::Constant(1, -2.0)) == -1.0);
}

TEST_CASE("training is deterministic given the seed") {
  const auto sample = separable_sample();
  TrainConfig config;
  config.epochs = 50;
  const auto a = train(RiskSpec::pu(Loss::Logistic), sample, FeatureMap::raw_with_bias(1), config);
  const auto b = train(RiskSpec::pu(Loss::Logistic), sample, FeatureMap::raw_with_bias(1), config);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);

  config.batch_size = 2;
  config.seed = 99;
  const auto c = train(RiskSpec::pu(Loss::Logistic), sample, FeatureMap::raw_with_bias(1), config);
  const auto d = train(RiskSpec::pu(Loss::Logistic), sample, FeatureMap::raw_with_bias(1), config);
  CHECK((c.weights - d.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a matching shifted spec reproduces the ordinary trajectory bit-for-bit") {
  const auto sample = separable_sample();
  TrainConfig config;
  config.epochs = 120;
  const auto plain =
      train(RiskSpec::pu(Loss::Squared), sample, FeatureMap::raw_with_bias(1), config);
  const auto shifted = train(RiskSpec::pu_shift(Loss::Squared, sample.train_prior), sample,
                             FeatureMap::raw_with_bias(1), config);
  CHECK((plain.weights - shifted.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the returned best objective never worsens with more epochs") {
  const auto sample = separable_sample();
  const RiskSpec spec = RiskSpec::pu_shift(Loss::Logistic, 0.7);  // gamma > 0, convex
  const FeaturizedPU data(FeatureMap::raw_with_bias(1), sample);
  double prev = std::numeric_limits<double>::infinity();
  for (int epochs : {5, 20, 80, 300}) {
    TrainConfig config;
    config.epochs = epochs;
    const auto model = train(spec, sample, FeatureMap::raw_with_bias(1), config);
    const double best = risk_value(spec, model.weights, data);
    CHECK(best <= prev + 1e-12);
    prev = best;
  }
}

TEST_CASE("one epoch performs exactly one full-batch step") {
  const auto sample = separable_sample();
  const RiskSpec spec = RiskSpec::pu(Loss::Squared);
  const auto map = FeatureMap::raw_with_bias(1);
  TrainConfig config;
  config.epochs = 1;
  const auto trained = train(spec, sample, map, config);

  const FeaturizedPU data(map, sample);
  AmsGradState state(2);
  Vector w = Vector::Zero(2);
  amsgrad_step(state, w, risk_gradient(spec, w, data), config);
  REQUIRE(risk_value(spec, w, data) < risk_value(spec, Vector::Zero(2), data));
  CHECK((trained.weights - w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diverging objectives abort with a diagnostic") {
  const auto sample = separable_sample();
  TrainConfig config;
  config.learning_rate = 1e200;
  config.epochs = 10;
  CHECK_THROWS_AS(train(RiskSpec::pu(Loss::Squared), sample, FeatureMap::raw_with_bias(1), config),
                  NumericalError);
}

TEST_CASE("train calls are counted") {
  counters::reset();
  const auto sample = separable_sample();
  TrainConfig config;
  config.epochs = 2;
  train(RiskSpec::pu(Loss::Squared), sample, FeatureMap::raw_with_bias(1), config);
  train(RiskSpec::pu(Loss::Squared), sample, FeatureMap::raw_with_bias(1), config);
  CHECK(counters::train_calls() == 2);
  counters::reset();
  CHECK(counters::train_calls() == 0);
}
