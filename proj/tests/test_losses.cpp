#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pushift/losses.hpp"

using namespace pushift;

namespace {
constexpr Loss kSurrogates[] = {Loss::Squared, Loss::Logistic, Loss::DoubleHinge};
}

TEST_CASE("loss values at reference margins") {
  CHECK(loss_value(Loss::Squared, 1.0) == 0.0);
  CHECK(loss_value(Loss::Logistic, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(loss_value(Loss::DoubleHinge, -1.0) == doctest::Approx(1.0));
  CHECK(loss_value(Loss::DoubleHinge, 0.0) == doctest::Approx(0.5));
  CHECK(loss_value(Loss::DoubleHinge, -3.0) == doctest::Approx(3.0));
  CHECK(loss_value(Loss::ZeroOne, 0.3) == 0.0);
  CHECK(loss_value(Loss::ZeroOne, -0.3) == 1.0);
  CHECK(loss_value(Loss::ZeroOne, 0.0) == 0.0);  // sign(0) = +1
}

TEST_CASE("logistic loss survives extreme margins") {
  CHECK(loss_value(Loss::Logistic, 1000.0) == doctest::Approx(0.0));
  CHECK(loss_value(Loss::Logistic, -1000.0) == doctest::Approx(1000.0));
  CHECK(std::isfinite(loss_value(Loss::Logistic, -1e8)));
}

TEST_CASE("subgradients at reference margins") {
  CHECK(loss_subgradient(Loss::Squared, 1.0) == 0.0);
  CHECK(loss_subgradient(Loss::Logistic, 0.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(loss_subgradient(Loss::DoubleHinge, -2.0) == -1.0);
  CHECK(loss_subgradient(Loss::DoubleHinge, -1.0) == -1.0);  // left-derivative at the kink
  CHECK(loss_subgradient(Loss::DoubleHinge, 1.0) == -0.5);
  CHECK(loss_subgradient(Loss::DoubleHinge, 2.0) == 0.0);
  CHECK_THROWS_AS(loss_subgradient(Loss::ZeroOne, 0.5), std::invalid_argument);
}

TEST_CASE("declared linear-odd slopes") {
  CHECK(linear_odd_slope(Loss::Squared) == -4.0);
  CHECK(linear_odd_slope(Loss::Logistic) == -1.0);
  CHECK(linear_odd_slope(Loss::DoubleHinge) == -1.0);
  CHECK(!linear_odd_slope(Loss::ZeroOne).has_value());
}

TEST_CASE("l(z) - l(-z) matches the declared slope on samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> margin(-10.0, 10.0);
  for (Loss loss : kSurrogates) {
    const double c = *linear_odd_slope(loss);
    for (int i = 0; i < 1000; ++i) {
      const double z = margin(rng);
      CHECK(std::abs(loss_value(loss, z) - loss_value(loss, -z) - c * z) < 1e-9);
    }
  }
}

TEST_CASE("surrogates satisfy the midpoint convexity inequality") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> margin(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Loss loss : kSurrogates) {
    for (int i = 0; i < 1000; ++i) {
      const double z1 = margin(rng), z2 = margin(rng), t = unit(rng);
      const double lhs = loss_value(loss, t * z1 + (1.0 - t) * z2);
      const double rhs = t * loss_value(loss, z1) + (1.0 - t) * loss_value(loss, z2);
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("subgradients support the loss from below") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> margin(-10.0, 10.0);
  for (Loss loss : kSurrogates) {
    for (int i = 0; i < 1000; ++i) {
      const double z = margin(rng), z2 = margin(rng);
      const double g = loss_subgradient(loss, z);
      CHECK(loss_value(loss, z2) >= loss_value(loss, z) + g * (z2 - z) - 1e-9);
    }
  }
}

TEST_CASE("subgradients agree with central differences away from kinks") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> margin(-10.0, 10.0);
  const double h = 1e-6;
  for (Loss loss : kSurrogates) {
    int checked = 0;
    while (checked < 300) {
      const double z = margin(rng);
      if (loss == Loss::DoubleHinge && (std::abs(z - 1.0) < 1e-3 || std::abs(z + 1.0) < 1e-3))
        continue;
      const double fd = (loss_value(loss, z + h) - loss_value(loss, z - h)) / (2.0 * h);
      CHECK(std::abs(loss_subgradient(loss, z) - fd) < 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("loss names round-trip and reject unknowns") {
  for (Loss loss : {Loss::ZeroOne, Loss::Squared, Loss::Logistic, Loss::DoubleHinge})
    CHECK(loss_from_name(loss_name(loss)) == loss);
  CHECK_THROWS_AS(loss_from_name("hinge"), std::invalid_argument);
}

TEST_CASE("all loss values are non-negative") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> margin(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = margin(rng);
    for (Loss loss : {Loss::ZeroOne, Loss::Squared, Loss::Logistic, Loss::DoubleHinge})
      CHECK(loss_value(loss, z) >= 0.0);
  }
}
