#include "pushift/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "pushift/common.hpp"

namespace pushift {

double loss_value(Loss loss, double z) {
  switch (loss) {
    case Loss::ZeroOne:
      return 0.5 - 0.5 * sign(z);
    case Loss::Squared:
      return (1.0 - z) * (1.0 - z);
    case Loss::Logistic:
      // log(1 + exp(-z)) without overflow for large |z|
      return std::max(0.0, -z) + std::log1p(std::exp(-std::abs(z)));
    case Loss::DoubleHinge:
      return std::max(-z, std::max(0.0, 0.5 - 0.5 * z));
  }
  throw std::logic_error("unknown loss");
}

double loss_subgradient(Loss loss, double z) {
  switch (loss) {
    case Loss::ZeroOne:
      throw std::invalid_argument("zero-one loss has no usable subgradient");
    case Loss::Squared:
      return 2.0 * (z - 1.0);
    case Loss::Logistic:
      // -sigmoid(-z), computed from the non-overflowing side
      return z >= 0.0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
    case Loss::DoubleHinge:
      // kinks at -1 and +1; left-derivative there
      if (z <= -1.0) return -1.0;
      if (z <= 1.0) return -0.5;
      return 0.0;
  }
  throw std::logic_error("unknown loss");
}

std::optional<double> linear_odd_slope(Loss loss) {
  switch (loss) {
    case Loss::ZeroOne:
      return std::nullopt;
    case Loss::Squared:
      return -4.0;
    case Loss::Logistic:
    case Loss::DoubleHinge:
      return -1.0;
  }
  throw std::logic_error("unknown loss");
}

Loss loss_from_name(std::string_view name) {
  if (name == "zero-one") return Loss::ZeroOne;
  if (name == "squared") return Loss::Squared;
  if (name == "logistic") return Loss::Logistic;
  if (name == "double-hinge") return Loss::DoubleHinge;
  throw std::invalid_argument("unknown loss name: " + std::string(name));
}

std::string_view loss_name(Loss loss) {
  switch (loss) {
    case Loss::ZeroOne: return "zero-one";
    case Loss::Squared: return "squared";
    case Loss::Logistic: return "logistic";
    case Loss::DoubleHinge: return "double-hinge";
  }
  throw std::logic_error("unknown loss");
}

}  // namespace pushift
