#ifndef PUSHIFT_LOSSES_HPP
#define PUSHIFT_LOSSES_HPP

#include <optional>
#include <string>
#include <string_view>

namespace pushift {

enum class Loss { ZeroOne, Squared, Logistic, DoubleHinge };

// Margin loss value; total on finite margins. The zero-one loss uses
// sign(0) = +1, so a zero margin counts as correct.
double loss_value(Loss loss, double margin);

// An element of the subdifferential; left-derivative at double-hinge kinks.
// Throws std::invalid_argument for the zero-one loss.
double loss_subgradient(Loss loss, double margin);

// The constant c with l(z) - l(-z) = c*z, or nullopt when the difference
// is not linear (zero-one loss).
std::optional<double> linear_odd_slope(Loss loss);

// CLI names: zero-one, squared, logistic, double-hinge.
Loss loss_from_name(std::string_view name);
std::string_view loss_name(Loss loss);

}  // namespace pushift

#endif  // PUSHIFT_LOSSES_HPP
