#ifndef PUSHIFT_COMMON_HPP
#define PUSHIFT_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pushift {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // one pattern per row

// Malformed or inconsistent input data (files, datasets, label maps).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or failed solves encountered during computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sign(0) = +1 throughout the library.
inline double sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

inline void check_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(std::string(name) + " must lie strictly in (0,1), got " +
                                std::to_string(p));
}

// splitmix64 finalizer; used to derive independent seeded streams.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(base ^ mix_seed(a + 1) ^ mix_seed(mix_seed(b + 0x9e3779b9)));
}

}  // namespace pushift

#endif  // PUSHIFT_COMMON_HPP
