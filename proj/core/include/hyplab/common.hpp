#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hyplab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline Sign opposite(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline const char* sign_name(Sign s) { return s == Sign::Plus ? "+" : "-"; }

// Thrown for violated preconditions (bad dimension, out-of-range index, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical certificate cannot be established.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline Vec random_normal(Rng& rng, int size) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(size);
  for (int i = 0; i < size; ++i) v[i] = nd(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace hyplab
