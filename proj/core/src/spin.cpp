#include "kerrkit/spin.hpp"

#include <cmath>

#include "kerrkit/error.hpp"

namespace kerrkit {

HalfInteger HalfInteger::from_twice(int twice) {
  if (twice < 1) throw DomainError("j must be a positive half-integer, got 2j = " + std::to_string(twice));
  return HalfInteger(twice);
}

HalfInteger HalfInteger::from_double(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || std::abs(twice - rounded) > 1e-9 || rounded < 1.0 || rounded > 1e8) {
    throw DomainError("j must be a positive half-integer, got " + std::to_string(j));
  }
  return HalfInteger(static_cast<int>(rounded));
}

std::string HalfInteger::to_string() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

KerrParams::KerrParams(double lambda, HalfInteger j) : lambda_(lambda), j_(j) {
  if (!std::isfinite(lambda) || lambda == 0.0) {
    throw DomainError("Kerr parameter lambda must be finite and nonzero");
  }
  scale_ = std::sqrt(std::abs(lambda) / 2.0);
}

}  // namespace kerrkit
