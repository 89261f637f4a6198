#pragma once

#include <compare>
#include <string>

namespace kerrkit {

// A positive half-integer j = twice/2, stored exactly.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  static HalfInteger from_twice(int twice);
  // Accepts 0.5, 1, 1.5, ...; anything else throws DomainError.
  static HalfInteger from_double(double j);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(const HalfInteger&, const HalfInteger&) = default;

 private:
  constexpr explicit HalfInteger(int twice) : twice_(twice) {}
  int twice_ = 1;
};

// The pair (lambda, j) defining the deformed algebra.
class KerrParams {
 public:
  KerrParams(double lambda, HalfInteger j);
  KerrParams(double lambda, double j) : KerrParams(lambda, HalfInteger::from_double(j)) {}

  double lambda() const noexcept { return lambda_; }
  HalfInteger j() const noexcept { return j_; }
  double jv() const noexcept { return j_.value(); }
  int two_j() const noexcept { return j_.twice(); }
  bool positive() const noexcept { return lambda_ > 0.0; }
  // sqrt(|lambda|/2), the scale multiplying r in every closed form.
  double scale() const noexcept { return scale_; }
  // Fock dimension of the compact family (2j+1); meaningless for lambda > 0.
  int compact_dim() const noexcept { return two_j() + 1; }

 private:
  double lambda_;
  HalfInteger j_;
  double scale_;
};

}  // namespace kerrkit
