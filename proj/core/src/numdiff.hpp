#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kerrkit/error.hpp"

namespace kerrkit::detail {

inline double magnitude(double v) { return std::abs(v); }

template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

// Central difference with one Richardson step, halving h until two
// successive extrapolations agree to rel_tol (relative to the estimate,
// floored by abs_floor).
template <typename F>
auto richardson_derivative(F&& f, double x, double h, double rel_tol, double abs_floor = 0.0,
                           int max_halvings = 12) {
  auto central = [&](double step) { return ((f(x + step) - f(x - step)) / (2.0 * step)).eval(); };
  auto extrapolate = [&](double step) {
    const auto coarse = central(step);
    const auto fine = central(0.5 * step);
    return ((4.0 * fine - coarse) / 3.0).eval();
  };
  auto prev = extrapolate(h);
  for (int k = 0; k < max_halvings; ++k) {
    h *= 0.5;
    auto next = extrapolate(h);
    const double diff = magnitude((next - prev).eval());
    const double scale = std::max(magnitude(next), abs_floor);
    if (diff <= rel_tol * scale || diff <= abs_floor * rel_tol) return next;
    prev = next;
  }
  throw ConvergenceError("finite-difference derivative at x = " + std::to_string(x) +
                         " did not converge under step halving");
}

// Scalar overload wrapper so doubles flow through the same .eval() calls.
struct ScalarBox {
  double v;
  ScalarBox eval() const { return *this; }
};
inline ScalarBox operator-(ScalarBox a, ScalarBox b) { return {a.v - b.v}; }
inline ScalarBox operator*(double s, ScalarBox a) { return {s * a.v}; }
inline ScalarBox operator/(ScalarBox a, double s) { return {a.v / s}; }
inline double magnitude(ScalarBox a) { return std::abs(a.v); }

template <typename F>
double richardson_scalar(F&& f, double x, double h, double rel_tol, double abs_floor = 0.0,
                         int max_halvings = 12) {
  auto boxed = [&](double t) { return ScalarBox{f(t)}; };
  return richardson_derivative(boxed, x, h, rel_tol, abs_floor, max_halvings).v;
}

// Second derivative from central second differences with one Richardson
// step, under the same halving and stopping rule.
template <typename F>
double richardson_second(F&& f, double x, double h, double rel_tol, int max_halvings = 12) {
  const double f0 = f(x);
  auto central = [&](double step) { return (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step); };
  auto extrapolate = [&](double step) { return (4.0 * central(0.5 * step) - central(step)) / 3.0; };
  double prev = extrapolate(h);
  for (int k = 0; k < max_halvings; ++k) {
    h *= 0.5;
    const double next = extrapolate(h);
    if (std::abs(next - prev) <= rel_tol * std::abs(next)) return next;
    prev = next;
  }
  throw ConvergenceError("second derivative at x = " + std::to_string(x) + " did not converge under step halving");
}

}  // namespace kerrkit::detail
