#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kerrkit/fockspace.hpp"

namespace kerrkit {

struct MetricAtPoint {
  double g_rr = 0.0;
  double g_phiphi = 0.0;
  double g_rphi = 0.0;
  double g_phir = 0.0;
  PolarAmplitude point{0.0, 0.0};
  KerrParams params{2.0, HalfInteger::from_twice(1)};
};

MetricAtPoint metric_closed_form(const KerrParams& params, double r);

// Fubini-Study metric from central differences of the closed-form states.
MetricAtPoint metric_numeric(const KerrParams& params, const PolarAmplitude& point,
                             double h = 1e-4);

// Scalar curvature in the form printed for the feature space: -2 lambda/j
// for lambda > 0 and +2|lambda|/j for lambda < 0.
double ricci_scalar(const KerrParams& params);

// Scalar curvature of metric_closed_form itself: -4/j or +4/j. Agrees with
// ricci_scalar only when |lambda| = 2.
double metric_scalar_curvature(const KerrParams& params);

// Scalar curvature from finite-difference Christoffel symbols of
// metric_closed_form at each sample radius (r >= 0.05, inside the domain).
std::vector<double> ricci_numeric(const KerrParams& params, const std::vector<double>& r_samples);

struct Christoffels {
  double r_phiphi = 0.0;  // Gamma^r_{phi phi}
  double phi_rphi = 0.0;  // Gamma^phi_{r phi}
};
Christoffels christoffels_numeric(const KerrParams& params, double r);

std::array<double, 3> embed(const KerrParams& params, double r, double phi);

// x0^2 - x1^2 - x2^2 - j/2 (lambda > 0) or x0^2 + x1^2 + x2^2 - j/2.
double quadric_residual(const KerrParams& params, const std::array<double, 3>& x);

// Metric induced on the embedded surface by the ambient -+ + (lambda > 0) or
// Euclidean (lambda < 0) metric, from numerical derivatives of embed.
MetricAtPoint pullback_metric(const KerrParams& params, double r, double phi);

struct QuadratureConfig {
  int radial_nodes = 64;
  int angular_nodes = 64;
  // Upper radial cutoff; empty means the whole domain.
  std::optional<double> r_max;
  int projector_count = 8;
  // Add the analytic projector tail beyond r_max.
  bool tail_correction = true;
};

// Leading projector_count x projector_count block of the integrated
// projector, without resolution checks.
Eigen::MatrixXcd resolution_block(const KerrParams& params, const QuadratureConfig& q);

// max |block - identity|; throws QuadratureError when doubling the node
// counts changes the residual by more than 10% above a 1e-12 floor.
double resolution_residual(const KerrParams& params, const QuadratureConfig& q);

cplx reproducing_integral(const PolarAmplitude& a1, const PolarAmplitude& a2,
                          const KerrParams& params, const QuadratureConfig& q);

double reproducing_residual(const PolarAmplitude& a1, const PolarAmplitude& a2,
                            const KerrParams& params, const QuadratureConfig& q);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace kerrkit
