#include "kerrkit/geometry.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "kerrkit/error.hpp"
#include "kerrkit/kernels.hpp"
#include "numdiff.hpp"

namespace kerrkit {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_state_domain(const KerrParams& params, double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be >= 0");
  if (!params.positive() && !(params.scale() * r < kHalfPi)) {
    throw DomainError("radius outside the compact state domain");
  }
}

// sqrt(2|lambda|), the rate appearing in the metric and embedding.
double kappa(const KerrParams& params) { return std::sqrt(2.0 * std::abs(params.lambda())); }

double g_phiphi(const KerrParams& params, double r) {
  const double k = kappa(params);
  const double s = params.positive() ? std::sinh(k * r) : std::sin(k * r);
  return 0.5 * params.jv() * s * s;
}

}  // namespace

MetricAtPoint metric_closed_form(const KerrParams& params, double r) {
  require_state_domain(params, r);
  MetricAtPoint m;
  m.params = params;
  m.point = PolarAmplitude(r, 0.0);
  m.g_rr = params.jv() * std::abs(params.lambda());
  m.g_phiphi = g_phiphi(params, r);
  return m;
}

MetricAtPoint metric_numeric(const KerrParams& params, const PolarAmplitude& point, double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) throw DomainError("metric_numeric step must lie in [1e-6, 1e-3]");
  const double r0 = point.r();
  const double phi0 = point.phi();
  require_state_domain(params, r0);
  if (!params.positive() && !(params.scale() * (r0 + 2.0 * h) < kHalfPi)) {
    throw DomainError("metric_numeric point too close to the domain boundary");
  }
  int dim = 0;
  if (params.positive()) dim = truncation_dim(params, r0 + 2.0 * h, 1e-16, 1 << 14);

  auto state = [&](double r, double phi) -> Eigen::VectorXcd {
    if (params.positive()) return kerr_state_pos_fixed(r, phi, params, dim).amplitudes;
    return kerr_state_neg_signed(r, phi, params).amplitudes;
  };
  const Eigen::VectorXcd psi = state(r0, phi0);
  const Eigen::VectorXcd d_r =
      detail::richardson_derivative([&](double r) { return state(r, phi0); }, r0, h, 1e-8, 1.0);
  const Eigen::VectorXcd d_phi =
      detail::richardson_derivative([&](double p) { return state(r0, p); }, phi0, h, 1e-8, 1.0);

  const cplx norm = psi.dot(psi);
  auto g = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const cplx v = a.dot(b) / norm - a.dot(psi) * psi.dot(b) / (norm * norm);
    return v.real();
  };
  MetricAtPoint m;
  m.params = params;
  m.point = point;
  m.g_rr = g(d_r, d_r);
  m.g_phiphi = g(d_phi, d_phi);
  m.g_rphi = g(d_r, d_phi);
  m.g_phir = g(d_phi, d_r);
  return m;
}

double ricci_scalar(const KerrParams& params) {
  return params.positive() ? -2.0 * params.lambda() / params.jv()
                           : 2.0 * std::abs(params.lambda()) / params.jv();
}

double metric_scalar_curvature(const KerrParams& params) {
  return (params.positive() ? -4.0 : 4.0) / params.jv();
}

Christoffels christoffels_numeric(const KerrParams& params, double r) {
  const double e = params.jv() * std::abs(params.lambda());
  const double dg = detail::richardson_scalar([&](double x) { return g_phiphi(params, x); }, r,
                                              1e-3, 1e-11);
  return {-dg / (2.0 * e), dg / (2.0 * g_phiphi(params, r))};
}

std::vector<double> ricci_numeric(const KerrParams& params, const std::vector<double>& r_samples) {
  const double e = params.jv() * std::abs(params.lambda());
  std::vector<double> out;
  out.reserve(r_samples.size());
  for (double r : r_samples) {
    if (!(r >= 0.05)) throw DomainError("curvature samples must satisfy r >= 0.05");
    require_state_domain(params, r);
    if (!params.positive() && !(params.scale() * (r + 2e-3) < kHalfPi)) {
      throw DomainError("curvature sample too close to the domain boundary");
    }
    // Christoffel symbols and their r-derivatives from g_phiphi', g_phiphi''.
    auto gpp = [&](double x) { return g_phiphi(params, x); };
    const double g = gpp(r);
    const double g1 = detail::richardson_scalar(gpp, r, 1e-3, 1e-11);
    const double g2 = detail::richardson_second(gpp, r, 1e-2, 1e-9);
    const Christoffels c{-g1 / (2.0 * e), g1 / (2.0 * g)};
    const double d_r_phiphi = -g2 / (2.0 * e);
    const double d_phi_rphi = (g2 * g - g1 * g1) / (2.0 * g * g);
    // Riemann components for a diagonal metric with constant g_rr.
    const double riem_r_phirphi = d_r_phiphi - c.r_phiphi * c.phi_rphi;
    const double ricci_rr = -d_phi_rphi - c.phi_rphi * c.phi_rphi;
    const double ricci_phiphi = riem_r_phirphi;
    out.push_back(ricci_rr / e + ricci_phiphi / g_phiphi(params, r));
  }
  return out;
}

std::array<double, 3> embed(const KerrParams& params, double r, double phi) {
  const double a = std::sqrt(params.jv() / 2.0);
  const double k = kappa(params) * r;
  if (params.positive()) {
    return {a * std::cosh(k), a * std::sinh(k) * std::cos(phi), a * std::sinh(k) * std::sin(phi)};
  }
  return {a * std::cos(k), a * std::sin(k) * std::cos(phi), a * std::sin(k) * std::sin(phi)};
}

double quadric_residual(const KerrParams& params, const std::array<double, 3>& x) {
  const double target = params.jv() / 2.0;
  if (params.positive()) return x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - target;
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - target;
}

MetricAtPoint pullback_metric(const KerrParams& params, double r, double phi) {
  auto as_vec = [](const std::array<double, 3>& a) { return Eigen::Vector3d(a[0], a[1], a[2]); };
  const Eigen::Vector3d dr = detail::richardson_derivative(
      [&](double x) { return as_vec(embed(params, x, phi)); }, r, 1e-3, 1e-11, 1.0);
  const Eigen::Vector3d dphi = detail::richardson_derivative(
      [&](double p) { return as_vec(embed(params, r, p)); }, phi, 1e-3, 1e-11, 1.0);
  const Eigen::Vector3d sig = params.positive() ? Eigen::Vector3d(-1, 1, 1) : Eigen::Vector3d(1, 1, 1);
  auto ip = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return (sig.array() * a.array() * b.array()).sum();
  };
  MetricAtPoint m;
  m.params = params;
  m.point = PolarAmplitude(r, phi);
  m.g_rr = ip(dr, dr);
  m.g_phiphi = ip(dphi, dphi);
  m.g_rphi = ip(dr, dphi);
  m.g_phir = m.g_rphi;
  return m;
}

}  // namespace kerrkit
