#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <Eigen/Eigenvalues>

#include "kerrkit/error.hpp"
#include "kerrkit/geometry.hpp"
#include "kerrkit/kernels.hpp"

namespace kerrkit {

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes; the first
  // eigenvector components give the weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Golub-Welsch eigensolver failed");
  nodes.resize(n);
  weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int k = 0; k < n; ++k) {
    const double v = solver.eigenvectors()(0, k);
    nodes[k] = mid + half * solver.eigenvalues()(k);
    weights[k] = half * 2.0 * v * v;
  }
}

namespace {

void validate_config(const QuadratureConfig& q) {
  if (q.radial_nodes < 8 || q.angular_nodes < 8) {
    throw DomainError("quadrature needs at least 8 radial and 8 angular nodes");
  }
  if (q.projector_count < 1) throw DomainError("projector_count must be >= 1");
  if (q.r_max && !(*q.r_max > 0.0)) throw DomainError("r_max must be > 0");
}

void require_supported(const KerrParams& params) {
  if (params.positive() && params.two_j() < 2) {
    throw DomainError(
        "resolution of identity for lambda > 0 needs j >= 1 (measure prefactor 2j-1 vanishes at "
        "j = 1/2)");
  }
}

// Radial variable t = tanh^2(s r) (lambda > 0) or sin^2(s r) (lambda < 0).
// The invariant measure is rho(t) dt dphi / (2 pi).
struct RadialMap {
  const KerrParams& params;

  double t_max(const std::optional<double>& r_max) const {
    if (!r_max) return 1.0;
    const double u = params.scale() * *r_max;
    if (params.positive()) return std::pow(std::tanh(u), 2);
    if (u >= std::numbers::pi / 2.0) return 1.0;
    return std::pow(std::sin(u), 2);
  }
  double radius(double t) const {
    const double st = std::sqrt(t);
    return (params.positive() ? std::atanh(st) : std::asin(st)) / params.scale();
  }
  double density(double t) const {
    if (params.positive()) return (params.two_j() - 1.0) / ((1.0 - t) * (1.0 - t));
    return params.two_j() + 1.0;
  }
};

QuadratureConfig doubled(const QuadratureConfig& q) {
  QuadratureConfig d = q;
  d.radial_nodes *= 2;
  d.angular_nodes *= 2;
  return d;
}

// Residuals below this are round-off; their relative change under doubling is noise.
constexpr double kResidualFloor = 1e-10;

template <typename F>
double checked(F&& residual_of, const QuadratureConfig& q, const char* what) {
  const double base = residual_of(q);
  const double fine = residual_of(doubled(q));
  const double top = std::max(base, fine);
  if (top > kResidualFloor && std::abs(base - fine) > 0.1 * top) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " under-resolved: residual %.3e changes to %.3e when node counts double", base,
                  fine);
    throw QuadratureError(std::string(what) + buf);
  }
  return base;
}

}  // namespace

Eigen::MatrixXcd resolution_block(const KerrParams& params, const QuadratureConfig& q) {
  validate_config(q);
  require_supported(params);
  int p = q.projector_count;
  if (!params.positive()) p = std::min(p, params.compact_dim());
  const RadialMap map{params};
  const double t_hi = map.t_max(q.r_max);
  std::vector<double> tn, tw;
  gauss_legendre(q.radial_nodes, 0.0, t_hi, tn, tw);

  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(p, p);
  const int m = q.angular_nodes;
  for (std::size_t k = 0; k < tn.size(); ++k) {
    const double r = map.radius(tn[k]);
    const double w = tw[k] * map.density(tn[k]) / m;
    for (int l = 0; l < m; ++l) {
      const double phi = 2.0 * std::numbers::pi * l / m;
      const Eigen::VectorXcd c = params.positive()
                                     ? kerr_state_pos_fixed(r, phi, params, p).amplitudes
                                     : kerr_state_neg_signed(r, phi, params).amplitudes.head(p).eval();
      block.noalias() += w * (c * c.adjoint());
    }
  }
  if (q.r_max && q.tail_correction && t_hi < 1.0) {
    for (int n = 0; n < p; ++n) {
      const double b = params.positive() ? params.two_j() - 1.0 : params.two_j() - n + 1.0;
      block(n, n) += boost::math::ibetac(n + 1.0, b, t_hi);
    }
  }
  return block;
}

double resolution_residual(const KerrParams& params, const QuadratureConfig& q) {
  auto residual = [&](const QuadratureConfig& cfg) {
    const Eigen::MatrixXcd b = resolution_block(params, cfg);
    return (b - Eigen::MatrixXcd::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff();
  };
  return checked(residual, q, "resolution of identity");
}

cplx reproducing_integral(const PolarAmplitude& a1, const PolarAmplitude& a2,
                          const KerrParams& params, const QuadratureConfig& q) {
  validate_config(q);
  require_supported(params);
  auto kernel = [&](double r1, double p1, double r2, double p2) {
    return params.positive() ? kerr_overlap_pos(r1, p1, r2, p2, params)
                             : kerr_overlap_neg(r1, p1, r2, p2, params);
  };
  const RadialMap map{params};
  std::vector<double> tn, tw;
  gauss_legendre(q.radial_nodes, 0.0, map.t_max(q.r_max), tn, tw);
  cplx total = 0.0;
  const int m = q.angular_nodes;
  for (std::size_t k = 0; k < tn.size(); ++k) {
    const double r = map.radius(tn[k]);
    const double w = tw[k] * map.density(tn[k]) / m;
    cplx ring = 0.0;
    for (int l = 0; l < m; ++l) {
      const double phi = 2.0 * std::numbers::pi * l / m;
      ring += kernel(a1.r(), a1.phi(), r, phi) * kernel(r, phi, a2.r(), a2.phi());
    }
    total += w * ring;
  }
  return total;
}

double reproducing_residual(const PolarAmplitude& a1, const PolarAmplitude& a2,
                            const KerrParams& params, const QuadratureConfig& q) {
  const cplx direct = params.positive() ? kerr_overlap_pos(a1.r(), a1.phi(), a2.r(), a2.phi(), params)
                                        : kerr_overlap_neg(a1.r(), a1.phi(), a2.r(), a2.phi(), params);
  auto residual = [&](const QuadratureConfig& cfg) {
    return std::abs(direct - reproducing_integral(a1, a2, params, cfg));
  };
  return checked(residual, q, "reproducing property");
}

}  // namespace kerrkit
