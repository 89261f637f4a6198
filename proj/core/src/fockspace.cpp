#include "kerrkit/fockspace.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "kerrkit/error.hpp"
#include "chebyshev_expm.hpp"

namespace kerrkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void require_positive(const KerrParams& p, const char* op) {
  if (!p.positive()) throw DomainError(std::string(op) + " requires lambda > 0");
}

void require_negative(const KerrParams& p, const char* op) {
  if (p.positive()) throw DomainError(std::string(op) + " requires lambda < 0");
}

void require_compact_domain(const KerrParams& p, double r) {
  if (!(std::abs(p.scale() * r) < std::numbers::pi / 2.0)) {
    throw DomainError("amplitude outside the compact state domain: sqrt(|lambda|/2) r = " +
                      std::to_string(p.scale() * r) + " >= pi/2");
  }
}

void require_tol(double tol) {
  if (!(tol > 0.0 && tol <= 1e-6)) throw DomainError("tol must lie in (0, 1e-6]");
}

// e^{-i n phi} * magnitude, reducing n*phi before calling polar.
cplx phased(double magnitude, int n, double phi) {
  const double angle = std::remainder(static_cast<double>(n) * phi, kTwoPi);
  return std::polar(magnitude, -angle);
}

}  // namespace

PolarAmplitude::PolarAmplitude(double r, double phi) {
  if (!std::isfinite(r) || r < 0.0) throw DomainError("amplitude modulus must be finite and >= 0");
  if (!std::isfinite(phi)) throw DomainError("amplitude phase must be finite");
  double reduced = std::fmod(phi, kTwoPi);
  if (reduced < 0.0) reduced += kTwoPi;
  if (reduced >= kTwoPi) reduced = 0.0;
  r_ = r;
  phi_ = reduced;
}

std::vector<double> ladder_coefficients(const KerrParams& params, int dim) {
  std::vector<double> a(dim > 1 ? dim - 1 : 0);
  const double s = params.scale();
  const int two_j = params.two_j();
  for (int n = 1; n < dim; ++n) {
    const double inner = params.positive() ? two_j - 1 + n : two_j + 1 - n;
    a[n - 1] = inner > 0.0 ? s * std::sqrt(static_cast<double>(n)) * std::sqrt(inner) : 0.0;
  }
  return a;
}

std::vector<double> k0_diagonal(const KerrParams& params, int dim) {
  std::vector<double> k(dim);
  const double half = std::abs(params.lambda()) / 2.0;
  for (int n = 0; n < dim; ++n) {
    k[n] = params.positive() ? half * (n + params.jv()) : half * (params.jv() - n);
  }
  return k;
}

LadderOps ladder_ops(const KerrParams& params, int dim) {
  if (dim < 2) throw DomainError("ladder_ops requires dim >= 2");
  if (!params.positive() && dim != params.compact_dim()) {
    throw DomainError("negative-lambda ladder operators require dim = 2j+1 = " +
                      std::to_string(params.compact_dim()));
  }
  const auto a = ladder_coefficients(params, dim);
  LadderOps ops;
  ops.a_op = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) ops.a_op(n - 1, n) = a[n - 1];
  ops.a_dag = ops.a_op.adjoint();
  ops.k0 = 0.5 * (ops.a_op * ops.a_dag - ops.a_dag * ops.a_op);
  return ops;
}

double log_fock_weight(const KerrParams& params, int n) {
  const double two_j = params.two_j();
  if (params.positive()) {
    return std::lgamma(two_j + n) - std::lgamma(two_j) - std::lgamma(n + 1.0);
  }
  if (n > params.two_j()) return -INFINITY;
  return std::lgamma(two_j + 1.0) - std::lgamma(two_j - n + 1.0) - std::lgamma(n + 1.0);
}

double truncation_tail(const KerrParams& params, double r, int dim) {
  require_positive(params, "truncation_tail");
  if (dim <= 0) return 1.0;
  const double t = std::tanh(params.scale() * r);
  const double p = t * t;
  if (p == 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(dim), static_cast<double>(params.two_j()), p);
}

int truncation_dim(const KerrParams& params, double r, double tol, int max_dim) {
  require_positive(params, "truncation_dim");
  require_tol(tol);
  if (!(r >= 0.0)) throw DomainError("truncation_dim requires r >= 0");
  if (r == 0.0) return 1;
  // The margin absorbs round-off in the computed norm so that |c|^2 >= 1 - tol holds.
  const double target = 0.9 * tol;
  if (truncation_tail(params, r, max_dim) >= target) {
    throw TruncationOverflow("truncation overflow: tail at dim " + std::to_string(max_dim) +
                             " exceeds tol for r = " + std::to_string(r));
  }
  int lo = 0;
  int hi = 1;
  while (hi < max_dim && truncation_tail(params, r, hi) >= target) {
    lo = hi;
    hi = std::min(2 * hi, max_dim);
  }
  // Invariant: tail(lo) >= target (or lo == 0), tail(hi) < target.
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (truncation_tail(params, r, mid) < target) hi = mid;
    else lo = mid;
  }
  return hi;
}

StateVector kerr_state_pos_fixed(double r, double phi, const KerrParams& params, int dim) {
  require_positive(params, "kerr_state_pos");
  if (dim < 1) throw DomainError("state dimension must be >= 1");
  StateVector out;
  out.amplitudes = Eigen::VectorXcd::Zero(dim);
  const double u = params.scale() * r;
  if (u == 0.0) {
    out.amplitudes(0) = 1.0;
    return out;
  }
  const double t = std::tanh(u);
  const double log_t = std::log(std::abs(t));
  const double log_prefactor = -params.two_j() * log_cosh(u);
  // Accumulated ratios avoid the cancellation between large lgamma values.
  const double two_j_minus_1 = params.two_j() - 1.0;
  double log_mag = log_prefactor;
  for (int n = 0; n < dim; ++n) {
    if (n > 0) log_mag += log_t + 0.5 * std::log1p(two_j_minus_1 / n);
    double mag = std::exp(log_mag);
    if (t < 0.0 && (n % 2 == 1)) mag = -mag;
    out.amplitudes(n) = phased(mag, n, phi);
  }
  out.truncation_tail = truncation_tail(params, std::abs(r), dim);
  return out;
}

StateVector kerr_state_pos(const PolarAmplitude& alpha, const KerrParams& params, double tol,
                           int max_dim) {
  require_positive(params, "kerr_state_pos");
  require_tol(tol);
  const int dim = truncation_dim(params, alpha.r(), tol, max_dim);
  return kerr_state_pos_fixed(alpha.r(), alpha.phi(), params, dim);
}

StateVector kerr_state_neg_signed(double r, double phi, const KerrParams& params) {
  require_negative(params, "kerr_state_neg");
  require_compact_domain(params, r);
  const int dim = params.compact_dim();
  StateVector out;
  out.amplitudes = Eigen::VectorXcd::Zero(dim);
  const double u = params.scale() * r;
  const double c = std::cos(u);
  const double s = std::sin(u);
  const double log_c = std::log(c);
  const double log_s = s != 0.0 ? std::log(std::abs(s)) : -INFINITY;
  const int two_j = params.two_j();
  for (int n = 0; n <= two_j; ++n) {
    double mag;
    if (n == 0) {
      mag = std::exp(two_j * log_c);
    } else if (s == 0.0) {
      mag = 0.0;
    } else {
      mag = std::exp((two_j - n) * log_c + n * log_s + 0.5 * log_fock_weight(params, n));
      if (s < 0.0 && (n % 2 == 1)) mag = -mag;
    }
    out.amplitudes(n) = phased(mag, n, phi);
  }
  return out;
}

StateVector kerr_state_neg(const PolarAmplitude& alpha, const KerrParams& params) {
  return kerr_state_neg_signed(alpha.r(), alpha.phi(), params);
}

StateVector kerr_state(const PolarAmplitude& alpha, const KerrParams& params, double tol) {
  return params.positive() ? kerr_state_pos(alpha, params, tol) : kerr_state_neg(alpha, params);
}

namespace {

int checked_dim(const KerrParams& params, int dim) {
  if (dim < 1) throw DomainError("displacement dimension must be >= 1");
  if (!params.positive() && dim != params.compact_dim()) {
    throw DomainError("negative-lambda displacement requires dim = 2j+1 = " +
                      std::to_string(params.compact_dim()));
  }
  return dim;
}

}  // namespace

namespace {

// Maps exp(-i r T) e0 back to exp(alpha A^dag - alpha^* A)|0>: with
// U = diag(e^{i n phi}) and W = diag(i^n) the generator is U W (-i T) W^dag U^dag.
StateVector gauge_back(const Eigen::VectorXcd& w, double r, double phi, const KerrParams& params) {
  static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  StateVector out;
  const int dim = static_cast<int>(w.size());
  out.amplitudes.resize(dim);
  for (int n = 0; n < dim; ++n) out.amplitudes(n) = kIPow[n % 4] * phased(1.0, n, -phi) * w(n);
  if (params.positive()) out.truncation_tail = truncation_tail(params, r, dim);
  return out;
}

constexpr int kWholeBasisLimit = 1024;

}  // namespace

StateVector displace_vacuum(const PolarAmplitude& alpha, const KerrParams& params, int dim) {
  checked_dim(params, dim);
  const auto a = ladder_coefficients(params, dim);
  if (dim <= kWholeBasisLimit) {
    std::vector<double> offdiag(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) offdiag[k] = alpha.r() * a[k];
    return gauge_back(detail::expm_minus_i_tridiagonal_e0(offdiag, dim), alpha.r(), alpha.phi(), params);
  }
  return gauge_back(detail::expm_path_e0(a, {alpha.r()}, dim).front(), alpha.r(), alpha.phi(), params);
}

std::vector<std::vector<StateVector>> displace_vacuum_path(const std::vector<double>& radii,
                                                           const std::vector<double>& phis,
                                                           const KerrParams& params, int dim) {
  checked_dim(params, dim);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] >= 0.0) || (k > 0 && radii[k] < radii[k - 1])) {
      throw DomainError("displace_vacuum_path needs ascending radii >= 0");
    }
  }
  const auto a = ladder_coefficients(params, dim);
  const auto path = detail::expm_path_e0(a, radii, dim);
  std::vector<std::vector<StateVector>> out(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    for (double phi : phis) out[k].push_back(gauge_back(path[k], radii[k], phi, params));
  }
  return out;
}

StateVector displace_vacuum_dense(const PolarAmplitude& alpha, const KerrParams& params, int dim) {
  checked_dim(params, dim);
  if (dim > 512) throw DomainError("dense displacement limited to dim <= 512");
  StateVector out;
  if (dim == 1) {
    out.amplitudes = Eigen::VectorXcd::Ones(1);
    return out;
  }
  const auto ops = ladder_ops(params, dim);
  const cplx al = alpha.value();
  const Eigen::MatrixXcd gen = al * ops.a_dag - std::conj(al) * ops.a_op;
  const Eigen::MatrixXcd u = gen.exp();
  out.amplitudes = u.col(0);
  if (params.positive()) out.truncation_tail = truncation_tail(params, alpha.r(), dim);
  return out;
}

GaussianFactors gaussian_decomposition(const PolarAmplitude& alpha, const KerrParams& params,
                                       Zeta0Exponent exponent) {
  const double s = params.scale();
  const double u = s * alpha.r();
  const cplx phase = std::polar(1.0, alpha.phi());
  GaussianFactors f;
  if (params.positive()) {
    f.zeta = phase * (std::tanh(u) / s);
    const double power = exponent == Zeta0Exponent::Proof ? -4.0 / params.lambda() : -params.jv();
    f.zeta0 = std::exp(power * log_cosh(u));
  } else {
    require_compact_domain(params, alpha.r());
    f.zeta = phase * (std::tan(u) / s);
    const double power =
        exponent == Zeta0Exponent::Proof ? 4.0 / std::abs(params.lambda()) : params.jv();
    f.zeta0 = std::pow(std::cos(u), power);
  }
  return f;
}

StateVector apply_gaussian_factors(const GaussianFactors& factors, const KerrParams& params,
                                   int dim) {
  checked_dim(params, dim);
  const auto a = ladder_coefficients(params, dim);
  const auto k0 = k0_diagonal(params, dim);

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;

  // exp(c A) v (lowering) or exp(c A^dag) v (raising); each power shifts the
  // support [lo, hi] by one, so a term costs O(support).
  auto apply_exp = [&](Eigen::VectorXcd& vec, cplx c, bool raising) {
    int lo = 0;
    int hi = dim - 1;
    while (lo <= hi && vec(lo) == 0.0) ++lo;
    while (hi >= lo && vec(hi) == 0.0) --hi;
    if (lo > hi) return;
    Eigen::VectorXcd term = vec;
    for (int k = 1; k < dim; ++k) {
      const cplx f = c / static_cast<double>(k);
      if (raising) {
        // (A^dag x)(n) = a[n-1] x(n-1); descending order reads x(n-1) before overwriting it.
        hi = std::min(hi + 1, dim - 1);
        for (int n = hi; n >= lo + 1; --n) term(n) = f * a[n - 1] * term(n - 1);
        term(lo) = 0.0;
        ++lo;
      } else {
        // (A x)(n) = a[n] x(n+1); ascending order reads x(n+1) before overwriting it.
        lo = std::max(lo - 1, 0);
        for (int n = lo; n <= hi - 1; ++n) term(n) = f * a[n] * term(n + 1);
        term(hi) = 0.0;
        --hi;
      }
      if (lo > hi) break;
      double mag = 0.0;
      for (int n = lo; n <= hi; ++n) {
        vec(n) += term(n);
        mag = std::max(mag, std::abs(term(n)));
      }
      if (mag == 0.0) break;
    }
  };

  // A annihilates the vacuum on the truncated basis, so this factor is kept
  // for generality of the formula only.
  apply_exp(v, -std::conj(factors.zeta), false);

  if (!(factors.zeta0 > 0.0)) throw DomainError("zeta0 must be positive");
  const double log_z0 = std::log(factors.zeta0);
  for (int n = 0; n < dim; ++n) v(n) *= std::exp(k0[n] * log_z0);

  apply_exp(v, factors.zeta, true);

  StateVector out;
  out.amplitudes = v;
  return out;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  const int n = std::min(a.dim(), b.dim());
  return a.amplitudes.head(n).dot(b.amplitudes.head(n));
}

}  // namespace kerrkit
