#include "kerrkit/kernels.hpp"

#include <cmath>
#include <numbers>

#include "kerrkit/error.hpp"

namespace kerrkit {

namespace {

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// 1 - e^{i d}, evaluated without cancellation near d = 0.
cplx one_minus_phase(double d) {
  const double h = std::sin(0.5 * d);
  return {2.0 * h * h, -std::sin(d)};
}

template <typename T>
T ipow(T base, int n) {
  T result(1.0);
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

// w^{e} for integer e >= 0; log-space once the exponent is large.
cplx cpow_int(cplx w, int e) {
  if (e < 100) return ipow(w, e);
  if (w == 0.0) return 0.0;
  return std::exp(static_cast<double>(e) * std::log(w));
}

double rpow_int(double w, int e) {
  if (e < 100) return ipow(w, e);
  if (w == 0.0) return 0.0;
  const double mag = std::exp(e * std::log(std::abs(w)));
  return (w < 0.0 && (e % 2 == 1)) ? -mag : mag;
}

void require_positive(const KerrParams& p, const char* op) {
  if (!p.positive()) throw DomainError(std::string(op) + " requires lambda > 0");
}

void require_negative(const KerrParams& p, const char* op) {
  if (p.positive()) throw DomainError(std::string(op) + " requires lambda < 0");
}

cplx overlap_neg_unchecked(double r1, double phi1, double r2, double phi2,
                           const KerrParams& params) {
  const double a = params.scale() * r1;
  const double b = params.scale() * r2;
  const cplx w = std::cos(a - b) - std::sin(a) * std::sin(b) * one_minus_phase(phi1 - phi2);
  return cpow_int(w, params.two_j());
}

}  // namespace

cplx kerr_overlap_pos(double r1, double phi1, double r2, double phi2, const KerrParams& params) {
  require_positive(params, "kerr_overlap_pos");
  const double a = params.scale() * r1;
  const double b = params.scale() * r2;
  const cplx w = std::cosh(a - b) + std::sinh(a) * std::sinh(b) * one_minus_phase(phi1 - phi2);
  return std::exp(-static_cast<double>(params.two_j()) * std::log(w));
}

cplx kerr_overlap_neg(double r1, double phi1, double r2, double phi2, const KerrParams& params) {
  require_negative(params, "kerr_overlap_neg");
  const double lim = std::numbers::pi / 2.0;
  if (!(std::abs(params.scale() * r1) < lim && std::abs(params.scale() * r2) < lim)) {
    throw DomainError("kerr_overlap_neg: modulus outside the compact state domain");
  }
  return overlap_neg_unchecked(r1, phi1, r2, phi2, params);
}

cplx kerr_phase_pos(double phi1, double phi2, double c, const KerrParams& params) {
  require_positive(params, "kerr_phase_pos");
  const double sh = std::sinh(params.scale() * c);
  const cplx w = 1.0 + sh * sh * one_minus_phase(phi1 - phi2);
  return std::exp(-static_cast<double>(params.two_j()) * std::log(w));
}

cplx kerr_phase_neg(double phi1, double phi2, double c, const KerrParams& params) {
  require_negative(params, "kerr_phase_neg");
  const double u = params.scale() * c;
  if (!(u >= 0.0 && u < std::numbers::pi / 2.0)) {
    throw DomainError("kerr_phase_neg: sqrt(|lambda|/2) c must lie in [0, pi/2)");
  }
  const double sn = std::sin(u);
  const cplx w = 1.0 - sn * sn * one_minus_phase(phi1 - phi2);
  return cpow_int(w, params.two_j());
}

double kerr_amp_pos(double x, double y, const KerrParams& params) {
  require_positive(params, "kerr_amp_pos");
  return std::exp(-params.two_j() * log_cosh(params.scale() * std::abs(x - y)));
}

double kerr_amp_neg(double x, double y, const KerrParams& params) {
  require_negative(params, "kerr_amp_neg");
  return rpow_int(std::cos(params.scale() * std::abs(x - y)), params.two_j());
}

double rbf(double x, double y, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("rbf requires sigma > 0");
  const double d = x - y;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

double ess(double x, double y, double l, double p) {
  if (!(l > 0.0 && p > 0.0)) throw DomainError("ess requires l > 0 and p > 0");
  const double s = std::sin(std::numbers::pi * std::abs(x - y) / p);
  return std::exp(-(2.0 / (l * l)) * s * s);
}

double qec(double x, double y, double l, const KerrParams& params, QecForm form) {
  require_negative(params, "qec");
  if (!(l > 0.0)) throw DomainError("qec requires l > 0");
  const double c = rpow_int(std::cos(params.scale() * std::abs(x - y)), params.two_j());
  const double arg = form == QecForm::Printed ? c : 1.0 - c;
  return std::exp(-(2.0 / (l * l)) * arg);
}

cplx squeezed_overlap(double r1, double phi1, double r2, double phi2) {
  const cplx w = std::cosh(r1 - r2) + std::sinh(r1) * std::sinh(r2) * one_minus_phase(phi1 - phi2);
  return 1.0 / std::sqrt(w);
}

cplx squeezed_phase(double phi1, double phi2, double c) {
  if (!(c > 0.0)) throw DomainError("squeezed_phase requires c > 0");
  const double sh = std::sinh(c);
  return 1.0 / std::sqrt(1.0 + sh * sh * one_minus_phase(phi1 - phi2));
}

double squeezed_amp(double x, double y) {
  return std::exp(-0.5 * log_cosh(x - y));
}

cplx feature_kernel_1d(const KernelSpec& spec, double x, double y, double dx, double dy) {
  const KernelParams& p = spec.params;
  const bool noisy = dx != 0.0 || dy != 0.0;
  switch (spec.family) {
    case KernelFamily::KerrPhasePos: {
      const KerrParams kp(*p.lambda, *p.j);
      if (!noisy) return kerr_phase_pos(x, y, *p.c, kp);
      return kerr_overlap_pos(*p.c + dx, x, *p.c + dy, y, kp);
    }
    case KernelFamily::KerrPhaseNeg: {
      const KerrParams kp(*p.lambda, *p.j);
      if (!noisy) return kerr_phase_neg(x, y, *p.c, kp);
      return overlap_neg_unchecked(*p.c + dx, x, *p.c + dy, y, kp);
    }
    case KernelFamily::KerrAmpPos:
      return kerr_amp_pos(x + dx, y + dy, KerrParams(*p.lambda, *p.j));
    case KernelFamily::KerrAmpNeg:
      return kerr_amp_neg(x + dx, y + dy, KerrParams(*p.lambda, *p.j));
    case KernelFamily::SqueezedPhase:
      if (!noisy) return squeezed_phase(x, y, *p.c);
      return squeezed_overlap(*p.c + dx, x, *p.c + dy, y);
    case KernelFamily::SqueezedAmp:
      return squeezed_amp(x + dx, y + dy);
    case KernelFamily::RBF:
      return rbf(x + dx, y + dy, *p.sigma);
    case KernelFamily::ESS:
      return ess(x + dx, y + dy, *p.l, *p.p);
    case KernelFamily::QEC: {
      double v = qec(x + dx, y + dy, *p.l, KerrParams(*p.lambda, *p.j), p.qec_form);
      if (p.normalize_diagonal) v /= qec(0.0, 0.0, *p.l, KerrParams(*p.lambda, *p.j), p.qec_form);
      return v;
    }
  }
  throw DomainError("unknown kernel family");
}

namespace {

double realify(const KernelSpec& spec, cplx k) {
  if (!is_complex_family(spec.family)) return k.real();
  return spec.realify == Realify::SquaredModulus ? std::norm(k) : k.real();
}

template <typename OffsetFn>
double compose(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
               const Eigen::Ref<const Eigen::RowVectorXd>& y, OffsetFn offsets) {
  if (x.size() != y.size()) {
    throw DomainError("feature dimension mismatch: " + std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()));
  }
  const Eigen::Index d = x.size();
  if (spec.compose == Compose::SumThenRealify) {
    cplx sum = 0.0;
    for (Eigen::Index f = 0; f < d; ++f) {
      const auto [dx, dy] = offsets(f);
      sum += feature_kernel_1d(spec, x(f), y(f), dx, dy);
    }
    return realify(spec, sum / static_cast<double>(d));
  }
  // Product in log-magnitude / phase form so long products do not underflow
  // to zero before the overall magnitude does.
  double log_mag = 0.0;
  double phase = 0.0;
  bool negative = false;
  const bool complex_family = is_complex_family(spec.family);
  for (Eigen::Index f = 0; f < d; ++f) {
    const auto [dx, dy] = offsets(f);
    const cplx k = feature_kernel_1d(spec, x(f), y(f), dx, dy);
    if (k == 0.0) return 0.0;
    if (complex_family) {
      log_mag += std::log(std::abs(k));
      phase += std::arg(k);
    } else {
      log_mag += std::log(std::abs(k.real()));
      if (k.real() < 0.0) negative = !negative;
    }
  }
  if (!complex_family) {
    const double v = std::exp(log_mag);
    return negative ? -v : v;
  }
  if (spec.realify == Realify::SquaredModulus) return std::exp(2.0 * log_mag);
  return std::exp(log_mag) * std::cos(phase);
}

}  // namespace

double feature_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                      const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  return compose(spec, x, y, [](Eigen::Index) { return std::pair<double, double>{0.0, 0.0}; });
}

double feature_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                      const Eigen::Ref<const Eigen::RowVectorXd>& y,
                      const Eigen::Ref<const Eigen::RowVectorXd>& dx,
                      const Eigen::Ref<const Eigen::RowVectorXd>& dy) {
  if (dx.size() != x.size() || dy.size() != y.size()) {
    throw DomainError("encoding offsets must match the feature dimension");
  }
  return compose(spec, x, y,
                 [&](Eigen::Index f) { return std::pair<double, double>{dx(f), dy(f)}; });
}

}  // namespace kerrkit
