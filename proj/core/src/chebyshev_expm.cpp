#include "chebyshev_expm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace kerrkit::detail {

std::vector<double> bessel_j_sequence(double x) {
  if (x == 0.0) return {1.0};
  // Miller's backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised by
  // J_0 + 2 sum_k J_{2k} = 1. The start index sits well past the decay point.
  const int keep = static_cast<int>(std::ceil(x + 12.0 * std::cbrt(x) + 40.0));
  const int start = keep + 20 + static_cast<int>(std::sqrt(40.0 * keep));
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (int m = k - 1; m <= start; ++m) j[m] *= 1e-250;
      norm *= 1e-250;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j[k - 1];
  }
  norm += j[0];
  for (auto& v : j) v /= norm;
  int last = keep;
  while (last > 0 && last > x && std::abs(j[last]) < 1e-18) --last;
  j.resize(std::min<std::size_t>(j.size(), static_cast<std::size_t>(last + 2)));
  return j;
}

Eigen::VectorXcd expm_minus_i_tridiagonal_e0(const std::vector<double>& offdiag, int dim) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  out(0) = 1.0;
  double rho = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double left = n > 0 ? std::abs(offdiag[n - 1]) : 0.0;
    const double right = n + 1 < dim ? std::abs(offdiag[n]) : 0.0;
    rho = std::max(rho, left + right);
  }
  if (rho == 0.0) return out;

  const std::vector<double> jk = bessel_j_sequence(rho);
  std::vector<double> x(offdiag.size());
  for (std::size_t k = 0; k < offdiag.size(); ++k) x[k] = offdiag[k] / rho;

  // Chebyshev vectors T_k(T/rho) e_0 are real and supported on n <= k.
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
  prev(0) = 1.0;
  if (dim > 1) cur(1) = x[0];
  Eigen::VectorXd re = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd im = Eigen::VectorXd::Zero(dim);
  re(0) = jk[0];

  const int kmax = static_cast<int>(jk.size()) - 1;
  for (int k = 1; k <= kmax; ++k) {
    const int support = std::min(k, dim - 1);
    // coefficient 2 (-i)^k J_k
    const double c = 2.0 * jk[k];
    switch (k % 4) {
      case 0: re.head(support + 1) += c * cur.head(support + 1); break;
      case 1: im.head(support + 1) -= c * cur.head(support + 1); break;
      case 2: re.head(support + 1) -= c * cur.head(support + 1); break;
      default: im.head(support + 1) += c * cur.head(support + 1); break;
    }
    if (k == kmax) break;
    const int nsup = std::min(k + 1, dim - 1);
    for (int n = 0; n <= nsup; ++n) {
      double tv = 0.0;
      if (n > 0) tv += x[n - 1] * cur(n - 1);
      if (n + 1 < dim) tv += x[n] * cur(n + 1);
      next(n) = 2.0 * tv - prev(n);
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  for (int n = 0; n < dim; ++n) out(n) = std::complex<double>(re(n), im(n));
  return out;
}

namespace {

// exp(-i tau T_s) v on the leading s x s block of T; real and imaginary
// parts are propagated as separate real vectors.
void chebyshev_step(const std::vector<double>& offdiag, double tau, int s, Eigen::VectorXcd& v) {
  double rho = 0.0;
  for (int n = 0; n < s; ++n) {
    const double left = n > 0 ? std::abs(offdiag[n - 1]) : 0.0;
    const double right = n + 1 < s ? std::abs(offdiag[n]) : 0.0;
    rho = std::max(rho, tau * (left + right));
  }
  if (rho == 0.0) return;
  const std::vector<double> jk = bessel_j_sequence(rho);
  const std::ptrdiff_t n = s;
  // Zero padding at both ends: x[-1] = x[n-1] = 0 and planes[-1] = planes[n] = 0.
  const std::size_t stride = static_cast<std::size_t>(n) + 2;
  std::vector<double> buf(7 * stride, 0.0);
  double* x = buf.data() + 1;
  for (std::ptrdiff_t k = 0; k + 1 < n; ++k) x[k] = tau * offdiag[static_cast<std::size_t>(k)] / rho;
  double* pr = buf.data() + stride + 1;
  double* pi = buf.data() + 2 * stride + 1;
  double* cr = buf.data() + 3 * stride + 1;
  double* ci = buf.data() + 4 * stride + 1;
  double* nr = buf.data() + 5 * stride + 1;
  double* ni = buf.data() + 6 * stride + 1;
  std::vector<double> acc(2 * static_cast<std::size_t>(n));
  double* ar = acc.data();
  double* ai = acc.data() + n;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    pr[i] = v(i).real();
    pi[i] = v(i).imag();
    ar[i] = jk[0] * pr[i];
    ai[i] = jk[0] * pi[i];
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cr[i] = x[i - 1] * pr[i - 1] + x[i] * pr[i + 1];
    ci[i] = x[i - 1] * pi[i - 1] + x[i] * pi[i + 1];
  }
  // (-i)^k = p + i q cycles through 1, -i, -1, i.
  static const double kP[4] = {1.0, 0.0, -1.0, 0.0};
  static const double kQ[4] = {0.0, -1.0, 0.0, 1.0};
  const int kmax = static_cast<int>(jk.size()) - 1;
  for (int k = 1; k <= kmax; ++k) {
    const double p = 2.0 * jk[static_cast<std::size_t>(k)] * kP[k % 4];
    const double q = 2.0 * jk[static_cast<std::size_t>(k)] * kQ[k % 4];
    if (k == kmax) {
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        ar[i] += p * cr[i] - q * ci[i];
        ai[i] += p * ci[i] + q * cr[i];
      }
      break;
    }
    // Accumulate the T_k term and form T_{k+1} = 2 T T_k - T_{k-1} in one pass.
    double* __restrict o_r = nr;
    double* __restrict o_i = ni;
    const double* __restrict c_r = cr;
    const double* __restrict c_i = ci;
    const double* __restrict p_r = pr;
    const double* __restrict p_i = pi;
    const double* __restrict xx = x;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ar[i] += p * c_r[i] - q * c_i[i];
      ai[i] += p * c_i[i] + q * c_r[i];
      o_r[i] = 2.0 * (xx[i - 1] * c_r[i - 1] + xx[i] * c_r[i + 1]) - p_r[i];
      o_i[i] = 2.0 * (xx[i - 1] * c_i[i - 1] + xx[i] * c_i[i + 1]) - p_i[i];
    }
    std::swap(pr, cr);
    std::swap(pi, ci);
    std::swap(cr, nr);
    std::swap(ci, ni);
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) v(i) = std::complex<double>(ar[i], ai[i]);
}

int support_of(const Eigen::VectorXcd& v, double eps) {
  int last = static_cast<int>(v.size()) - 1;
  while (last > 0 && std::abs(v(last)) < eps) --last;
  return last + 1;
}

}  // namespace

std::vector<Eigen::VectorXcd> expm_path_e0(const std::vector<double>& offdiag, const std::vector<double>& times,
                                           int dim) {
  constexpr double kDrop = 1e-20;
  constexpr double kEdge = 1e-18;
  std::vector<Eigen::VectorXcd> out;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;
  double t = 0.0;
  for (double target : times) {
    while (t < target) {
      const int support = support_of(v, kDrop);
      for (int n = support; n < dim; ++n) v(n) = 0.0;
      int s = std::min(dim, support + support / 4 + 64);
      for (;;) {
        // Slice length keeps the Chebyshev degree near s/10 (at least 40), so
        // the support grows by roughly 10% per slice.
        double amax = 0.0;
        for (int k = 0; k + 1 < s; ++k) amax = std::max(amax, std::abs(offdiag[k]));
        const double rho_target = std::clamp(0.1 * s, 40.0, 4000.0);
        const double tau = amax > 0.0 ? std::min(target - t, rho_target / (2.0 * amax)) : target - t;
        Eigen::VectorXcd trial = v;
        chebyshev_step(offdiag, tau, s, trial);
        bool leaked = false;
        if (s < dim) {
          for (int n = s - std::max(1, s / 10); n < s; ++n) leaked = leaked || std::abs(trial(n)) > kEdge;
        }
        if (!leaked) {
          v = std::move(trial);
          t += tau;
          break;
        }
        s = std::min(dim, 2 * s);
      }
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace kerrkit::detail
