#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "kerrkit/error.hpp"
#include "kerrkit/svm.hpp"
#include "svm_internal.hpp"

namespace kerrkit {

namespace {

// Euclidean projection onto {0 <= a <= c, y^T a = 0} by bisection on the
// multiplier of the equality constraint.
Eigen::VectorXd project(const Eigen::VectorXd& v, const std::vector<double>& y, double c) {
  auto clipped = [&](double nu) {
    Eigen::VectorXd a(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) a(i) = std::clamp(v(i) - nu * y[i], 0.0, c);
    return a;
  };
  auto residual = [&](double nu) {
    const Eigen::VectorXd a = clipped(nu);
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += y[i] * a(i);
    return s;
  };
  // residual(nu) is nonincreasing in nu.
  const double span = v.cwiseAbs().maxCoeff() + c + 1.0;
  double lo = -span, hi = span;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return clipped(0.5 * (lo + hi));
}

struct Refined {
  bool ok = false;
  Eigen::VectorXd alpha;
  double bias = 0.0;
};

// Solves the KKT system on the active set implied by alpha.
Refined refine(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k, const std::vector<double>& y,
               double c, const Eigen::VectorXd& alpha0) {
  const Eigen::Index n = alpha0.size();
  const double eps = 1e-7 * c;
  std::vector<int> state(static_cast<std::size_t>(n));  // -1 lower, 0 free, 1 upper
  for (Eigen::Index i = 0; i < n; ++i) {
    state[i] = alpha0(i) <= eps ? -1 : (alpha0(i) >= c - eps ? 1 : 0);
  }
  for (int round = 0; round < 2 * n + 2; ++round) {
    std::vector<Eigen::Index> free;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == 0) free.push_back(i);
      if (state[i] == 1) alpha(i) = c;
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    double bias = 0.0;
    if (m > 0) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd rhs(m + 1);
      double ysum_bound = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == 1) ysum_bound += y[i] * c;
      }
      for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index i = free[r];
        for (Eigen::Index s = 0; s < m; ++s) a(r, s) = q(i, free[s]);
        a(r, m) = y[i];
        a(m, r) = y[i];
        double bound_term = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
          if (state[t] == 1) bound_term += q(i, t) * c;
        }
        rhs(r) = 1.0 - bound_term;
      }
      rhs(m) = -ysum_bound;
      const Eigen::VectorXd sol = a.fullPivLu().solve(rhs);
      if (!sol.allFinite() || (a * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return {};
      for (Eigen::Index r = 0; r < m; ++r) alpha(free[r]) = sol(r);
      bias = sol(m);
    }
    // Feasibility of the free block, then sign conditions on the bounds.
    bool changed = false;
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index i = free[r];
      if (alpha(i) < 0.0) state[i] = -1, changed = true;
      else if (alpha(i) > c) state[i] = 1, changed = true;
    }
    if (changed) continue;
    Eigen::VectorXd ay(n);
    for (Eigen::Index i = 0; i < n; ++i) ay(i) = alpha(i) * y[i];
    const Eigen::VectorXd g = k * ay;
    if (m == 0) {
      const Eigen::VectorXd grad = q * alpha - Eigen::VectorXd::Ones(n);
      bias = detail::bias_from_gradient(grad, alpha, y, c);
    }
    double worst = 0.0;
    Eigen::Index worst_i = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin = y[i] * (g(i) + bias);
      double v = 0.0;
      if (state[i] == -1) v = 1.0 - margin;  // need margin >= 1
      if (state[i] == 1) v = margin - 1.0;   // need margin <= 1
      if (v > worst) worst = v, worst_i = i;
    }
    if (worst <= 1e-9) return {true, alpha, bias};
    state[worst_i] = 0;
  }
  return {};
}

}  // namespace

SvmModel brute_force_qp(const Eigen::MatrixXd& k, const std::vector<int>& labels, double c) {
  detail::require_symmetric(k);
  const Eigen::Index n = k.rows();
  if (n > 16) throw DomainError("brute_force_qp is limited to n <= 16");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c_reg must be a positive finite number");
  const std::vector<double> y = detail::signed_labels(labels, n);

  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = y[i] * y[j] * k(i, j);
  }
  const double lip =
      std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
               1e-12);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  // FISTA on 1/2 a^T Q a - e^T a.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = x;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd next = project(z - (q * z - ones) / lip, y, c);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - x);
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = next;
    t = t_next;
    if (step < 1e-15 * std::max(1.0, c) && it > 10) break;
  }

  SvmModel model;
  Refined r = refine(q, k, y, c, x);
  if (r.ok) {
    model.bias = r.bias;
    x = r.alpha;
  } else {
    model.status = SolverStatus::NotConverged;
    model.bias = detail::bias_from_gradient(q * x - ones, x, y, c);
  }
  detail::finish_model(model, k, labels, x, y, c);
  return model;
}

}  // namespace kerrkit
