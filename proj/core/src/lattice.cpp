#include "kerrkit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "kerrkit/error.hpp"

namespace kerrkit {

namespace {

constexpr double kLeakageLimit = 1e-10;
constexpr double kGuideTol = 1e-12;

double max_z(const std::vector<double>& z) { return z.empty() ? 0.0 : *std::max_element(z.begin(), z.end()); }

void check_grid(const std::vector<double>& z) {
  if (z.empty()) throw DomainError("z_grid must not be empty");
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!(z[k] >= 0.0) || !std::isfinite(z[k])) throw DomainError("z_grid values must be finite and >= 0");
    if (k > 0 && !(z[k] > z[k - 1])) throw DomainError("z_grid must be strictly increasing");
  }
}

}  // namespace

int default_guide_count(const KerrParams& params, const std::vector<double>& z_grid) {
  if (!params.positive()) return params.compact_dim();
  const int dim = truncation_dim(params, max_z(z_grid), kGuideTol, 1 << 16);
  return std::max(2, static_cast<int>(std::ceil(1.5 * dim)));
}

LatticeConfig make_lattice_config(const KerrParams& params, std::vector<double> z_grid) {
  LatticeConfig c;
  c.params = params;
  c.z_grid = std::move(z_grid);
  c.n_guides = default_guide_count(params, c.z_grid);
  c.c1 = ladder_coefficients(params, 2)[0];
  return c;
}

void validate(const LatticeConfig& c) {
  check_grid(c.z_grid);
  if (!(c.c1 > 0.0) || !(c.kappa > 0.0)) throw DomainError("c1 and kappa must be > 0");
  if (!std::isfinite(c.d0)) throw DomainError("d0 must be finite");
  if (c.n_guides < 2) throw DomainError("a lattice needs at least two guides");
  if (!c.params.positive()) {
    if (c.n_guides != c.params.compact_dim()) {
      throw DomainError("negative-lambda lattice needs n_guides = 2j+1 = " +
                        std::to_string(c.params.compact_dim()));
    }
  } else {
    const int need = truncation_dim(c.params, max_z(c.z_grid), kGuideTol, 1 << 16);
    if (c.n_guides < need) {
      throw TruncationOverflow("lattice truncation overflow: positive-lambda lattice needs n_guides >= " +
                               std::to_string(need) + " for z up to " + std::to_string(max_z(c.z_grid)) +
                               ", otherwise intensity leaks past the last guide");
    }
  }
}

std::vector<double> coupling_coeffs(const LatticeConfig& c) {
  if (c.n_guides < 2) throw DomainError("a lattice needs at least two guides");
  return ladder_coefficients(c.params, c.n_guides);
}

std::vector<double> guide_spacings(const LatticeConfig& c) {
  if (!(c.c1 > 0.0) || !(c.kappa > 0.0)) throw DomainError("c1 and kappa must be > 0");
  const auto cn = coupling_coeffs(c);
  std::vector<double> d(cn.size());
  for (std::size_t k = 0; k < cn.size(); ++k) {
    if (!(cn[k] > 0.0)) throw DomainError("nonpositive coupling at guide " + std::to_string(k + 1));
    d[k] = c.d0 - c.kappa * std::log(cn[k] / c.c1);
  }
  return d;
}

namespace {

// Off-diagonal of A + A^dag taken from the ladder operator matrix itself.
std::vector<double> hamiltonian_offdiag(const LatticeConfig& c) {
  const LadderOps ops = ladder_ops(c.params, c.n_guides);
  const auto cn = coupling_coeffs(c);
  std::vector<double> off(static_cast<std::size_t>(c.n_guides - 1));
  for (int n = 1; n < c.n_guides; ++n) {
    const cplx h = ops.a_op(n - 1, n) + ops.a_dag(n - 1, n);
    off[n - 1] = h.real();
    if (std::abs(h.imag()) > 1e-14 || std::abs(h.real() - cn[n - 1]) > 1e-12 * std::max(1.0, cn[n - 1])) {
      throw Error("coupling coefficients disagree with the ladder operators at n = " + std::to_string(n));
    }
  }
  return off;
}

void check_leakage(const LatticeConfig& c, const Eigen::MatrixXcd& e) {
  if (!c.params.positive()) return;
  for (Eigen::Index k = 0; k < e.cols(); ++k) {
    const double last = std::norm(e(e.rows() - 1, k));
    if (last > kLeakageLimit) {
      throw TruncationOverflow("lattice truncation overflow: last-guide intensity " + std::to_string(last) +
                               " at z = " + std::to_string(c.z_grid[k]) + " exceeds 1e-10; add guides");
    }
  }
}

}  // namespace

Eigen::MatrixXcd propagate(const LatticeConfig& c) {
  validate(c);
  const auto off = hamiltonian_offdiag(c);
  const Eigen::VectorXd diag = Eigen::VectorXd::Zero(c.n_guides);
  const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(off.data(), static_cast<Eigen::Index>(off.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw ConvergenceError("lattice eigensolver failed");
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd& w = eig.eigenvalues();
  const Eigen::VectorXd v0 = v.row(0).transpose();

  Eigen::MatrixXcd e(c.n_guides, static_cast<Eigen::Index>(c.z_grid.size()));
  for (std::size_t k = 0; k < c.z_grid.size(); ++k) {
    const double z = c.z_grid[k];
    Eigen::VectorXcd coef(w.size());
    for (Eigen::Index m = 0; m < w.size(); ++m) coef(m) = std::polar(v0(m), w(m) * z);
    e.col(static_cast<Eigen::Index>(k)) = v.cast<cplx>() * coef;
  }
  check_leakage(c, e);
  return e;
}

Eigen::MatrixXcd propagate_ode(const LatticeConfig& c, double abs_tol, double rel_tol) {
  validate(c);
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  const auto off = hamiltonian_offdiag(c);
  const std::size_t n = static_cast<std::size_t>(c.n_guides);
  // dE/dz = i (C_n E_{n-1} + C_{n+1} E_{n+1}).
  auto rhs = [&](const State& e, State& de, double) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx s = 0.0;
      if (k > 0) s += off[k - 1] * e[k - 1];
      if (k + 1 < n) s += off[k] * e[k + 1];
      de[k] = cplx(0.0, 1.0) * s;
    }
  };
  State state(n, 0.0);
  state[0] = 1.0;
  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  Eigen::MatrixXcd e(c.n_guides, static_cast<Eigen::Index>(c.z_grid.size()));
  double z = 0.0;
  const double dz0 = 1e-3;
  for (std::size_t k = 0; k < c.z_grid.size(); ++k) {
    if (c.z_grid[k] > z) {
      odeint::integrate_adaptive(stepper, rhs, state, z, c.z_grid[k], dz0);
      z = c.z_grid[k];
    }
    for (std::size_t m = 0; m < n; ++m) e(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = state[m];
  }
  check_leakage(c, e);
  return e;
}

Eigen::MatrixXd intensity_map(const LatticeConfig& c) { return propagate(c).cwiseAbs2(); }

Eigen::VectorXd closed_form_intensities(const KerrParams& params, double z, int n_guides) {
  if (n_guides < 1) throw DomainError("n_guides must be >= 1");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_guides);
  const double u = params.scale() * z;
  const int two_j = params.two_j();
  if (params.positive()) {
    const double lt = std::log(std::tanh(u));
    const double lc = -std::log(std::cosh(u));
    for (int n = 0; n < n_guides; ++n) {
      if (n > 0 && u == 0.0) break;
      out(n) = std::exp(2.0 * two_j * lc + (n > 0 ? 2.0 * n * lt : 0.0) + log_fock_weight(params, n));
    }
    return out;
  }
  const double cs = std::abs(std::cos(u));
  const double sn = std::abs(std::sin(u));
  for (int n = 0; n < std::min(n_guides, two_j + 1); ++n) {
    const double a = two_j - n;
    if ((a > 0 && cs == 0.0) || (n > 0 && sn == 0.0)) continue;
    const double log_v = (a > 0 ? 2.0 * a * std::log(cs) : 0.0) + (n > 0 ? 2.0 * n * std::log(sn) : 0.0) +
                         log_fock_weight(params, n);
    out(n) = std::exp(log_v);
  }
  return out;
}

std::string intensity_csv(const LatticeConfig& c, const Eigen::MatrixXd& intensities) {
  if (intensities.cols() != static_cast<Eigen::Index>(c.z_grid.size())) {
    throw DomainError("intensity map does not match z_grid");
  }
  std::ostringstream out;
  out << 'z';
  for (Eigen::Index n = 0; n < intensities.rows(); ++n) out << ",g" << n;
  out << '\n';
  char buf[32];
  for (Eigen::Index k = 0; k < intensities.cols(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", c.z_grid[static_cast<std::size_t>(k)]);
    out << buf;
    for (Eigen::Index n = 0; n < intensities.rows(); ++n) {
      std::snprintf(buf, sizeof buf, "%.17g", intensities(n, k));
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const LatticeConfig& c) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["lambda"] = c.params.lambda();
  j["j"] = c.params.jv();
  j["n_guides"] = c.n_guides;
  j["c1"] = c.c1;
  j["d0"] = c.d0;
  j["kappa"] = c.kappa;
  j["z_grid"] = c.z_grid;
  return j.dump(2);
}

LatticeConfig lattice_preset(const std::string& name, std::vector<double> z_grid) {
  double lambda = 0.0;
  double z_end = 0.0;
  if (name == "fig7-pos") {
    lambda = 2.0;
    z_end = 1.0;
  } else if (name == "fig7-neg") {
    lambda = -2.0;
    z_end = 2.0 * std::numbers::pi / std::sqrt(2.0 * std::abs(lambda));  // one period
  } else {
    throw DomainError("unknown lattice preset '" + name + "' (fig7-pos, fig7-neg)");
  }
  if (z_grid.empty()) {
    const int steps = 100;
    for (int k = 0; k <= steps; ++k) z_grid.push_back(z_end * k / steps);
  }
  return make_lattice_config(KerrParams(lambda, HalfInteger::from_twice(40)), std::move(z_grid));
}

}  // namespace kerrkit
