#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kerrkit/spin.hpp"

namespace kerrkit {

using cplx = std::complex<double>;

inline constexpr int kDefaultMaxDim = 4096;
inline constexpr double kDefaultTruncationTol = 1e-12;

// alpha = r e^{i phi} with r >= 0 and phi reduced to [0, 2pi).
class PolarAmplitude {
 public:
  PolarAmplitude(double r, double phi);
  double r() const noexcept { return r_; }
  double phi() const noexcept { return phi_; }
  cplx value() const { return std::polar(r_, phi_); }

 private:
  double r_;
  double phi_;
};

struct StateVector {
  Eigen::VectorXcd amplitudes;
  // Upper bound on the probability mass outside the stored basis.
  double truncation_tail = 0.0;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm_squared() const { return amplitudes.squaredNorm(); }
};

struct LadderOps {
  Eigen::MatrixXcd a_op;
  Eigen::MatrixXcd a_dag;
  Eigen::MatrixXcd k0;
};

// Off-diagonal entries A[n-1, n] for n = 1..dim-1 (index n-1 of the result).
std::vector<double> ladder_coefficients(const KerrParams& params, int dim);

// Diagonal of K0 = [A, A^dag]/2 in the untruncated algebra, n = 0..dim-1.
std::vector<double> k0_diagonal(const KerrParams& params, int dim);

LadderOps ladder_ops(const KerrParams& params, int dim);

// Sum_{n >= dim} |c_n|^2 for the lambda > 0 state of modulus r.
double truncation_tail(const KerrParams& params, double r, int dim);

int truncation_dim(const KerrParams& params, double r, double tol = kDefaultTruncationTol,
                   int max_dim = kDefaultMaxDim);

StateVector kerr_state_pos(const PolarAmplitude& alpha, const KerrParams& params,
                           double tol = kDefaultTruncationTol, int max_dim = kDefaultMaxDim);

// Same closed form evaluated on an explicit basis size. Accepts signed r
// (analytic continuation, used by finite differences straddling r = 0).
StateVector kerr_state_pos_fixed(double r, double phi, const KerrParams& params, int dim);

StateVector kerr_state_neg(const PolarAmplitude& alpha, const KerrParams& params);

// Signed-r variant of kerr_state_neg; requires |scale * r| < pi/2.
StateVector kerr_state_neg_signed(double r, double phi, const KerrParams& params);

// Dispatches on the sign of lambda.
StateVector kerr_state(const PolarAmplitude& alpha, const KerrParams& params,
                       double tol = kDefaultTruncationTol);

// exp(alpha A^dag - alpha^* A)|0> evaluated numerically in a dim-dimensional basis.
StateVector displace_vacuum(const PolarAmplitude& alpha, const KerrParams& params, int dim);

// displace_vacuum at every (radius, phase) pair, out[radius][phase]. Radii
// must ascend; they are integrated along one trajectory in r, and the phase
// enters through the diagonal gauge only.
std::vector<std::vector<StateVector>> displace_vacuum_path(const std::vector<double>& radii,
                                                           const std::vector<double>& phis,
                                                           const KerrParams& params, int dim);

// Dense Pade exponential of the same generator; only for small dims.
StateVector displace_vacuum_dense(const PolarAmplitude& alpha, const KerrParams& params, int dim);

enum class Zeta0Exponent {
  Proof,           // cosh^{-4/lambda}, cos^{4/|lambda|}
  LemmaStatement,  // cosh^{-j}, cos^{j}: negative control only
};

struct GaussianFactors {
  cplx zeta;
  double zeta0 = 1.0;
};

GaussianFactors gaussian_decomposition(const PolarAmplitude& alpha, const KerrParams& params,
                                       Zeta0Exponent exponent = Zeta0Exponent::Proof);

// exp(zeta A^dag) zeta0^{K0} exp(-zeta^* A)|0> in a dim-dimensional basis.
StateVector apply_gaussian_factors(const GaussianFactors& factors, const KerrParams& params,
                                   int dim);

// <a|b>, zero-padding the shorter vector.
cplx inner_product(const StateVector& a, const StateVector& b);

// log of Gamma(2j+n)/(Gamma(2j) n!) or of (2j choose n), depending on the sign.
double log_fock_weight(const KerrParams& params, int n);

}  // namespace kerrkit
