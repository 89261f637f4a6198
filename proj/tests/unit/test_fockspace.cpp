#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kerrkit/error.hpp"
#include "kerrkit/fockspace.hpp"

namespace kerrkit {
namespace {

using std::numbers::pi;

// Independent closed forms: c_n = N sqrt(w_n) t^n e^{-i n phi}.
cplx closed_pos(double lambda, double j, double r, double phi, int n) {
  const double s = std::sqrt(lambda / 2.0);
  const double t = std::tanh(s * r);
  const double w = std::exp(std::lgamma(2 * j + n) - std::lgamma(2 * j) - std::lgamma(n + 1.0));
  return std::pow(std::cosh(s * r), -2 * j) * std::sqrt(w) * std::pow(t, n) * std::polar(1.0, -n * phi);
}

cplx closed_neg(double lambda, double j, double r, double phi, int n) {
  const double s = std::sqrt(-lambda / 2.0);
  const double w = std::exp(std::lgamma(2 * j + 1) - std::lgamma(2 * j - n + 1) - std::lgamma(n + 1.0));
  return std::pow(std::cos(s * r), 2 * j - n) * std::pow(std::sin(s * r), n) * std::sqrt(w) *
         std::polar(1.0, -n * phi);
}

TEST(HalfInteger, AcceptsHalfIntegers) {
  EXPECT_EQ(HalfInteger::from_double(0.5).twice(), 1);
  EXPECT_EQ(HalfInteger::from_double(5.0).twice(), 10);
  EXPECT_EQ(HalfInteger::from_twice(3).to_string(), "3/2");
  EXPECT_THROW(HalfInteger::from_double(0.3), DomainError);
  EXPECT_THROW(HalfInteger::from_double(0.0), DomainError);
  EXPECT_THROW(HalfInteger::from_twice(-1), DomainError);
}

TEST(KerrParams, RejectsZeroLambda) {
  EXPECT_THROW(KerrParams(0.0, 1.0), DomainError);
  EXPECT_DOUBLE_EQ(KerrParams(-4.0, 1.0).scale(), std::sqrt(2.0));
}

TEST(PolarAmplitude, ReducesPhase) {
  EXPECT_NEAR(PolarAmplitude(1.0, -pi / 2).phi(), 3 * pi / 2, 1e-15);
  EXPECT_NEAR(PolarAmplitude(1.0, 5 * pi).phi(), pi, 1e-12);
  EXPECT_THROW(PolarAmplitude(-1.0, 0.0), DomainError);
  EXPECT_THROW(PolarAmplitude(1.0, NAN), DomainError);
}

TEST(Ladder, PositiveSubDiagonalIsN) {
  const auto a = ladder_coefficients(KerrParams(2.0, 0.5), 4);
  ASSERT_EQ(a.size(), 3u);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(a[n - 1], n, 1e-15);
}

TEST(Ladder, NegativeQubitHasOneEntry) {
  const auto ops = ladder_ops(KerrParams(-2.0, 0.5), 2);
  EXPECT_NEAR(std::abs(ops.a_op(0, 1)), 1.0, 1e-15);
  EXPECT_EQ(ops.a_op(1, 0), cplx(0.0));
  EXPECT_EQ(ops.a_op(0, 0), cplx(0.0));
}

TEST(Ladder, VacuumK0Eigenvalue) {
  for (double lambda : {-4.0, -0.5, 0.5, 2.0}) {
    for (int tj : {1, 2, 5}) {
      const KerrParams p(lambda, HalfInteger::from_twice(tj));
      const int dim = p.positive() ? 12 : p.compact_dim();
      const auto ops = ladder_ops(p, dim);
      EXPECT_NEAR(ops.k0(0, 0).real(), std::abs(lambda) * p.jv() / 2.0, 1e-12);
      EXPECT_NEAR(k0_diagonal(p, dim)[0], std::abs(lambda) * p.jv() / 2.0, 1e-15);
    }
  }
}

TEST(Ladder, CommutatorWithK0) {
  // [K0, A] = -(lambda/2) A away from the truncation edge.
  for (double lambda : {-2.0, 0.5, 4.0}) {
    const KerrParams p(lambda, 2.0);
    const int dim = p.positive() ? 10 : p.compact_dim();
    const auto ops = ladder_ops(p, dim);
    const int m = p.positive() ? dim - 1 : dim;
    const Eigen::MatrixXcd k0 = ops.k0.topLeftCorner(m, m);
    const Eigen::MatrixXcd a = ops.a_op.topLeftCorner(m, m);
    const Eigen::MatrixXcd comm = k0 * a - a * k0;
    EXPECT_LT((comm + (lambda / 2.0) * a).cwiseAbs().maxCoeff(), 1e-12) << lambda;
  }
}

TEST(Ladder, RejectsWrongCompactDim) {
  EXPECT_THROW(ladder_ops(KerrParams(-2.0, 1.0), 5), DomainError);
  EXPECT_THROW(ladder_ops(KerrParams(2.0, 1.0), 1), DomainError);
}

TEST(StatePos, VacuumAtOrigin) {
  const auto s = kerr_state_pos(PolarAmplitude(0.0, 1.0), KerrParams(2.0, 1.5));
  EXPECT_EQ(s.dim(), 1);
  EXPECT_NEAR(std::abs(s.amplitudes[0] - 1.0), 0.0, 1e-15);
}

TEST(StatePos, QubitLikeClosedForm) {
  const auto s = kerr_state_pos(PolarAmplitude(1.0, 0.0), KerrParams(2.0, 0.5));
  EXPECT_NEAR(s.amplitudes[0].real(), 0.64805427366388540, 1e-14);
  for (int n = 0; n < 20; ++n) {
    EXPECT_NEAR(std::abs(s.amplitudes[n] - 1.0 / std::cosh(1.0) * std::pow(std::tanh(1.0), n)), 0.0, 1e-14);
  }
}

TEST(StatePos, MatchesIndependentSeries) {
  for (double lambda : {0.5, 2.0, 4.0}) {
    for (double j : {0.5, 1.5, 4.0}) {
      const KerrParams p(lambda, j);
      const auto s = kerr_state_pos(PolarAmplitude(1.3, 2.5), p);
      for (int n = 0; n < s.dim(); n += 3) {
        EXPECT_NEAR(std::abs(s.amplitudes[n] - closed_pos(lambda, j, 1.3, 2.5, n)), 0.0, 1e-13);
      }
    }
  }
}

TEST(StatePos, NormWithinTolerance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 2.5), phi(0.0, 2 * pi);
  for (int k = 0; k < 30; ++k) {
    const KerrParams p(std::uniform_real_distribution<double>(0.2, 4.0)(rng),
                       HalfInteger::from_twice(1 + static_cast<int>(rng() % 8)));
    const auto s = kerr_state_pos(PolarAmplitude(r(rng), phi(rng)), p, 1e-12, 1 << 16);
    EXPECT_LE(s.norm_squared(), 1.0 + 1e-14);
    EXPECT_GE(s.norm_squared(), 1.0 - 1e-12);
    EXPECT_NEAR(s.norm_squared() + s.truncation_tail, 1.0, 1e-12);
  }
}

TEST(StateNeg, VacuumAndEqualSplit) {
  const KerrParams p(-2.0, 3.0);
  const auto v = kerr_state_neg(PolarAmplitude(0.0, 0.0), p);
  EXPECT_EQ(v.dim(), 7);
  EXPECT_NEAR(std::abs(v.amplitudes[0]), 1.0, 1e-15);
  EXPECT_NEAR(v.amplitudes.tail(6).norm(), 0.0, 1e-15);
  const auto q = kerr_state_neg(PolarAmplitude(pi / 4, 0.0), KerrParams(-2.0, 0.5));
  EXPECT_NEAR(q.amplitudes[0].real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(q.amplitudes[1].real(), std::sqrt(0.5), 1e-15);
}

TEST(StateNeg, MatchesBinomialSeriesAndIsNormalized) {
  for (double lambda : {-0.5, -2.0, -4.0}) {
    for (double j : {0.5, 2.0, 5.0}) {
      const KerrParams p(lambda, j);
      const double r = 0.9 / p.scale();
      const auto s = kerr_state_neg(PolarAmplitude(r, 1.0), p);
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-14);
      EXPECT_EQ(s.truncation_tail, 0.0);
      for (int n = 0; n < s.dim(); ++n) {
        EXPECT_NEAR(std::abs(s.amplitudes[n] - closed_neg(lambda, j, r, 1.0, n)), 0.0, 1e-14);
      }
    }
  }
}

TEST(StateNeg, RejectsPoleOfDomain) {
  const KerrParams p(-2.0, 1.0);
  EXPECT_THROW(kerr_state_neg(PolarAmplitude(pi / 2, 0.0), p), DomainError);
  EXPECT_THROW(kerr_state_neg(PolarAmplitude(0.1, 0.0), KerrParams(2.0, 1.0)), DomainError);
}

TEST(Truncation, OriginNeedsOneState) { EXPECT_EQ(truncation_dim(KerrParams(2.0, 0.5), 0.0), 1); }

TEST(Truncation, GeometricTailAtJHalf) {
  // At 2j = 1 the tail is exactly tanh^{2N}(1).
  const KerrParams p(2.0, 0.5);
  const int n = truncation_dim(p, 1.0, 1e-12);
  const double q = std::pow(std::tanh(1.0), 2);
  EXPECT_LT(std::pow(q, n), 1e-12);
  EXPECT_GE(std::pow(q, n - 1), 1e-12);
  EXPECT_NEAR(n, 55, 5);
  EXPECT_NEAR(truncation_tail(p, 1.0, n), std::pow(q, n), 1e-24);
}

TEST(Truncation, MonotoneInTolerance) {
  const KerrParams p(0.5, 3.0);
  int prev = 0;
  for (double tol = 1e-6; tol >= 1e-15; tol /= 2.0) {
    const int n = truncation_dim(p, 1.7, tol, 1 << 16);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Truncation, OverflowsAtMaxDim) {
  EXPECT_THROW(truncation_dim(KerrParams(0.5, 5.0), 20.0, 1e-12, 64), TruncationOverflow);
  EXPECT_THROW(truncation_dim(KerrParams(2.0, 1.0), 1.0, 1e-3), DomainError);
}

TEST(Displace, OriginIsVacuum) {
  const auto s = displace_vacuum(PolarAmplitude(0.0, 0.0), KerrParams(2.0, 1.0), 16);
  EXPECT_NEAR(std::abs(s.amplitudes[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(s.amplitudes.tail(15).norm(), 0.0, 1e-15);
}

TEST(Displace, PositiveMatchesClosedForm) {
  const KerrParams p(2.0, 0.5);
  const auto closed = kerr_state_pos_fixed(1.0, 0.0, p, 160);
  const auto num = displace_vacuum(PolarAmplitude(1.0, -0.0), p, 160);
  EXPECT_LT((closed.amplitudes - num.amplitudes).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Displace, NegativeMatchesClosedFormUpToConjugatePhase) {
  const KerrParams p(-2.0, 5.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.0, 0.99 * pi / 2), phi(0.0, 2 * pi);
  for (int k = 0; k < 10; ++k) {
    const double rr = r(rng), ph = phi(rng);
    const auto closed = kerr_state_neg(PolarAmplitude(rr, ph), p);
    const auto num = displace_vacuum(PolarAmplitude(rr, 2 * pi - ph), p, p.compact_dim());
    EXPECT_LT((closed.amplitudes - num.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Displace, ChebyshevMatchesPade) {
  const KerrParams p(0.5, 1.5);
  const PolarAmplitude a(1.1, 0.7);
  const auto cheb = displace_vacuum(a, p, 40);
  const auto pade = displace_vacuum_dense(a, p, 40);
  EXPECT_LT((cheb.amplitudes - pade.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Displace, PathMatchesPointwise) {
  const KerrParams p(4.0, 1.0);
  const std::vector<double> radii = {0.0, 0.4, 1.2};
  const std::vector<double> phis = {0.0, 2.5};
  const auto path = displace_vacuum_path(radii, phis, p, 200);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const auto s = displace_vacuum(PolarAmplitude(radii[i], phis[k]), p, 200);
      EXPECT_LT((path[i][k].amplitudes - s.amplitudes).cwiseAbs().maxCoeff(), 1e-11);
    }
  }
}

TEST(Decomposition, OriginIsIdentity) {
  const auto f = gaussian_decomposition(PolarAmplitude(0.0, 0.0), KerrParams(2.0, 3.0));
  EXPECT_EQ(f.zeta, cplx(0.0));
  EXPECT_DOUBLE_EQ(f.zeta0, 1.0);
}

TEST(Decomposition, FactorsAtUnitModulus) {
  for (double j : {0.5, 2.0, 4.5}) {
    const auto f = gaussian_decomposition(PolarAmplitude(1.0, 0.0), KerrParams(2.0, j));
    EXPECT_NEAR(std::abs(f.zeta), std::tanh(1.0), 1e-15);
    EXPECT_NEAR(f.zeta0, std::pow(std::cosh(1.0), -2.0), 1e-15);
  }
}

TEST(Decomposition, ReproducesDisplacement) {
  for (double lambda : {-4.0, -0.5, 0.5, 2.0}) {
    for (int tj : {1, 4, 7}) {
      const KerrParams p(lambda, HalfInteger::from_twice(tj));
      const double r = p.positive() ? 1.2 : 0.8 / p.scale();
      const PolarAmplitude a(r, 1.0);
      const int dim = p.positive() ? 400 : p.compact_dim();
      const auto lhs = apply_gaussian_factors(gaussian_decomposition(a, p), p, dim);
      const auto rhs = displace_vacuum(a, p, dim);
      EXPECT_LT((lhs.amplitudes - rhs.amplitudes).cwiseAbs().maxCoeff(), 1e-10) << lambda << " " << tj;
    }
  }
}

TEST(Decomposition, LemmaExponentFailsOffCoincidence) {
  const KerrParams p(0.5, 1.0);  // lambda j = 1/2, so -j != -4/lambda
  const PolarAmplitude a(1.0, 0.3);
  const auto lhs =
      apply_gaussian_factors(gaussian_decomposition(a, p, Zeta0Exponent::LemmaStatement), p, 400);
  const auto rhs = displace_vacuum(a, p, 400);
  EXPECT_GT((lhs.amplitudes - rhs.amplitudes).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InnerProduct, PadsShorterVector) {
  StateVector a, b;
  a.amplitudes = Eigen::VectorXcd::Zero(2);
  a.amplitudes << cplx(0, 1), 1.0;
  b.amplitudes = Eigen::VectorXcd::Zero(3);
  b.amplitudes << 1.0, 2.0, 5.0;
  EXPECT_NEAR(std::abs(inner_product(a, b) - cplx(2.0, -1.0)), 0.0, 1e-15);
}

TEST(FockWeight, BinomialAndNegativeBinomial) {
  EXPECT_NEAR(std::exp(log_fock_weight(KerrParams(-2.0, 2.0), 2)), 6.0, 1e-12);
  EXPECT_EQ(log_fock_weight(KerrParams(-2.0, 2.0), 5), -INFINITY);
  EXPECT_NEAR(std::exp(log_fock_weight(KerrParams(2.0, 1.5), 2)), 6.0, 1e-12);
}

}  // namespace
}  // namespace kerrkit
