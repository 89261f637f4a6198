#pragma once

#include <vector>

#include <Eigen/Dense>

namespace kerrkit::detail {

// J_0(x) .. J_{K}(x), K chosen so that J_K(x) is below 1e-18.
std::vector<double> bessel_j_sequence(double x);

// exp(-i T) e_0 for the real symmetric tridiagonal T with zero diagonal and
// off-diagonal entries offdiag[k] = T[k, k+1].
Eigen::VectorXcd expm_minus_i_tridiagonal_e0(const std::vector<double>& offdiag, int dim);

// exp(-i t T) e_0 at each t in `times` (ascending, >= 0), same T layout.
// Integrates in slices whose working basis follows the numerical support of
// the vector; a slice is redone on a larger basis whenever amplitude above
// 1e-18 reaches the outer tenth of its working basis. Entries below 1e-20
// are dropped between slices.
std::vector<Eigen::VectorXcd> expm_path_e0(const std::vector<double>& offdiag, const std::vector<double>& times,
                                           int dim);

}  // namespace kerrkit::detail
