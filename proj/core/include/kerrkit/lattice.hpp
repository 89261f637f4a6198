#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrkit/fockspace.hpp"

namespace kerrkit {

struct LatticeConfig {
  KerrParams params{2.0, HalfInteger::from_twice(40)};
  int n_guides = 41;
  double c1 = 1.0;     // reference coupling (1/length)
  double d0 = 10.0;    // reference spacing
  double kappa = 1.0;  // coupling decay length
  std::vector<double> z_grid;
};

// Throws DomainError for an inconsistent config, TruncationOverflow when a
// positive-lambda lattice has fewer than truncation_dim(max z, 1e-12) guides.
void validate(const LatticeConfig& config);

// Guide count for a config: 2j + 1 (lambda < 0) or 1.5 x truncation_dim at
// max z (lambda > 0).
int default_guide_count(const KerrParams& params, const std::vector<double>& z_grid);
LatticeConfig make_lattice_config(const KerrParams& params, std::vector<double> z_grid);

// C_n for n = 1 .. n_guides - 1: the ladder coefficient between guides n-1 and n.
std::vector<double> coupling_coeffs(const LatticeConfig& config);

// d_n = d0 - kappa ln(C_n / c1), so C_n = c1 exp(-(d_n - d0)/kappa).
std::vector<double> guide_spacings(const LatticeConfig& config);

// E_n(z) = [exp(i (A + A^dag) z) e0]_n; column k is z_grid[k]. Throws
// TruncationOverflow when the last guide's intensity exceeds 1e-10.
Eigen::MatrixXcd propagate(const LatticeConfig& config);

// Independent dopri5 integration of i dE_n/dz + C_n E_{n-1} + C_{n+1} E_{n+1} = 0.
Eigen::MatrixXcd propagate_ode(const LatticeConfig& config, double abs_tol = 1e-12,
                               double rel_tol = 1e-12);

// |E_n(z)|^2, n_guides x len(z_grid).
Eigen::MatrixXd intensity_map(const LatticeConfig& config);

// First column z, then one column per guide.
std::string intensity_csv(const LatticeConfig& config, const Eigen::MatrixXd& intensities);
std::string to_json(const LatticeConfig& config);

// Closed-form |<n|alpha>|^2 with |alpha| = z for n < n_guides; for lambda < 0
// it is evaluated on the whole period, beyond the state domain.
Eigen::VectorXd closed_form_intensities(const KerrParams& params, double z, int n_guides);

// Presets fig7-pos / fig7-neg: |lambda| = 2, j = 20.
LatticeConfig lattice_preset(const std::string& name, std::vector<double> z_grid = {});

}  // namespace kerrkit
