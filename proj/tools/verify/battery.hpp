#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrkit/fockspace.hpp"

namespace kerrkit::verify {

enum class Tier { Quick, Full };
Tier parse_tier(const std::string& s);
std::string to_string(Tier t);

// One residual check. Advisory checks are reported but never fail a run.
// With lower_bound set the residual must reach the tolerance instead
// (negative controls).
struct CheckResult {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool advisory = false;
  bool lower_bound = false;
};

nlohmann::json to_json(const CheckResult& r);
bool all_pass(const std::vector<CheckResult>& results);

struct FockGrid {
  std::vector<double> lambdas;
  std::vector<int> two_j;
  std::vector<double> radii;  // ascending; filtered to the domain per lambda
  std::vector<double> phis;
};
FockGrid fock_grid(Tier tier);

// Basis size of the numerical oracle for lambda > 0: the closed form is
// cut where the remaining probability mass drops below this.
inline constexpr double kOracleTail = 1e-24;

struct FockParts {
  bool oracle = true;         // state_oracle, kernel_oracle
  bool decomposition = true;  // gaussian_decomposition, zeta0_negative_control
};

// Per (lambda, j): state_oracle, kernel_oracle, gaussian_decomposition
// (with the given zeta0 exponent) and zeta0_negative_control.
std::vector<CheckResult> fock_checks(const FockGrid& grid, Zeta0Exponent zeta0, int workers,
                                     FockParts parts = {});

// ricci (against the curvature of the closed-form metric), ricci_printed
// (against the printed scalar; advisory unless printed_mandatory),
// metric_oracle, embedding_quadric, pullback_metric.
std::vector<CheckResult> geometry_checks(Tier tier, bool printed_mandatory = false);

// resolution_identity and reproducing_kernel; lambda > 0 only at the full tier.
std::vector<CheckResult> quadrature_checks(Tier tier);

// SMO against the reference QP on random RBF instances with n <= 12.
std::vector<CheckResult> svm_checks(int instances, std::uint64_t seed);

// Min-eigenvalue audit on 200-row samples of every synthetic table dataset,
// per family and realification. The printed QEC form is advisory unless
// qec_mandatory.
std::vector<CheckResult> psd_checks(Tier tier, std::uint64_t seed, int workers,
                                    bool qec_mandatory = false);

// Fig. 7 presets: closed form, unitarity, ODE cross-check, transfer and revival.
std::vector<CheckResult> lattice_checks();

struct BatteryOptions {
  Tier tier = Tier::Quick;
  Zeta0Exponent zeta0 = Zeta0Exponent::Proof;
  int workers = 1;
  std::uint64_t seed = 7;
  std::vector<std::string> groups;  // empty: all
};

std::vector<std::string> group_names();

std::vector<CheckResult> run_battery(const BatteryOptions& options,
                                     const std::function<void(const CheckResult&)>& on_result = {});

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace kerrkit::verify
