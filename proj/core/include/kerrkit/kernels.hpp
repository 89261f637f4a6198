#pragma once

#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "kerrkit/spin.hpp"

namespace kerrkit {

using cplx = std::complex<double>;

// ---- one-dimensional kernels -------------------------------------------

// General overlap <alpha1|alpha2> of two lambda > 0 states (any moduli).
cplx kerr_overlap_pos(double r1, double phi1, double r2, double phi2, const KerrParams& params);
// General overlap of two lambda < 0 states; moduli must lie in the state domain.
cplx kerr_overlap_neg(double r1, double phi1, double r2, double phi2, const KerrParams& params);

cplx kerr_phase_pos(double phi1, double phi2, double c, const KerrParams& params);
cplx kerr_phase_neg(double phi1, double phi2, double c, const KerrParams& params);
double kerr_amp_pos(double x, double y, const KerrParams& params);
double kerr_amp_neg(double x, double y, const KerrParams& params);

double rbf(double x, double y, double sigma);
double ess(double x, double y, double l, double p);

enum class QecForm {
  Printed,     // exp(-(2/l^2) cos^{2j}(s|x-y|))
  Complement,  // exp(-(2/l^2) (1 - cos^{2j}(s|x-y|)))
};
double qec(double x, double y, double l, const KerrParams& params, QecForm form = QecForm::Printed);

// Squeezed-vacuum overlap; the fixed exponent -1/2 of the squeezed family.
cplx squeezed_overlap(double r1, double phi1, double r2, double phi2);
cplx squeezed_phase(double phi1, double phi2, double c);
double squeezed_amp(double x, double y);

// ---- kernel specification -----------------------------------------------

enum class KernelFamily {
  KerrPhasePos,
  KerrPhaseNeg,
  KerrAmpPos,
  KerrAmpNeg,
  SqueezedPhase,
  SqueezedAmp,
  RBF,
  ESS,
  QEC,
};

enum class Realify { SquaredModulus, RealPart };
enum class Compose { Product, SumThenRealify };

struct KernelParams {
  std::optional<double> c;       // phase-encoding modulus
  std::optional<double> lambda;  // Kerr parameter
  std::optional<HalfInteger> j;
  std::optional<double> sigma;   // RBF bandwidth
  std::optional<double> l;       // ESS / QEC length scale
  std::optional<double> p;       // ESS period
  bool normalize_diagonal = false;  // QEC only
  QecForm qec_form = QecForm::Printed;

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::RBF;
  KernelParams params;
  Realify realify = Realify::SquaredModulus;
  Compose compose = Compose::Product;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string to_string(KernelFamily f);
std::string to_string(Realify r);
std::string to_string(Compose c);
KernelFamily parse_family(const std::string& s);
Realify parse_realify(const std::string& s);
Compose parse_compose(const std::string& s);

bool is_complex_family(KernelFamily f);
bool is_phase_family(KernelFamily f);

// Checks that the family's required parameters are present and consistent
// (sign of lambda, positivity, domain of c). Throws DomainError.
void validate(const KernelSpec& spec);

// Named constructors with validation.
KernelSpec kerr_phase_spec(double c, double lambda, double j);
KernelSpec kerr_amp_spec(double lambda, double j);
KernelSpec squeezed_phase_spec(double c);
KernelSpec squeezed_amp_spec();
KernelSpec rbf_spec(double sigma);
KernelSpec ess_spec(double l, double p);
KernelSpec qec_spec(double l, double lambda, double j);

// JSON object text: {"family", "params", "realify", "compose"}.
std::string to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const std::string& text);

// ---- composition and Gram assembly --------------------------------------

// Single-feature kernel value before realification; dx, dy perturb the
// encoded amplitude (c for phase families, the value itself otherwise).
cplx feature_kernel_1d(const KernelSpec& spec, double x, double y, double dx = 0.0,
                       double dy = 0.0);

double feature_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                      const Eigen::Ref<const Eigen::RowVectorXd>& y);
double feature_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                      const Eigen::Ref<const Eigen::RowVectorXd>& y,
                      const Eigen::Ref<const Eigen::RowVectorXd>& dx,
                      const Eigen::Ref<const Eigen::RowVectorXd>& dy);

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;
  std::optional<double> min_eigenvalue;

  Eigen::Index size() const { return values.rows(); }
};

struct GramOptions {
  int workers = 1;
  bool audit_psd = false;
  // Optional n x d encoding perturbation (see datasets::NoisePlan).
  const Eigen::MatrixXd* offsets = nullptr;
};

GramMatrix gram(const Eigen::MatrixXd& features, const KernelSpec& spec,
                const GramOptions& options = {});

// m x n kernel matrix between rows of `left` and rows of `right`.
Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right,
                           const KernelSpec& spec, int workers = 1,
                           const Eigen::MatrixXd* left_offsets = nullptr,
                           const Eigen::MatrixXd* right_offsets = nullptr);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace kerrkit
