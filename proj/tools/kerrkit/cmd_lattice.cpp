#include <cmath>
#include <memory>
#include <optional>

#include "commands.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/lattice.hpp"

namespace kerrkit::cli {

namespace {

using nlohmann::json;

struct LatticeArgs {
  std::string preset;
  std::optional<double> lambda;
  std::optional<double> j;
  double z_max = 1.0;
  int z_points = 101;
  std::vector<double> z;
  int n_guides = 0;
  double d0 = 10.0;
  double kappa = 1.0;
  std::string method = "eig";
};

std::vector<double> z_grid(const LatticeArgs& a, double z_max) {
  if (!a.z.empty()) return a.z;
  if (a.z_points == 1) return {z_max};
  std::vector<double> z;
  for (int k = 0; k < a.z_points; ++k) z.push_back(z_max * k / (a.z_points - 1));
  return z;
}

void run_lattice(const LatticeArgs& a, RunContext& ctx) {
  LatticeConfig c;
  if (!a.preset.empty()) {
    if (a.lambda || a.j) throw DomainError("--preset cannot be combined with --lambda / --j");
    c = lattice_preset(a.preset);
    if (!a.z.empty()) c = lattice_preset(a.preset, a.z);
  } else {
    if (!a.lambda || !a.j) throw DomainError("lattice needs --preset or both --lambda and --j");
    if (*a.lambda == 0.0 || !std::isfinite(*a.lambda)) throw DomainError("--lambda must be nonzero and finite");
    c = make_lattice_config(KerrParams(*a.lambda, *a.j), z_grid(a, a.z_max));
  }
  if (a.n_guides > 0) c.n_guides = a.n_guides;
  c.d0 = a.d0;
  c.kappa = a.kappa;
  const Eigen::MatrixXcd e = a.method == "ode" ? propagate_ode(c) : propagate(c);
  const Eigen::MatrixXd intensity = e.cwiseAbs2();
  if (ctx.format() == Format::Csv) {
    ctx.write_output("intensity.csv", intensity_csv(c, intensity));
  } else {
    json j;
    j["schema_version"] = 1;
    j["z"] = c.z_grid;
    json rows = json::array();
    for (Eigen::Index n = 0; n < intensity.rows(); ++n) {
      rows.push_back(std::vector<double>(intensity.cols()));
      for (Eigen::Index k = 0; k < intensity.cols(); ++k) rows.back()[static_cast<std::size_t>(k)] = intensity(n, k);
    }
    j["intensity"] = rows;
    ctx.write_output("intensity.json", j.dump(2) + "\n");
  }
  json cfg = json::parse(to_json(c));
  cfg["method"] = a.method;
  cfg["preset"] = a.preset;
  cfg["couplings"] = coupling_coeffs(c);
  cfg["spacings"] = guide_spacings(c);
  double unitarity = 0.0;
  for (Eigen::Index k = 0; k < intensity.cols(); ++k) unitarity = std::max(unitarity, std::abs(intensity.col(k).sum() - 1.0));
  cfg["max_unitarity_defect"] = unitarity;
  ctx.write_output("lattice_config.json", cfg.dump(2) + "\n");
}

}  // namespace

void register_lattice(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<LatticeArgs>();
  auto* sub = root.add_subcommand("lattice", "Propagate light through a waveguide lattice realizing Kerr states");
  sub->add_option("--preset", a->preset, "fig7-pos or fig7-neg (|lambda| = 2, j = 20)")
      ->check(CLI::IsMember({"fig7-pos", "fig7-neg"}));
  sub->add_option("--lambda", a->lambda, "Kerr parameter");
  sub->add_option("--j", a->j, "Half-integer j");
  sub->add_option("--z-max", a->z_max, "End of the propagation range")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--z-points", a->z_points, "Number of evenly spaced z samples")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--z", a->z, "Explicit z samples (repeatable; overrides the range)");
  sub->add_option("--n-guides", a->n_guides, "Guide count (0: 2j+1 or 1.5 x truncation)")->capture_default_str();
  sub->add_option("--d0", a->d0, "Reference spacing")->capture_default_str();
  sub->add_option("--kappa", a->kappa, "Coupling decay length")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--method", a->method, "eig (exact) or ode (dopri5)")
      ->capture_default_str()
      ->check(CLI::IsMember({"eig", "ode"}));
  out.push_back({sub, [a](RunContext& ctx) { run_lattice(*a, ctx); }});
}

}  // namespace kerrkit::cli
