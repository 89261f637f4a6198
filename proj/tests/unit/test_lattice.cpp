#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kerrkit/error.hpp"
#include "kerrkit/fockspace.hpp"
#include "kerrkit/gram_cache.hpp"
#include "kerrkit/lattice.hpp"

namespace kerrkit {
namespace {

using std::numbers::pi;
namespace fs = std::filesystem;

TEST(Coupling, MatchesLadderOffDiagonal) {
  const LatticeConfig pos = lattice_preset("fig7-pos");
  const auto c = coupling_coeffs(pos);
  EXPECT_NEAR(c[0], std::sqrt(40.0), 1e-14);
  const auto a = ladder_coefficients(pos.params, pos.n_guides);
  ASSERT_EQ(c.size(), a.size());
  for (std::size_t n = 0; n < c.size(); ++n) EXPECT_DOUBLE_EQ(c[n], a[n]);
  for (std::size_t n = 1; n < c.size(); ++n) EXPECT_GT(c[n], c[n - 1]);
}

TEST(Coupling, CompactQubitLattice) {
  LatticeConfig cfg = make_lattice_config(KerrParams(-4.0, 0.5), {0.0, 0.5});
  EXPECT_EQ(cfg.n_guides, 2);
  const auto c = coupling_coeffs(cfg);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0], std::sqrt(4.0 / 2.0) * std::sqrt(1.0), 1e-15);
}

TEST(Spacing, RoundTripAndReference) {
  LatticeConfig cfg = lattice_preset("fig7-neg");
  cfg.c1 = coupling_coeffs(cfg)[3];
  const auto c = coupling_coeffs(cfg);
  const auto d = guide_spacings(cfg);
  EXPECT_NEAR(d[3], cfg.d0, 1e-15);
  for (std::size_t n = 0; n < c.size(); ++n) {
    EXPECT_NEAR(cfg.c1 * std::exp(-(d[n] - cfg.d0) / cfg.kappa), c[n], 1e-12 * c[n]);
  }
  LatticeConfig wide = cfg;
  wide.kappa = 3.0;
  const auto d3 = guide_spacings(wide);
  for (std::size_t n = 0; n < c.size(); ++n) EXPECT_NEAR(d3[n] - wide.d0, 3.0 * (d[n] - cfg.d0), 1e-12);
}

TEST(Propagation, StartsInGuideZero) {
  const LatticeConfig cfg = make_lattice_config(KerrParams(2.0, 2.0), {0.0});
  const auto e = propagate(cfg);
  EXPECT_NEAR(std::abs(e(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(e.col(0).tail(cfg.n_guides - 1).norm(), 0.0, 1e-15);
}

TEST(Propagation, MatchesClosedFormIntensities) {
  for (const std::string name : {"fig7-pos", "fig7-neg"}) {
    const LatticeConfig cfg = lattice_preset(name);
    const Eigen::MatrixXd i = intensity_map(cfg);
    for (std::size_t k = 0; k < cfg.z_grid.size(); k += 7) {
      const Eigen::VectorXd cf = closed_form_intensities(cfg.params, cfg.z_grid[k], cfg.n_guides);
      EXPECT_LT((i.col(k) - cf).cwiseAbs().maxCoeff(), 1e-8) << name << " z=" << cfg.z_grid[k];
      EXPECT_NEAR(i.col(k).sum(), 1.0, 1e-10);
    }
  }
}

TEST(Propagation, IntensitiesAreStateProbabilities) {
  // The field at z equals the displaced vacuum with alpha = i z.
  const KerrParams p(-2.0, 3.0);
  const LatticeConfig cfg = make_lattice_config(p, {0.4});
  const Eigen::MatrixXd i = intensity_map(cfg);
  const auto s = kerr_state_neg(PolarAmplitude(0.4, pi / 2), p);
  for (int n = 0; n < cfg.n_guides; ++n) EXPECT_NEAR(i(n, 0), std::norm(s.amplitudes[n]), 1e-12);
}

TEST(Propagation, OdeCrossCheck) {
  const LatticeConfig cfg = make_lattice_config(KerrParams(2.0, 3.0), {0.0, 0.3, 0.9});
  EXPECT_LT((propagate(cfg) - propagate_ode(cfg)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Propagation, CompactTransferAndRevival) {
  const double z = pi / std::sqrt(2.0 * 2.0);
  const Eigen::MatrixXd i = intensity_map(lattice_preset("fig7-neg", {z, 2.0 * z}));
  EXPECT_NEAR(i(40, 0), 1.0, 1e-6);
  EXPECT_NEAR(i(0, 1), 1.0, 1e-6);
}

TEST(Propagation, OverTruncatedPositiveLatticeThrows) {
  LatticeConfig cfg = make_lattice_config(KerrParams(2.0, 5.0), {0.0, 3.0});
  cfg.n_guides = 12;
  EXPECT_THROW(validate(cfg), TruncationOverflow);
  EXPECT_THROW(propagate(cfg), TruncationOverflow);
}

TEST(Propagation, RejectsInconsistentConfig) {
  LatticeConfig cfg = make_lattice_config(KerrParams(-2.0, 2.0), {0.0, 1.0});
  cfg.n_guides = 7;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = make_lattice_config(KerrParams(-2.0, 2.0), {1.0, 0.5});
  EXPECT_THROW(validate(cfg), DomainError);
  EXPECT_THROW(lattice_preset("fig8"), DomainError);
}

TEST(Export, CsvShape) {
  const LatticeConfig cfg = make_lattice_config(KerrParams(-2.0, 1.0), {0.0, 0.5});
  const std::string csv = intensity_csv(cfg, intensity_map(cfg));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), cfg.n_guides);
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  EXPECT_EQ(rows, 2);
}

// ---- Gram cache ------------------------------------------------------------

TEST(GramCache, RoundTripIsBitExact) {
  const auto dir = fs::temp_directory_path() / "kerrkit_test_cache";
  fs::create_directories(dir);
  const auto path = (dir / "g.kgrm").string();
  Eigen::MatrixXd g = Eigen::MatrixXd::Random(7, 7);
  g = (g + g.transpose()).eval();
  write_gram_cache(path, g);
  EXPECT_EQ(read_gram_cache(path), g);
  EXPECT_EQ(fs::file_size(path), 4u + 4u + 8u + 49u * 8u + 32u);
  EXPECT_EQ(file_sha256(path).size(), 64u);
}

TEST(GramCache, DetectsCorruption) {
  const auto dir = fs::temp_directory_path() / "kerrkit_test_cache_bad";
  fs::create_directories(dir);
  const auto path = (dir / "g.kgrm").string();
  write_gram_cache(path, Eigen::MatrixXd::Identity(3, 3));
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    f.put('\x7f');
  }
  EXPECT_THROW(read_gram_cache(path), ParseError);
  std::ofstream(path, std::ios::binary) << "KGRX";
  EXPECT_THROW(read_gram_cache(path), ParseError);
}

TEST(GramCache, EmptyFileHash) {
  const auto path = (fs::temp_directory_path() / "kerrkit_test_empty").string();
  std::ofstream(path, std::ios::binary).close();
  EXPECT_EQ(file_sha256(path), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

}  // namespace
}  // namespace kerrkit
