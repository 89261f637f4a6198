#include <cmath>
#include <limits>
#include <numbers>

#include "kerrkit/datasets.hpp"
#include "kerrkit/error.hpp"

namespace kerrkit {

std::string to_string(ScalingMode m) {
  switch (m) {
    case ScalingMode::PhasePeriodic: return "PhasePeriodic";
    case ScalingMode::AmplitudeBox: return "AmplitudeBox";
    case ScalingMode::ZScore: return "ZScore";
    case ScalingMode::None: return "None";
  }
  return "None";
}

ScalingMode parse_scaling_mode(const std::string& s) {
  if (s == "PhasePeriodic" || s == "phase") return ScalingMode::PhasePeriodic;
  if (s == "AmplitudeBox" || s == "amplitude") return ScalingMode::AmplitudeBox;
  if (s == "ZScore" || s == "zscore") return ScalingMode::ZScore;
  if (s == "None" || s == "none") return ScalingMode::None;
  throw ParseError("unknown scaling mode '" + s + "'");
}

double amplitude_box_limit(double lambda) {
  if (lambda >= 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * std::sqrt(std::abs(lambda) / 2.0));
}

ScalingRecord fit_scaling(const Eigen::MatrixXd& x, ScalingMode mode, double span) {
  if (x.rows() == 0 || x.cols() == 0) throw DomainError("cannot fit scaling on an empty matrix");
  const Eigen::Index d = x.cols();
  ScalingRecord s;
  s.mode = mode;
  s.offsets = Eigen::VectorXd::Zero(d);
  s.scales = Eigen::VectorXd::Ones(d);
  switch (mode) {
    case ScalingMode::None:
      break;
    case ScalingMode::PhasePeriodic:
    case ScalingMode::AmplitudeBox: {
      if (!(span > 0.0) || !std::isfinite(span)) throw DomainError("scaling span must be finite and > 0");
      if (mode == ScalingMode::PhasePeriodic && !(span < 2.0 * std::numbers::pi)) {
        throw DomainError("phase scaling span must be below 2 pi");
      }
      for (Eigen::Index f = 0; f < d; ++f) {
        const double lo = x.col(f).minCoeff();
        const double hi = x.col(f).maxCoeff();
        s.offsets(f) = lo;
        s.scales(f) = hi > lo ? span / (hi - lo) : 1.0;
      }
      break;
    }
    case ScalingMode::ZScore: {
      const double n = static_cast<double>(x.rows());
      for (Eigen::Index f = 0; f < d; ++f) {
        const double mean = x.col(f).mean();
        const double var = (x.col(f).array() - mean).square().sum() / n;
        s.offsets(f) = mean;
        s.scales(f) = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
      }
      break;
    }
  }
  return s;
}

namespace {
void check_width(const ScalingRecord& s, const Eigen::MatrixXd& x) {
  if (s.offsets.size() != x.cols() || s.scales.size() != x.cols()) {
    throw DomainError("scaling record has " + std::to_string(s.offsets.size()) +
                      " features, matrix has " + std::to_string(x.cols()));
  }
}
}  // namespace

Eigen::MatrixXd apply_scaling(const ScalingRecord& s, const Eigen::MatrixXd& x) {
  check_width(s, x);
  return ((x.rowwise() - s.offsets.transpose()).array().rowwise() * s.scales.transpose().array())
      .matrix();
}

Eigen::MatrixXd invert_scaling(const ScalingRecord& s, const Eigen::MatrixXd& y) {
  check_width(s, y);
  return ((y.array().rowwise() / s.scales.transpose().array()).matrix().rowwise() +
          s.offsets.transpose());
}

}  // namespace kerrkit
