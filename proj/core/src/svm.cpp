#include "kerrkit/svm.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "hash.hpp"
#include "json_support.hpp"
#include "kerrkit/error.hpp"
#include "random.hpp"
#include "svm_internal.hpp"

namespace kerrkit {

// ---- metrics ------------------------------------------------------------

double f1_score(const Confusion& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double accuracy(const Confusion& c) {
  if (c.total() == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw DomainError("truth and prediction lengths differ");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1;
    const bool p = predicted[i] == 1;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

std::string to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Train: return "Train";
    case SplitTag::Test: return "Test";
    case SplitTag::CrossVal: return "CrossVal";
  }
  return "Test";
}

EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& predicted, SplitTag tag) {
  EvalReport r;
  r.confusion = confusion_matrix(truth, predicted);
  r.f1 = f1_score(r.confusion);
  r.accuracy = accuracy(r.confusion);
  r.split_tag = tag;
  return r;
}

// ---- shared dual helpers ------------------------------------------------

namespace detail {

std::vector<double> signed_labels(const std::vector<int>& labels, Eigen::Index n) {
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DomainError("label count does not match Gram size");
  std::vector<double> y(labels.size());
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("labels must be 0 or 1");
    seen[labels[i]] = true;
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
  }
  if (!seen[0] || !seen[1]) throw DomainError("training labels must contain both classes");
  return y;
}

void require_symmetric(const Eigen::MatrixXd& k) {
  if (k.rows() != k.cols() || k.rows() < 2) throw DomainError("Gram must be square with n >= 2");
  if (!k.allFinite()) throw DomainError("Gram contains non-finite entries");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError("Gram is not symmetric");
}

double bias_from_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& alpha,
                          const std::vector<double>& y, double c) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double yg = y[i] * grad(i);
    if (alpha(i) >= c) {
      if (y[i] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha(i) <= 0.0) {
      if (y[i] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  return -rho;
}

void finish_model(SvmModel& m, const Eigen::MatrixXd& k, const std::vector<int>& labels,
                  const Eigen::VectorXd& alpha, const std::vector<double>& y, double c) {
  const Eigen::Index n = alpha.size();
  m.c_reg = c;
  m.dual_coefs.resize(n);
  m.support_idx.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    m.dual_coefs(i) = alpha(i) * y[i];
    if (alpha(i) > 0.0) m.support_idx.push_back(static_cast<std::size_t>(i));
  }
  m.train_ref = fingerprint(k, labels);
}

}  // namespace detail

// ---- SMO ----------------------------------------------------------------

namespace {

constexpr double kTau = 1e-12;

}  // namespace

SvmModel train_svm(const Eigen::MatrixXd& gram_in, const std::vector<int>& labels, double c,
                   const SmoOptions& opt) {
  detail::require_symmetric(gram_in);
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c_reg must be a positive finite number");
  if (!(opt.tol > 0.0)) throw DomainError("tol must be > 0");
  if (opt.max_passes < 1) throw DomainError("max_passes must be >= 1");
  const Eigen::Index n = gram_in.rows();
  const std::vector<double> y = detail::signed_labels(labels, n);

  SvmModel model;
  Eigen::MatrixXd k = gram_in;
  if (opt.shift_indefinite) {
    const double lo = min_eigenvalue(k);
    if (lo < 0.0 && lo >= -1e-8 * static_cast<double>(n)) {
      k.diagonal().array() += -lo;
      model.diagonal_shift = -lo;
    }
  }

  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = y[i] * y[j] * k(i, j);
  }
  const Eigen::VectorXd qd = q.diagonal();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  detail::Rng rng(opt.seed);

  auto upper = [&](Eigen::Index t) { return alpha(t) >= c; };
  auto lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

  const long max_iter = static_cast<long>(opt.max_passes) * static_cast<long>(n);
  long iter = 0;
  double violation = 0.0;
  bool converged = false;
  while (true) {
    // Second-order working-set selection.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -grad(t) >= gmax) gmax = -grad(t), i = t;
      } else {
        if (!lower(t) && grad(t) >= gmax) gmax = grad(t), i = t;
      }
    }
    std::vector<Eigen::Index> fallback;
    if (i >= 0) {
      for (Eigen::Index t = 0; t < n; ++t) {
        if (y[t] > 0) {
          if (lower(t)) continue;
          gmax2 = std::max(gmax2, grad(t));
          const double gd = gmax + grad(t);
          if (t != i) fallback.push_back(t);
          if (gd > 0) {
            double quad = qd(i) + qd(t) - 2.0 * y[i] * q(i, t);
            if (quad <= 0) quad = kTau;
            const double obj = -(gd * gd) / quad;
            if (obj <= best) best = obj, j = t;
          }
        } else {
          if (upper(t)) continue;
          gmax2 = std::max(gmax2, -grad(t));
          const double gd = gmax - grad(t);
          if (t != i) fallback.push_back(t);
          if (gd > 0) {
            double quad = qd(i) + qd(t) + 2.0 * y[i] * q(i, t);
            if (quad <= 0) quad = kTau;
            const double obj = -(gd * gd) / quad;
            if (obj <= best) best = obj, j = t;
          }
        }
      }
    }
    violation = i >= 0 ? gmax + gmax2 : 0.0;
    if (i < 0 || violation < opt.tol) {
      converged = true;
      break;
    }
    if (j < 0) {
      if (fallback.empty()) {
        converged = true;
        break;
      }
      j = fallback[detail::uniform_index(rng, fallback.size())];
    }
    if (iter >= max_iter) break;
    ++iter;

    const double ai = alpha(i), aj = alpha(j);
    if (y[i] != y[j]) {
      double quad = qd(i) + qd(j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) alpha(j) = 0, alpha(i) = diff;
      } else {
        if (alpha(i) < 0) alpha(i) = 0, alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = c - diff;
      } else {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = c + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = sum - c;
      } else {
        if (alpha(j) < 0) alpha(j) = 0, alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = sum - c;
      } else {
        if (alpha(i) < 0) alpha(i) = 0, alpha(j) = sum;
      }
    }
    const double di = alpha(i) - ai;
    const double dj = alpha(j) - aj;
    grad.noalias() += q.col(i) * di + q.col(j) * dj;
  }

  model.status = converged ? SolverStatus::Converged : SolverStatus::NotConverged;
  model.iterations = iter;
  model.max_kkt_violation = violation;
  model.bias = detail::bias_from_gradient(grad, alpha, y, c);
  detail::finish_model(model, gram_in, labels, alpha, y, c);
  return model;
}

SvmModel train_svm(const GramMatrix& gram, const std::vector<int>& labels, double c_reg,
                   const SmoOptions& options) {
  SvmModel m = train_svm(gram.values, labels, c_reg, options);
  m.spec = gram.spec;
  return m;
}

Prediction predict(const SvmModel& model, const Eigen::MatrixXd& cross_gram) {
  if (cross_gram.cols() != model.dual_coefs.size()) {
    throw DomainError("cross Gram has " + std::to_string(cross_gram.cols()) + " columns, model has " +
                      std::to_string(model.dual_coefs.size()) + " training points");
  }
  Prediction p;
  p.decision = cross_gram * model.dual_coefs;
  p.decision.array() += model.bias;
  p.labels.resize(static_cast<std::size_t>(p.decision.size()));
  for (Eigen::Index i = 0; i < p.decision.size(); ++i) p.labels[i] = p.decision(i) > 0.0 ? 1 : 0;
  return p;
}

double dual_objective(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                      const SvmModel& model) {
  (void)labels;
  const Eigen::VectorXd& ay = model.dual_coefs;
  return ay.cwiseAbs().sum() - 0.5 * ay.dot(gram * ay);
}

double primal_objective(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                        const SvmModel& model) {
  const std::vector<double> y = detail::signed_labels(labels, gram.rows());
  const Eigen::VectorXd& ay = model.dual_coefs;
  const Eigen::VectorXd f = gram * ay;
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * (f(i) + model.bias));
  return 0.5 * ay.dot(f) + model.c_reg * hinge;
}

std::string fingerprint(const Eigen::MatrixXd& gram, const std::vector<int>& labels) {
  std::vector<double> buf(gram.data(), gram.data() + gram.size());
  for (int l : labels) buf.push_back(l);
  const auto digest = detail::sha256(buf.data(), buf.size() * sizeof(double));
  return detail::hex(digest.data(), 8);
}

std::string to_json(const SvmModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["spec"] = detail::spec_to_json(m.spec);
  j["c_reg"] = m.c_reg;
  j["bias"] = m.bias;
  j["dual_coefs"] = std::vector<double>(m.dual_coefs.data(), m.dual_coefs.data() + m.dual_coefs.size());
  j["support_idx"] = m.support_idx;
  j["train_ref"] = m.train_ref;
  j["status"] = m.status == SolverStatus::Converged ? "converged" : "not_converged";
  j["iterations"] = m.iterations;
  j["diagonal_shift"] = m.diagonal_shift;
  j["max_kkt_violation"] = m.max_kkt_violation;
  return j.dump(2);
}

namespace detail {

nlohmann::json report_to_json(const EvalReport& r) {
  return {{"f1", r.f1},
          {"accuracy", r.accuracy},
          {"split", to_string(r.split_tag)},
          {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}}};
}

}  // namespace detail

std::string to_json(const EvalReport& r) {
  nlohmann::json j = detail::report_to_json(r);
  j["schema_version"] = 1;
  return j.dump(2);
}

}  // namespace kerrkit
