#include <string>

#include <Eigen/Eigenvalues>

#include "kerrkit/error.hpp"
#include "kerrkit/kernels.hpp"
#include "parallel.hpp"

namespace kerrkit {

namespace {

double entry(const KernelSpec& spec, const Eigen::MatrixXd& a, Eigen::Index i,
             const Eigen::MatrixXd& b, Eigen::Index j, const Eigen::MatrixXd* oa,
             const Eigen::MatrixXd* ob) {
  try {
    if (oa || ob) {
      const Eigen::RowVectorXd za = Eigen::RowVectorXd::Zero(a.cols());
      const Eigen::RowVectorXd zb = Eigen::RowVectorXd::Zero(b.cols());
      return feature_kernel(spec, a.row(i), b.row(j), oa ? Eigen::RowVectorXd(oa->row(i)) : za,
                            ob ? Eigen::RowVectorXd(ob->row(j)) : zb);
    }
    return feature_kernel(spec, a.row(i), b.row(j));
  } catch (const DomainError& e) {
    throw DomainError("kernel entry (" + std::to_string(i) + ", " + std::to_string(j) +
                      "): " + e.what());
  }
}

void check_offsets(const Eigen::MatrixXd* off, const Eigen::MatrixXd& x, const char* which) {
  if (off && (off->rows() != x.rows() || off->cols() != x.cols())) {
    throw DomainError(std::string(which) + " encoding offsets must match the feature matrix shape");
  }
}

}  // namespace

GramMatrix gram(const Eigen::MatrixXd& features, const KernelSpec& spec,
                const GramOptions& options) {
  validate(spec);
  const Eigen::Index n = features.rows();
  if (n < 2) throw DomainError("gram requires at least 2 samples");
  check_offsets(options.offsets, features, "gram");
  GramMatrix g;
  g.spec = spec;
  g.values.resize(n, n);
  detail::parallel_for(static_cast<int>(n), detail::resolve_workers(options.workers), [&](int i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g.values(i, j) = entry(spec, features, i, features, j, options.offsets, options.offsets);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) g.values(i, j) = g.values(j, i);
  if (options.audit_psd) g.min_eigenvalue = min_eigenvalue(g.values);
  return g;
}

Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right,
                           const KernelSpec& spec, int workers,
                           const Eigen::MatrixXd* left_offsets,
                           const Eigen::MatrixXd* right_offsets) {
  validate(spec);
  if (left.cols() != right.cols()) throw DomainError("cross_gram feature dimension mismatch");
  check_offsets(left_offsets, left, "left");
  check_offsets(right_offsets, right, "right");
  Eigen::MatrixXd out(left.rows(), right.rows());
  detail::parallel_for(static_cast<int>(left.rows()), detail::resolve_workers(workers), [&](int i) {
    for (Eigen::Index j = 0; j < right.rows(); ++j) {
      out(i, j) = entry(spec, left, i, right, j, left_offsets, right_offsets);
    }
  });
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue audit did not converge");
  return solver.eigenvalues().minCoeff();
}

}  // namespace kerrkit
