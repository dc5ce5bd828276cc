#include "ifex/solver.hpp"

#include <string>

namespace ifex {

void FactoredOperator::factor(const Eigen::SparseMatrix<double>& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("factor: matrix not square");
  a_ = a;
  a_.makeCompressed();
  if (kind_ == Kind::SPD) {
    if (!ldlt_) ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    if (!analyzed_) {
      ldlt_->analyzePattern(a_);
      analyzed_ = true;
    }
    ldlt_->factorize(a_);
    if (ldlt_->info() != Eigen::Success)
      throw SolverError("factor: Cholesky failed (matrix not positive definite?)");
  } else {
    if (!lu_) lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    if (!analyzed_) {
      lu_->analyzePattern(a_);
      analyzed_ = true;
    }
    lu_->factorize(a_);
    if (lu_->info() != Eigen::Success)
      throw SolverError("factor: LU failed, matrix numerically singular");
  }
  factored_ = true;
}

Eigen::VectorXd FactoredOperator::solve(const Eigen::VectorXd& b) const {
  if (!factored_) throw ContractError("solve: operator not factored");
  if (b.size() != a_.rows()) throw InvalidArgument("solve: dimension mismatch");
  Eigen::VectorXd x;
  if (kind_ == Kind::SPD)
    x = ldlt_->solve(b);
  else
    x = lu_->solve(b);
  const double bnorm = b.norm();
  const double resid = (a_ * x - b).norm();
  if (resid > 1e-10 * std::max(bnorm, 1e-30))
    throw SolverError("solve: residual " + std::to_string(resid / std::max(bnorm, 1e-30)) +
                      " exceeds tolerance");
  return x;
}

Eigen::VectorXd FactoredOperator::solve_adjoint(const Eigen::VectorXd& g) const {
  // both supported operators are symmetric, so the factorization is reused
  return solve(g);
}

FactoredOperator factor(const Eigen::SparseMatrix<double>& a, FactoredOperator::Kind kind) {
  FactoredOperator op(kind);
  op.factor(a);
  return op;
}

}  // namespace ifex
