#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <memory>

#include "ifex/types.hpp"

namespace ifex {

// Direct sparse factorization with a residual check on every solve.
// SPD systems use a simplicial Cholesky, indefinite saddle systems sparse LU.
// The symbolic analysis is reused when refactoring with the same pattern.
class FactoredOperator {
 public:
  enum class Kind { SPD, SymmetricIndefinite };

  FactoredOperator() = default;
  explicit FactoredOperator(Kind kind) : kind_(kind) {}

  void factor(const Eigen::SparseMatrix<double>& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::VectorXd solve_adjoint(const Eigen::VectorXd& g) const;  // A symmetric here

  Kind kind() const { return kind_; }
  bool factored() const { return factored_; }

 private:
  Kind kind_ = Kind::SPD;
  bool factored_ = false;
  bool analyzed_ = false;
  Eigen::SparseMatrix<double> a_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

FactoredOperator factor(const Eigen::SparseMatrix<double>& a,
                        FactoredOperator::Kind kind = FactoredOperator::Kind::SPD);

}  // namespace ifex
