#pragma once

// Matrix-group layer: representations of the algebra, exp/log, adjoint and
// coadjoint actions.

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <vector>

#include "liegeo/algebra.hpp"

namespace liegeo {

/// Group elements are raw d x d matrices.
using GroupElement = Eigen::MatrixXd;

/// Max-norm (largest absolute entry).
[[nodiscard]] double max_norm(const Eigen::MatrixXd& m);

/// Basis matrices E_1..E_n of the algebra inside gl(d).
///
/// Construction caches the normal-equation factorization used by
/// decompose(), so a Representation is cheap to query and read-only.
class Representation {
 public:
  Representation() = default;
  explicit Representation(std::vector<Eigen::MatrixXd> basis);

  [[nodiscard]] int dim() const noexcept { return d_; }
  [[nodiscard]] int algebra_dim() const noexcept { return static_cast<int>(basis_.size()); }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& basis() const noexcept { return basis_; }
  [[nodiscard]] const Eigen::MatrixXd& basis(int index) const;  // 1-based

  /// sum_i v_i E_i
  [[nodiscard]] Eigen::MatrixXd embed(const AlgebraVector& v) const;

  struct Decomposition {
    AlgebraVector coeffs;
    double residual = 0.0;  // max-norm of embed(coeffs) - m
  };

  /// Least-squares coefficients without the span check.
  [[nodiscard]] Decomposition project(const Eigen::MatrixXd& m) const;

  /// Left inverse of embed. Throws Errc::not_in_span when the residual
  /// exceeds `tol * max(1, |m|_max)`.
  [[nodiscard]] AlgebraVector decompose(const Eigen::MatrixXd& m, double tol = 1e-9) const;

  /// Largest entry of E_iE_j - E_jE_i - sum_k c_{ij}^k E_k over all i < j.
  [[nodiscard]] double commutator_residual(const StructureConstants& sc) const;

 private:
  int d_ = 0;
  std::vector<Eigen::MatrixXd> basis_;
  Eigen::MatrixXd flat_;  // d^2 x n, column i = vec(E_i)
  Eigen::LDLT<Eigen::MatrixXd> normal_;
};

/// Truncated power series with scaling and squaring. Nilpotent arguments are
/// summed exactly without scaling.
[[nodiscard]] GroupElement exp_matrix(const Eigen::MatrixXd& m);

/// Principal logarithm via inverse scaling and squaring. Throws
/// Errc::outside_branch when square roots fail to converge.
[[nodiscard]] Eigen::MatrixXd log_matrix(const GroupElement& g);

/// Ad(g) v = g v g^{-1}, expressed in the basis.
[[nodiscard]] AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& v,
                                    const Representation& rep);

/// Matrix of Ad(g) in the basis (column j = Ad(g) e_j).
[[nodiscard]] Eigen::MatrixXd adjoint_matrix(const GroupElement& g, const Representation& rep);

/// (Ad g)^* psi = psi Ad(g) with psi as a row vector.
[[nodiscard]] AlgebraVector coadjoint_pullback(const GroupElement& g, const AlgebraVector& psi,
                                               const Representation& rep);

}  // namespace liegeo
