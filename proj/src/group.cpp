#include "liegeo/group.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

#include "liegeo/error.hpp"

namespace liegeo {

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  }
  return v;
}

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(Errc::dimension_mismatch, os.str());
  }
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(Errc::non_finite, std::string(what) + ": non-finite entries");
}

/// Smallest p <= d with m^p == 0 exactly, or 0 when none exists.
int nilpotency_index(const Eigen::MatrixXd& m, std::vector<Eigen::MatrixXd>& powers) {
  const auto d = m.rows();
  powers.clear();
  powers.push_back(m);
  for (Eigen::Index p = 2; p <= d; ++p) {
    powers.push_back(powers.back() * m);
    if (powers.back().isZero(0.0)) return static_cast<int>(p);
  }
  return 0;
}

bool is_invertible(const GroupElement& g) {
  return std::abs(g.determinant()) > 1e-12;
}

}  // namespace

double max_norm(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Representation::Representation(std::vector<Eigen::MatrixXd> basis) : basis_(std::move(basis)) {
  if (basis_.empty()) throw Error(Errc::invalid_argument, "representation needs basis matrices");
  d_ = static_cast<int>(basis_.front().rows());
  const int n = algebra_dim();
  flat_.resize(static_cast<Eigen::Index>(d_) * d_, n);
  for (int i = 0; i < n; ++i) {
    const auto& e = basis_[static_cast<std::size_t>(i)];
    if (e.rows() != d_ || e.cols() != d_) {
      throw Error(Errc::dimension_mismatch, "basis matrices must share one square size");
    }
    require_finite(e, "basis matrix");
    flat_.col(i) = flatten(e);
  }
  if (numerical_rank(flat_) < n) {
    throw Error(Errc::inconsistent_representation, "basis matrices are linearly dependent");
  }
  normal_.compute(flat_.transpose() * flat_);
}

const Eigen::MatrixXd& Representation::basis(int index) const {
  if (index < 1 || index > algebra_dim()) {
    throw Error(Errc::invalid_argument, "basis index outside 1..n");
  }
  return basis_[static_cast<std::size_t>(index - 1)];
}

Eigen::MatrixXd Representation::embed(const AlgebraVector& v) const {
  if (v.size() != algebra_dim()) {
    throw Error(Errc::dimension_mismatch, "embed: vector length differs from algebra dimension");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d_, d_);
  for (int i = 0; i < algebra_dim(); ++i) {
    if (v(i) != 0.0) m += v(i) * basis_[static_cast<std::size_t>(i)];
  }
  return m;
}

Representation::Decomposition Representation::project(const Eigen::MatrixXd& m) const {
  if (m.rows() != d_ || m.cols() != d_) {
    throw Error(Errc::dimension_mismatch, "decompose: matrix size differs from representation");
  }
  const Eigen::VectorXd b = flatten(m);
  Decomposition out;
  out.coeffs = normal_.solve(flat_.transpose() * b);
  out.residual = (flat_ * out.coeffs - b).cwiseAbs().maxCoeff();
  return out;
}

AlgebraVector Representation::decompose(const Eigen::MatrixXd& m, double tol) const {
  auto dec = project(m);
  const double scale = std::max(1.0, max_norm(m));
  if (!(dec.residual <= tol * scale)) {
    std::ostringstream os;
    os << "matrix is not in the algebra span (residual " << dec.residual << ")";
    throw Error(Errc::not_in_span, os.str());
  }
  return std::move(dec.coeffs);
}

double Representation::commutator_residual(const StructureConstants& sc) const {
  const int n = algebra_dim();
  if (sc.dim() != n) {
    throw Error(Errc::dimension_mismatch, "structure constants and representation differ in n");
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = basis_[static_cast<std::size_t>(i)];
      const auto& b = basis_[static_cast<std::size_t>(j)];
      Eigen::MatrixXd diff = a * b - b * a;
      for (int k = 0; k < n; ++k) diff -= sc(i, j, k) * basis_[static_cast<std::size_t>(k)];
      worst = std::max(worst, max_norm(diff));
    }
  }
  return worst;
}

GroupElement exp_matrix(const Eigen::MatrixXd& m) {
  require_square(m, "exp_matrix");
  require_finite(m, "exp_matrix");
  const auto d = m.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  std::vector<Eigen::MatrixXd> powers;
  if (const int p = nilpotency_index(m, powers); p > 0) {
    Eigen::MatrixXd out = id;
    double factorial = 1.0;
    for (int k = 1; k < p; ++k) {
      factorial *= k;
      out += powers[static_cast<std::size_t>(k - 1)] / factorial;
    }
    return out;
  }

  // Scale so that |A|_inf <= 1/2; the order-18 remainder is then below 1e-22.
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd a = m / std::ldexp(1.0, squarings);

  constexpr int kOrder = 18;
  Eigen::MatrixXd out = id;
  for (int k = kOrder; k >= 1; --k) out = id + (a * out) / static_cast<double>(k);
  for (int s = 0; s < squarings; ++s) out = out * out;
  return out;
}

Eigen::MatrixXd log_matrix(const GroupElement& g) {
  require_square(g, "log_matrix");
  require_finite(g, "log_matrix");
  const auto d = g.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  std::vector<Eigen::MatrixXd> powers;
  if (const int p = nilpotency_index(g - id, powers); p > 0) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (int k = 1; k < p; ++k) {
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      out += sign * powers[static_cast<std::size_t>(k - 1)] / static_cast<double>(k);
    }
    return out;
  }
  if (!is_invertible(g)) throw Error(Errc::outside_branch, "log_matrix: singular matrix");

  // Repeated Denman-Beavers square roots until close to the identity.
  Eigen::MatrixXd a = g;
  int roots = 0;
  constexpr int kMaxRoots = 60;
  while (max_norm(a - id) > 0.25) {
    if (++roots > kMaxRoots) {
      throw Error(Errc::outside_branch, "log_matrix: square roots do not approach the identity");
    }
    Eigen::MatrixXd y = a;
    Eigen::MatrixXd z = id;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const Eigen::FullPivLU<Eigen::MatrixXd> ly(y);
      const Eigen::FullPivLU<Eigen::MatrixXd> lz(z);
      if (!ly.isInvertible() || !lz.isInvertible()) break;
      Eigen::MatrixXd y_next = 0.5 * (y + lz.inverse());
      Eigen::MatrixXd z_next = 0.5 * (z + ly.inverse());
      if (!y_next.allFinite()) break;
      const double change = max_norm(y_next - y);
      y = std::move(y_next);
      z = std::move(z_next);
      if (change <= 1e-15 * std::max(1.0, max_norm(y))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(Errc::outside_branch,
                  "log_matrix: matrix square root failed (eigenvalue on the negative axis?)");
    }
    a = std::move(y);
  }

  // log(I + X) = sum_k (-1)^{k+1} X^k / k for |X| <= 1/4.
  const Eigen::MatrixXd x = a - id;
  Eigen::MatrixXd term = x;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int k = 1; k <= 60; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    out += sign * term / static_cast<double>(k);
    if (max_norm(term) / k < 1e-18) break;
    term = term * x;
  }
  return std::ldexp(1.0, roots) * out;
}

Eigen::MatrixXd adjoint_matrix(const GroupElement& g, const Representation& rep) {
  if (g.rows() != rep.dim() || g.cols() != rep.dim()) {
    throw Error(Errc::dimension_mismatch, "adjoint: group element size differs from representation");
  }
  if (!is_invertible(g)) throw Error(Errc::invalid_argument, "adjoint: group element is singular");
  const Eigen::MatrixXd g_inv = g.inverse();
  const int n = rep.algebra_dim();
  Eigen::MatrixXd ad(n, n);
  for (int j = 0; j < n; ++j) {
    ad.col(j) = rep.decompose(g * rep.basis()[static_cast<std::size_t>(j)] * g_inv);
  }
  return ad;
}

AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& v, const Representation& rep) {
  if (g.rows() != rep.dim() || g.cols() != rep.dim()) {
    throw Error(Errc::dimension_mismatch, "adjoint: group element size differs from representation");
  }
  if (!is_invertible(g)) throw Error(Errc::invalid_argument, "adjoint: group element is singular");
  return rep.decompose(g * rep.embed(v) * g.inverse());
}

AlgebraVector coadjoint_pullback(const GroupElement& g, const AlgebraVector& psi,
                                 const Representation& rep) {
  if (psi.size() != rep.algebra_dim()) {
    throw Error(Errc::dimension_mismatch, "coadjoint_pullback: costate length differs from n");
  }
  return adjoint_matrix(g, rep).transpose() * psi;
}

}  // namespace liegeo
