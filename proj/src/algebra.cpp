#include "liegeo/algebra.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "liegeo/error.hpp"

namespace liegeo {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::not_bracket_generating: return "not bracket-generating";
    case Errc::not_in_span: return "not in algebra span";
    case Errc::outside_branch: return "outside principal branch";
    case Errc::non_finite: return "non-finite value";
    case Errc::zero_field: return "zero geodesic field";
    case Errc::unnormalized_costate: return "unnormalized costate";
    case Errc::outside_chart: return "outside chart";
    case Errc::step_too_large: return "angle jump exceeds step limit";
    case Errc::inconsistent_representation: return "inconsistent representation";
    case Errc::parse_error: return "parse error";
  }
  return "unknown error";
}

namespace {

void require_dim(const AlgebraVector& v, int n, const char* what) {
  if (v.size() != n) {
    std::ostringstream os;
    os << what << ": expected length " << n << ", got " << v.size();
    throw Error(Errc::dimension_mismatch, os.str());
  }
}

}  // namespace

StructureConstants::StructureConstants(int n)
    : n_(n),
      raw_(static_cast<std::size_t>(n) * n * n, 0.0),
      anti_(raw_) {
  if (n <= 0) throw Error(Errc::invalid_argument, "algebra dimension must be positive");
}

StructureConstants StructureConstants::from_dense(int n, std::vector<double> values) {
  StructureConstants sc(n);
  if (values.size() != sc.raw_.size()) {
    throw Error(Errc::dimension_mismatch, "dense structure tensor must have n^3 entries");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "structure constant is not finite");
  }
  sc.raw_ = std::move(values);
  sc.antisymmetrize();
  return sc;
}

StructureConstants StructureConstants::from_entries(int n,
                                                    const std::vector<StructureEntry>& entries) {
  StructureConstants sc(n);
  std::vector<char> given(sc.raw_.size(), 0);
  for (const auto& e : entries) {
    if (e.i < 1 || e.i > n || e.j < 1 || e.j > n || e.k < 1 || e.k > n) {
      std::ostringstream os;
      os << "structure constant index (" << e.i << "," << e.j << "," << e.k
         << ") outside 1.." << n;
      throw Error(Errc::invalid_argument, os.str());
    }
    if (!std::isfinite(e.value)) throw Error(Errc::non_finite, "structure constant is not finite");
    const auto idx = sc.index(e.i - 1, e.j - 1, e.k - 1);
    sc.raw_[idx] = e.value;
    given[idx] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        const auto idx = sc.index(i, j, k);
        const auto mirror = sc.index(j, i, k);
        if (given[idx] && !given[mirror]) sc.raw_[mirror] = -sc.raw_[idx];
      }
    }
  }
  sc.antisymmetrize();
  return sc;
}

void StructureConstants::antisymmetrize() {
  anti_.assign(raw_.size(), 0.0);
  correction_ = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        const double a = raw_[index(i, j, k)];
        const double b = raw_[index(j, i, k)];
        anti_[index(i, j, k)] = 0.5 * (a - b);
        correction_ = std::max(correction_, 0.5 * std::abs(a + b));
      }
    }
  }
}

std::vector<StructureEntry> StructureConstants::entries() const {
  std::vector<StructureEntry> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        const double v = anti_[index(i, j, k)];
        if (v != 0.0) out.push_back({i + 1, j + 1, k + 1, v});
      }
    }
  }
  return out;
}

AlgebraVector basis_vector(int n, int index) {
  if (index < 1 || index > n) {
    std::ostringstream os;
    os << "basis index " << index << " outside 1.." << n;
    throw Error(Errc::invalid_argument, os.str());
  }
  AlgebraVector e = AlgebraVector::Zero(n);
  e(index - 1) = 1.0;
  return e;
}

AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y,
                      const StructureConstants& sc) {
  const int n = sc.dim();
  require_dim(x, n, "bracket lhs");
  require_dim(y, n, "bracket rhs");
  AlgebraVector out = AlgebraVector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const double xy = x(i) * y(j);
      if (xy == 0.0) continue;
      for (int k = 0; k < n; ++k) out(k) += sc(i, j, k) * xy;
    }
  }
  return out;
}

Eigen::MatrixXd ad_matrix(const AlgebraVector& x, const StructureConstants& sc) {
  const int n = sc.dim();
  require_dim(x, n, "ad_matrix");
  Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += sc(i, j, k) * x(i);
      ad(k, j) = s;
    }
  }
  return ad;
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << (kind == Kind::antisymmetry ? "antisymmetry" : "jacobi") << " violated at (";
  for (std::size_t a = 0; a < indices.size(); ++a) os << (a ? "," : "") << indices[a];
  os << "), residual " << residual;
  return os.str();
}

ValidationReport validate(const StructureConstants& sc, double tol) {
  ValidationReport report;
  const int n = sc.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double residual = std::abs(sc.raw(i, j, k) + sc.raw(j, i, k));
        if (residual > tol || !std::isfinite(residual)) {
          report.violations.push_back(
              {Violation::Kind::antisymmetry, {i + 1, j + 1, k + 1}, residual});
        }
      }
    }
  }
  // sum_k c_{jl}^k c_{ik}^m + c_{li}^k c_{jk}^m + c_{ij}^k c_{lk}^m = 0
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        for (int m = 0; m < n; ++m) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) {
            s += sc(j, l, k) * sc(i, k, m) + sc(l, i, k) * sc(j, k, m) +
                 sc(i, j, k) * sc(l, k, m);
          }
          if (std::abs(s) > tol || !std::isfinite(s)) {
            report.violations.push_back(
                {Violation::Kind::jacobi, {i + 1, j + 1, l + 1, m + 1}, std::abs(s)});
          }
        }
      }
    }
  }
  return report;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index a = 0; a < sv.size(); ++a) {
    if (sv(a) > kRankTolerance * sv(0)) ++rank;
  }
  return rank;
}

namespace {

void require_rank(const StructureConstants& sc, int r) {
  if (r < 2 || r > sc.dim()) {
    std::ostringstream os;
    os << "distribution rank " << r << " must satisfy 2 <= r <= n = " << sc.dim();
    throw Error(Errc::invalid_argument, os.str());
  }
}

Eigen::MatrixXd hstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

GenerationFiltration generation_filtration(const StructureConstants& sc, int r) {
  require_rank(sc, r);
  const int n = sc.dim();
  GenerationFiltration filt;
  filt.r = r;

  Eigen::MatrixXd layer = Eigen::MatrixXd::Identity(n, r);  // spanning set of p^k
  Eigen::MatrixXd span = layer;                              // spanning set of p_k
  int rank = numerical_rank(span);
  filt.ranks.push_back(rank);
  while (rank < n) {
    Eigen::MatrixXd next(n, r * layer.cols());
    for (int i = 0; i < r; ++i) {
      const Eigen::MatrixXd ad = ad_matrix(basis_vector(n, i + 1), sc);
      next.middleCols(i * layer.cols(), layer.cols()) = ad * layer;
    }
    span = hstack(span, next);
    const int next_rank = numerical_rank(span);
    if (next_rank == rank) {
      std::ostringstream os;
      os << "span(e_1..e_" << r << ") is not bracket-generating: iterated brackets stop at rank "
         << rank << " < " << n;
      throw Error(Errc::not_bracket_generating, os.str());
    }
    rank = next_rank;
    filt.ranks.push_back(rank);
    layer = next;
  }
  return filt;
}

AlgebraVector evaluate_word(const BracketWord& word, const StructureConstants& sc) {
  if (word.letters.empty()) throw Error(Errc::invalid_argument, "empty bracket word");
  const int n = sc.dim();
  AlgebraVector v = basis_vector(n, word.letters.back());
  for (auto it = word.letters.rbegin() + 1; it != word.letters.rend(); ++it) {
    v = bracket(basis_vector(n, *it), v, sc);
  }
  return v;
}

std::vector<BracketWord> adapted_words(const StructureConstants& sc, int r) {
  const auto filt = generation_filtration(sc, r);
  const int n = sc.dim();
  std::vector<BracketWord> words;
  Eigen::MatrixXd span = Eigen::MatrixXd::Identity(n, r);
  int rank = r;

  for (int length = 2; length <= filt.degree() && rank < n; ++length) {
    // Enumerate letters (i_m, ..., i_1) in lexicographic order.
    std::vector<int> letters(static_cast<std::size_t>(length), 1);
    while (true) {
      BracketWord word{rank + 1, letters};
      const AlgebraVector v = evaluate_word(word, sc);
      if (v.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::MatrixXd trial = hstack(span, v);
        if (numerical_rank(trial) > rank) {
          span = std::move(trial);
          ++rank;
          words.push_back(std::move(word));
          if (rank == n) break;
        }
      }
      int pos = length - 1;
      while (pos >= 0 && letters[static_cast<std::size_t>(pos)] == r) {
        letters[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++letters[static_cast<std::size_t>(pos)];
    }
  }
  if (rank < n) {
    throw Error(Errc::not_bracket_generating, "bracket words do not complete a basis");
  }
  return words;
}

}  // namespace liegeo
