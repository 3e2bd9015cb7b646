#pragma once

// Lie-algebra core: structure constants, brackets, adjoint operators,
// Jacobi validation, the generation filtration of a distribution and
// adapted bases built from iterated bracket words.
//
// Basis labels (e_1 .. e_n) are 1-based wherever they are user facing:
// bracket words, validation reports and error messages. Coefficient vectors
// are plain Eigen vectors and use 0-based positions.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace liegeo {

/// Coordinates of an algebra element (or a covector, identified with a
/// vector through the orthonormal basis e_1..e_n).
using AlgebraVector = Eigen::VectorXd;

/// Singular values below this fraction of the largest one count as zero in
/// span computations.
inline constexpr double kRankTolerance = 1e-10;

/// Elementwise tolerance for antisymmetry and Jacobi residuals.
inline constexpr double kIdentityTolerance = 1e-12;

/// One nonzero entry c_{ij}^k, indices 1-based.
struct StructureEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

/// Dense tensor c_{ij}^k with [e_i, e_j] = sum_k c_{ij}^k e_k.
///
/// The tensor is kept exactly as supplied so that validate() can report
/// defects of the input. Brackets are evaluated with the antisymmetric part
/// (c_{ij}^k - c_{ji}^k) / 2, which makes bracket(x, y) == -bracket(y, x)
/// hold exactly regardless of the input.
class StructureConstants {
 public:
  StructureConstants() = default;

  /// Zero tensor (abelian algebra) of dimension n.
  explicit StructureConstants(int n);

  /// Raw dense tensor, `values[(i * n + j) * n + k]` holds c_{ij}^k with
  /// 0-based positions.
  static StructureConstants from_dense(int n, std::vector<double> values);

  /// Sparse entries (1-based). An entry (i, j, k) whose mirror (j, i, k) is
  /// not listed gets the mirror filled in with the opposite sign.
  static StructureConstants from_entries(int n, const std::vector<StructureEntry>& entries);

  [[nodiscard]] int dim() const noexcept { return n_; }

  /// Raw input value, 0-based positions.
  [[nodiscard]] double raw(int i, int j, int k) const {
    return raw_[index(i, j, k)];
  }

  /// Antisymmetrized value used by every algebraic operation, 0-based.
  [[nodiscard]] double operator()(int i, int j, int k) const {
    return anti_[index(i, j, k)];
  }

  /// Largest |c_{ij}^k + c_{ji}^k| / 2 removed by antisymmetrization.
  [[nodiscard]] double antisymmetry_correction() const noexcept { return correction_; }

  /// Nonzero entries of the antisymmetrized tensor with i < j, 1-based.
  [[nodiscard]] std::vector<StructureEntry> entries() const;

 private:
  [[nodiscard]] std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  void antisymmetrize();

  int n_ = 0;
  std::vector<double> raw_;
  std::vector<double> anti_;
  double correction_ = 0.0;
};

/// Unit coordinate vector e_index (index 1-based).
[[nodiscard]] AlgebraVector basis_vector(int n, int index);

/// [x, y]_k = sum_{i,j} c_{ij}^k x_i y_j.
[[nodiscard]] AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y,
                                    const StructureConstants& sc);

/// Matrix of ad(x); column j is bracket(x, e_j).
[[nodiscard]] Eigen::MatrixXd ad_matrix(const AlgebraVector& x, const StructureConstants& sc);

struct Violation {
  enum class Kind { antisymmetry, jacobi };
  Kind kind = Kind::antisymmetry;
  /// Antisymmetry: (i, j, k). Jacobi: (i, j, l, m). 1-based.
  std::vector<int> indices;
  double residual = 0.0;

  [[nodiscard]] std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Checks antisymmetry of the raw tensor and the Jacobi identity of its
/// antisymmetric part, both at `tol` elementwise.
[[nodiscard]] ValidationReport validate(const StructureConstants& sc,
                                        double tol = kIdentityTolerance);

/// Ranks r_1 < r_2 < ... < r_s = n of p_1 subset p_2 subset ... where
/// p = span(e_1..e_r).
struct GenerationFiltration {
  int r = 0;
  std::vector<int> ranks;

  [[nodiscard]] int degree() const noexcept { return static_cast<int>(ranks.size()); }
};

/// Numerical rank of the columns of `m` at relative tolerance kRankTolerance.
[[nodiscard]] int numerical_rank(const Eigen::MatrixXd& m);

/// Throws Errc::not_bracket_generating when the iterated brackets of
/// span(e_1..e_r) do not fill the algebra.
[[nodiscard]] GenerationFiltration generation_filtration(const StructureConstants& sc, int r);

/// Iterated bracket [e_{i_m}, [..., [e_{i_2}, e_{i_1}]...]] completing an
/// adapted basis at position `target_index`. Letters are stored outermost
/// first: letters = (i_m, ..., i_2, i_1), all in 1..r.
struct BracketWord {
  int target_index = 0;
  std::vector<int> letters;

  [[nodiscard]] int length() const noexcept { return static_cast<int>(letters.size()); }
  /// Innermost letter i_1.
  [[nodiscard]] int innermost() const { return letters.back(); }
};

/// Evaluates a word with bracket().
[[nodiscard]] AlgebraVector evaluate_word(const BracketWord& word, const StructureConstants& sc);

/// Breadth-first (by word length), lexicographic search for words whose
/// values extend the current span; one word per index r+1..n.
[[nodiscard]] std::vector<BracketWord> adapted_words(const StructureConstants& sc, int r);

}  // namespace liegeo
