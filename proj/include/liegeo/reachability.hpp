#pragma once

// Bang-bang steering on a bracket-generating left-invariant distribution.
//
// A basis direction e_j outside p is reached through its bracket word: the
// conjugation exp(t_m e_{i_m}) ... exp(t_2 e_{i_2}) exp(s e_{i_1})
// exp(-t_2 e_{i_2}) ... exp(-t_m e_{i_m}) equals exp(s e'_j) for the
// perturbed direction e'_j = Ad(exp(t_m e_{i_m})) ... Ad(exp(t_2 e_{i_2})) e_{i_1}.
// Steering inverts the second-kind chart built on the perturbed basis, so
// every chart coordinate is realized exactly by bangs.

#include <string>
#include <vector>

#include "liegeo/geodesics.hpp"

namespace liegeo {

struct ControlSegment {
  double duration = 0.0;  // >= 0
  int index = 1;          // 1..r
  int sign = 1;           // +1 or -1
};

struct ControlSchedule {
  std::vector<ControlSegment> segments;

  [[nodiscard]] bool empty() const noexcept { return segments.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return segments.size(); }
  [[nodiscard]] double total_duration() const noexcept;

  /// Throws Errc::invalid_argument on negative or non-finite durations,
  /// indices outside 1..r or signs other than +-1.
  void check(int r) const;

  /// Appends `other`, dropping zero-length segments.
  void append(const ControlSchedule& other);

  /// Reversed order with flipped signs; drives the endpoint back to g0.
  [[nodiscard]] ControlSchedule inverse() const;
};

/// g0 exp(d_1 sigma_1 e_{j_1}) exp(d_2 sigma_2 e_{j_2}) ...
[[nodiscard]] GroupElement simulate_schedule(const GroupElement& g0, const ControlSchedule& sched,
                                             const LieModel& model);

/// exp(s_1 e_1) ... exp(s_n e_n).
[[nodiscard]] GroupElement phi(const AlgebraVector& s, const LieModel& model);

/// exp(s_1 B_1) ... exp(s_n B_n) for arbitrary algebra elements B_k given as
/// representation matrices.
[[nodiscard]] GroupElement phi_basis(const AlgebraVector& s, const std::vector<Eigen::MatrixXd>& basis);

struct ChartInversion {
  AlgebraVector s;
  double residual = 0.0;  // max-norm of phi(s) - g
  int iterations = 0;
};

/// Damped Gauss-Newton on s -> phi_basis(s) - g from s = 0 with a central
/// difference Jacobian. Throws Errc::outside_chart when the residual does
/// not drop below `tol` within `max_iterations`.
[[nodiscard]] ChartInversion phi_inverse_basis(const GroupElement& g,
                                               const std::vector<Eigen::MatrixXd>& basis,
                                               double tol = 1e-10, int max_iterations = 100);

/// Same iteration started from `start`.
[[nodiscard]] ChartInversion phi_inverse_basis(const GroupElement& g,
                                               const std::vector<Eigen::MatrixXd>& basis,
                                               const AlgebraVector& start, double tol = 1e-10,
                                               int max_iterations = 100);

/// phi_inverse_basis on the model basis.
[[nodiscard]] AlgebraVector phi_inverse_local(const GroupElement& g, const LieModel& model,
                                              double tol = 1e-10);

/// t_2..t_m for a word of length m, all equal to `t`.
[[nodiscard]] std::vector<double> uniform_t_params(const BracketWord& word, double t = 0.1);

/// e'_j for `word` with the given t_2..t_m, in algebra coordinates.
[[nodiscard]] AlgebraVector perturbed_direction(const BracketWord& word,
                                                const std::vector<double>& t_params,
                                                const LieModel& model);

/// Forward segments |t_m|..|t_2| on i_m..i_2 with signs sgn(t_l), the middle
/// segment |s| on i_1 with sign sgn(s), then the forward segments reversed
/// with flipped signs. A word of length one gives the single segment
/// (|s|, sgn(s) e_{i_1}). Zero-length middle segments are kept out.
[[nodiscard]] ControlSchedule schedule_for_basis_direction(const BracketWord& word, double s,
                                                           const std::vector<double>& t_params,
                                                           const LieModel& model);

/// The product exp(t_m e_{i_m}) ... exp(s e_{i_1}) ... exp(-t_m e_{i_m})
/// from matrix exponentials, without schedules.
[[nodiscard]] GroupElement conjugated_exponential(const BracketWord& word, double s,
                                                  const std::vector<double>& t_params,
                                                  const LieModel& model);

/// Words and perturbed directions completing e_1..e_r.
struct SteeringBasis {
  std::vector<BracketWord> words;          // one per index r+1..n
  std::vector<std::vector<double>> t_params;
  std::vector<Eigen::MatrixXd> matrices;   // e_1..e_r, e'_{r+1}..e'_n
};

[[nodiscard]] SteeringBasis steering_basis(const LieModel& model, double t = 0.1);

struct SteerOptions {
  double tol = 1e-6;
  double t_param = 0.1;
  /// Upper bound on the coefficient norm of log(g^{1/K}).
  double max_factor_norm = 0.3;
  int max_outer_iterations = 20;
  /// Duration of the single bangs tried when the principal logarithm of the
  /// remaining displacement does not exist.
  double escape_duration = 0.5;
};

struct SteerResult {
  ControlSchedule schedule;
  double error = 0.0;  // max-norm distance of the simulated endpoint to the target
  bool converged = false;
  int outer_iterations = 0;
  std::string message;
};

/// Schedule driving the identity to `target`. Failure is reported through
/// `converged` and `message`, with the best schedule found.
[[nodiscard]] SteerResult steer(const GroupElement& target, const LieModel& model,
                                const SteerOptions& options = {});

}  // namespace liegeo
