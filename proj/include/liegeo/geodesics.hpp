#pragma once

// Normal geodesics of left-invariant (sub-)Riemannian metrics.
//
// Two independent routes produce the same curves:
//   * the costate method integrates g' = g u, u = (psi_1..psi_r), together
//     with psi_j' = sum_k sum_{i<=r} c_{ij}^k psi_i psi_k;
//   * the field method integrates g' = g u(g) where u(g) is the projection
//     onto p = span(e_1..e_r) of the coadjoint pullback (Ad g)^* psi_0.
// Both share one fixed-step classical Runge-Kutta integrator acting on the
// ambient matrix space.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liegeo/algebra.hpp"
#include "liegeo/error.hpp"
#include "liegeo/group.hpp"

namespace liegeo {

/// A complete group description. The first r basis vectors are orthonormal
/// and span the distribution; e_1..e_n are orthonormal for the extended
/// scalar product that identifies covectors with vectors.
class LieModel {
 public:
  LieModel() = default;

  /// Validates the tensor, the representation's commutators and the
  /// generation filtration; any failure throws.
  LieModel(std::string name, StructureConstants sc, Representation rep, int r,
           std::map<std::string, double> params = {});

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const StructureConstants& structure() const noexcept { return sc_; }
  [[nodiscard]] const Representation& rep() const noexcept { return rep_; }
  [[nodiscard]] int dim() const noexcept { return sc_.dim(); }
  [[nodiscard]] int rank() const noexcept { return r_; }
  [[nodiscard]] int rep_dim() const noexcept { return rep_.dim(); }
  [[nodiscard]] bool riemannian() const noexcept { return r_ == dim(); }
  [[nodiscard]] const std::map<std::string, double>& params() const noexcept { return params_; }
  [[nodiscard]] std::optional<double> param(const std::string& key) const;
  [[nodiscard]] const GenerationFiltration& filtration() const noexcept { return filtration_; }

 private:
  std::string name_;
  StructureConstants sc_;
  Representation rep_;
  int r_ = 0;
  std::map<std::string, double> params_;
  GenerationFiltration filtration_;
};

struct IntegratorConfig {
  double step = 1e-3;
  double horizon = 10.0;
  /// Accept psi0 with |u(0)| != 1 and integrate at constant speed |u(0)|.
  bool allow_unnormalized = false;

  /// Throws Errc::invalid_argument unless step > 0, horizon > 0 and
  /// horizon / step <= 1e8.
  void check() const;

  /// Number of steps: floor(horizon / step), at least one.
  [[nodiscard]] long long steps() const;
  /// horizon / steps(); never smaller than `step` and at most one step's
  /// worth of relative change larger, so the last sample sits exactly on
  /// the horizon.
  [[nodiscard]] double effective_step() const;
};

struct TrajectorySample {
  double t = 0.0;
  GroupElement g;
  AlgebraVector psi;
  AlgebraVector u;  // length r
};

struct ConservationReport {
  double max_speed_deviation = 0.0;        // max | |u(t)| - speed |
  double max_hamiltonian_deviation = 0.0;  // max | psi(t).u(t) - speed^2 |
};

struct Trajectory {
  enum class Method { costate, field };

  std::string model;
  Method method = Method::costate;
  AlgebraVector psi0;
  double step = 0.0;  // effective step
  double horizon = 0.0;
  /// |u| at the start; 1 for arclength-parametrized runs.
  double speed = 1.0;
  std::vector<TrajectorySample> samples;
  ConservationReport diagnostics;

  [[nodiscard]] const TrajectorySample& back() const { return samples.back(); }
};

[[nodiscard]] const char* to_string(Trajectory::Method m) noexcept;
[[nodiscard]] Trajectory::Method method_from_string(const std::string& s);

/// psi_j' = sum_{k} sum_{i<=r} c_{ij}^k psi_i psi_k.
[[nodiscard]] AlgebraVector costate_rhs(const AlgebraVector& psi, const LieModel& model);

/// First r coordinates of psi, the rest zeroed; length n.
[[nodiscard]] AlgebraVector control_of(const AlgebraVector& psi, int r);

/// Costate route from g(0) = I. Throws Errc::unnormalized_costate when
/// |u(0)| != 1 (1e-9) unless cfg.allow_unnormalized, and Errc::non_finite
/// (with the partial trajectory in IntegrationAborted) on blow-up.
[[nodiscard]] Trajectory integrate_costate(const LieModel& model, const AlgebraVector& psi0,
                                           const IntegratorConfig& cfg);

/// g u(g) with u(g) the first-r truncation of coadjoint_pullback(g, psi0).
[[nodiscard]] Eigen::MatrixXd field_rhs(const GroupElement& g, const AlgebraVector& psi0,
                                        const LieModel& model);

/// u(g) of the geodesic field, length r.
[[nodiscard]] AlgebraVector field_control(const GroupElement& g, const AlgebraVector& psi0,
                                          const LieModel& model);

/// Field route from an arbitrary start g0. The curve runs at constant speed
/// |u(g0)|; psi samples are reconstructed as coadjoint_pullback(g(t), psi0).
/// Throws Errc::zero_field when |u(g0)| <= 1e-12.
[[nodiscard]] Trajectory integrate_field(const LieModel& model, const AlgebraVector& psi0,
                                         const GroupElement& g0, const IntegratorConfig& cfg);

/// Thrown when the state stops being finite; carries the samples so far.
class IntegrationAborted : public Error {
 public:
  IntegrationAborted(const std::string& what, Trajectory partial)
      : Error(Errc::non_finite, what), partial_(std::move(partial)) {}
  [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// Recomputes the conservation maxima over every sample.
[[nodiscard]] ConservationReport conservation_report(const Trajectory& traj);

/// Max over samples of |g1(t) - g2(t)|_max. Throws Errc::invalid_argument on
/// mismatched time grids.
[[nodiscard]] double compare_methods(const Trajectory& a, const Trajectory& b);

/// Max deviation of the costate geodesic from t -> exp(t embed(psi0)).
/// Meaningful for bi-invariant Riemannian metrics and for psi0 in p when the
/// geodesic is a one-parameter subgroup.
[[nodiscard]] double one_parameter_check(const LieModel& model, const AlgebraVector& psi0,
                                         double horizon, double step);

/// Keeps every `stride`-th sample and the last one.
[[nodiscard]] Trajectory decimate(const Trajectory& traj, int stride);

}  // namespace liegeo
