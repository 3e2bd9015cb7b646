#pragma once

// Built-in groups with closed-form oracles:
//   heisenberg     3x3 unit upper triangular matrices, r = 2
//   hyperbolic(n)  translations and homotheties of E^{n-1} (constant
//                  curvature -1), Riemannian, r = n
//   so3(a, b)      sub-Riemannian SO(3) with [e1,e2] = ab e3,
//                  [e3,e1] = (b/a) e2, [e2,e3] = (a/b) e1
//   sh2            hyperbolic motions of the plane, r = 2
//   se2            rigid motions of the plane, r = 2

#include <string>
#include <vector>

#include "liegeo/geodesics.hpp"

namespace liegeo {

struct ModelParams {
  enum class Kind { heisenberg, hyperbolic, so3, sh2, se2 };

  Kind kind = Kind::heisenberg;
  int n = 3;       // hyperbolic: 2..6
  double a = 1.0;  // so3: 0 < a <= b
  double b = 1.0;
  int rank = 0;    // so3 only: 2 (default) or 3 (Riemannian)

  static ModelParams heisenberg() { return {Kind::heisenberg}; }
  static ModelParams hyperbolic(int n = 3) { return {Kind::hyperbolic, n}; }
  static ModelParams so3(double a, double b, int rank = 2) {
    return {Kind::so3, 3, a, b, rank};
  }
  static ModelParams sh2() { return {Kind::sh2}; }
  static ModelParams se2() { return {Kind::se2}; }
};

/// Names accepted by the CLI, in listing order.
[[nodiscard]] const std::vector<std::string>& builtin_model_names();
[[nodiscard]] ModelParams::Kind model_kind_from_string(const std::string& name);

[[nodiscard]] LieModel build_model(const ModelParams& params);

/// psi0 = cos(angle) e_1 + sin(angle) e_2 + beta e_3 for the 3-dimensional
/// rank-2 models.
[[nodiscard]] AlgebraVector angle_costate(double angle, double beta);

// ---------------------------------------------------------------------------
// Structured accessors

struct HeisenbergCoords {
  double x = 0.0, y = 0.0, z = 0.0;
  double residual = 0.0;  // distance from the unit upper triangular template
};
struct TildeCoords {
  double x = 0.0, y = 0.0, z = 0.0;  // first-kind coordinates (x, y, z - xy/2)
};
struct PlanarCoords {
  double phi = 0.0, x = 0.0, y = 0.0;
  double residual = 0.0;
};
struct HalfSpacePoint {
  std::vector<double> y;  // length n - 1
  double x = 1.0;         // > 0
};

[[nodiscard]] HeisenbergCoords heisenberg_coords(const GroupElement& g);
/// Throws Errc::invalid_argument when g is not unit upper triangular (1e-9).
[[nodiscard]] TildeCoords heisenberg_tilde(const GroupElement& g);
[[nodiscard]] GroupElement heisenberg_element(double x, double y, double z);

[[nodiscard]] PlanarCoords se2_coords(const GroupElement& g);
[[nodiscard]] GroupElement se2_element(double phi, double x, double y);
[[nodiscard]] PlanarCoords sh2_coords(const GroupElement& g);
[[nodiscard]] GroupElement sh2_element(double phi, double x, double y);

[[nodiscard]] HalfSpacePoint hyperbolic_point(const GroupElement& g, double* residual = nullptr);
[[nodiscard]] GroupElement hyperbolic_element(const HalfSpacePoint& p);

// ---------------------------------------------------------------------------
// Closed forms

/// Geodesic from e with psi0 = (cos xi, sin xi, beta), in first-kind
/// coordinates. |beta| < 1e-12 takes the straight-line branch.
[[nodiscard]] TildeCoords heisenberg_closed_form(double xi, double beta, double t);

/// Geodesic from (0,..,0,1) with unit initial costate phi (length n).
[[nodiscard]] HalfSpacePoint hyperbolic_closed_form(const std::vector<double>& phi, double t);

/// Hyperbolic distance between two half-space points; throws on x <= 0.
[[nodiscard]] double hyperbolic_distance(const HalfSpacePoint& p, const HalfSpacePoint& q);

struct CircleInvariant {
  std::vector<double> centers;  // a_i
  double f0 = 0.0;              // f at the first sample
  double expected_f0 = 0.0;     // 1 / (1 - phi_n^2)
  double drift = 0.0;           // max |f(t) - f(0)|
};

/// f(t) = sum_i (y_i(t) - a_i)^2 + x(t)^2 along samples; requires phi_n^2 < 1.
[[nodiscard]] CircleInvariant hyperbolic_circle_invariant(
    const std::vector<HalfSpacePoint>& samples, const std::vector<double>& phi);

// ---------------------------------------------------------------------------
// Pendulum reductions

struct PendulumSample {
  double t = 0.0;
  double angle = 0.0;
  double rate = 0.0;
};

struct PendulumReduction {
  std::vector<PendulumSample> samples;
  /// Max central-difference residual of the reduced second-order equation
  /// over interior samples.
  double max_residual = 0.0;
  double initial_angle_error = 0.0;
  double initial_rate_error = 0.0;
  /// Max |E(t) - E(0)| with E = rate^2 / 2 - cos(angle).
  double energy_drift = 0.0;
  /// Max deviation of finite-difference (phi', x', y') from the reduced
  /// first-order system (sh2/se2), or of psi_3 from xi'/(ab) (so3).
  double max_consistency = 0.0;
};

/// Continuous unwrap with nearest-branch continuation; throws
/// Errc::step_too_large when consecutive raw angles jump by more than pi/2
/// after unwrapping. `start` picks the branch of the first value.
[[nodiscard]] std::vector<double> unwrap_angles(const std::vector<double>& raw, double start);

/// xi = unwrap(atan2(psi_2, psi_1)); residual of xi'' - ((a^2-b^2)/2) sin 2xi
/// and max |psi_3 - xi'/(ab)|.
[[nodiscard]] PendulumReduction so3_pendulum_residual(const Trajectory& traj, double a, double b);

/// gamma from cos(gamma/2) = sin(alpha) ch(phi) + beta sh(phi),
/// sin(gamma/2) = cos(alpha) - y sin(alpha) - beta x; gamma'' = -sin(gamma).
[[nodiscard]] PendulumReduction sh2_reduction(const Trajectory& traj, double alpha, double beta);

/// omega from sin(omega/2) = sin(alpha) cos(phi) + beta sin(phi),
/// cos(omega/2) = cos(alpha) + y sin(alpha) - beta x; omega'' = -sin(omega).
[[nodiscard]] PendulumReduction se2_reduction(const Trajectory& traj, double alpha, double beta);

struct PeriodClosure {
  double period = 0.0;
  std::vector<TildeCoords> endpoints;  // one per xi
  double max_pairwise = 0.0;           // max spread of endpoints
  double max_planar_return = 0.0;      // max |(x, y)(T)|
};

/// Integrates the costate geodesics for each xi up to 2 pi / |beta| and
/// compares the endpoints. Throws for beta == 0.
[[nodiscard]] PeriodClosure heisenberg_period_closure(const std::vector<double>& xis, double beta,
                                                      double step = 1e-3);

}  // namespace liegeo
