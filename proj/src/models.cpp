#include "liegeo/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "liegeo/error.hpp"

namespace liegeo {

namespace {

using std::numbers::pi;

Eigen::MatrixXd unit(int d, int row, int col) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  m(row, col) = 1.0;
  return m;
}

LieModel make_heisenberg() {
  auto sc = StructureConstants::from_entries(3, {{1, 2, 3, 1.0}});
  Representation rep({unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)});
  return LieModel("heisenberg", std::move(sc), std::move(rep), 2);
}

LieModel make_hyperbolic(int n) {
  if (n < 2 || n > 6) throw Error(Errc::invalid_argument, "hyperbolic model needs 2 <= n <= 6");
  std::vector<StructureEntry> entries;
  for (int i = 1; i < n; ++i) entries.push_back({n, i, i, 1.0});
  auto sc = StructureConstants::from_entries(n, entries);
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < n - 1; ++i) basis.push_back(unit(n, i, n - 1));
  Eigen::MatrixXd homothety = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n - 1; ++k) homothety(k, k) = 1.0;
  basis.push_back(homothety);
  return LieModel("hyperbolic", std::move(sc), Representation(std::move(basis)), n,
                  {{"n", static_cast<double>(n)}});
}

LieModel make_so3(double a, double b, int rank) {
  if (!(a > 0.0) || !(b >= a) || !std::isfinite(b)) {
    throw Error(Errc::invalid_argument, "so3 model needs 0 < a <= b");
  }
  if (rank == 0) rank = 2;
  if (rank != 2 && rank != 3) throw Error(Errc::invalid_argument, "so3 rank must be 2 or 3");
  auto sc = StructureConstants::from_entries(
      3, {{1, 2, 3, a * b}, {3, 1, 2, b / a}, {2, 3, 1, a / b}});
  // Standard rotation generators with [L1, L2] = L3 and cyclic.
  const Eigen::MatrixXd l1 = unit(3, 2, 1) - unit(3, 1, 2);
  const Eigen::MatrixXd l2 = unit(3, 0, 2) - unit(3, 2, 0);
  const Eigen::MatrixXd l3 = unit(3, 1, 0) - unit(3, 0, 1);
  Representation rep({b * l1, a * l2, l3});
  return LieModel("so3", std::move(sc), std::move(rep), rank, {{"a", a}, {"b", b}});
}

LieModel make_sh2() {
  auto sc = StructureConstants::from_entries(3, {{1, 2, 3, 1.0}, {1, 3, 2, 1.0}});
  Representation rep({unit(3, 0, 1) + unit(3, 1, 0), unit(3, 0, 2), unit(3, 1, 2)});
  return LieModel("sh2", std::move(sc), std::move(rep), 2);
}

LieModel make_se2() {
  auto sc = StructureConstants::from_entries(3, {{1, 2, 3, 1.0}, {1, 3, 2, -1.0}});
  Representation rep({unit(3, 1, 0) - unit(3, 0, 1), unit(3, 0, 2), unit(3, 1, 2)});
  return LieModel("se2", std::move(sc), std::move(rep), 2);
}

void require_shape(const GroupElement& g, Eigen::Index d, const char* what) {
  if (g.rows() != d || g.cols() != d) {
    std::ostringstream os;
    os << what << ": expected a " << d << "x" << d << " matrix";
    throw Error(Errc::dimension_mismatch, os.str());
  }
}

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a;
}

/// Uniform grid step of a trajectory; throws when samples are not uniform.
double uniform_step(const Trajectory& traj) {
  if (traj.samples.size() < 5) {
    throw Error(Errc::invalid_argument, "reduction needs at least five samples");
  }
  const double h = traj.samples[1].t - traj.samples[0].t;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double dt = traj.samples[k].t - traj.samples[k - 1].t;
    if (std::abs(dt - h) > 1e-9 * std::max(1.0, h) + 1e-12) {
      throw Error(Errc::invalid_argument, "reduction needs a uniform time grid (no decimation)");
    }
  }
  return h;
}

/// Central first differences, second-order one-sided at both ends.
std::vector<double> first_difference(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  std::vector<double> out(m);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
  for (std::size_t k = 1; k + 1 < m; ++k) out[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  return out;
}

double second_difference(const std::vector<double>& f, std::size_t k, double h) {
  return (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
}

struct PlanarTrack {
  std::vector<double> phi, x, y;
};

PlanarTrack planar_track(const Trajectory& traj, PlanarCoords (*coords)(const GroupElement&)) {
  PlanarTrack tr;
  for (const auto& s : traj.samples) {
    const auto c = coords(s.g);
    tr.phi.push_back(c.phi);
    tr.x.push_back(c.x);
    tr.y.push_back(c.y);
  }
  return tr;
}

/// Pendulum bookkeeping shared by the sh2 and se2 reductions.
void finish_pendulum(PendulumReduction& red, const std::vector<double>& angle, double h) {
  const auto rate = first_difference(angle, h);
  const std::size_t m = angle.size();
  red.samples.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    red.samples[k].t = static_cast<double>(k) * h;
    red.samples[k].angle = angle[k];
    red.samples[k].rate = rate[k];
  }
  const double e0 = 0.5 * rate[0] * rate[0] - std::cos(angle[0]);
  for (std::size_t k = 0; k < m; ++k) {
    const double e = 0.5 * rate[k] * rate[k] - std::cos(angle[k]);
    red.energy_drift = std::max(red.energy_drift, std::abs(e - e0));
  }
  for (std::size_t k = 1; k + 1 < m; ++k) {
    red.max_residual =
        std::max(red.max_residual, std::abs(second_difference(angle, k, h) + std::sin(angle[k])));
  }
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names{"heisenberg", "hyperbolic", "so3", "sh2", "se2"};
  return names;
}

ModelParams::Kind model_kind_from_string(const std::string& name) {
  if (name == "heisenberg") return ModelParams::Kind::heisenberg;
  if (name == "hyperbolic") return ModelParams::Kind::hyperbolic;
  if (name == "so3") return ModelParams::Kind::so3;
  if (name == "sh2") return ModelParams::Kind::sh2;
  if (name == "se2") return ModelParams::Kind::se2;
  throw Error(Errc::invalid_argument, "unknown model '" + name + "'");
}

LieModel build_model(const ModelParams& params) {
  switch (params.kind) {
    case ModelParams::Kind::heisenberg: return make_heisenberg();
    case ModelParams::Kind::hyperbolic: return make_hyperbolic(params.n);
    case ModelParams::Kind::so3: return make_so3(params.a, params.b, params.rank);
    case ModelParams::Kind::sh2: return make_sh2();
    case ModelParams::Kind::se2: return make_se2();
  }
  throw Error(Errc::invalid_argument, "unknown model kind");
}

AlgebraVector angle_costate(double angle, double beta) {
  AlgebraVector psi(3);
  psi << std::cos(angle), std::sin(angle), beta;
  return psi;
}

HeisenbergCoords heisenberg_coords(const GroupElement& g) {
  require_shape(g, 3, "heisenberg_coords");
  HeisenbergCoords c;
  c.x = g(0, 1);
  c.y = g(1, 2);
  c.z = g(0, 2);
  c.residual = max_norm(g - heisenberg_element(c.x, c.y, c.z));
  return c;
}

TildeCoords heisenberg_tilde(const GroupElement& g) {
  const auto c = heisenberg_coords(g);
  if (!(c.residual <= 1e-9)) {
    std::ostringstream os;
    os << "not a unit upper triangular matrix (residual " << c.residual << ")";
    throw Error(Errc::invalid_argument, os.str());
  }
  return {c.x, c.y, c.z - 0.5 * c.x * c.y};
}

GroupElement heisenberg_element(double x, double y, double z) {
  GroupElement g = Eigen::MatrixXd::Identity(3, 3);
  g(0, 1) = x;
  g(1, 2) = y;
  g(0, 2) = z;
  return g;
}

GroupElement se2_element(double phi, double x, double y) {
  GroupElement g = Eigen::MatrixXd::Identity(3, 3);
  g(0, 0) = std::cos(phi);
  g(0, 1) = -std::sin(phi);
  g(1, 0) = std::sin(phi);
  g(1, 1) = std::cos(phi);
  g(0, 2) = x;
  g(1, 2) = y;
  return g;
}

PlanarCoords se2_coords(const GroupElement& g) {
  require_shape(g, 3, "se2_coords");
  PlanarCoords c;
  c.phi = std::atan2(g(1, 0), g(0, 0));
  c.x = g(0, 2);
  c.y = g(1, 2);
  c.residual = max_norm(g - se2_element(c.phi, c.x, c.y));
  return c;
}

GroupElement sh2_element(double phi, double x, double y) {
  GroupElement g = Eigen::MatrixXd::Identity(3, 3);
  g(0, 0) = std::cosh(phi);
  g(0, 1) = std::sinh(phi);
  g(1, 0) = std::sinh(phi);
  g(1, 1) = std::cosh(phi);
  g(0, 2) = x;
  g(1, 2) = y;
  return g;
}

PlanarCoords sh2_coords(const GroupElement& g) {
  require_shape(g, 3, "sh2_coords");
  PlanarCoords c;
  // ch(phi) + sh(phi) = e^phi
  const double e = g(0, 0) + g(1, 0);
  c.phi = e > 0.0 ? std::log(e) : std::numeric_limits<double>::quiet_NaN();
  c.x = g(0, 2);
  c.y = g(1, 2);
  c.residual = std::isfinite(c.phi) ? max_norm(g - sh2_element(c.phi, c.x, c.y))
                                    : std::numeric_limits<double>::infinity();
  return c;
}

HalfSpacePoint hyperbolic_point(const GroupElement& g, double* residual) {
  if (g.rows() < 2 || g.rows() != g.cols()) {
    throw Error(Errc::dimension_mismatch, "hyperbolic_point: expected an n x n matrix, n >= 2");
  }
  const auto n = g.rows();
  HalfSpacePoint p;
  p.x = g(0, 0);
  p.y.resize(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) p.y[static_cast<std::size_t>(i)] = g(i, n - 1);
  if (residual != nullptr) *residual = max_norm(g - hyperbolic_element(p));
  return p;
}

GroupElement hyperbolic_element(const HalfSpacePoint& p) {
  const auto n = static_cast<Eigen::Index>(p.y.size()) + 1;
  GroupElement g = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    g(i, i) = p.x;
    g(i, n - 1) = p.y[static_cast<std::size_t>(i)];
  }
  return g;
}

TildeCoords heisenberg_closed_form(double xi, double beta, double t) {
  if (std::abs(beta) < 1e-12) {
    return {std::cos(xi) * t, std::sin(xi) * t, 0.0};
  }
  TildeCoords c;
  c.x = (std::sin(xi + beta * t) - std::sin(xi)) / beta;
  c.y = (-std::cos(xi + beta * t) + std::cos(xi)) / beta;
  c.z = (t - std::sin(beta * t) / beta) / (2.0 * beta);
  return c;
}

HalfSpacePoint hyperbolic_closed_form(const std::vector<double>& phi, double t) {
  if (phi.size() < 2) throw Error(Errc::invalid_argument, "phi needs length n >= 2");
  const std::size_t m = phi.size() - 1;
  const double phin = phi[m];
  HalfSpacePoint p;
  p.y.assign(m, 0.0);
  if (std::abs(std::abs(phin) - 1.0) < 1e-15) {
    p.x = std::exp(phin > 0 ? t : -t);
    return p;
  }
  const double den = std::cosh(t) - phin * std::sinh(t);
  p.x = 1.0 / den;
  for (std::size_t i = 0; i < m; ++i) p.y[i] = phi[i] * std::sinh(t) / den;
  return p;
}

double hyperbolic_distance(const HalfSpacePoint& p, const HalfSpacePoint& q) {
  if (!(p.x > 0.0) || !(q.x > 0.0)) {
    throw Error(Errc::invalid_argument, "half-space points need a positive x component");
  }
  if (p.y.size() != q.y.size()) throw Error(Errc::dimension_mismatch, "points differ in dimension");
  // cosh d = 1 + |p - q|^2 / (2 x1 x2), evaluated as 2 asinh(|p - q| / (2 sqrt(x1 x2))).
  double sq = (q.x - p.x) * (q.x - p.x);
  for (std::size_t i = 0; i < p.y.size(); ++i) sq += (q.y[i] - p.y[i]) * (q.y[i] - p.y[i]);
  return 2.0 * std::asinh(std::sqrt(sq / (4.0 * p.x * q.x)));
}

CircleInvariant hyperbolic_circle_invariant(const std::vector<HalfSpacePoint>& samples,
                                            const std::vector<double>& phi) {
  if (phi.size() < 2) throw Error(Errc::invalid_argument, "phi needs length n >= 2");
  const std::size_t m = phi.size() - 1;
  const double phin = phi[m];
  const double gap = 1.0 - phin * phin;
  if (!(gap > 1e-12)) {
    throw Error(Errc::invalid_argument, "phi_n = +-1: the geodesic is a vertical line");
  }
  CircleInvariant inv;
  inv.centers.resize(m);
  for (std::size_t i = 0; i < m; ++i) inv.centers[i] = phi[i] * phin / gap;
  inv.expected_f0 = 1.0 / gap;
  auto f = [&](const HalfSpacePoint& p) {
    if (p.y.size() != m) throw Error(Errc::dimension_mismatch, "sample dimension differs from phi");
    double s = p.x * p.x;
    for (std::size_t i = 0; i < m; ++i) s += (p.y[i] - inv.centers[i]) * (p.y[i] - inv.centers[i]);
    return s;
  };
  if (samples.empty()) return inv;
  inv.f0 = f(samples.front());
  for (const auto& p : samples) inv.drift = std::max(inv.drift, std::abs(f(p) - inv.f0));
  return inv;
}

std::vector<double> unwrap_angles(const std::vector<double>& raw, double start) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  out[0] = raw[0] + 2.0 * pi * std::round((start - raw[0]) / (2.0 * pi));
  for (std::size_t k = 1; k < raw.size(); ++k) {
    const double delta = wrap_pi(raw[k] - raw[k - 1]);
    if (std::abs(delta) > 0.5 * pi || !std::isfinite(delta)) {
      std::ostringstream os;
      os << "angle jumps by " << delta << " between samples " << k - 1 << " and " << k;
      throw Error(Errc::step_too_large, os.str());
    }
    out[k] = out[k - 1] + delta;
  }
  return out;
}

PendulumReduction so3_pendulum_residual(const Trajectory& traj, double a, double b) {
  const double h = uniform_step(traj);
  if (traj.samples.front().psi.size() != 3) {
    throw Error(Errc::dimension_mismatch, "so3 reduction needs a 3-dimensional costate");
  }
  std::vector<double> raw, psi3;
  for (const auto& s : traj.samples) {
    raw.push_back(std::atan2(s.psi(1), s.psi(0)));
    psi3.push_back(s.psi(2));
  }
  const auto xi = unwrap_angles(raw, raw.front());
  const auto rate = first_difference(xi, h);
  const double coeff = std::abs(a - b) < 1e-12 ? 0.0 : 0.5 * (a * a - b * b);

  PendulumReduction red;
  const std::size_t m = xi.size();
  red.samples.resize(m);
  for (std::size_t k = 0; k < m; ++k) red.samples[k] = {traj.samples[k].t, xi[k], rate[k]};
  red.initial_rate_error = std::abs(rate[0] - a * b * psi3[0]);
  // E = xi'^2 / 2 + (coeff / 2) cos(2 xi) is conserved by xi'' = coeff sin(2 xi).
  auto energy = [&](std::size_t k) { return 0.5 * rate[k] * rate[k] + 0.5 * coeff * std::cos(2.0 * xi[k]); };
  const double e0 = energy(0);
  for (std::size_t k = 0; k < m; ++k) {
    red.energy_drift = std::max(red.energy_drift, std::abs(energy(k) - e0));
  }
  for (std::size_t k = 1; k + 1 < m; ++k) {
    red.max_residual = std::max(
        red.max_residual, std::abs(second_difference(xi, k, h) - coeff * std::sin(2.0 * xi[k])));
    red.max_consistency = std::max(red.max_consistency, std::abs(psi3[k] - rate[k] / (a * b)));
  }
  return red;
}

PendulumReduction sh2_reduction(const Trajectory& traj, double alpha, double beta) {
  const double h = uniform_step(traj);
  const auto tr = planar_track(traj, &sh2_coords);
  const double sa = std::sin(alpha);
  const double ca = std::cos(alpha);
  std::vector<double> raw;
  for (std::size_t k = 0; k < tr.phi.size(); ++k) {
    const double c = sa * std::cosh(tr.phi[k]) + beta * std::sinh(tr.phi[k]);
    const double s = ca - tr.y[k] * sa - beta * tr.x[k];
    raw.push_back(std::atan2(s, c));
  }
  auto half = unwrap_angles(raw, 0.5 * (pi - 2.0 * alpha));
  std::vector<double> gamma(half.size());
  for (std::size_t k = 0; k < half.size(); ++k) gamma[k] = 2.0 * half[k];

  PendulumReduction red;
  finish_pendulum(red, gamma, h);
  red.initial_angle_error = std::abs(gamma[0] - (pi - 2.0 * alpha));
  red.initial_rate_error = std::abs(red.samples[0].rate + 2.0 * beta);

  const auto dphi = first_difference(tr.phi, h);
  const auto dx = first_difference(tr.x, h);
  const auto dy = first_difference(tr.y, h);
  for (std::size_t k = 1; k + 1 < gamma.size(); ++k) {
    const double sg = std::sin(0.5 * gamma[k]);
    const double cg = std::cos(0.5 * gamma[k]);
    red.max_consistency = std::max({red.max_consistency, std::abs(dphi[k] - sg),
                                    std::abs(dx[k] - cg * std::cosh(tr.phi[k])),
                                    std::abs(dy[k] - cg * std::sinh(tr.phi[k]))});
  }
  return red;
}

PendulumReduction se2_reduction(const Trajectory& traj, double alpha, double beta) {
  const double h = uniform_step(traj);
  const auto tr = planar_track(traj, &se2_coords);
  const double sa = std::sin(alpha);
  const double ca = std::cos(alpha);
  std::vector<double> raw_phi(tr.phi);
  const auto phi = unwrap_angles(raw_phi, 0.0);
  std::vector<double> raw;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double s = sa * std::cos(phi[k]) + beta * std::sin(phi[k]);
    const double c = ca + tr.y[k] * sa - beta * tr.x[k];
    raw.push_back(std::atan2(s, c));
  }
  auto half = unwrap_angles(raw, alpha);
  std::vector<double> omega(half.size());
  for (std::size_t k = 0; k < half.size(); ++k) omega[k] = 2.0 * half[k];

  PendulumReduction red;
  finish_pendulum(red, omega, h);
  red.initial_angle_error = std::abs(omega[0] - 2.0 * alpha);
  red.initial_rate_error = std::abs(red.samples[0].rate - 2.0 * beta);

  const auto dphi = first_difference(phi, h);
  const auto dx = first_difference(tr.x, h);
  const auto dy = first_difference(tr.y, h);
  for (std::size_t k = 1; k + 1 < omega.size(); ++k) {
    const double so = std::sin(0.5 * omega[k]);
    const double co = std::cos(0.5 * omega[k]);
    red.max_consistency = std::max({red.max_consistency, std::abs(dphi[k] - co),
                                    std::abs(dx[k] - so * std::cos(phi[k])),
                                    std::abs(dy[k] - so * std::sin(phi[k]))});
  }
  return red;
}

PeriodClosure heisenberg_period_closure(const std::vector<double>& xis, double beta,
                                        double step) {
  if (std::abs(beta) < 1e-12) throw Error(Errc::invalid_argument, "period closure needs beta != 0");
  const LieModel model = build_model(ModelParams::heisenberg());
  PeriodClosure out;
  out.period = 2.0 * pi / std::abs(beta);
  IntegratorConfig cfg;
  cfg.step = step;
  cfg.horizon = out.period;
  for (double xi : xis) {
    const auto traj = integrate_costate(model, angle_costate(xi, beta), cfg);
    const auto end = heisenberg_tilde(traj.back().g);
    out.max_planar_return = std::max(out.max_planar_return, std::hypot(end.x, end.y));
    out.endpoints.push_back(end);
  }
  for (std::size_t i = 0; i < out.endpoints.size(); ++i) {
    for (std::size_t j = i + 1; j < out.endpoints.size(); ++j) {
      const auto& p = out.endpoints[i];
      const auto& q = out.endpoints[j];
      out.max_pairwise = std::max(
          {out.max_pairwise, std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
    }
  }
  return out;
}

}  // namespace liegeo
