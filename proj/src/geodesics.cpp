#include "liegeo/geodesics.hpp"

#include <Eigen/LU>
#include <cmath>
#include <functional>
#include <sstream>

#include "liegeo/error.hpp"

namespace liegeo {

LieModel::LieModel(std::string name, StructureConstants sc, Representation rep, int r,
                   std::map<std::string, double> params)
    : name_(std::move(name)),
      sc_(std::move(sc)),
      rep_(std::move(rep)),
      r_(r),
      params_(std::move(params)) {
  if (rep_.algebra_dim() != sc_.dim()) {
    throw Error(Errc::dimension_mismatch,
                "representation has " + std::to_string(rep_.algebra_dim()) +
                    " basis matrices but the algebra has dimension " + std::to_string(sc_.dim()));
  }
  if (const auto report = validate(sc_); !report.ok()) {
    throw Error(Errc::invalid_argument,
                "structure constants of '" + name_ + "' fail validation: " +
                    report.violations.front().describe());
  }
  if (const double res = rep_.commutator_residual(sc_); !(res <= kIdentityTolerance)) {
    std::ostringstream os;
    os << "representation of '" << name_
       << "' does not reproduce the structure constants (residual " << res << ")";
    throw Error(Errc::inconsistent_representation, os.str());
  }
  if (r_ == dim()) {
    filtration_.r = r_;
    filtration_.ranks = {r_};
  } else {
    filtration_ = generation_filtration(sc_, r_);
  }
}

std::optional<double> LieModel::param(const std::string& key) const {
  if (auto it = params_.find(key); it != params_.end()) return it->second;
  return std::nullopt;
}

void IntegratorConfig::check() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(Errc::invalid_argument, "integrator step must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(Errc::invalid_argument, "integration horizon must be positive");
  }
  if (horizon / step > 1e8) {
    throw Error(Errc::invalid_argument, "horizon / step exceeds 1e8 steps");
  }
}

long long IntegratorConfig::steps() const {
  const double ratio = horizon / step;
  const double nearest = std::round(ratio);
  long long n = (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
                    ? static_cast<long long>(nearest)
                    : static_cast<long long>(std::floor(ratio));
  return std::max(1LL, n);
}

double IntegratorConfig::effective_step() const {
  return horizon / static_cast<double>(steps());
}

const char* to_string(Trajectory::Method m) noexcept {
  return m == Trajectory::Method::costate ? "costate" : "field";
}

Trajectory::Method method_from_string(const std::string& s) {
  if (s == "costate") return Trajectory::Method::costate;
  if (s == "field") return Trajectory::Method::field;
  throw Error(Errc::invalid_argument, "unknown method '" + s + "' (costate|field)");
}

namespace {

using State = Eigen::VectorXd;
using Rhs = std::function<State(const State&)>;

/// Classical fourth-order Runge-Kutta step with compensated accumulation of
/// the increment into the state.
void rk4_step(const Rhs& f, double h, State& y, State& carry) {
  const State k1 = f(y);
  const State k2 = f(y + 0.5 * h * k1);
  const State k3 = f(y + 0.5 * h * k2);
  const State k4 = f(y + h * k3);
  const State incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double add = incr(i) + carry(i);
    const double sum = y(i) + add;
    carry(i) = add - (sum - y(i));
    y(i) = sum;
  }
}

void pack_matrix(const Eigen::MatrixXd& m, State& s, Eigen::Index offset) {
  const auto d = m.rows();
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) s(offset + r * d + c) = m(r, c);
  }
}

Eigen::MatrixXd unpack_matrix(const State& s, Eigen::Index d, Eigen::Index offset) {
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = s(offset + r * d + c);
  }
  return m;
}

double control_norm(const AlgebraVector& psi, int r) {
  return psi.head(r).norm();
}

void require_costate(const AlgebraVector& psi0, const LieModel& model) {
  if (psi0.size() != model.dim()) {
    throw Error(Errc::dimension_mismatch,
                "costate must have length n = " + std::to_string(model.dim()));
  }
  if (!psi0.allFinite()) throw Error(Errc::non_finite, "costate is not finite");
}

void require_speed(double speed, const IntegratorConfig& cfg) {
  if (!cfg.allow_unnormalized && std::abs(speed - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "|u(0)| = " << speed << " differs from 1; enable constant-speed runs to accept it";
    throw Error(Errc::unnormalized_costate, os.str());
  }
}

}  // namespace

AlgebraVector control_of(const AlgebraVector& psi, int r) {
  if (r < 0 || r > psi.size()) throw Error(Errc::invalid_argument, "control rank outside 0..n");
  AlgebraVector u = AlgebraVector::Zero(psi.size());
  u.head(r) = psi.head(r);
  return u;
}

AlgebraVector costate_rhs(const AlgebraVector& psi, const LieModel& model) {
  const int n = model.dim();
  const int r = model.rank();
  if (psi.size() != n) throw Error(Errc::dimension_mismatch, "costate_rhs: length differs from n");
  const auto& sc = model.structure();
  AlgebraVector out = AlgebraVector::Zero(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < r; ++i) {
      if (psi(i) == 0.0) continue;
      double inner = 0.0;
      for (int k = 0; k < n; ++k) inner += sc(i, j, k) * psi(k);
      s += psi(i) * inner;
    }
    out(j) = s;
  }
  return out;
}

Trajectory integrate_costate(const LieModel& model, const AlgebraVector& psi0,
                             const IntegratorConfig& cfg) {
  cfg.check();
  require_costate(psi0, model);
  const int n = model.dim();
  const int r = model.rank();
  const Eigen::Index d = model.rep_dim();
  const double speed = control_norm(psi0, r);
  require_speed(speed, cfg);

  Trajectory traj;
  traj.model = model.name();
  traj.method = Trajectory::Method::costate;
  traj.psi0 = psi0;
  traj.step = cfg.effective_step();
  traj.horizon = cfg.horizon;
  traj.speed = speed;

  const auto& rep = model.rep();
  const Rhs rhs = [&](const State& y) {
    State dy(y.size());
    const Eigen::MatrixXd g = unpack_matrix(y, d, 0);
    const AlgebraVector psi = y.tail(n);
    pack_matrix(g * rep.embed(control_of(psi, r)), dy, 0);
    dy.tail(n) = costate_rhs(psi, model);
    return dy;
  };

  State y(d * d + n);
  pack_matrix(Eigen::MatrixXd::Identity(d, d), y, 0);
  y.tail(n) = psi0;
  State carry = State::Zero(y.size());

  const long long steps = cfg.steps();
  traj.samples.reserve(static_cast<std::size_t>(steps + 1));
  auto record = [&](long long k) {
    TrajectorySample s;
    s.t = (k == steps) ? cfg.horizon : static_cast<double>(k) * traj.step;
    s.g = unpack_matrix(y, d, 0);
    s.psi = y.tail(n);
    s.u = s.psi.head(r);
    traj.samples.push_back(std::move(s));
  };
  record(0);
  for (long long k = 1; k <= steps; ++k) {
    rk4_step(rhs, traj.step, y, carry);
    if (!y.allFinite()) {
      traj.diagnostics = conservation_report(traj);
      std::ostringstream os;
      os << "costate integration produced non-finite state at t = " << k * traj.step;
      throw IntegrationAborted(os.str(), std::move(traj));
    }
    record(k);
  }
  traj.diagnostics = conservation_report(traj);
  return traj;
}

AlgebraVector field_control(const GroupElement& g, const AlgebraVector& psi0,
                            const LieModel& model) {
  require_costate(psi0, model);
  return coadjoint_pullback(g, psi0, model.rep()).head(model.rank());
}

namespace {

// Adjoint by least squares, without the span check.
AlgebraVector projected_pullback(const GroupElement& g, const AlgebraVector& psi0,
                                 const Representation& rep) {
  const Eigen::MatrixXd g_inv = g.inverse();
  const int n = rep.algebra_dim();
  Eigen::MatrixXd ad(n, n);
  for (int j = 0; j < n; ++j) {
    ad.col(j) = rep.project(g * rep.basis()[static_cast<std::size_t>(j)] * g_inv).coeffs;
  }
  return ad.transpose() * psi0;
}

}  // namespace

Eigen::MatrixXd field_rhs(const GroupElement& g, const AlgebraVector& psi0,
                          const LieModel& model) {
  AlgebraVector u = AlgebraVector::Zero(model.dim());
  u.head(model.rank()) = projected_pullback(g, psi0, model.rep()).head(model.rank());
  return g * model.rep().embed(u);
}

Trajectory integrate_field(const LieModel& model, const AlgebraVector& psi0,
                           const GroupElement& g0, const IntegratorConfig& cfg) {
  cfg.check();
  require_costate(psi0, model);
  const Eigen::Index d = model.rep_dim();
  if (g0.rows() != d || g0.cols() != d) {
    throw Error(Errc::dimension_mismatch, "start element size differs from representation");
  }
  const int r = model.rank();
  const auto& rep = model.rep();
  const double speed = field_control(g0, psi0, model).norm();
  if (!(speed > 1e-12)) {
    throw Error(Errc::zero_field, "geodesic field vanishes at the start point");
  }
  require_speed(speed, cfg);

  Trajectory traj;
  traj.model = model.name();
  traj.method = Trajectory::Method::field;
  traj.psi0 = psi0;
  traj.step = cfg.effective_step();
  traj.horizon = cfg.horizon;
  traj.speed = speed;

  const Rhs rhs = [&](const State& y) {
    State dy(y.size());
    pack_matrix(field_rhs(unpack_matrix(y, d, 0), psi0, model), dy, 0);
    return dy;
  };

  State y(d * d);
  pack_matrix(g0, y, 0);
  State carry = State::Zero(y.size());

  const long long steps = cfg.steps();
  traj.samples.reserve(static_cast<std::size_t>(steps + 1));
  auto record = [&](long long k) {
    TrajectorySample s;
    s.t = (k == steps) ? cfg.horizon : static_cast<double>(k) * traj.step;
    s.g = unpack_matrix(y, d, 0);
    s.psi = projected_pullback(s.g, psi0, rep);
    s.u = s.psi.head(r);
    traj.samples.push_back(std::move(s));
  };
  record(0);
  for (long long k = 1; k <= steps; ++k) {
    rk4_step(rhs, traj.step, y, carry);
    if (!y.allFinite()) {
      traj.diagnostics = conservation_report(traj);
      std::ostringstream os;
      os << "field integration produced non-finite state at t = " << k * traj.step;
      throw IntegrationAborted(os.str(), std::move(traj));
    }
    record(k);
  }
  traj.diagnostics = conservation_report(traj);
  return traj;
}

ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport rep;
  const double s2 = traj.speed * traj.speed;
  for (const auto& s : traj.samples) {
    const auto r = s.u.size();
    rep.max_speed_deviation = std::max(rep.max_speed_deviation, std::abs(s.u.norm() - traj.speed));
    rep.max_hamiltonian_deviation =
        std::max(rep.max_hamiltonian_deviation, std::abs(s.psi.head(r).dot(s.u) - s2));
  }
  return rep;
}

double compare_methods(const Trajectory& a, const Trajectory& b) {
  if (a.samples.size() != b.samples.size()) {
    throw Error(Errc::invalid_argument, "trajectories have different sample counts");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const auto& sa = a.samples[k];
    const auto& sb = b.samples[k];
    if (std::abs(sa.t - sb.t) > 1e-12 * std::max(1.0, std::abs(sa.t))) {
      throw Error(Errc::invalid_argument, "trajectories use different time grids");
    }
    if (sa.g.rows() != sb.g.rows() || sa.g.cols() != sb.g.cols()) {
      throw Error(Errc::dimension_mismatch, "trajectories come from different representations");
    }
    worst = std::max(worst, max_norm(sa.g - sb.g));
  }
  return worst;
}

double one_parameter_check(const LieModel& model, const AlgebraVector& psi0, double horizon,
                           double step) {
  IntegratorConfig cfg;
  cfg.step = step;
  cfg.horizon = horizon;
  cfg.allow_unnormalized = true;
  const Trajectory traj = integrate_costate(model, psi0, cfg);
  const Eigen::MatrixXd gen = model.rep().embed(psi0);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    worst = std::max(worst, max_norm(s.g - exp_matrix(s.t * gen)));
  }
  return worst;
}

Trajectory decimate(const Trajectory& traj, int stride) {
  if (stride < 1) throw Error(Errc::invalid_argument, "decimation stride must be >= 1");
  if (stride == 1) return traj;
  Trajectory out = traj;
  out.samples.clear();
  for (std::size_t k = 0; k < traj.samples.size(); k += static_cast<std::size_t>(stride)) {
    out.samples.push_back(traj.samples[k]);
  }
  if (!traj.samples.empty() && (traj.samples.size() - 1) % static_cast<std::size_t>(stride) != 0) {
    out.samples.push_back(traj.samples.back());
  }
  return out;
}

}  // namespace liegeo
