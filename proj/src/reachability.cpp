#include "liegeo/reachability.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

#include "liegeo/error.hpp"

namespace liegeo {

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

void check_word(const BracketWord& word, const std::vector<double>& t_params, int r) {
  if (word.letters.empty()) throw Error(Errc::invalid_argument, "empty bracket word");
  for (int letter : word.letters) {
    if (letter < 1 || letter > r) {
      throw Error(Errc::invalid_argument, "word letters must lie in 1..r");
    }
  }
  if (static_cast<int>(t_params.size()) != word.length() - 1) {
    std::ostringstream os;
    os << "word of length " << word.length() << " needs " << word.length() - 1 << " t parameters";
    throw Error(Errc::invalid_argument, os.str());
  }
  for (double t : t_params) {
    if (t == 0.0 || !std::isfinite(t)) {
      throw Error(Errc::invalid_argument, "t parameters must be finite and nonzero");
    }
  }
}

/// i_l for l = 1..m with letters stored as (i_m, ..., i_1).
int letter(const BracketWord& word, int l) {
  return word.letters[static_cast<std::size_t>(word.length() - l)];
}

double t_of(const std::vector<double>& t_params, int l) {
  return t_params[static_cast<std::size_t>(l - 2)];
}

ControlSchedule realize(const AlgebraVector& s, const SteeringBasis& basis, int r,
                        const LieModel& model) {
  ControlSchedule piece;
  for (int j = 0; j < s.size(); ++j) {
    if (s(j) == 0.0) continue;
    if (j < r) {
      piece.segments.push_back({std::abs(s(j)), j + 1, sign_of(s(j))});
    } else {
      const auto k = static_cast<std::size_t>(j - r);
      piece.append(schedule_for_basis_direction(basis.words[k], s(j), basis.t_params[k], model));
    }
  }
  return piece;
}

}  // namespace

double ControlSchedule::total_duration() const noexcept {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

void ControlSchedule::check(int r) const {
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    std::ostringstream os;
    if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration)) {
      os << "segment " << k << ": duration must be finite and nonnegative";
    } else if (seg.index < 1 || seg.index > r) {
      os << "segment " << k << ": index " << seg.index << " outside 1.." << r;
    } else if (seg.sign != 1 && seg.sign != -1) {
      os << "segment " << k << ": sign must be +1 or -1";
    } else {
      continue;
    }
    throw Error(Errc::invalid_argument, os.str());
  }
}

void ControlSchedule::append(const ControlSchedule& other) {
  for (const auto& seg : other.segments) {
    if (seg.duration > 0.0) segments.push_back(seg);
  }
}

ControlSchedule ControlSchedule::inverse() const {
  ControlSchedule out;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    out.segments.push_back({it->duration, it->index, -it->sign});
  }
  return out;
}

GroupElement simulate_schedule(const GroupElement& g0, const ControlSchedule& sched,
                               const LieModel& model) {
  if (g0.rows() != model.rep_dim() || g0.cols() != model.rep_dim()) {
    throw Error(Errc::dimension_mismatch, "simulate_schedule: start matrix size differs from model");
  }
  sched.check(model.rank());
  GroupElement g = g0;
  for (const auto& seg : sched.segments) {
    if (seg.duration == 0.0) continue;
    g = g * exp_matrix((seg.duration * seg.sign) * model.rep().basis(seg.index));
  }
  return g;
}

GroupElement phi_basis(const AlgebraVector& s, const std::vector<Eigen::MatrixXd>& basis) {
  if (basis.empty() || static_cast<std::size_t>(s.size()) != basis.size()) {
    throw Error(Errc::dimension_mismatch, "phi: coordinate count differs from basis size");
  }
  const auto d = basis.front().rows();
  GroupElement g = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double sk = s(static_cast<Eigen::Index>(k));
    if (sk != 0.0) g = g * exp_matrix(sk * basis[k]);
  }
  return g;
}

GroupElement phi(const AlgebraVector& s, const LieModel& model) {
  return phi_basis(s, model.rep().basis());
}

ChartInversion phi_inverse_basis(const GroupElement& g, const std::vector<Eigen::MatrixXd>& basis,
                                 double tol, int max_iterations) {
  if (basis.empty()) throw Error(Errc::invalid_argument, "phi_inverse: empty basis");
  return phi_inverse_basis(g, basis, AlgebraVector::Zero(static_cast<Eigen::Index>(basis.size())),
                           tol, max_iterations);
}

ChartInversion phi_inverse_basis(const GroupElement& g, const std::vector<Eigen::MatrixXd>& basis,
                                 const AlgebraVector& start, double tol, int max_iterations) {
  if (basis.empty()) throw Error(Errc::invalid_argument, "phi_inverse: empty basis");
  const auto d = basis.front().rows();
  if (g.rows() != d || g.cols() != d) {
    throw Error(Errc::dimension_mismatch, "phi_inverse: matrix size differs from basis");
  }
  if (!g.allFinite()) throw Error(Errc::non_finite, "phi_inverse: non-finite target");
  const auto n = static_cast<Eigen::Index>(basis.size());

  if (start.size() != n) {
    throw Error(Errc::dimension_mismatch, "phi_inverse: start length differs from basis");
  }

  ChartInversion out;
  out.s = start;
  Eigen::MatrixXd diff = phi_basis(out.s, basis) - g;
  out.residual = max_norm(diff);
  Eigen::MatrixXd jac(d * d, n);
  while (out.residual > tol) {
    if (out.iterations >= max_iterations) {
      std::ostringstream os;
      os << "chart inversion did not converge in " << max_iterations
         << " iterations (residual " << out.residual << ")";
      throw Error(Errc::outside_chart, os.str());
    }
    ++out.iterations;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(out.s(k)));
      AlgebraVector sp = out.s;
      AlgebraVector sm = out.s;
      sp(k) += h;
      sm(k) -= h;
      jac.col(k) = flatten(phi_basis(sp, basis) - phi_basis(sm, basis)) / (2.0 * h);
    }
    const AlgebraVector delta = jac.colPivHouseholderQr().solve(-flatten(diff));
    if (!delta.allFinite()) throw Error(Errc::outside_chart, "chart inversion: singular Jacobian");

    double lambda = 1.0;
    AlgebraVector trial;
    Eigen::MatrixXd trial_diff;
    double trial_res = 0.0;
    for (int halving = 0; halving < 30; ++halving) {
      trial = out.s + lambda * delta;
      trial_diff = phi_basis(trial, basis) - g;
      trial_res = max_norm(trial_diff);
      if (trial_res < out.residual) break;
      lambda *= 0.5;
    }
    if (!(trial_res < out.residual)) {
      std::ostringstream os;
      os << "chart inversion stalled (residual " << out.residual << ")";
      throw Error(Errc::outside_chart, os.str());
    }
    out.s = trial;
    diff = trial_diff;
    out.residual = trial_res;
  }
  return out;
}

AlgebraVector phi_inverse_local(const GroupElement& g, const LieModel& model, double tol) {
  return phi_inverse_basis(g, model.rep().basis(), tol).s;
}

std::vector<double> uniform_t_params(const BracketWord& word, double t) {
  return std::vector<double>(static_cast<std::size_t>(std::max(0, word.length() - 1)), t);
}

AlgebraVector perturbed_direction(const BracketWord& word, const std::vector<double>& t_params,
                                  const LieModel& model) {
  check_word(word, t_params, model.rank());
  AlgebraVector v = basis_vector(model.dim(), word.innermost());
  for (int l = 2; l <= word.length(); ++l) {
    const GroupElement a = exp_matrix(t_of(t_params, l) * model.rep().basis(letter(word, l)));
    v = adjoint(a, v, model.rep());
  }
  return v;
}

ControlSchedule schedule_for_basis_direction(const BracketWord& word, double s,
                                             const std::vector<double>& t_params,
                                             const LieModel& model) {
  check_word(word, t_params, model.rank());
  if (!std::isfinite(s)) throw Error(Errc::non_finite, "direction amount must be finite");
  const int m = word.length();
  ControlSchedule out;
  for (int l = m; l >= 2; --l) {
    const double t = t_of(t_params, l);
    out.segments.push_back({std::abs(t), letter(word, l), sign_of(t)});
  }
  if (s != 0.0) out.segments.push_back({std::abs(s), word.innermost(), sign_of(s)});
  for (int l = 2; l <= m; ++l) {
    const double t = t_of(t_params, l);
    out.segments.push_back({std::abs(t), letter(word, l), -sign_of(t)});
  }
  return out;
}

GroupElement conjugated_exponential(const BracketWord& word, double s,
                                    const std::vector<double>& t_params, const LieModel& model) {
  check_word(word, t_params, model.rank());
  const auto d = model.rep_dim();
  GroupElement outer = Eigen::MatrixXd::Identity(d, d);
  for (int l = word.length(); l >= 2; --l) {
    outer = outer * exp_matrix(t_of(t_params, l) * model.rep().basis(letter(word, l)));
  }
  const GroupElement inner = exp_matrix(s * model.rep().basis(word.innermost()));
  return outer * inner * outer.inverse();
}

SteeringBasis steering_basis(const LieModel& model, double t) {
  SteeringBasis out;
  const int r = model.rank();
  for (int j = 1; j <= r; ++j) out.matrices.push_back(model.rep().basis(j));
  if (r == model.dim()) return out;
  out.words = adapted_words(model.structure(), r);
  for (const auto& word : out.words) {
    out.t_params.push_back(uniform_t_params(word, t));
    out.matrices.push_back(model.rep().embed(perturbed_direction(word, out.t_params.back(), model)));
  }
  Eigen::MatrixXd cols(model.rep_dim() * model.rep_dim(),
                       static_cast<Eigen::Index>(out.matrices.size()));
  for (std::size_t k = 0; k < out.matrices.size(); ++k) {
    cols.col(static_cast<Eigen::Index>(k)) = flatten(out.matrices[k]);
  }
  if (numerical_rank(cols) < model.dim()) {
    throw Error(Errc::invalid_argument, "perturbed directions are degenerate; choose another t");
  }
  return out;
}

SteerResult steer(const GroupElement& target, const LieModel& model, const SteerOptions& options) {
  const auto d = model.rep_dim();
  if (target.rows() != d || target.cols() != d) {
    throw Error(Errc::dimension_mismatch, "steer: target size differs from the model");
  }
  if (!target.allFinite()) throw Error(Errc::non_finite, "steer: non-finite target");
  if (!(options.tol > 0.0) || !(options.max_factor_norm > 0.0) || options.t_param == 0.0) {
    throw Error(Errc::invalid_argument, "steer: tol, factor norm and t must be positive");
  }

  const SteeringBasis basis = steering_basis(model, options.t_param);
  const GroupElement id = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd columns(model.dim(), model.dim());
  for (int j = 0; j < model.dim(); ++j) {
    columns.col(j) = model.rep().decompose(basis.matrices[static_cast<std::size_t>(j)]);
  }
  // coordinates of an algebra element in the steering basis
  const Eigen::PartialPivLU<Eigen::MatrixXd> chart_coords(columns);

  SteerResult best;
  best.error = max_norm(id - target);
  SteerResult cur = best;
  GroupElement current = id;

  for (cur.outer_iterations = 0;; ++cur.outer_iterations) {
    cur.error = max_norm(current - target);
    if (cur.error < best.error || cur.outer_iterations == 0) {
      best.schedule = cur.schedule;
      best.error = cur.error;
    }
    if (cur.error <= options.tol) {
      best.converged = true;
      best.outer_iterations = cur.outer_iterations;
      best.message = "ok";
      return best;
    }
    if (cur.outer_iterations >= options.max_outer_iterations) {
      cur.message = "refinement stalled";
      break;
    }
    if (std::abs(current.determinant()) <= 1e-12) {
      cur.message = "singular intermediate element";
      break;
    }

    GroupElement rest = current.inverse() * target;
    AlgebraVector coeffs;
    Eigen::MatrixXd log_rest;
    auto try_log = [&](const GroupElement& m) {
      try {
        log_rest = log_matrix(m);
        coeffs = model.rep().decompose(log_rest, 1e-8);
        return true;
      } catch (const Error&) {
        return false;
      }
    };
    if (!try_log(rest)) {
      // Leave the cut locus of the logarithm with one extra bang.
      bool escaped = false;
      for (int j = 1; j <= model.rank() && !escaped; ++j) {
        for (int sg : {1, -1}) {
          const GroupElement step =
              exp_matrix((sg * options.escape_duration) * model.rep().basis(j));
          if (try_log(step.inverse() * rest)) {
            cur.schedule.segments.push_back({options.escape_duration, j, sg});
            current = current * step;
            rest = step.inverse() * rest;
            escaped = true;
            break;
          }
        }
      }
      if (!escaped) {
        cur.message = "no principal logarithm for the remaining displacement";
        break;
      }
    }

    const AlgebraVector local = chart_coords.solve(coeffs);
    const int factors =
        std::max(1, static_cast<int>(std::ceil(local.norm() / options.max_factor_norm)));
    const GroupElement factor = exp_matrix(log_rest / static_cast<double>(factors));
    ChartInversion inv;
    try {
      inv = phi_inverse_basis(factor, basis.matrices, local / static_cast<double>(factors));
    } catch (const Error& e) {
      cur.message = e.what();
      break;
    }
    const ControlSchedule piece = realize(inv.s, basis, model.rank(), model);
    for (int k = 0; k < factors; ++k) cur.schedule.append(piece);
    current = simulate_schedule(id, cur.schedule, model);
  }

  best.converged = false;
  best.outer_iterations = cur.outer_iterations;
  std::ostringstream os;
  os << cur.message << " (best residual " << best.error << ")";
  best.message = os.str();
  return best;
}

}  // namespace liegeo
