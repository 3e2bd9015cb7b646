#include "liegeo/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "liegeo/error.hpp"
#include "liegeo/io.hpp"
#include "liegeo/models.hpp"
#include "liegeo/reachability.hpp"

namespace liegeo {

namespace {

struct ModelOptions {
  std::string source;
  double a = 1.0;
  double b = 1.0;
  int n = 3;
  int rank = 2;
};

struct CostateOptions {
  std::string psi0;
  std::string phi;
  std::optional<double> xi;
  std::optional<double> alpha;
  double beta = 0.0;
};

struct RunOptions {
  double step = 1e-3;
  double horizon = 10.0;
  std::string method = "costate";
  std::string format;
  std::string output;
  int decimate = 1;
  bool allow_speed = false;
  bool stamp = false;
  double tol = 0.0;
};

class Usage : public Error {
 public:
  explicit Usage(const std::string& what) : Error(Errc::parse_error, what) {}
};

bool is_builtin(const std::string& name) {
  for (const auto& b : builtin_model_names()) {
    if (b == name) return true;
  }
  return false;
}

LieModel load_model(const ModelOptions& opt) {
  if (is_builtin(opt.source)) {
    ModelParams p;
    p.kind = model_kind_from_string(opt.source);
    p.n = opt.n;
    p.a = opt.a;
    p.b = opt.b;
    p.rank = opt.rank;
    return build_model(p);
  }
  return to_model(read_model_description(opt.source));
}

void add_model_options(CLI::App* cmd, ModelOptions& opt, bool required = true) {
  cmd->add_option("model", opt.source, "built-in model name or model JSON file")
      ->required(required);
  cmd->add_option("--a", opt.a, "so3: parameter a (0 < a <= b)");
  cmd->add_option("--b", opt.b, "so3: parameter b");
  cmd->add_option("--n", opt.n, "hyperbolic: dimension n (2..6)");
  cmd->add_option("--rank", opt.rank, "so3: distribution rank, 2 or 3");
}

void add_costate_options(CLI::App* cmd, CostateOptions& opt) {
  cmd->add_option("--psi0", opt.psi0, "initial costate, comma separated");
  cmd->add_option("--phi", opt.phi, "hyperbolic: initial unit vector (alias of --psi0)");
  cmd->add_option("--xi", opt.xi, "psi0 = (cos xi, sin xi, beta)");
  cmd->add_option("--alpha", opt.alpha, "psi0 = (cos alpha, sin alpha, beta)");
  cmd->add_option("--beta", opt.beta, "third costate component for --xi / --alpha");
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--step", opt.step, "integration step h")->capture_default_str();
  cmd->add_option("--T", opt.horizon, "time horizon T")->capture_default_str();
}

AlgebraVector resolve_costate(const CostateOptions& opt, const LieModel& model) {
  const int given = static_cast<int>(!opt.psi0.empty()) + static_cast<int>(!opt.phi.empty()) +
                    static_cast<int>(opt.xi.has_value()) + static_cast<int>(opt.alpha.has_value());
  if (given == 0) throw Usage("no initial costate: use --psi0, --phi, --xi or --alpha");
  if (given > 1) throw Usage("give exactly one of --psi0, --phi, --xi, --alpha");
  AlgebraVector psi;
  if (opt.xi || opt.alpha) {
    if (model.dim() != 3 || model.rank() != 2) {
      throw Usage("--xi / --alpha need a 3-dimensional rank-2 model");
    }
    psi = angle_costate(opt.xi ? *opt.xi : *opt.alpha, opt.beta);
  } else {
    const auto values = parse_real_list(opt.psi0.empty() ? opt.phi : opt.psi0);
    psi = Eigen::Map<const AlgebraVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  if (psi.size() != model.dim()) {
    std::ostringstream os;
    os << "initial costate needs " << model.dim() << " components, got " << psi.size();
    throw Error(Errc::dimension_mismatch, os.str());
  }
  return psi;
}

IntegratorConfig config_of(const RunOptions& opt) {
  IntegratorConfig cfg;
  cfg.step = opt.step;
  cfg.horizon = opt.horizon;
  cfg.allow_unnormalized = opt.allow_speed;
  return cfg;
}

Trajectory run_method(Trajectory::Method method, const LieModel& model, const AlgebraVector& psi0,
                      const IntegratorConfig& cfg) {
  if (method == Trajectory::Method::costate) return integrate_costate(model, psi0, cfg);
  const auto d = model.rep_dim();
  return integrate_field(model, psi0, Eigen::MatrixXd::Identity(d, d), cfg);
}

FileFormat output_format(const RunOptions& opt) {
  if (!opt.format.empty()) return format_from_string(opt.format);
  const auto& p = opt.output;
  if (p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0) return FileFormat::json;
  return FileFormat::csv;
}

void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Usage("cannot write '" + path + "'");
  write(file);
  if (!file) throw Usage("failed writing '" + path + "'");
}

std::string suffixed(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void report_diagnostics(std::ostream& err, const Trajectory& traj) {
  err << to_string(traj.method) << ": samples " << traj.samples.size() << ", step "
      << format_real(traj.step) << ", max speed deviation "
      << traj.diagnostics.max_speed_deviation << ", max hamiltonian deviation "
      << traj.diagnostics.max_hamiltonian_deviation << '\n';
}

double costate_pullback_gap(const Trajectory& costate, const LieModel& model) {
  double worst = 0.0;
  for (const auto& s : costate.samples) {
    const AlgebraVector pulled = coadjoint_pullback(s.g, costate.psi0, model.rep());
    worst = std::max(worst, (pulled - s.psi).cwiseAbs().maxCoeff());
  }
  return worst;
}

// ---------------------------------------------------------------------------

int cmd_validate(const ModelOptions& mopt, std::ostream& out) {
  if (is_builtin(mopt.source)) {
    const LieModel model = load_model(mopt);
    const auto report = validate(model.structure(), 1e-12);
    out << model.name() << ": n=" << model.dim() << " r=" << model.rank()
        << " d=" << model.rep_dim() << " degree=" << model.filtration().degree() << '\n';
    out << (report.ok() ? "ok" : "violations") << '\n';
    return report.ok() ? 0 : 1;
  }
  const ModelDescription desc = read_model_description(mopt.source);
  bool ok = true;
  const auto report = validate(desc.structure, 1e-12);
  for (const auto& v : report.violations) {
    out << "violation: " << v.describe() << '\n';
    ok = false;
  }
  try {
    const Representation rep(desc.matrices);
    const double res = rep.commutator_residual(desc.structure);
    if (res > 1e-12) {
      out << "representation: commutator residual " << res << '\n';
      ok = false;
    }
  } catch (const Error& e) {
    out << "representation: " << e.what() << '\n';
    ok = false;
  }
  try {
    const auto filt = generation_filtration(desc.structure, desc.r);
    out << "generation degree " << filt.degree() << '\n';
  } catch (const Error& e) {
    out << "distribution: " << e.what() << '\n';
    ok = false;
  }
  out << desc.name << ": " << (ok ? "ok" : "invalid") << '\n';
  return ok ? 0 : 1;
}

int cmd_geodesic(const ModelOptions& mopt, const CostateOptions& copt, const RunOptions& ropt,
                 std::ostream& out, std::ostream& err) {
  const LieModel model = load_model(mopt);
  const AlgebraVector psi0 = resolve_costate(copt, model);
  const IntegratorConfig cfg = config_of(ropt);
  const FileFormat format = output_format(ropt);
  if (ropt.decimate < 1) throw Usage("--decimate must be at least 1");
  TrajectoryMeta meta;
  meta.decimation = ropt.decimate;
  if (ropt.stamp) meta.stamp = utc_stamp();

  auto emit = [&](const Trajectory& traj, const std::string& path) {
    report_diagnostics(err, traj);
    const Trajectory kept = decimate(traj, ropt.decimate);
    with_output(path, out, [&](std::ostream& os) { write_trajectory(os, kept, format, meta); });
  };

  if (ropt.method == "both") {
    if (ropt.output.empty() || ropt.output == "-") {
      throw Usage("--method both writes two files and needs --output");
    }
    const Trajectory a = run_method(Trajectory::Method::costate, model, psi0, cfg);
    const Trajectory b = run_method(Trajectory::Method::field, model, psi0, cfg);
    emit(a, suffixed(ropt.output, "_costate"));
    emit(b, suffixed(ropt.output, "_field"));
    err << "max |g_costate - g_field| = " << compare_methods(a, b) << '\n';
    return 0;
  }
  emit(run_method(method_from_string(ropt.method), model, psi0, cfg), ropt.output);
  return 0;
}

int cmd_compare(const ModelOptions& mopt, const CostateOptions& copt, const RunOptions& ropt,
                std::ostream& out) {
  const LieModel model = load_model(mopt);
  const AlgebraVector psi0 = resolve_costate(copt, model);
  const IntegratorConfig cfg = config_of(ropt);
  const Trajectory a = run_method(Trajectory::Method::costate, model, psi0, cfg);
  const Trajectory b = run_method(Trajectory::Method::field, model, psi0, cfg);
  const double diff = compare_methods(a, b);
  const double gap = costate_pullback_gap(a, model);
  out << "samples " << a.samples.size() << '\n'
      << "max |g_costate - g_field| " << diff << '\n'
      << "max |psi - pullback(g, psi0)| " << gap << '\n'
      << "costate speed deviation " << a.diagnostics.max_speed_deviation << '\n'
      << "costate hamiltonian deviation " << a.diagnostics.max_hamiltonian_deviation << '\n'
      << "field speed deviation " << b.diagnostics.max_speed_deviation << '\n'
      << "field hamiltonian deviation " << b.diagnostics.max_hamiltonian_deviation << '\n';
  const bool ok = diff <= ropt.tol;
  out << (ok ? "agree" : "disagree") << " (tol " << ropt.tol << ")\n";
  return ok ? 0 : 1;
}

int cmd_reduce(const ModelOptions& mopt, const CostateOptions& copt, const RunOptions& ropt,
               const std::string& input, std::ostream& out, std::ostream& err) {
  if (mopt.source != "so3" && mopt.source != "sh2" && mopt.source != "se2") {
    err << "no pendulum reduction for model '" << mopt.source << "' (so3, sh2, se2)\n";
    return 1;
  }
  const LieModel model = load_model(mopt);
  Trajectory traj;
  if (!input.empty()) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw Usage("cannot open '" + input + "'");
    const bool json_in = input.size() >= 5 && input.compare(input.size() - 5, 5, ".json") == 0;
    traj = read_trajectory(in, json_in ? FileFormat::json : FileFormat::csv);
    if (traj.model != model.name()) {
      throw Error(Errc::invalid_argument,
                  "trajectory was produced for '" + traj.model + "', not '" + model.name() + "'");
    }
    if (traj.psi0.size() != model.dim()) throw Usage("trajectory psi0 has the wrong length");
  } else {
    traj = integrate_costate(model, resolve_costate(copt, model), config_of(ropt));
  }
  const AlgebraVector& psi0 = traj.psi0;
  const double alpha = std::atan2(psi0(1), psi0(0));
  const double beta = psi0(2);

  PendulumReduction red;
  if (mopt.source == "so3") {
    red = so3_pendulum_residual(traj, *model.param("a"), *model.param("b"));
  } else if (mopt.source == "sh2") {
    red = sh2_reduction(traj, alpha, beta);
  } else {
    red = se2_reduction(traj, alpha, beta);
  }
  with_output(ropt.output, out, [&](std::ostream& os) { write_pendulum_csv(os, red); });
  err << "max residual " << red.max_residual << '\n'
      << "initial angle error " << red.initial_angle_error << '\n'
      << "initial rate error " << red.initial_rate_error << '\n'
      << "energy drift " << red.energy_drift << '\n'
      << "max consistency " << red.max_consistency << '\n';
  return red.max_residual <= ropt.tol ? 0 : 1;
}

HalfSpacePoint point_of(const std::string& text) {
  const auto v = parse_real_list(text);
  if (v.size() < 2) throw Usage("a point needs y_1..y_{n-1} followed by x");
  HalfSpacePoint p;
  p.y.assign(v.begin(), v.end() - 1);
  p.x = v.back();
  return p;
}

int cmd_distance(const std::string& model, const std::string& p, const std::string& q,
                 std::ostream& out, std::ostream& err) {
  if (!model.empty() && model != "hyperbolic") {
    err << "distance is only available for the hyperbolic model\n";
    return 1;
  }
  const double d = hyperbolic_distance(point_of(p), point_of(q));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", d);
  out << buf << '\n';
  return 0;
}

int cmd_steer(const ModelOptions& mopt, const std::string& target_s, const std::string& target_file,
              const RunOptions& ropt, std::ostream& out, std::ostream& err) {
  const LieModel model = load_model(mopt);
  if (target_s.empty() == target_file.empty()) {
    throw Usage("give exactly one of --target-s and --target-file");
  }
  GroupElement target;
  if (!target_s.empty()) {
    const auto s = parse_real_list(target_s);
    if (static_cast<int>(s.size()) != model.dim()) {
      throw Error(Errc::dimension_mismatch, "--target-s needs n coordinates");
    }
    target = phi(Eigen::Map<const AlgebraVector>(s.data(), model.dim()), model);
  } else {
    target = matrix_from_json(read_text_file(target_file));
  }
  SteerOptions opts;
  opts.tol = ropt.tol;
  const SteerResult res = steer(target, model, opts);
  const GroupElement end = simulate_schedule(
      Eigen::MatrixXd::Identity(model.rep_dim(), model.rep_dim()), res.schedule, model);
  const double error = max_norm(end - target);
  with_output(ropt.output, out,
              [&](std::ostream& os) { os << schedule_to_json(res.schedule) << '\n'; });
  err << "segments " << res.schedule.size() << ", total duration "
      << format_real(res.schedule.total_duration()) << ", endpoint error " << error << '\n';
  if (!res.converged || !(error <= ropt.tol)) {
    err << "steering failed: " << res.message << '\n';
    return 1;
  }
  return 0;
}

int cmd_list_models(std::ostream& out) {
  out << "heisenberg  3x3 unit upper triangular, n=3, r=2\n"
      << "hyperbolic  translations and homotheties, --n 2..6 (default 3), Riemannian\n"
      << "so3         --a --b with 0 < a <= b, r=2 (--rank 3 for Riemannian)\n"
      << "sh2         hyperbolic motions of the plane, n=3, r=2\n"
      << "se2         rigid motions of the plane, n=3, r=2\n";
  return 0;
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::dimension_mismatch: return 2;
    default: return 1;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geodesics and bang-bang steering on matrix Lie groups", "liegeo"};
  app.require_subcommand(1);

  ModelOptions mopt;
  CostateOptions copt;
  RunOptions ropt;
  std::string input, target_s, target_file, p, q;

  auto* validate_cmd = app.add_subcommand("validate", "check structure constants and representation");
  add_model_options(validate_cmd, mopt);

  auto* geodesic = app.add_subcommand("geodesic", "integrate a normal geodesic from the identity");
  add_model_options(geodesic, mopt);
  add_costate_options(geodesic, copt);
  add_run_options(geodesic, ropt);
  geodesic->add_option("--method", ropt.method, "costate, field or both")
      ->check(CLI::IsMember({"costate", "field", "both"}))
      ->capture_default_str();
  geodesic->add_option("--format", ropt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  geodesic->add_option("--output", ropt.output, "output file (stdout when omitted)");
  geodesic->add_option("--decimate", ropt.decimate, "keep every N-th sample");
  geodesic->add_flag("--allow-speed", ropt.allow_speed, "accept |u(0)| != 1");
  geodesic->add_flag("--stamp", ropt.stamp, "add a UTC timestamp to the metadata");

  auto* compare = app.add_subcommand("compare", "costate route versus geodesic field route");
  add_model_options(compare, mopt);
  add_costate_options(compare, copt);
  add_run_options(compare, ropt);
  compare->add_flag("--allow-speed", ropt.allow_speed, "accept |u(0)| != 1");
  compare->add_option("--tol", ropt.tol, "agreement tolerance (default 1e-6)");

  auto* reduce = app.add_subcommand("reduce", "pendulum reduction for so3, sh2 and se2");
  add_model_options(reduce, mopt);
  add_costate_options(reduce, copt);
  add_run_options(reduce, ropt);
  reduce->add_option("--input", input, "trajectory file instead of inline parameters");
  reduce->add_option("--output", ropt.output, "pendulum CSV (stdout when omitted)");
  reduce->add_option("--tol", ropt.tol, "residual tolerance (default 1e-4)");

  std::string distance_model;
  auto* distance = app.add_subcommand("distance", "hyperbolic distance between two points");
  distance->add_option("model", distance_model, "hyperbolic (optional)");
  distance->add_option("--p", p, "first point y_1..y_{n-1},x")->required();
  distance->add_option("--q", q, "second point y_1..y_{n-1},x")->required();
  distance->add_option("--n", mopt.n, "ignored; dimension follows from the points");

  auto* steer_cmd = app.add_subcommand("steer", "bang-bang schedule from the identity to a target");
  add_model_options(steer_cmd, mopt);
  steer_cmd->add_option("--target-s", target_s, "target as second-kind coordinates");
  steer_cmd->add_option("--target-file", target_file, "target matrix as JSON");
  steer_cmd->add_option("--tol", ropt.tol, "endpoint tolerance (default 1e-6)");
  steer_cmd->add_option("--output", ropt.output, "schedule JSON (stdout when omitted)");

  auto* list = app.add_subcommand("list-models", "print the built-in models");

  std::vector<std::string> argv_store{"liegeo"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(mopt, out);
    if (geodesic->parsed()) return cmd_geodesic(mopt, copt, ropt, out, err);
    if (compare->parsed()) {
      if (ropt.tol == 0.0) ropt.tol = 1e-6;
      return cmd_compare(mopt, copt, ropt, out);
    }
    if (reduce->parsed()) {
      if (ropt.tol == 0.0) ropt.tol = 1e-4;
      return cmd_reduce(mopt, copt, ropt, input, out, err);
    }
    if (distance->parsed()) return cmd_distance(distance_model, p, q, out, err);
    if (steer_cmd->parsed()) {
      if (ropt.tol == 0.0) ropt.tol = 1e-6;
      return cmd_steer(mopt, target_s, target_file, ropt, out, err);
    }
    if (list->parsed()) return cmd_list_models(out);
  } catch (const IntegrationAborted& e) {
    err << "error: " << e.what() << " after " << e.partial().samples.size() << " samples\n";
    return 1;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace liegeo
