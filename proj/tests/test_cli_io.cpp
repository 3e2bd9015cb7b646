#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "liegeo/cli.hpp"
#include "liegeo/error.hpp"
#include "liegeo/io.hpp"
#include "oracles.hpp"

using namespace liegeo;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("liegeo_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

const char* kHeisenbergFile = R"({
  "name": "heis-file", "n": 3, "r": 2,
  "structure_constants": [{"i": 1, "j": 2, "k": 3, "value": 1.0}],
  "representation": {"d": 3, "matrices": [[0,1,0, 0,0,0, 0,0,0],
                                          [0,0,0, 0,0,1, 0,0,0],
                                          [0,0,1, 0,0,0, 0,0,0]]},
  "params": {"scale": 2.0}
})";

const char* kJacobiBroken = R"({
  "name": "broken", "n": 3, "r": 2,
  "structure_constants": [{"i": 1, "j": 2, "k": 3, "value": 1.0},
                          {"i": 1, "j": 3, "k": 1, "value": 1.0}],
  "representation": {"d": 3, "matrices": [[0,1,0, 0,0,0, 0,0,0],
                                          [0,0,0, 0,0,1, 0,0,0],
                                          [0,0,1, 0,0,0, 0,0,0]]}
})";

}  // namespace

TEST_CASE("model file parsing") {
  const auto desc = parse_model_description(kHeisenbergFile);
  CHECK(desc.name == "heis-file");
  CHECK(desc.matrices.size() == 3);
  CHECK(desc.matrices[1](1, 2) == 1.0);
  CHECK(desc.params.at("scale") == 2.0);
  const LieModel model = to_model(desc);
  CHECK(model.filtration().degree() == 2);

  try {
    (void)parse_model_description("{\"name\": \"x\", ");
    FAIL("expected parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_model_description(R"({"name": "x", "n": 3})"), Error);
  CHECK_THROWS_AS((void)to_model(parse_model_description(kJacobiBroken)), Error);
}

TEST_CASE("trajectory round trip is bit exact") {
  const auto model = build_model(ModelParams::sh2());
  IntegratorConfig cfg;
  cfg.step = 1e-2;
  cfg.horizon = 3.0;
  const auto traj = integrate_costate(model, angle_costate(0.4, -0.9), cfg);
  for (auto format : {FileFormat::csv, FileFormat::json}) {
    std::stringstream buf;
    write_trajectory(buf, traj, format);
    const Trajectory back = read_trajectory(buf, format);
    CHECK(back.model == "sh2");
    CHECK(back.step == traj.step);
    CHECK(back.horizon == traj.horizon);
    CHECK(back.psi0 == traj.psi0);
    CHECK(back.diagnostics.max_speed_deviation == traj.diagnostics.max_speed_deviation);
    CHECK(back.diagnostics.max_hamiltonian_deviation ==
          traj.diagnostics.max_hamiltonian_deviation);
    REQUIRE(back.samples.size() == traj.samples.size());
    bool identical = true;
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      identical = identical && back.samples[k].t == traj.samples[k].t &&
                  back.samples[k].g == traj.samples[k].g &&
                  back.samples[k].psi == traj.samples[k].psi &&
                  back.samples[k].u == traj.samples[k].u;
    }
    CHECK(identical);
    std::stringstream again;
    write_trajectory(again, back, format);
    std::stringstream first;
    write_trajectory(first, traj, format);
    CHECK(again.str() == first.str());
  }
}

TEST_CASE("schedule and matrix JSON") {
  ControlSchedule s{{{0.25, 1, -1}, {1.0 / 3.0, 2, 1}}};
  const auto back = schedule_from_json(schedule_to_json(s));
  REQUIRE(back.size() == 2);
  CHECK(back.segments[1].duration == 1.0 / 3.0);
  CHECK(back.segments[0].sign == -1);
  CHECK_THROWS_AS((void)schedule_from_json("[{\"duration\": 1}]"), Error);

  const auto m = matrix_from_json("[[1,2],[3,4]]");
  CHECK(m(1, 0) == 3.0);
  CHECK(matrix_from_json("[1,2,3,4]")(0, 1) == 2.0);
  CHECK_THROWS_AS((void)matrix_from_json("[[1,2],[3]]"), Error);
}

TEST_CASE("number lists") {
  CHECK(parse_real_list("1, -2.5,3e-1") == std::vector<double>{1.0, -2.5, 0.3});
  CHECK_THROWS_AS((void)parse_real_list("1,,2"), Error);
  CHECK_THROWS_AS((void)parse_real_list("1,x"), Error);
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("cli validate") {
  CHECK(cli({"validate", "heisenberg"}).code == 0);
  CHECK(cli({"validate", "so3", "--a", "1", "--b", "2"}).code == 0);
  CHECK(cli({"validate", write_file("heis.json", kHeisenbergFile)}).code == 0);
  const auto broken = cli({"validate", write_file("broken.json", kJacobiBroken)});
  CHECK(broken.code == 1);
  CHECK(broken.out.find("jacobi violated at (") != std::string::npos);
  CHECK(cli({"validate", write_file("bad.json", "{ nope")}).code == 2);
  CHECK(cli({"validate", (scratch() / "missing.json").string()}).code == 2);
}

TEST_CASE("cli geodesic") {
  const auto r = cli({"geodesic", "heisenberg", "--xi", "0", "--beta", "1", "--T", "1", "--step",
                      "0.01"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto traj = read_trajectory(in, FileFormat::csv);
  CHECK(traj.samples.size() == 101);
  CHECK(r.err.find("max speed deviation") != std::string::npos);

  // deterministic output
  const auto again = cli({"geodesic", "heisenberg", "--xi", "0", "--beta", "1", "--T", "1",
                          "--step", "0.01"});
  CHECK(again.out == r.out);

  const auto json = cli({"geodesic", "hyperbolic", "--phi", "1,0,0", "--T", "1", "--step", "0.01",
                         "--format", "json", "--decimate", "10"});
  REQUIRE(json.code == 0);
  std::istringstream jin(json.out);
  CHECK(read_trajectory(jin, FileFormat::json).samples.size() == 11);

  CHECK(cli({"geodesic", "heisenberg", "--psi0", "2,0,0", "--T", "1"}).code == 1);
  CHECK(cli({"geodesic", "heisenberg", "--psi0", "2,0,0", "--T", "1", "--allow-speed"}).code == 0);
  CHECK(cli({"geodesic", "heisenberg", "--psi0", "1,0", "--T", "1"}).code == 2);
  CHECK(cli({"geodesic", "heisenberg", "--T", "1"}).code == 2);
  CHECK(cli({"geodesic", "heisenberg", "--xi", "0", "--bogus"}).code == 2);
  CHECK(cli({"geodesic", "nosuchmodel", "--xi", "0"}).code == 2);

  const std::string base = (scratch() / "h.csv").string();
  const auto both = cli({"geodesic", "heisenberg", "--xi", "0", "--beta", "1", "--T", "6.2832",
                         "--method", "both", "--output", base});
  CHECK(both.code == 0);
  CHECK(fs::exists(scratch() / "h_costate.csv"));
  CHECK(fs::exists(scratch() / "h_field.csv"));
  CHECK(both.err.find("max |g_costate - g_field|") != std::string::npos);

  const auto stamped = cli({"geodesic", "heisenberg", "--xi", "0", "--T", "0.1", "--stamp"});
  CHECK(stamped.out.find("# stamp: ") != std::string::npos);
  CHECK(r.out.find("# stamp") == std::string::npos);
}

TEST_CASE("cli compare, reduce, distance, steer, list-models") {
  const auto cmp = cli({"compare", "se2", "--alpha", "0.4", "--beta", "0.3", "--T", "2"});
  CHECK(cmp.code == 0);
  CHECK(cmp.out.find("agree") != std::string::npos);

  const auto red = cli({"reduce", "sh2", "--alpha", "0.3", "--beta", "0.7"});
  CHECK(red.code == 0);
  CHECK(red.out.rfind("t,angle,rate\n", 0) == 0);
  CHECK(red.err.find("max residual") != std::string::npos);
  CHECK(cli({"reduce", "so3", "--a", "1", "--b", "1.4142135", "--alpha", "0.2", "--beta", "0.1"})
            .code == 0);
  CHECK(cli({"reduce", "heisenberg", "--xi", "0"}).code == 1);

  const std::string file = (scratch() / "se2.csv").string();
  REQUIRE(cli({"geodesic", "se2", "--alpha", "0.5", "--beta", "-0.2", "--T", "3", "--output", file})
              .code == 0);
  CHECK(cli({"reduce", "se2", "--input", file}).code == 0);
  CHECK(cli({"reduce", "sh2", "--input", file}).code == 1);

  const auto d = cli({"distance", "--p", "0,1", "--q", "0,2.718281828459045"});
  CHECK(d.code == 0);
  CHECK(d.out == "1\n");
  CHECK(cli({"distance", "hyperbolic", "--p", "0,0,1", "--q", "0.5,0,2"}).code == 0);
  CHECK(cli({"distance", "--p", "0,-1", "--q", "0,1"}).code == 1);
  CHECK(cli({"distance", "--p", "0,1"}).code == 2);

  const auto st = cli({"steer", "heisenberg", "--target-s", "0,0,1"});
  CHECK(st.code == 0);
  const auto sched = schedule_from_json(st.out);
  CHECK_FALSE(sched.empty());
  CHECK(cli({"steer", "se2", "--target-s", "0,0,0"}).out == "[]\n");
  const std::string target = write_file("target.json", "[[1,0,0.1],[0,1,0.2],[0,0,1]]");
  CHECK(cli({"steer", "se2", "--target-file", target}).code == 0);
  const std::string outside = write_file("outside.json", "[[1,0,0],[1,1,0],[0,0,1]]");
  CHECK(cli({"steer", "heisenberg", "--target-file", outside}).code == 1);

  const auto list = cli({"list-models"});
  CHECK(list.code == 0);
  CHECK(list.out.find("hyperbolic") != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}
