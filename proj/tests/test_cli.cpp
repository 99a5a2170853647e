// Runs the confspec executable and inspects exit codes and output files.
#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  int code;
  std::string output;
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("confspec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "output.log";
  const std::string cmd = std::string(CONFSPEC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

nlohmann::json readJson(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Yang-Yau on every maximize output; Hersch floor when converged.
void checkBounds(const fs::path& dir) {
  auto cert = readJson(dir / "certificate.json");
  CHECK(cert["bounds"]["yang_yau_ok"] == true);
  if (readJson(dir / "result.json")["status"] == "converged") CHECK(cert["bounds"]["hersch_floor_ok"] == true);
}

} // namespace

TEST_CASE("spectrum of the round sphere") {
  auto dir = scratch("sphere_spectrum");
  Outcome r = run("spectrum --gen icosphere:4 --density uniform -k 10 --out " + dir.string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  auto j = readJson(dir / "spectrum.json");
  CHECK(j["clusters"][0]["size"] == 3);
  CHECK(std::abs(j["clusters"][0]["mean_lambda_area"].get<double>() - 8 * kPi) < 0.01 * 8 * kPi);
  std::string csv = slurp(dir / "spectrum.csv");
  CHECK(csv.rfind("index,lambda,residual,cluster", 0) == 0);
}

TEST_CASE("spectrum of the square torus") {
  auto dir = scratch("torus_spectrum");
  Outcome r = run("spectrum --gen flat-torus:square:48 -k 6 --density uniform --out " + dir.string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  auto j = readJson(dir / "spectrum.json");
  CHECK(j["clusters"][0]["size"] == 4);
  CHECK(std::abs(j["lambda1_area"].get<double>() - 4 * kPi * kPi) < 0.01 * 4 * kPi * kPi);
}

TEST_CASE("non-manifold input names the offending edge") {
  auto dir = scratch("bad_mesh");
  std::ofstream(dir / "bad.off") << "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
  Outcome r = run("spectrum --mesh " + (dir / "bad.off").string() + " --out " + dir.string(), dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("non-manifold edge") != std::string::npos);
  CHECK(r.output.find("(0,1)") != std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
  auto dir = scratch("input_errors");
  CHECK(run("spectrum --gen icosphere:2 --density nonsense --out " + dir.string(), dir).code == 2);
  CHECK(run("spectrum --mesh " + (dir / "missing.off").string(), dir).code == 2);
  CHECK(run("spectrum --gen flat-torus:square:2", dir).code == 2);
  CHECK(run("maximize --gen icosphere:2 --floor 0.3 --out " + dir.string(), dir).code == 2);
  CHECK(run("maximize --gen icosphere:2 --n-schedule 16,4 --out " + dir.string(), dir).code == 2);
  CHECK(run("spectrum --gen icosphere:2 --no-such-flag", dir).code == 2);
  CHECK(run("spectrum --gen icosphere:2 --mesh x.off", dir).code == 2);
  CHECK(run("--version", dir).code == 0);
}

TEST_CASE("maximize writes trace, density and certificate") {
  auto dir = scratch("maximize_sphere");
  Outcome r = run("maximize --gen icosphere:3 --density random:4 --out " + dir.string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  checkBounds(dir);
  auto cert = readJson(dir / "certificate.json");
  CHECK(cert["schema_version"] == "confspec-cert-1");
  CHECK(std::abs(cert["lambda1_area"].get<double>() - 8 * kPi) < 0.02 * 8 * kPi);
  auto result = readJson(dir / "result.json");
  CHECK(result["status"] == "converged");
  auto density = readJson(dir / "density.json");
  CHECK(density["density"].size() == density["vertices"].get<size_t>());
  CHECK(slurp(dir / "trace.csv").rfind("iter,N,lambda1_area", 0) == 0);

  // The density sidecar is a valid start for another run.
  auto again = scratch("maximize_restart");
  Outcome r2 = run("maximize --mesh " + (dir / "density.json").string() + " --density " +
                       (dir / "density.json").string() + " --out " + again.string(),
                   again);
  REQUIRE_MESSAGE(r2.code == 0, r2.output);
  checkBounds(again);
  CHECK(std::abs(readJson(again / "certificate.json")["lambda1_area"].get<double>() -
                 cert["lambda1_area"].get<double>()) < 1e-6 * 8 * kPi);
}

TEST_CASE("maximize on the equilateral torus") {
  auto dir = scratch("maximize_torus");
  Outcome r = run("maximize --gen flat-torus:equilateral:24 --density uniform --out " + dir.string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  checkBounds(dir);
  const double target = 8 * kPi * kPi / std::sqrt(3.0);
  CHECK(std::abs(readJson(dir / "certificate.json")["lambda1_area"].get<double>() - target) < 0.02 * target);
}

TEST_CASE("signed densities keep the negative set small") {
  auto dir = scratch("maximize_floor");
  Outcome r = run("maximize --gen icosphere:3 --floor -0.5 --density random:2 --out " + dir.string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  checkBounds(dir);
  auto cert = readJson(dir / "certificate.json");
  CHECK(readJson(dir / "result.json")["status"] == "converged");
  CHECK(cert["neg_set_measure"].get<double>() < 0.01 * 4 * kPi);
}

TEST_CASE("identical invocations give identical results") {
  auto a = scratch("repro_a");
  auto b = scratch("repro_b");
  const std::string args = "maximize --gen icosphere:2 --density random:5 --seed 3 --out ";
  REQUIRE(run(args + a.string(), a).code == 0);
  REQUIRE(run(args + b.string(), b).code == 0);
  checkBounds(a);
  CHECK(slurp(a / "certificate.json") == slurp(b / "certificate.json"));
  CHECK(slurp(a / "density.json") == slurp(b / "density.json"));
}

TEST_CASE("config file values sit between defaults and the command line") {
  auto dir = scratch("config");
  std::ofstream(dir / "run.toml") << "[maximize]\nmax-iters = 1\nn-schedule = [4]\n";
  Outcome fromFile = run("--config " + (dir / "run.toml").string() + " maximize --gen icosphere:2 --density random:1 --out " +
                             dir.string(),
                         dir);
  REQUIRE_MESSAGE(fromFile.code == 0, fromFile.output);
  checkBounds(dir);
  auto j = readJson(dir / "result.json");
  CHECK(j["stages"].size() == 1);
  CHECK(j["stages"][0]["iterations"] == 1);

  Outcome overridden = run("--config " + (dir / "run.toml").string() +
                               " maximize --gen icosphere:2 --density random:1 --max-iters 500 --out " + dir.string(),
                           dir);
  REQUIRE_MESSAGE(overridden.code == 0, overridden.output);
  checkBounds(dir);
  j = readJson(dir / "result.json");
  CHECK(j["stages"].size() == 1);
  CHECK(j["stages"][0]["iterations"] > 1);
}

TEST_CASE("stats and gen-mesh") {
  auto dir = scratch("stats");
  REQUIRE(run("gen-mesh --gen flat-torus:equilateral:6 --out " + (dir / "t.json").string(), dir).code == 0);
  Outcome r = run("stats --mesh " + (dir / "t.json").string(), dir);
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["genus"] == 1);
  CHECK(std::abs(j["area"].get<double>() - std::sqrt(3.0) / 2) < 1e-12);
}

TEST_CASE("quick bench") {
  auto dir = scratch("bench_quick");
  Outcome r = run("bench --quick --out " + dir.string(), dir);
  CHECK_MESSAGE(r.code == 0, r.output);
  std::string table = slurp(dir / "bench.txt");
  CHECK(table.find("E_N decay") != std::string::npos);
  CHECK(table.find("A(E_N)*N") != std::string::npos);
  auto j = readJson(dir / "bench.json");
  CHECK(j["quick"] == true);
  CHECK(j["criteria"].size() == 8);
}
