// confspec command-line front end. Talks to the library only through the C API.

#include "confspec/confspec.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kAcceptanceFailure = 1, kInputError = 2, kNumericalFailure = 3 };

struct Failure {
  int code;
  std::string message;
};

int exitCodeFor(cs_status status) {
  switch (status) {
  case CS_OK:
    return kOk;
  case CS_ERR_INPUT:
  case CS_ERR_IO:
    return kInputError;
  default:
    return kNumericalFailure;
  }
}

void check(cs_status status) {
  if (status != CS_OK) throw Failure{exitCodeFor(status), cs_last_error()};
}

// Owning wrappers for C handles and strings.
template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using MeshPtr = std::unique_ptr<cs_mesh, Deleter<cs_mesh, cs_mesh_free>>;
using DensityPtr = std::unique_ptr<cs_density, Deleter<cs_density, cs_density_free>>;
using SpectrumPtr = std::unique_ptr<cs_spectrum, Deleter<cs_spectrum, cs_spectrum_free>>;
using RunPtr = std::unique_ptr<cs_run, Deleter<cs_run, cs_run_free>>;

std::string takeString(char* s) {
  std::string out = s ? s : "";
  cs_string_free(s);
  return out;
}

void writeFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
  if (!out) throw Failure{kInputError, "cannot write '" + path.string() + "'"};
}

fs::path prepareOutput(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Failure{kInputError, "cannot create output directory '" + dir + "': " + ec.message()};
  return p;
}

struct MeshSource {
  std::string path;
  std::string generator;

  void add(CLI::App* app) {
    auto* m = app->add_option("--mesh", path, "Mesh file (.off, .obj or intrinsic .json)");
    auto* g = app->add_option("--gen", generator,
                              "Generated mesh: icosphere:<s>, flat-torus:square:<n> or flat-torus:equilateral:<n>");
    m->excludes(g);
  }

  MeshPtr load() const {
    cs_mesh* mesh = nullptr;
    if (!path.empty()) check(cs_mesh_load(path.c_str(), &mesh));
    else if (!generator.empty()) check(cs_mesh_generate(generator.c_str(), &mesh));
    else throw Failure{kInputError, "one of --mesh or --gen is required"};
    return MeshPtr(mesh);
  }
};

DensityPtr makeDensity(const cs_mesh* mesh, const std::string& spec) {
  cs_density* d = nullptr;
  check(cs_density_create(mesh, spec.c_str(), &d));
  return DensityPtr(d);
}

struct SpectrumCommand {
  MeshSource source;
  std::string density = "uniform";
  int k = 6;
  double tol = 1e-9;
  double relGap = 0.02;
  std::uint64_t seed = 1;
  bool lumped = false;
  bool dumpMatrices = false;
  std::string out = ".";

  int run() const {
    MeshPtr mesh = source.load();
    DensityPtr mu = makeDensity(mesh.get(), density);
    cs_spectrum_options opt;
    cs_spectrum_options_default(&opt);
    opt.k = k;
    opt.tol = tol;
    opt.rel_gap = relGap;
    opt.seed = seed;
    opt.lumped = lumped ? 1 : 0;
    cs_spectrum* raw = nullptr;
    check(cs_spectrum_compute(mesh.get(), mu.get(), &opt, &raw));
    SpectrumPtr spec(raw);

    fs::path dir = prepareOutput(out);
    check(cs_spectrum_write_csv(spec.get(), (dir / "spectrum.csv").string().c_str()));
    char* json = nullptr;
    check(cs_spectrum_summary_json(spec.get(), &json));
    writeFile(dir / "spectrum.json", takeString(json));
    if (dumpMatrices) check(cs_dump_matrices(mesh.get(), mu.get(), dir.string().c_str()));

    std::cout << "lambda1*A = " << cs_spectrum_lambda1_area(spec.get()) << "\nclusters:";
    for (int c = 0; c < cs_spectrum_cluster_count(spec.get()); ++c) std::cout << " " << cs_spectrum_cluster_size(spec.get(), c);
    std::cout << "\nwrote " << (dir / "spectrum.csv").string() << ", " << (dir / "spectrum.json").string() << "\n";
    return kOk;
  }
};

struct MaximizeCommand {
  MeshSource source;
  std::string density = "uniform";
  double floor = 0.0;
  std::vector<double> schedule{4.0, 16.0, 64.0};
  double damping = 0.5;
  double tol = 1e-7;
  double stepTol = 1e-4;
  double solverTol = 1e-9;
  int maxIters = 500;
  int eigenpairs = 8;
  double relGap = 0.02;
  std::uint64_t seed = 1;
  bool dumpMatrices = false;
  std::string out = ".";

  int run() const {
    MeshPtr mesh = source.load();
    DensityPtr mu0 = makeDensity(mesh.get(), density);
    cs_ascent_config cfg;
    cs_ascent_config_default(&cfg);
    cfg.n_schedule_times_area = schedule.data();
    cfg.n_schedule_count = schedule.size();
    cfg.damping = damping;
    cfg.lambda_tol = tol;
    cfg.step_tol = stepTol;
    cfg.solver_tol = solverTol;
    cfg.max_iters = maxIters;
    cfg.eigenpairs = eigenpairs;
    cfg.rel_gap = relGap;
    cfg.floor = floor;
    cfg.seed = seed;
    cs_run* raw = nullptr;
    check(cs_maximize(mesh.get(), mu0.get(), &cfg, &raw));
    RunPtr run(raw);

    fs::path dir = prepareOutput(out);
    check(cs_run_write_trace_csv(run.get(), (dir / "trace.csv").string().c_str()));
    char* json = nullptr;
    check(cs_run_certificate_json(run.get(), &json));
    writeFile(dir / "certificate.json", takeString(json));
    check(cs_run_summary_json(run.get(), &json));
    writeFile(dir / "result.json", takeString(json));
    cs_density* finalRaw = nullptr;
    check(cs_run_density(run.get(), &finalRaw));
    DensityPtr final(finalRaw);
    check(cs_density_write_json(mesh.get(), final.get(), (dir / "density.json").string().c_str()));
    if (dumpMatrices) check(cs_dump_matrices(mesh.get(), final.get(), dir.string().c_str()));

    std::cout << "status " << cs_run_status(run.get()) << "\nlambda1*A = " << cs_run_lambda1_area(run.get())
              << "\niterations " << cs_run_iterations(run.get()) << "\nwrote trace.csv, certificate.json, result.json, "
              << "density.json in " << dir.string() << "\n";
    return kOk;
  }
};

struct BenchCommand {
  bool quick = false;
  std::uint64_t seed = 7;
  std::string out = ".";

  int run() const {
    auto progress = [](const char* msg, void*) { std::cerr << msg << std::endl; };
    char* table = nullptr;
    char* json = nullptr;
    int allPass = 0;
    check(cs_bench(quick ? 1 : 0, seed, progress, nullptr, &table, &json, &allPass));
    std::string text = takeString(table);
    fs::path dir = prepareOutput(out);
    writeFile(dir / "bench.txt", text);
    writeFile(dir / "bench.json", takeString(json));
    std::cout << text;
    return allPass ? kOk : kAcceptanceFailure;
  }
};

struct StatsCommand {
  MeshSource source;

  int run() const {
    MeshPtr mesh = source.load();
    char* json = nullptr;
    check(cs_mesh_stats_json(mesh.get(), &json));
    std::cout << takeString(json) << "\n";
    return kOk;
  }
};

struct GenMeshCommand {
  MeshSource source;
  std::string out;

  int run() const {
    MeshPtr mesh = source.load();
    check(cs_mesh_write_json(mesh.get(), out.c_str()));
    std::cout << "wrote " << out << " (" << cs_mesh_vertex_count(mesh.get()) << " vertices)\n";
    return kOk;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal first-eigenvalue maximization on triangulated surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(cs_version()));
  app.set_config("--config", "", "TOML-style key = value file; keys go in [spectrum], [maximize] or [bench] sections");
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for internal parallelism")->check(CLI::PositiveNumber);

  SpectrumCommand spectrum;
  auto* sp = app.add_subcommand("spectrum", "Eigenvalues of the density pencil");
  spectrum.source.add(sp);
  sp->add_option("--density", spectrum.density, "uniform, random:<seed> or a density file")->capture_default_str();
  sp->add_option("-k", spectrum.k, "Number of nonzero eigenpairs")->capture_default_str()->check(CLI::PositiveNumber);
  sp->add_option("--tol", spectrum.tol, "Relative eigen-residual tolerance")->capture_default_str();
  sp->add_option("--rel-gap", spectrum.relGap, "Relative gap separating eigenvalue clusters")->capture_default_str();
  sp->add_option("--seed", spectrum.seed, "Seed of the start block")->capture_default_str();
  sp->add_flag("--lumped", spectrum.lumped, "Lumped instead of consistent mass");
  sp->add_flag("--dump-matrices", spectrum.dumpMatrices, "Write stiffness.mtx and mass.mtx");
  sp->add_option("--out", spectrum.out, "Output directory")->capture_default_str();

  MaximizeCommand maximize;
  auto* mx = app.add_subcommand("maximize", "Maximize lambda_1 * area in the conformal class and certify the result");
  maximize.source.add(mx);
  mx->add_option("--density", maximize.density, "Start density: uniform, random:<seed> or a file")->capture_default_str();
  mx->add_option("--floor", maximize.floor, "Lower density bound, 0 or -0.5")->capture_default_str();
  mx->add_option("--n-schedule", maximize.schedule, "Upper density bounds as multiples of 1/area")
      ->delimiter(',')
      ->capture_default_str();
  mx->add_option("--damping", maximize.damping, "Initial damping of the fixed-point step")->capture_default_str();
  mx->add_option("--tol", maximize.tol, "Relative lambda_1 gain below which a stage has converged")
      ->capture_default_str();
  mx->add_option("--step-tol", maximize.stepTol, "L1 step below which a stage has converged")->capture_default_str();
  mx->add_option("--solver-tol", maximize.solverTol, "Eigen-residual tolerance")->capture_default_str();
  mx->add_option("--max-iters", maximize.maxIters, "Iteration cap per N stage")->capture_default_str();
  mx->add_option("--eigenpairs", maximize.eigenpairs, "Initial number of eigenpairs")->capture_default_str();
  mx->add_option("--rel-gap", maximize.relGap, "Relative gap separating eigenvalue clusters")->capture_default_str();
  mx->add_option("--seed", maximize.seed, "Seed of the eigensolver start blocks")->capture_default_str();
  mx->add_flag("--dump-matrices", maximize.dumpMatrices, "Write stiffness.mtx and mass.mtx at the final density");
  mx->add_option("--out", maximize.out, "Output directory")->capture_default_str();

  BenchCommand bench;
  auto* bn = app.add_subcommand("bench", "Run the acceptance matrix and print a pass/fail table");
  bn->add_flag("--quick", bench.quick, "Coarse meshes with doubled tolerances");
  bn->add_option("--seed", bench.seed, "Seed of random start densities")->capture_default_str();
  bn->add_option("--out", bench.out, "Output directory")->capture_default_str();

  StatsCommand stats;
  auto* st = app.add_subcommand("stats", "Print mesh statistics as JSON");
  stats.source.add(st);

  GenMeshCommand gen;
  auto* gm = app.add_subcommand("gen-mesh", "Write a generated mesh as intrinsic JSON");
  gen.source.add(gm);
  gm->add_option("--out", gen.out, "Output .json file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sp) return spectrum.run();
    if (*mx) return maximize.run();
    if (*bn) return bench.run();
    if (*st) return stats.run();
    if (*gm) return gen.run();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kInputError;
}
