#include "confspec/confspec.h"

#include "confspec/bench.hpp"
#include "confspec/error.hpp"
#include "confspec/maximizer.hpp"
#include "confspec/mesh_io.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

using namespace confspec;

struct cs_mesh {
  TriangleMesh mesh;
};

struct cs_density {
  DensityField mu;
};

struct cs_spectrum {
  SpectralResult result;
  double mass;
};

struct cs_run {
  MaximizeResult result;
};

namespace {

thread_local std::string lastError;

template <class F>
cs_status guarded(F&& body) {
  try {
    body();
    return CS_OK;
  } catch (const Error& e) {
    lastError = e.what();
    switch (e.kind()) {
    case ErrorKind::InvalidInput:
      return CS_ERR_INPUT;
    case ErrorKind::Numerical:
      return CS_ERR_NUMERICAL;
    case ErrorKind::Io:
      return CS_ERR_IO;
    }
    return CS_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return CS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    lastError = e.what();
    return CS_ERR_INTERNAL;
  } catch (...) {
    lastError = "unknown error";
    return CS_ERR_INTERNAL;
  }
}

template <class T>
const T& deref(const T* p, const char* what) {
  if (!p) throwInput(std::string(what) + " is null");
  return *p;
}

template <class T>
void requireOut(T** out) {
  if (!out) throwInput("output pointer is null");
  *out = nullptr;
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  for (;;) {
    size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

template <class T>
T parseNumber(std::string_view text, const std::string& context) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throwInput("cannot parse '" + std::string(text) + "' in " + context);
  }
  return value;
}

TriangleMesh generate(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts[0] == "icosphere") {
    if (parts.size() != 2) throwInput("generator spec must be icosphere:<subdivisions>");
    return generateIcosphere(parseNumber<int>(parts[1], "generator spec '" + spec + "'"));
  }
  if (parts[0] == "flat-torus") {
    if (parts.size() != 3) throwInput("generator spec must be flat-torus:square|equilateral:<n>[x<m>]");
    Eigen::Matrix2d basis = Eigen::Matrix2d::Identity();
    if (parts[1] == "equilateral") basis << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
    else if (parts[1] != "square") throwInput("unknown torus lattice '" + std::string(parts[1]) + "'");
    auto dims = split(parts[2], 'x');
    if (dims.size() > 2) throwInput("torus grid must be <n> or <n>x<m>");
    int nx = parseNumber<int>(dims[0], "generator spec '" + spec + "'");
    int ny = dims.size() == 2 ? parseNumber<int>(dims[1], "generator spec '" + spec + "'") : nx;
    return generateFlatTorus(basis, nx, ny);
  }
  throwInput("unknown mesh generator '" + std::string(parts[0]) + "'");
}

AscentConfig toConfig(const TriangleMesh& mesh, const cs_ascent_config& c) {
  if (c.n_schedule_count > 0 && !c.n_schedule_times_area) throwInput("N schedule pointer is null");
  AscentConfig cfg = AscentConfig::withScheduleTimesArea(
      mesh, std::vector<double>(c.n_schedule_times_area, c.n_schedule_times_area + c.n_schedule_count));
  cfg.damping = c.damping;
  cfg.maxIters = c.max_iters;
  cfg.lambdaTol = c.lambda_tol;
  cfg.stepTol = c.step_tol;
  cfg.floor = c.floor;
  cfg.seed = c.seed;
  cfg.eigenpairs = c.eigenpairs;
  cfg.relGap = c.rel_gap;
  cfg.solverTol = c.solver_tol;
  return cfg;
}

const double kDefaultSchedule[3] = {4.0, 16.0, 64.0};

} // namespace

extern "C" {

const char* cs_version(void) { return "0.1.0"; }

const char* cs_last_error(void) { return lastError.c_str(); }

void cs_string_free(char* s) { std::free(s); }

cs_status cs_mesh_load(const char* path, cs_mesh** out) {
  return guarded([&] {
    requireOut(out);
    if (!path) throwInput("mesh path is null");
    *out = new cs_mesh{loadMesh(path)};
  });
}

cs_status cs_mesh_generate(const char* spec, cs_mesh** out) {
  return guarded([&] {
    requireOut(out);
    if (!spec) throwInput("generator spec is null");
    *out = new cs_mesh{generate(spec)};
  });
}

cs_status cs_mesh_from_intrinsic(int vertex_count, const int* triangles, size_t triangle_count, const int* edge_pairs,
                                 const double* edge_lengths, size_t edge_count, cs_mesh** out) {
  return guarded([&] {
    requireOut(out);
    if ((triangle_count && !triangles) || (edge_count && (!edge_pairs || !edge_lengths))) {
      throwInput("mesh arrays are null");
    }
    std::vector<Triangle> tris(triangle_count);
    for (size_t f = 0; f < triangle_count; ++f) tris[f] = {triangles[3 * f], triangles[3 * f + 1], triangles[3 * f + 2]};
    std::vector<EdgeLength> lengths(edge_count);
    for (size_t e = 0; e < edge_count; ++e) lengths[e] = {edge_pairs[2 * e], edge_pairs[2 * e + 1], edge_lengths[e]};
    *out = new cs_mesh{TriangleMesh::fromIntrinsic(vertex_count, std::move(tris), lengths)};
  });
}

void cs_mesh_free(cs_mesh* mesh) { delete mesh; }

int cs_mesh_vertex_count(const cs_mesh* mesh) { return mesh ? mesh->mesh.vertexCount() : 0; }
int cs_mesh_triangle_count(const cs_mesh* mesh) { return mesh ? mesh->mesh.triangleCount() : 0; }
int cs_mesh_genus(const cs_mesh* mesh) { return mesh ? mesh->mesh.genus() : -1; }
double cs_mesh_area(const cs_mesh* mesh) { return mesh ? mesh->mesh.area() : 0.0; }

cs_status cs_mesh_stats_json(const cs_mesh* mesh, char** json) {
  return guarded([&] {
    requireOut(json);
    MeshStats s = meshStats(deref(mesh, "mesh").mesh);
    nlohmann::json j = {{"area", s.area},
                        {"genus", s.genus},
                        {"vertices", s.vertices},
                        {"edges", s.edges},
                        {"triangles", s.triangles},
                        {"min_edge_length", s.minEdgeLength},
                        {"max_edge_length", s.maxEdgeLength},
                        {"min_triangle_quality", s.minTriangleQuality},
                        {"mean_triangle_quality", s.meanTriangleQuality}};
    *json = duplicate(j.dump(1));
  });
}

cs_status cs_mesh_write_json(const cs_mesh* mesh, const char* path) {
  return guarded([&] {
    if (!path) throwInput("path is null");
    writeText(path, meshToJson(deref(mesh, "mesh").mesh).dump() + "\n");
  });
}

cs_status cs_density_create(const cs_mesh* mesh, const char* spec, cs_density** out) {
  return guarded([&] {
    requireOut(out);
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    if (!spec) throwInput("density spec is null");
    std::string s = spec;
    if (s == "uniform") {
      *out = new cs_density{DensityField::uniform(m)};
    } else if (s.rfind("random:", 0) == 0) {
      auto seed = parseNumber<std::uint64_t>(std::string_view(s).substr(7), "density spec '" + s + "'");
      *out = new cs_density{DensityField::random(m, seed)};
    } else {
      std::string path = s.rfind("file:", 0) == 0 ? s.substr(5) : s;
      if (!std::filesystem::exists(path)) {
        throwInput("density spec '" + s + "' is neither uniform, random:<seed> nor an existing file");
      }
      Eigen::VectorXd v = loadDensityValues(path, m.vertexCount());
      DensityField mu(m, v);
      double mass = mu.mass(m);
      if (!(mass > 0.0)) throwInput("density in '" + path + "' has non-positive mass");
      *out = new cs_density{DensityField(m, v / mass)};
    }
  });
}

cs_status cs_density_from_values(const cs_mesh* mesh, const double* values, size_t count, cs_density** out) {
  return guarded([&] {
    requireOut(out);
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    if (!values && count) throwInput("density values are null");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values, static_cast<Eigen::Index>(count));
    *out = new cs_density{DensityField(m, std::move(v))};
  });
}

void cs_density_free(cs_density* density) { delete density; }

cs_status cs_density_values(const cs_density* density, double* values, size_t count) {
  return guarded([&] {
    const DensityField& mu = deref(density, "density").mu;
    if (count != static_cast<size_t>(mu.size())) throwInput("buffer size does not match the density");
    if (!values) throwInput("output buffer is null");
    std::copy(mu.values().data(), mu.values().data() + mu.size(), values);
  });
}

double cs_density_mass(const cs_mesh* mesh, const cs_density* density) {
  if (!mesh || !density || density->mu.meshId() != mesh->mesh.id()) return 0.0;
  return density->mu.mass(mesh->mesh);
}

cs_status cs_density_write_json(const cs_mesh* mesh, const cs_density* density, const char* path) {
  return guarded([&] {
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    const DensityField& mu = deref(density, "density").mu;
    if (mu.meshId() != m.id()) throwInput("density belongs to a different mesh");
    if (!path) throwInput("path is null");
    writeText(path, densityToJson(m, mu.values()).dump() + "\n");
  });
}

void cs_spectrum_options_default(cs_spectrum_options* options) {
  if (!options) return;
  SolverOptions d;
  options->k = d.k;
  options->tol = d.tol;
  options->rel_gap = d.relGap;
  options->seed = d.seed;
  options->lumped = 0;
}

cs_status cs_spectrum_compute(const cs_mesh* mesh, const cs_density* density, const cs_spectrum_options* options,
                              cs_spectrum** out) {
  return guarded([&] {
    requireOut(out);
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    const DensityField& mu = deref(density, "density").mu;
    cs_spectrum_options o;
    cs_spectrum_options_default(&o);
    if (options) o = *options;
    SolverOptions so;
    so.k = o.k;
    so.tol = o.tol;
    so.relGap = o.rel_gap;
    so.seed = o.seed;
    MassMatrix M = assembleMass(m, mu, o.lumped ? MassMode::Lumped : MassMode::Consistent);
    *out = new cs_spectrum{solvePencil(assembleStiffness(m), M, so), mu.mass(m)};
  });
}

void cs_spectrum_free(cs_spectrum* spectrum) { delete spectrum; }

int cs_spectrum_count(const cs_spectrum* spectrum) {
  return spectrum ? static_cast<int>(spectrum->result.eigenvalues.size()) : 0;
}

double cs_spectrum_eigenvalue(const cs_spectrum* spectrum, int index) {
  if (!spectrum || index < 0 || index >= spectrum->result.eigenvalues.size()) return 0.0;
  return spectrum->result.eigenvalues[index];
}

cs_status cs_spectrum_eigenvector(const cs_spectrum* spectrum, int index, double* values, size_t count) {
  return guarded([&] {
    const SpectralResult& r = deref(spectrum, "spectrum").result;
    if (index < 0 || index >= r.eigenvectors.cols()) throwInput("eigenvector index out of range");
    if (!values || count != static_cast<size_t>(r.eigenvectors.rows())) throwInput("buffer size mismatch");
    Eigen::Map<Eigen::VectorXd>(values, r.eigenvectors.rows()) = r.eigenvectors.col(index);
  });
}

double cs_spectrum_lambda1_area(const cs_spectrum* spectrum) {
  return spectrum ? spectrum->result.lambda1() * spectrum->mass : 0.0;
}

int cs_spectrum_cluster_count(const cs_spectrum* spectrum) {
  return spectrum ? static_cast<int>(spectrum->result.clusters.size()) : 0;
}

int cs_spectrum_cluster_size(const cs_spectrum* spectrum, int cluster) {
  if (!spectrum || cluster < 0 || cluster >= static_cast<int>(spectrum->result.clusters.size())) return 0;
  return static_cast<int>(spectrum->result.clusters[cluster].size());
}

cs_status cs_spectrum_write_csv(const cs_spectrum* spectrum, const char* path) {
  return guarded([&] {
    if (!path) throwInput("path is null");
    writeSpectrumCsv(path, deref(spectrum, "spectrum").result);
  });
}

cs_status cs_spectrum_summary_json(const cs_spectrum* spectrum, char** json) {
  return guarded([&] {
    requireOut(json);
    const cs_spectrum& s = deref(spectrum, "spectrum");
    const SpectralResult& r = s.result;
    nlohmann::json j;
    j["lambda1"] = r.lambda1();
    j["lambda1_area"] = r.lambda1() * s.mass;
    j["mass"] = s.mass;
    j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
    j["residuals"] = std::vector<double>(r.residuals.data(), r.residuals.data() + r.residuals.size());
    auto clusters = nlohmann::json::array();
    for (const auto& c : r.clusters) {
      double mean = 0.0;
      for (int i : c) mean += r.eigenvalues[i];
      mean /= static_cast<double>(c.size());
      clusters.push_back({{"indices", c}, {"size", c.size()}, {"mean_lambda_area", mean * s.mass}});
    }
    j["clusters"] = std::move(clusters);
    j["excluded_vertices"] = r.excludedVertices;
    j["restarts"] = r.restarts;
    *json = duplicate(j.dump(1));
  });
}

cs_status cs_dump_matrices(const cs_mesh* mesh, const cs_density* density, const char* directory) {
  return guarded([&] {
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    const DensityField& mu = deref(density, "density").mu;
    if (!directory) throwInput("directory is null");
    std::filesystem::path dir(directory);
    writeMatrixMarket((dir / "stiffness.mtx").string(), assembleStiffness(m).K);
    writeMatrixMarket((dir / "mass.mtx").string(), assembleMass(m, mu).M);
  });
}

void cs_ascent_config_default(cs_ascent_config* config) {
  if (!config) return;
  AscentConfig d;
  config->n_schedule_times_area = kDefaultSchedule;
  config->n_schedule_count = 3;
  config->damping = d.damping;
  config->max_iters = d.maxIters;
  config->lambda_tol = d.lambdaTol;
  config->step_tol = d.stepTol;
  config->floor = d.floor;
  config->seed = d.seed;
  config->eigenpairs = d.eigenpairs;
  config->rel_gap = d.relGap;
  config->solver_tol = d.solverTol;
}

cs_status cs_maximize(const cs_mesh* mesh, const cs_density* start, const cs_ascent_config* config, cs_run** out) {
  return guarded([&] {
    requireOut(out);
    const TriangleMesh& m = deref(mesh, "mesh").mesh;
    const DensityField& mu0 = deref(start, "start density").mu;
    cs_ascent_config c;
    cs_ascent_config_default(&c);
    if (config) c = *config;
    *out = new cs_run{maximize(m, mu0, toConfig(m, c))};
  });
}

void cs_run_free(cs_run* run) { delete run; }

const char* cs_run_status(const cs_run* run) { return run ? statusName(run->result.trace.status) : ""; }

double cs_run_lambda1_area(const cs_run* run) { return run ? run->result.certificate.lambda1Area : 0.0; }

int cs_run_iterations(const cs_run* run) { return run ? static_cast<int>(run->result.trace.records.size()) : 0; }

cs_status cs_run_density(const cs_run* run, cs_density** out) {
  return guarded([&] {
    requireOut(out);
    *out = new cs_density{deref(run, "run").result.mu};
  });
}

cs_status cs_run_write_trace_csv(const cs_run* run, const char* path) {
  return guarded([&] {
    if (!path) throwInput("path is null");
    writeTraceCsv(path, deref(run, "run").result.trace);
  });
}

cs_status cs_run_certificate_json(const cs_run* run, char** json) {
  return guarded([&] {
    requireOut(json);
    *json = duplicate(certificateToJson(deref(run, "run").result.certificate).dump(1));
  });
}

cs_status cs_run_summary_json(const cs_run* run, char** json) {
  return guarded([&] {
    requireOut(json);
    const MaximizeResult& r = deref(run, "run").result;
    nlohmann::json j = traceSummaryToJson(r.trace);
    j["lambda1_area"] = r.certificate.lambda1Area;
    j["frame"] = frameToJson(r.frame);
    j["certificate"] = certificateToJson(r.certificate);
    *json = duplicate(j.dump(1));
  });
}

cs_status cs_moebius_map(const double e[3], const double x[3], double out[3]) {
  return guarded([&] {
    if (!e || !x || !out) throwInput("Moebius arguments are null");
    Eigen::Vector3d ev(e[0], e[1], e[2]);
    if (!(ev.norm() < 1.0)) throwInput("Moebius center must lie in the open unit ball");
    Eigen::Vector3d y = moebiusMap(ev, Eigen::Vector3d(x[0], x[1], x[2]));
    for (int i = 0; i < 3; ++i) out[i] = y[i];
  });
}

cs_status cs_moebius_center(const double* weights, const double* points, size_t count, double e[3]) {
  return guarded([&] {
    if (!e || (count && (!weights || !points))) throwInput("Moebius arguments are null");
    std::vector<Eigen::Vector3d> pts(count);
    for (size_t i = 0; i < count; ++i) pts[i] = Eigen::Vector3d(points[3 * i], points[3 * i + 1], points[3 * i + 2]);
    Eigen::Vector3d c = moebiusCenter(std::span<const double>(weights, count), pts);
    for (int i = 0; i < 3; ++i) e[i] = c[i];
  });
}

cs_status cs_bench(int quick, uint64_t seed, cs_progress_fn progress, void* user, char** table, char** json,
                   int* all_pass) {
  return guarded([&] {
    if (table) *table = nullptr;
    if (json) *json = nullptr;
    BenchOptions opt;
    opt.quick = quick != 0;
    opt.seed = seed;
    if (progress) opt.progress = [progress, user](const std::string& msg) { progress(msg.c_str(), user); };
    BenchReport report = runBench(opt);
    if (all_pass) *all_pass = report.allPass() ? 1 : 0;
    if (table) *table = duplicate(formatBenchTable(report));
    if (json) *json = duplicate(benchToJson(report).dump(1));
  });
}

} // extern "C"
