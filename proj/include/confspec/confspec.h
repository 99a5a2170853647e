/* C interface to the confspec library.
 *
 * All objects are opaque handles created by cs_* functions and released with
 * the matching *_free function. Functions return a cs_status; on failure the
 * message is available from cs_last_error() on the calling thread until the
 * next failing call. Strings returned through char** are owned by the caller
 * and released with cs_string_free.
 */
#ifndef CONFSPEC_H
#define CONFSPEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CS_API __declspec(dllexport)
#else
#define CS_API __attribute__((visibility("default")))
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_INPUT = 2,     /* invalid arguments, malformed or unsupported data */
  CS_ERR_NUMERICAL = 3, /* solver failure, indefinite mass, degenerate map */
  CS_ERR_IO = 4,        /* file could not be read or written */
  CS_ERR_INTERNAL = 5
} cs_status;

typedef struct cs_mesh cs_mesh;
typedef struct cs_density cs_density;
typedef struct cs_spectrum cs_spectrum;
typedef struct cs_run cs_run;

CS_API const char* cs_version(void);
CS_API const char* cs_last_error(void);
CS_API void cs_string_free(char* s);

/* ---- meshes ---- */

/* .off, .obj or intrinsic .json, chosen by extension. */
CS_API cs_status cs_mesh_load(const char* path, cs_mesh** out);
/* "icosphere:<s>", "flat-torus:square:<n>" or "flat-torus:equilateral:<n>". */
CS_API cs_status cs_mesh_generate(const char* spec, cs_mesh** out);
CS_API cs_status cs_mesh_from_intrinsic(int vertex_count, const int* triangles, size_t triangle_count,
                                        const int* edge_pairs, const double* edge_lengths, size_t edge_count,
                                        cs_mesh** out);
CS_API void cs_mesh_free(cs_mesh* mesh);
CS_API int cs_mesh_vertex_count(const cs_mesh* mesh);
CS_API int cs_mesh_triangle_count(const cs_mesh* mesh);
CS_API int cs_mesh_genus(const cs_mesh* mesh);
CS_API double cs_mesh_area(const cs_mesh* mesh);
CS_API cs_status cs_mesh_stats_json(const cs_mesh* mesh, char** json);
CS_API cs_status cs_mesh_write_json(const cs_mesh* mesh, const char* path);

/* ---- densities ---- */

/* "uniform", "random:<seed>" or a path to a density file (JSON sidecar with a
 * "density" array, or one value per line). The result has unit mass. */
CS_API cs_status cs_density_create(const cs_mesh* mesh, const char* spec, cs_density** out);
CS_API cs_status cs_density_from_values(const cs_mesh* mesh, const double* values, size_t count, cs_density** out);
CS_API void cs_density_free(cs_density* density);
CS_API cs_status cs_density_values(const cs_density* density, double* values, size_t count);
CS_API double cs_density_mass(const cs_mesh* mesh, const cs_density* density);
/* Intrinsic JSON: the mesh plus a "density" array. */
CS_API cs_status cs_density_write_json(const cs_mesh* mesh, const cs_density* density, const char* path);

/* ---- spectra ---- */

typedef struct cs_spectrum_options {
  int k;
  double tol;
  double rel_gap;
  uint64_t seed;
  int lumped; /* nonzero: lumped mass */
} cs_spectrum_options;

CS_API void cs_spectrum_options_default(cs_spectrum_options* options);
CS_API cs_status cs_spectrum_compute(const cs_mesh* mesh, const cs_density* density,
                                     const cs_spectrum_options* options, cs_spectrum** out);
CS_API void cs_spectrum_free(cs_spectrum* spectrum);
CS_API int cs_spectrum_count(const cs_spectrum* spectrum);
CS_API double cs_spectrum_eigenvalue(const cs_spectrum* spectrum, int index);
CS_API cs_status cs_spectrum_eigenvector(const cs_spectrum* spectrum, int index, double* values, size_t count);
CS_API double cs_spectrum_lambda1_area(const cs_spectrum* spectrum);
CS_API int cs_spectrum_cluster_count(const cs_spectrum* spectrum);
CS_API int cs_spectrum_cluster_size(const cs_spectrum* spectrum, int cluster);
CS_API cs_status cs_spectrum_write_csv(const cs_spectrum* spectrum, const char* path);
CS_API cs_status cs_spectrum_summary_json(const cs_spectrum* spectrum, char** json);

/* Stiffness.mtx and mass.mtx (MatrixMarket) in an existing directory. */
CS_API cs_status cs_dump_matrices(const cs_mesh* mesh, const cs_density* density, const char* directory);

/* ---- maximization ---- */

typedef struct cs_ascent_config {
  const double* n_schedule_times_area; /* N values as multiples of 1/area */
  size_t n_schedule_count;
  double damping;
  int max_iters;
  double lambda_tol;
  double step_tol;
  double floor; /* 0 or -0.5 */
  uint64_t seed;
  int eigenpairs;
  double rel_gap;
  double solver_tol;
} cs_ascent_config;

/* Defaults; the schedule points to static storage holding {4, 16, 64}. */
CS_API void cs_ascent_config_default(cs_ascent_config* config);
CS_API cs_status cs_maximize(const cs_mesh* mesh, const cs_density* start, const cs_ascent_config* config,
                             cs_run** out);
CS_API void cs_run_free(cs_run* run);
/* "converged", "collapse" or "iteration-cap". */
CS_API const char* cs_run_status(const cs_run* run);
CS_API double cs_run_lambda1_area(const cs_run* run);
CS_API int cs_run_iterations(const cs_run* run);
CS_API cs_status cs_run_density(const cs_run* run, cs_density** out);
CS_API cs_status cs_run_write_trace_csv(const cs_run* run, const char* path);
CS_API cs_status cs_run_certificate_json(const cs_run* run, char** json);
/* Status, stage summaries and the certificate. */
CS_API cs_status cs_run_summary_json(const cs_run* run, char** json);

/* ---- Moebius maps of the unit sphere ---- */

CS_API cs_status cs_moebius_map(const double e[3], const double x[3], double out[3]);
/* Center e (|e| < 1) with sum_j w_j sigma_e(x_j) = 0; points are packed xyz. */
CS_API cs_status cs_moebius_center(const double* weights, const double* points, size_t count, double e[3]);

/* ---- acceptance matrix ---- */

typedef void (*cs_progress_fn)(const char* message, void* user);

/* Writes the pass/fail table to *table and the full report to *json (either
 * may be NULL). *all_pass is set to 1 when every criterion passes. */
CS_API cs_status cs_bench(int quick, uint64_t seed, cs_progress_fn progress, void* user, char** table, char** json,
                          int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
