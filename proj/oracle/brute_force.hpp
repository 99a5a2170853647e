#pragma once

#include <cstdint>
#include <vector>

// Independent reference for the conformal first-eigenvalue maximum on a square
// flat torus: its own structured-grid P1 assembly (gradients from coordinates,
// quadrature mass), dense generalized eigensolves and a smoothed projected
// ascent with random restarts. Shares no code with the library.
namespace confspec::oracle {

struct BruteForceOptions {
  int grid = 12;
  int restarts = 20;
  int iterations = 120;
  int modes = 8;              // eigenvalues entering the soft minimum
  double capTimesArea = 64.0; // upper density bound N * A
  std::uint64_t seed = 2024;
};

struct BruteForceResult {
  double best = 0.0;                  // best lambda_1 * A over all restarts
  std::vector<double> perRestart;     // best value reached by each restart
  double uniform = 0.0;               // lambda_1 * A at the uniform density
};

BruteForceResult squareTorusBruteForce(const BruteForceOptions& options = {});

// lambda_1 * A for a per-vertex density on the n x n unit square torus grid.
double squareTorusLambda1(int grid, const std::vector<double>& density);

} // namespace confspec::oracle
