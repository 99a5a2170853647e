#pragma once

#include "confspec/density.hpp"
#include "confspec/mesh.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace confspec {

// Eigenfunctions u_1..u_l of one eigenvalue cluster, u = basis * R with
// R R^T = Q, chosen so that w = sum u_i^2 is as close to 1 as possible.
struct SphereFrame {
  int ell = 0;
  Eigen::MatrixXd U;        // n x ell
  Eigen::MatrixXd Q;        // m x m Gram coefficients over the basis
  Eigen::VectorXd qSpectrum;  // eigenvalues of Q, descending
  Eigen::VectorXd w;        // per-vertex sum of u_i^2
  double lambda = 0.0;
  double objective = 0.0;   // integral (w - 1)^2 dA_g
  double rmsDefect = 0.0;   // sqrt(objective / area)
  int iterations = 0;
  std::vector<std::string> warnings;
  std::uint64_t meshId = 0;
};

struct FrameOptions {
  double rankTol = 1e-8;
  int maxIterations = 20000;
  // Below this RMS defect of w - 1 the sphere constraint counts as attained.
  double attainedTol = 5e-2;
  double massSlack = 1e-6;
};

// Exact integrals of pair products: H[(ab),(cd)] = int v_a v_b v_c v_d dA_g and
// b[(ab)] = int v_a v_b dA_g for pairs a <= b.
struct FrameMoments {
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  std::vector<std::pair<int, int>> pairs;
  double area = 0.0;
};

FrameMoments frameMoments(const TriangleMesh& mesh, const Eigen::MatrixXd& basis);

// int (sum_ab Q_ab v_a v_b - 1)^2 dA_g.
double frameObjective(const FrameMoments& moments, const Eigen::MatrixXd& Q);

SphereFrame selectFrame(const TriangleMesh& mesh, const DensityField& mu, const Eigen::MatrixXd& basis,
                        double lambda, const FrameOptions& options = {});

// Frame with a prescribed map U (no optimization), e.g. coordinate functions.
SphereFrame frameFromMap(const TriangleMesh& mesh, const Eigen::MatrixXd& U, double lambda);

struct HarmonicResidual {
  double weakResidual = 0.0;
  double identityResidual = 0.0;
  std::vector<int> undefinedVertices;  // w = 0, phi/|phi| undefined
};

// Tension-field test of phi/|phi| against hat functions.
HarmonicResidual harmonicResidual(const TriangleMesh& mesh, const SphereFrame& frame);

// sum_i |grad u_i|^2 / lambda at vertices, rescaled to unit mass (not clipped).
Eigen::VectorXd recoverDensity(const TriangleMesh& mesh, const SphereFrame& frame);

nlohmann::json frameToJson(const SphereFrame& frame);

} // namespace confspec
