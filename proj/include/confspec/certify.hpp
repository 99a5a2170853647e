#pragma once

#include "confspec/collapse.hpp"
#include "confspec/density.hpp"
#include "confspec/frame.hpp"
#include "confspec/mesh.hpp"
#include "confspec/spectrum.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <span>
#include <vector>

namespace confspec {

inline constexpr const char* kCertificateSchema = "confspec-cert-1";

struct SingularVertex {
  int vertex;
  double w;
  double gradSum;  // vertex-averaged sum_i |grad u_i|^2
};

struct BoundChecks {
  bool yangYauOk = false;
  bool herschFloorOk = false;
  int genus = 0;
  double boundValue = 0.0;  // 8 pi floor((genus + 3) / 2)
};

struct Certificate {
  double lambda1Area = 0.0;
  double sphereResidual = 0.0;       // max |w - 1| off the saturated set
  double densityRecoveryL1 = 0.0;    // int |recovered - mu| dA_g
  double harmonicWeakResidual = 0.0;  // infinite when the map is degenerate
  double negSetMeasure = 0.0;        // A_g({mu < 0})
  double satSetMeasureTimesN = 0.0;  // A_g({mu = N}) * N
  std::vector<SingularVertex> singularVertices;
  BoundChecks bounds;
  CollapseReport collapse;
};

struct CertifyOptions {
  double singularThreshold = 1e-3;  // relative to the mesh mean of sum |grad u_i|^2
  double boundTolerance = 0.02;
  double saturationTol = 1e-6;      // mu >= N (1 - tol) counts as saturated
};

// All extremality diagnostics for one (mesh, density, spectrum, frame).
Certificate certify(const TriangleMesh& mesh, const DensityField& mu, const SpectralResult& spectral,
                    const SphereFrame& frame, const CollapseDetector& detector, const CertifyOptions& options = {});

BoundChecks checkBounds(double lambda1Area, int genus, double tolerance = 0.02);

// Measures of the saturated set {mu >= N(1 - tol)} and the negative set {mu < 0}.
double saturatedMeasure(const TriangleMesh& mesh, const DensityField& mu, double tol = 1e-6);
double negativeMeasure(const TriangleMesh& mesh, const DensityField& mu);

nlohmann::json certificateToJson(const Certificate& cert);

// Conformal automorphism of S^2:
// sigma_e(x) = ((1 - |e|^2) x - (1 - 2 e.x + |x|^2) e) / (1 - 2 e.x + |e|^2 |x|^2).
Eigen::Vector3d moebiusMap(const Eigen::Vector3d& e, const Eigen::Vector3d& x);

// e with |e| < 1 and sum_j w_j sigma_e(x_j) = 0, by damped Newton iteration.
Eigen::Vector3d moebiusCenter(std::span<const double> weights, std::span<const Eigen::Vector3d> points,
                              double tol = 1e-10, int maxIterations = 200);

} // namespace confspec
