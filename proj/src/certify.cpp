#include "confspec/certify.hpp"

#include "confspec/error.hpp"
#include "confspec/fem.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>

namespace confspec {

BoundChecks checkBounds(double lambda1Area, int genus, double tolerance) {
  BoundChecks b;
  b.genus = genus;
  b.boundValue = 8.0 * std::numbers::pi * std::floor((genus + 3) / 2.0);
  b.yangYauOk = lambda1Area <= b.boundValue * (1.0 + tolerance);
  b.herschFloorOk = lambda1Area >= 8.0 * std::numbers::pi * (1.0 - tolerance);
  return b;
}

double saturatedMeasure(const TriangleMesh& mesh, const DensityField& mu, double tol) {
  const double cap = mu.bounds().cap;
  double m = 0.0;
  for (int v = 0; v < mu.size(); ++v)
    if (mu[v] >= cap * (1.0 - tol)) m += mesh.vertexAreas()[v];
  return m;
}

double negativeMeasure(const TriangleMesh& mesh, const DensityField& mu) {
  double m = 0.0;
  for (int v = 0; v < mu.size(); ++v)
    if (mu[v] < 0.0) m += mesh.vertexAreas()[v];
  return m;
}

Certificate certify(const TriangleMesh& mesh, const DensityField& mu, const SpectralResult& spectral,
                    const SphereFrame& frame, const CollapseDetector& detector, const CertifyOptions& opt) {
  if (mu.meshId() != mesh.id() || spectral.meshId != mesh.id() || frame.meshId != mesh.id()) {
    throwInput("certificate inputs refer to different meshes");
  }
  Certificate c;
  c.lambda1Area = spectral.lambda1() * mu.mass(mesh);

  const double cap = mu.bounds().cap;
  for (int v = 0; v < mu.size(); ++v) {
    if (mu[v] < cap * (1.0 - opt.saturationTol)) c.sphereResidual = std::max(c.sphereResidual, std::abs(frame.w[v] - 1.0));
  }

  c.densityRecoveryL1 = densityL1(mesh, recoverDensity(mesh, frame), mu.values());
  try {
    c.harmonicWeakResidual = harmonicResidual(mesh, frame).weakResidual;
  } catch (const Error& e) {
    // Degenerate map (e.g. after collapse): the harmonic test fails outright.
    if (e.kind() != ErrorKind::Numerical) throw;
    c.harmonicWeakResidual = std::numeric_limits<double>::infinity();
  }
  c.negSetMeasure = negativeMeasure(mesh, mu);
  double sat = saturatedMeasure(mesh, mu, opt.saturationTol);
  c.satSetMeasureTimesN = sat > 0.0 ? sat * cap : 0.0;

  Eigen::VectorXd gradSum = Eigen::VectorXd::Zero(mesh.vertexCount());
  for (int i = 0; i < frame.U.cols(); ++i) gradSum += gradientField(mesh, frame.U.col(i)).perVertex;
  Eigen::Map<const Eigen::VectorXd> areas(mesh.vertexAreas().data(), mesh.vertexCount());
  const double mean = gradSum.dot(areas) / mesh.area();
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    if (gradSum[v] < opt.singularThreshold * mean) c.singularVertices.push_back({v, frame.w[v], gradSum[v]});
  }

  c.bounds = checkBounds(c.lambda1Area, mesh.genus(), opt.boundTolerance);
  c.collapse = detector.detect(mu.values());
  return c;
}

nlohmann::json certificateToJson(const Certificate& c) {
  auto singular = nlohmann::json::array();
  for (const auto& s : c.singularVertices) singular.push_back({{"vertex", s.vertex}, {"w", s.w}, {"grad_sum", s.gradSum}});
  return nlohmann::json{
      {"schema_version", kCertificateSchema},
      {"lambda1_area", c.lambda1Area},
      {"sphere_residual", c.sphereResidual},
      {"density_recovery_L1", c.densityRecoveryL1},
      {"harmonic_weak_residual", c.harmonicWeakResidual},
      {"neg_set_measure", c.negSetMeasure},
      {"sat_set_measure_times_N", c.satSetMeasureTimesN},
      {"singular_vertices", singular},
      {"bounds",
       {{"yang_yau_ok", c.bounds.yangYauOk},
        {"hersch_floor_ok", c.bounds.herschFloorOk},
        {"genus", c.bounds.genus},
        {"bound_value", c.bounds.boundValue}}},
      {"collapse", collapseToJson(c.collapse)},
  };
}

Eigen::Vector3d moebiusMap(const Eigen::Vector3d& e, const Eigen::Vector3d& x) {
  const double e2 = e.squaredNorm();
  if (!(e2 < 1.0)) throwInput("Moebius parameter must satisfy |e| < 1");
  const double ex = e.dot(x), x2 = x.squaredNorm();
  return ((1.0 - e2) * x - (1.0 - 2.0 * ex + x2) * e) / (1.0 - 2.0 * ex + e2 * x2);
}

namespace {

// d sigma_e(x) / d e.
Eigen::Matrix3d moebiusJacobian(const Eigen::Vector3d& e, const Eigen::Vector3d& x) {
  const double e2 = e.squaredNorm(), ex = e.dot(x), x2 = x.squaredNorm();
  const double c = 1.0 - 2.0 * ex + x2;
  const Eigen::Vector3d num = (1.0 - e2) * x - c * e;
  const double den = 1.0 - 2.0 * ex + e2 * x2;
  Eigen::Matrix3d dNum = -2.0 * x * e.transpose() - c * Eigen::Matrix3d::Identity() + 2.0 * e * x.transpose();
  Eigen::RowVector3d dDen = -2.0 * x.transpose() + 2.0 * x2 * e.transpose();
  return dNum / den - num * dDen / (den * den);
}

} // namespace

Eigen::Vector3d moebiusCenter(std::span<const double> weights, std::span<const Eigen::Vector3d> points, double tol,
                              int maxIterations) {
  if (weights.size() != points.size() || weights.empty()) throwInput("moebius_center needs one weight per point");
  auto residual = [&](const Eigen::Vector3d& e) {
    Eigen::Vector3d F = Eigen::Vector3d::Zero();
    for (size_t j = 0; j < points.size(); ++j) F += weights[j] * moebiusMap(e, points[j]);
    return F;
  };

  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  Eigen::Vector3d F = residual(e);
  for (int it = 0; it < maxIterations && F.norm() >= tol; ++it) {
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
    for (size_t j = 0; j < points.size(); ++j) J += weights[j] * moebiusJacobian(e, points[j]);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    if (lu.rank() < 3) break;
    Eigen::Vector3d step = lu.solve(-F);
    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
      Eigen::Vector3d trial = e + alpha * step;
      if (trial.squaredNorm() >= 1.0) continue;
      Eigen::Vector3d Ft = residual(trial);
      if (Ft.norm() < (1.0 - 1e-4 * alpha) * F.norm()) {
        e = trial;
        F = Ft;
        improved = true;
        break;
      }
    }
    if (!improved || e.norm() > 1.0 - 1e-12) break;
  }
  if (!(F.norm() < tol)) {
    throwNumerical("measure nearly atomic; no interior center (residual " + std::to_string(F.norm()) + ")");
  }
  return e;
}

} // namespace confspec
