#include "confspec/density.hpp"

#include "confspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace confspec {

DensityField::DensityField(const TriangleMesh& mesh, Eigen::VectorXd values, DensityBounds bounds)
    : values_(std::move(values)), bounds_(bounds), meshId_(mesh.id()) {
  if (values_.size() != mesh.vertexCount()) {
    throwInput("density has " + std::to_string(values_.size()) + " values, mesh has " +
               std::to_string(mesh.vertexCount()) + " vertices");
  }
  if (!values_.allFinite()) throwInput("density contains non-finite values");
  if (!(bounds_.floor < bounds_.cap)) throwInput("density floor must be below the cap");
}

DensityField DensityField::uniform(const TriangleMesh& mesh, DensityBounds bounds) {
  return DensityField(mesh, Eigen::VectorXd::Constant(mesh.vertexCount(), 1.0 / mesh.area()), bounds);
}

DensityField DensityField::random(const TriangleMesh& mesh, std::uint64_t seed, double lo, double hi,
                                  DensityBounds bounds) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(mesh.vertexCount());
  for (int i = 0; i < v.size(); ++i) v[i] = dist(rng) / mesh.area();
  Eigen::Map<const Eigen::VectorXd> areas(mesh.vertexAreas().data(), mesh.vertexCount());
  v /= v.dot(areas);
  return DensityField(mesh, std::move(v), bounds);
}

double DensityField::mass(const TriangleMesh& mesh) const {
  Eigen::Map<const Eigen::VectorXd> areas(mesh.vertexAreas().data(), mesh.vertexCount());
  return values_.dot(areas);
}

DensityField DensityField::withBounds(DensityBounds bounds) const {
  DensityField copy = *this;
  copy.bounds_ = bounds;
  return copy;
}

double DensityField::constraintViolation(const TriangleMesh& mesh) const {
  double box = std::max(0.0, std::max(bounds_.floor - values_.minCoeff(), values_.maxCoeff() - bounds_.cap));
  return std::max(box, std::abs(mass(mesh) - 1.0));
}

double densityL1(const TriangleMesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::Map<const Eigen::VectorXd> areas(mesh.vertexAreas().data(), mesh.vertexCount());
  return (a - b).cwiseAbs().dot(areas);
}

ProjectionResult projectToAdmissible(const TriangleMesh& mesh, const Eigen::VectorXd& mu, DensityBounds bounds,
                                     int maxIterations, double massTol) {
  const double lo = bounds.floor, hi = bounds.cap;
  const double area = mesh.area();
  if (lo * area > 1.0 + massTol || hi * area < 1.0 - massTol) {
    throwInput("density bounds admit no unit-mass density: floor*A = " + std::to_string(lo * area) +
               ", cap*A = " + std::to_string(hi * area));
  }
  const auto& a = mesh.vertexAreas();
  const int n = static_cast<int>(mu.size());

  auto evaluate = [&](double c, double& activeArea) {
    double m = 0.0;
    activeArea = 0.0;
    for (int v = 0; v < n; ++v) {
      double x = mu[v] + c;
      if (x <= lo) {
        m += a[v] * lo;
      } else if (x >= hi) {
        m += a[v] * hi;
      } else {
        m += a[v] * x;
        activeArea += a[v];
      }
    }
    return m;
  };

  // mass(c) is nondecreasing; bracket the root.
  double cLo = lo - mu.maxCoeff();
  double cHi = hi - mu.minCoeff();
  double c = std::clamp(0.0, cLo, cHi);
  double activeArea = 0.0;
  double m = evaluate(c, activeArea);
  int it = 0;
  for (; it < maxIterations && std::abs(m - 1.0) > massTol; ++it) {
    if (m < 1.0) cLo = c; else cHi = c;
    double next = activeArea > 0.0 ? c + (1.0 - m) / activeArea : 0.5 * (cLo + cHi);
    if (!(next > cLo && next < cHi)) next = 0.5 * (cLo + cHi);
    c = next;
    m = evaluate(c, activeArea);
  }
  if (std::abs(m - 1.0) > massTol) {
    throwNumerical("density projection did not converge: mass residual " + std::to_string(m - 1.0) + " after " +
                   std::to_string(it) + " iterations");
  }
  ProjectionResult out;
  out.values = (mu.array() + c).cwiseMax(lo).cwiseMin(hi).matrix();
  out.shift = c;
  out.iterations = it;
  out.massResidual = m - 1.0;
  return out;
}

} // namespace confspec
