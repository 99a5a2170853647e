#pragma once

#include "confspec/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace confspec {

// Box bounds of the admissible class: floor <= mu <= cap, unit total mass.
struct DensityBounds {
  double floor = 0.0;
  double cap = 1e300;
};

// Per-vertex conformal density on a fixed background mesh, interpolated
// piecewise-linearly. Mass is the exact P1 integral sum_v mu_v * vertexArea_v.
class DensityField {
public:
  DensityField(const TriangleMesh& mesh, Eigen::VectorXd values, DensityBounds bounds = {});

  static DensityField uniform(const TriangleMesh& mesh, DensityBounds bounds = {});
  // Values drawn i.i.d. from [lo, hi] / area, then rescaled to unit mass.
  static DensityField random(const TriangleMesh& mesh, std::uint64_t seed, double lo = 0.5, double hi = 1.5,
                             DensityBounds bounds = {});

  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int v) const { return values_[v]; }
  int size() const { return static_cast<int>(values_.size()); }
  const DensityBounds& bounds() const { return bounds_; }
  std::uint64_t meshId() const { return meshId_; }

  double mass(const TriangleMesh& mesh) const;
  DensityField withBounds(DensityBounds bounds) const;

  // Largest violation of the box and unit-mass constraints.
  double constraintViolation(const TriangleMesh& mesh) const;

private:
  Eigen::VectorXd values_;
  DensityBounds bounds_;
  std::uint64_t meshId_;
};

// L1 distance of two densities, integral |a - b| dA_g with P1 vertex quadrature.
double densityL1(const TriangleMesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ProjectionResult {
  Eigen::VectorXd values;
  double shift;
  int iterations;
  double massResidual;
};

// Euclidean projection (in the vertex-area metric) onto
// {floor <= mu <= cap, sum_v mu_v a_v = 1}: clip to the box, then find the
// scalar shift c with mass(clip(mu + c)) = 1 by a safeguarded Newton fixed
// point. Throws on infeasible bounds or when the iteration fails to reach
// `massTol` within `maxIterations`.
ProjectionResult projectToAdmissible(const TriangleMesh& mesh, const Eigen::VectorXd& mu, DensityBounds bounds,
                                     int maxIterations = 50, double massTol = 1e-12);

} // namespace confspec
