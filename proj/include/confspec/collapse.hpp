#pragma once

#include "confspec/mesh.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <vector>

namespace confspec {

struct CollapseReport {
  std::vector<double> radiusFractions;
  std::vector<double> maxBallMass;  // per radius fraction
  double diameter = 0.0;
  bool flag = false;
};

// Graph-distance balls (Dijkstra over edge lengths) on a fixed mesh.
class CollapseDetector {
public:
  static constexpr double kFlagRadius = 0.05;
  static constexpr double kFlagMass = 0.5;

  explicit CollapseDetector(const TriangleMesh& mesh);

  double diameter() const { return diameter_; }

  // For each radius fraction r, the largest mu-mass inside a ball of radius
  // r * diameter centred at a vertex. The flag is raised when the ball of
  // radius 0.05 * diameter carries more than half the mass.
  CollapseReport detect(const Eigen::VectorXd& mu, std::vector<double> radiusFractions = {0.05, 0.1, 0.25}) const;

private:
  const TriangleMesh& mesh_;
  double diameter_ = 0.0;
};

// Graph diameter estimate from repeated farthest-vertex sweeps (a lower bound
// that is exact on the symmetric meshes used here).
double graphDiameter(const TriangleMesh& mesh, int sweeps = 4);

nlohmann::json collapseToJson(const CollapseReport& report);

} // namespace confspec
