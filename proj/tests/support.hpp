#pragma once

#include "confspec/certify.hpp"
#include "confspec/maximizer.hpp"
#include "confspec/mesh.hpp"

#include <Eigen/Core>
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline Eigen::Matrix2d squareLattice() { return Eigen::Matrix2d::Identity(); }

inline Eigen::Matrix2d equilateralLattice() {
  Eigen::Matrix2d b;
  b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  return b;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("confspec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Yang-Yau holds for every iterate; converged runs clear the Hersch floor.
inline void checkBoundInvariants(const confspec::TriangleMesh& mesh, const confspec::MaximizeResult& r) {
  for (const auto& rec : r.trace.records) {
    INFO("iteration " << rec.iter << ", lambda1*A = " << rec.lambda1Area);
    CHECK(confspec::checkBounds(rec.lambda1Area, mesh.genus()).yangYauOk);
  }
  CHECK(r.certificate.bounds.yangYauOk);
  if (r.trace.status == confspec::AscentStatus::Converged) CHECK(r.certificate.bounds.herschFloorOk);
}

inline confspec::MaximizeResult maximizeChecked(const confspec::TriangleMesh& mesh, const confspec::DensityField& mu0,
                                                const confspec::AscentConfig& config) {
  auto r = confspec::maximize(mesh, mu0, config);
  checkBoundInvariants(mesh, r);
  return r;
}

inline Eigen::Vector3d randomUnitVector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d x(g(rng), g(rng), g(rng));
  return x.normalized();
}

} // namespace testing
