#pragma once

#include "confspec/density.hpp"
#include "confspec/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace confspec {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Cotangent stiffness matrix: u^T K u is the Dirichlet energy of the P1
// interpolant. Depends only on triangle angles, hence on the conformal class.
struct StiffnessMatrix {
  SparseMatrix K;
  std::uint64_t meshId = 0;
  // Triangles with an angle below the degeneracy threshold (assembly proceeds).
  std::vector<int> nearDegenerateTriangles;
  static constexpr double kMinAngle = 1e-8;
};

enum class MassMode { Consistent, Lumped };

// Density-weighted mass matrix, M_ab = integral mu phi_a phi_b dA_g.
struct MassMatrix {
  SparseMatrix M;
  MassMode mode = MassMode::Consistent;
  std::uint64_t meshId = 0;
};

// 3x3 element stiffness from intrinsic lengths (l_c opposite corner c), with
// off-diagonal entries -cot(angle opposite the edge)/2.
Eigen::Matrix3d elementStiffness(const std::array<double, 3>& lengths, double area);

StiffnessMatrix assembleStiffness(const TriangleMesh& mesh);
MassMatrix assembleMass(const TriangleMesh& mesh, const DensityField& mu, MassMode mode = MassMode::Consistent);
// Same assembly with raw vertex weights (e.g. mu = 1 for the background metric).
MassMatrix assembleMass(const TriangleMesh& mesh, const Eigen::VectorXd& weights,
                        MassMode mode = MassMode::Consistent);

struct GradientField {
  Eigen::VectorXd perTriangle;  // |grad u|^2, constant on each triangle
  Eigen::VectorXd perVertex;    // area-weighted average over incident triangles
};

GradientField gradientField(const TriangleMesh& mesh, const Eigen::VectorXd& u);

// MatrixMarket coordinate file (general, real, 1-based indices).
void writeMatrixMarket(const std::string& path, const SparseMatrix& A);

} // namespace confspec
