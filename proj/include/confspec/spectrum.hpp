#pragma once

#include "confspec/fem.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace confspec {

struct SolverOptions {
  int k = 6;              // number of nonzero eigenpairs wanted
  double tol = 1e-9;      // relative residual ||Ku - lambda Mu|| / ||Ku||
  double relGap = 0.02;   // cluster threshold
  std::uint64_t seed = 0x5eed;
  double shift = 0.0;     // K + shift*M is factored; 0 selects 1 / (1^T M 1)
  int blockExtra = 4;     // block size is k + blockExtra
  int krylovBlocks = 6;   // blocks per restart cycle
  int maxRestarts = 40;
  // Inertia test on M: Auto runs it whenever M has a negative entry.
  enum class InertiaCheck { Auto, Always, Never } inertia = InertiaCheck::Auto;
};

// Eigenpairs of K u = lambda M u above the constant mode, eigenvectors
// M-orthonormal and M-orthogonal to constants.
struct SpectralResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;   // one column per eigenvalue
  Eigen::VectorXd residuals;
  std::vector<std::vector<int>> clusters;
  std::vector<int> excludedVertices;  // vertices with a zero mass row
  int restarts = 0;
  std::uint64_t meshId = 0;

  double lambda1() const { return eigenvalues[0]; }
  // Columns of the first eigenvalue cluster.
  Eigen::MatrixXd firstClusterBasis() const;
};

SpectralResult solvePencil(const StiffnessMatrix& K, const MassMatrix& M, const SolverOptions& options = {});

// Greedy clustering: consecutive values share a cluster iff
// (lambda_{i+1} - lambda_i) / lambda_i < relGap.
std::vector<std::vector<int>> clusterEigenvalues(std::span<const double> lambda, double relGap);

// CSV with columns index, lambda, residual, cluster.
void writeSpectrumCsv(const std::string& path, const SpectralResult& result);

} // namespace confspec
