#include "confspec/spectrum.hpp"

#include "confspec/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace confspec {

namespace {

bool hasNegativeEntry(const SparseMatrix& A) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      if (it.value() < 0.0) return true;
  return false;
}

// Number of negative pivots of M restricted to its nonzero rows.
int negativeInertia(const SparseMatrix& M, const std::vector<int>& support) {
  std::vector<int> local(M.rows(), -1);
  for (size_t i = 0; i < support.size(); ++i) local[support[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
      if (local[it.row()] >= 0 && local[it.col()] >= 0) trip.emplace_back(local[it.row()], local[it.col()], it.value());
  SparseMatrix Ms(support.size(), support.size());
  Ms.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(Ms);
  if (ldlt.info() != Eigen::Success) return 1;
  const Eigen::VectorXd& d = ldlt.vectorD();
  double scale = d.cwiseAbs().maxCoeff();
  int negative = 0;
  for (int i = 0; i < d.size(); ++i)
    if (d[i] < -1e-14 * scale) ++negative;
  return negative;
}

struct PencilOps {
  const SparseMatrix& K;
  const SparseMatrix& M;
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  Eigen::VectorXd ones;
  Eigen::VectorXd Mones;
  double totalMass;

  PencilOps(const SparseMatrix& k, const SparseMatrix& m, double shift) : K(k), M(m) {
    SparseMatrix A = K + shift * M;
    solver.compute(A);
    if (solver.info() != Eigen::Success) throwNumerical("factorization of the shifted pencil failed");
    ones = Eigen::VectorXd::Ones(K.rows());
    Mones = M * ones;
    totalMass = ones.dot(Mones);
  }

  // Remove the M-weighted mean: x <- x - 1 (1^T M x) / (1^T M 1).
  void deflate(Eigen::MatrixXd& X) const {
    Eigen::RowVectorXd c = (Mones.transpose() * X) / totalMass;
    X -= ones * c;
  }

  Eigen::MatrixXd shiftInvert(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd MX = M * X;
    Eigen::MatrixXd Y(X.rows(), X.cols());
    for (int j = 0; j < X.cols(); ++j) Y.col(j) = solver.solve(MX.col(j));
    return Y;
  }
};

// Appends the columns of X to the M-orthonormal basis V (with prefix `used`
// columns filled), skipping numerically dependent columns. Returns the new
// column count.
int appendOrthonormal(const PencilOps& ops, Eigen::MatrixXd& V, int used, Eigen::MatrixXd X) {
  ops.deflate(X);
  for (int j = 0; j < X.cols() && used < V.cols(); ++j) {
    Eigen::VectorXd x = X.col(j);
    double before = std::sqrt(std::max(0.0, x.dot(ops.M * x)));
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) {
        Eigen::VectorXd Mx = ops.M * x;
        Eigen::VectorXd coeff = V.leftCols(used).transpose() * Mx;
        x -= V.leftCols(used) * coeff;
      }
    }
    double after = std::sqrt(std::max(0.0, x.dot(ops.M * x)));
    if (after <= 1e-10 * before) continue;
    V.col(used++) = x / after;
  }
  return used;
}

} // namespace

Eigen::MatrixXd SpectralResult::firstClusterBasis() const {
  const auto& c = clusters.front();
  return eigenvectors.middleCols(c.front(), static_cast<int>(c.size()));
}

SpectralResult solvePencil(const StiffnessMatrix& K, const MassMatrix& M, const SolverOptions& opt) {
  if (opt.k < 1) throwInput("number of eigenpairs k must be at least 1");
  if (K.meshId != M.meshId) throwInput("stiffness and mass matrices come from different meshes");
  const int n = static_cast<int>(K.K.rows());
  if (opt.k > n - 2) throwInput("k too large for a mesh with " + std::to_string(n) + " vertices");

  SpectralResult out;
  out.meshId = K.meshId;

  std::vector<int> support;
  Eigen::VectorXd diag = M.M.diagonal();
  for (int v = 0; v < n; ++v) {
    if (diag[v] == 0.0) out.excludedVertices.push_back(v);
    else support.push_back(v);
  }
  bool check = opt.inertia == SolverOptions::InertiaCheck::Always ||
               (opt.inertia == SolverOptions::InertiaCheck::Auto && hasNegativeEntry(M.M));
  if (check) {
    if (diag.minCoeff() < 0.0 || negativeInertia(M.M, support) > 0) {
      throwNumerical("indefinite mass; reduce negative density or use floor=0");
    }
  }

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  double totalMass = ones.dot(M.M * ones);
  if (!(totalMass > 0.0)) throwNumerical("mass matrix has non-positive total mass");
  const double shift = opt.shift > 0.0 ? opt.shift : 1.0 / totalMass;
  PencilOps ops(K.K, M.M, shift);

  const int k = opt.k;
  const int p = std::min(k + opt.blockExtra, n - 2);
  const int maxDim = std::min(p * opt.krylovBlocks, n - 1);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd start(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) start(i, j) = gauss(rng);
  // Map into the range of the shift-invert operator (drops zero-mass components).
  start = ops.shiftInvert(start);

  Eigen::VectorXd ritzValues;
  Eigen::MatrixXd ritzVectors;
  Eigen::VectorXd residuals;
  bool converged = false;
  int restart = 0;
  for (; restart <= opt.maxRestarts; ++restart) {
    Eigen::MatrixXd V(n, maxDim);
    int used = appendOrthonormal(ops, V, 0, start);
    int blockBegin = 0;
    while (used < maxDim) {
      int blockEnd = used;
      if (blockEnd == blockBegin) break;
      Eigen::MatrixXd next = ops.shiftInvert(V.middleCols(blockBegin, blockEnd - blockBegin));
      blockBegin = blockEnd;
      used = appendOrthonormal(ops, V, used, next);
    }
    // Converged directions make the expansion dependent; refill with fresh ones.
    for (int attempt = 0; used < maxDim && attempt < 3; ++attempt) {
      Eigen::MatrixXd fresh(n, maxDim - used);
      for (int j = 0; j < fresh.cols(); ++j)
        for (int i = 0; i < n; ++i) fresh(i, j) = gauss(rng);
      used = appendOrthonormal(ops, V, used, ops.shiftInvert(ops.shiftInvert(fresh)));
    }
    if (used < k) throwNumerical("Krylov space collapsed below the requested number of eigenpairs");

    const auto basis = V.leftCols(used);
    Eigen::MatrixXd KV = K.K * basis;
    Eigen::MatrixXd MV = M.M * basis;
    Eigen::MatrixXd Kr = basis.transpose() * KV;
    Eigen::MatrixXd Mr = basis.transpose() * MV;
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(Kr, Mr);
    if (rr.info() != Eigen::Success) throwNumerical("Rayleigh-Ritz eigensolve failed");

    const int keep = std::min(p, used);
    ritzValues = rr.eigenvalues().head(keep);
    Eigen::MatrixXd Y = rr.eigenvectors().leftCols(keep);
    ritzVectors = basis * Y;
    Eigen::MatrixXd KU = KV * Y;
    Eigen::MatrixXd MU = MV * Y;
    residuals.resize(k);
    for (int j = 0; j < k; ++j) {
      double denom = KU.col(j).norm();
      residuals[j] = (KU.col(j) - ritzValues[j] * MU.col(j)).norm() / (denom > 0.0 ? denom : 1.0);
    }
    if (residuals.maxCoeff() < opt.tol) {
      converged = true;
      break;
    }
    start = ritzVectors;
  }
  out.restarts = restart;
  if (!converged) {
    std::ostringstream msg;
    msg << "eigensolver did not converge after " << opt.maxRestarts << " restarts; residuals:";
    for (int j = 0; j < residuals.size(); ++j) msg << " " << residuals[j];
    throwNumerical(msg.str());
  }

  // Exact deflation, M-normalization and a deterministic sign.
  Eigen::MatrixXd U = ritzVectors.leftCols(k);
  ops.deflate(U);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd u = U.col(j);
    u /= std::sqrt(u.dot(M.M * u));
    Eigen::Index idx;
    u.cwiseAbs().maxCoeff(&idx);
    if (u[idx] < 0.0) u = -u;
    U.col(j) = u;
  }
  out.eigenvalues = ritzValues.head(k);
  out.eigenvectors = std::move(U);
  out.residuals = residuals;
  out.clusters = clusterEigenvalues(std::span<const double>(out.eigenvalues.data(), k), opt.relGap);
  return out;
}

std::vector<std::vector<int>> clusterEigenvalues(std::span<const double> lambda, double relGap) {
  std::vector<std::vector<int>> clusters;
  for (size_t i = 0; i < lambda.size(); ++i) {
    if (i > 0 && (lambda[i] - lambda[i - 1]) / std::abs(lambda[i - 1]) < relGap) {
      clusters.back().push_back(static_cast<int>(i));
    } else {
      clusters.push_back({static_cast<int>(i)});
    }
  }
  return clusters;
}

void writeSpectrumCsv(const std::string& path, const SpectralResult& r) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  std::vector<int> clusterOf(r.eigenvalues.size(), 0);
  for (size_t c = 0; c < r.clusters.size(); ++c)
    for (int i : r.clusters[c]) clusterOf[i] = static_cast<int>(c);
  out << "index,lambda,residual,cluster\n" << std::setprecision(17);
  for (int i = 0; i < r.eigenvalues.size(); ++i) {
    out << i + 1 << "," << r.eigenvalues[i] << "," << r.residuals[i] << "," << clusterOf[i] << "\n";
  }
}

} // namespace confspec
