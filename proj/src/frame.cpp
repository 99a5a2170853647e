#include "confspec/frame.hpp"

#include "confspec/error.hpp"
#include "confspec/fem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace confspec {

namespace {

// Gram matrix of the quadratic barycentric monomials
// (l0^2, l1^2, l2^2, l0 l1, l0 l2, l1 l2) over a triangle of unit area,
// from int l^alpha = 2A alpha! / (|alpha| + 2)!.
Eigen::Matrix<double, 6, 6> quarticGram() {
  const int exps[6][3] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
  const double fact[5] = {1, 1, 2, 6, 24};
  Eigen::Matrix<double, 6, 6> G;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      double num = 1.0;
      for (int c = 0; c < 3; ++c) num *= fact[exps[i][c] + exps[j][c]];
      G(i, j) = 2.0 * num / 720.0;
    }
  }
  return G;
}

Eigen::Matrix<double, 6, 1> quadraticMoments() {
  Eigen::Matrix<double, 6, 1> g;
  g << 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 12, 1.0 / 12, 1.0 / 12;
  return g;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

Eigen::MatrixXd projectPsd(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(A));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Pair coordinates x_(ab) = c_ab Q_ab with c = 1 on the diagonal and 2 off it.
Eigen::VectorXd toPairs(const FrameMoments& mo, const Eigen::MatrixXd& Q) {
  Eigen::VectorXd x(mo.pairs.size());
  for (size_t p = 0; p < mo.pairs.size(); ++p) {
    auto [a, b] = mo.pairs[p];
    x[p] = (a == b ? 1.0 : 2.0) * Q(a, b);
  }
  return x;
}

// Symmetric gradient G_ab = 2 int (w - 1) v_a v_b.
Eigen::MatrixXd objectiveGradient(const FrameMoments& mo, const Eigen::MatrixXd& Q) {
  Eigen::VectorXd r = 2.0 * (mo.H * toPairs(mo, Q) - mo.b);
  Eigen::MatrixXd G(Q.rows(), Q.cols());
  for (size_t p = 0; p < mo.pairs.size(); ++p) {
    auto [a, b] = mo.pairs[p];
    G(a, b) = G(b, a) = r[p];
  }
  return G;
}

void finishFrame(const TriangleMesh& mesh, const Eigen::MatrixXd& basis, SphereFrame& f, double rankTol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(f.Q));
  Eigen::VectorXd d = es.eigenvalues().reverse();
  Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
  f.qSpectrum = d;
  double top = std::max(d[0], 0.0);
  int ell = 0;
  while (ell < d.size() && d[ell] > rankTol * top) ++ell;
  f.ell = ell;
  Eigen::MatrixXd R = V.leftCols(ell) * d.head(ell).cwiseSqrt().asDiagonal();
  f.U = basis * R;
  f.w = f.U.rowwise().squaredNorm();
  f.meshId = mesh.id();
}

} // namespace

FrameMoments frameMoments(const TriangleMesh& mesh, const Eigen::MatrixXd& basis) {
  const int m = static_cast<int>(basis.cols());
  FrameMoments mo;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) mo.pairs.emplace_back(a, b);
  const int np = static_cast<int>(mo.pairs.size());
  mo.H = Eigen::MatrixXd::Zero(np, np);
  mo.b = Eigen::VectorXd::Zero(np);
  mo.area = mesh.area();

  static const Eigen::Matrix<double, 6, 6> G = quarticGram();
  static const Eigen::Matrix<double, 6, 1> g = quadraticMoments();
  Eigen::MatrixXd C(6, np);
  for (int f = 0; f < mesh.triangleCount(); ++f) {
    const Triangle& t = mesh.triangles()[f];
    const double A = mesh.triangleArea(f);
    for (int p = 0; p < np; ++p) {
      auto [a, b] = mo.pairs[p];
      double P0a = basis(t[0], a), P1a = basis(t[1], a), P2a = basis(t[2], a);
      double P0b = basis(t[0], b), P1b = basis(t[1], b), P2b = basis(t[2], b);
      C(0, p) = P0a * P0b;
      C(1, p) = P1a * P1b;
      C(2, p) = P2a * P2b;
      C(3, p) = P0a * P1b + P1a * P0b;
      C(4, p) = P0a * P2b + P2a * P0b;
      C(5, p) = P1a * P2b + P2a * P1b;
    }
    mo.H.noalias() += A * (C.transpose() * (G * C));
    mo.b.noalias() += A * (C.transpose() * g);
  }
  mo.H = symmetrize(mo.H);
  return mo;
}

double frameObjective(const FrameMoments& mo, const Eigen::MatrixXd& Q) {
  Eigen::VectorXd x = toPairs(mo, Q);
  return std::max(0.0, x.dot(mo.H * x) - 2.0 * mo.b.dot(x) + mo.area);
}

SphereFrame selectFrame(const TriangleMesh& mesh, const DensityField& mu, const Eigen::MatrixXd& basis,
                        double lambda, const FrameOptions& opt) {
  const int m = static_cast<int>(basis.cols());
  if (m == 0) throwInput("frame selection needs at least one basis vector");
  if (basis.rows() != mesh.vertexCount()) throwInput("frame basis does not match the mesh vertex count");
  if (mu.meshId() != mesh.id()) throwInput("density belongs to a different mesh");

  FrameMoments mo = frameMoments(mesh, basis);
  SphereFrame frame;
  frame.lambda = lambda;

  // The unconstrained least-squares minimizer solves the problem when it is PSD.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(mo.H);
  const Eigen::VectorXd& hd = hes.eigenvalues();
  double hmax = hd.cwiseAbs().maxCoeff();
  Eigen::VectorXd coeff = hes.eigenvectors().transpose() * mo.b;
  for (int i = 0; i < coeff.size(); ++i) coeff[i] = hd[i] > 1e-13 * hmax ? coeff[i] / hd[i] : 0.0;
  Eigen::VectorXd x = hes.eigenvectors() * coeff;
  Eigen::MatrixXd Q(m, m);
  for (size_t p = 0; p < mo.pairs.size(); ++p) {
    auto [a, b] = mo.pairs[p];
    Q(a, b) = Q(b, a) = (a == b ? 1.0 : 0.5) * x[p];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qes(Q);
  double qmax = qes.eigenvalues().cwiseAbs().maxCoeff();
  if (qes.eigenvalues().minCoeff() < -1e-12 * std::max(qmax, 1e-300)) {
    // Accelerated projected gradient with backtracking and adaptive restart.
    Q = projectPsd(Q);
    Eigen::MatrixXd Y = Q;
    double tk = 1.0;
    double step = 1.0 / (2.0 * std::max(hmax, 1e-300) * 2.0);
    double fQ = frameObjective(mo, Q);
    int it = 0;
    for (; it < opt.maxIterations; ++it) {
      Eigen::MatrixXd gY = objectiveGradient(mo, Y);
      double fY = frameObjective(mo, Y);
      Eigen::MatrixXd next;
      double fNext = 0.0;
      for (int bt = 0; bt < 60; ++bt) {
        next = projectPsd(Y - step * gY);
        Eigen::MatrixXd d = next - Y;
        fNext = frameObjective(mo, next);
        if (fNext <= fY + (gY.array() * d.array()).sum() + d.squaredNorm() / (2.0 * step) + 1e-15 * mo.area) break;
        step *= 0.5;
      }
      double change = (next - Q).norm();
      if (fNext > fQ) {
        // Restart momentum.
        Y = Q;
        tk = 1.0;
        if (change < 1e-14 * std::max(1.0, Q.norm())) break;
        continue;
      }
      double tNext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      Y = next + ((tk - 1.0) / tNext) * (next - Q);
      tk = tNext;
      Q = next;
      fQ = fNext;
      if (change < 1e-14 * std::max(1.0, Q.norm())) break;
    }
    frame.iterations = it;
  }

  // Keep int w mu dA_g = <Q, basis^T M[mu] basis> below 1 + slack.
  MassMatrix M = assembleMass(mesh, mu);
  Eigen::MatrixXd B = basis.transpose() * (M.M * basis);
  double weighted = (Q.array() * B.array()).sum();
  if (weighted > 1.0 + opt.massSlack) Q /= weighted;

  frame.Q = Q;
  frame.objective = frameObjective(mo, Q);
  frame.rmsDefect = std::sqrt(frame.objective / mo.area);
  finishFrame(mesh, basis, frame, opt.rankTol);
  if (!(frame.rmsDefect < opt.attainedTol)) frame.warnings.push_back("sphere constraint unattained");
  return frame;
}

SphereFrame frameFromMap(const TriangleMesh& mesh, const Eigen::MatrixXd& U, double lambda) {
  if (U.rows() != mesh.vertexCount()) throwInput("map does not match the mesh vertex count");
  SphereFrame frame;
  frame.lambda = lambda;
  frame.Q = Eigen::MatrixXd::Identity(U.cols(), U.cols());
  FrameMoments mo = frameMoments(mesh, U);
  frame.objective = frameObjective(mo, frame.Q);
  frame.rmsDefect = std::sqrt(frame.objective / mo.area);
  finishFrame(mesh, U, frame, 0.0);
  frame.U = U;
  frame.w = U.rowwise().squaredNorm();
  return frame;
}

HarmonicResidual harmonicResidual(const TriangleMesh& mesh, const SphereFrame& frame) {
  if (frame.meshId != mesh.id()) throwInput("frame belongs to a different mesh");
  const int n = mesh.vertexCount();
  HarmonicResidual out;
  const double wmax = frame.w.maxCoeff();
  std::vector<char> valid(n, 1);
  for (int v = 0; v < n; ++v) {
    if (!(frame.w[v] > 1e-10 * wmax)) {
      valid[v] = 0;
      out.undefinedVertices.push_back(v);
    }
  }
  if (!(wmax > 0.0) || out.undefinedVertices.size() * 100 > static_cast<size_t>(n)) {
    throwNumerical("map degenerate: w vanishes on " + std::to_string(out.undefinedVertices.size()) + " of " +
                   std::to_string(n) + " vertices");
  }

  Eigen::MatrixXd phi = frame.U;
  for (int v = 0; v < n; ++v)
    if (valid[v]) phi.row(v) /= std::sqrt(frame.w[v]);

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < phi.cols(); ++i) rho += gradientField(mesh, phi.col(i)).perVertex;

  StiffnessMatrix K = assembleStiffness(mesh);
  MassMatrix M1 = assembleMass(mesh, Eigen::VectorXd::Ones(n).eval());
  Eigen::MatrixXd Kphi = K.K * phi;
  Eigen::MatrixXd Mphi = rho.asDiagonal() * (M1.M * phi);

  double num = 0.0, den = 0.0, idNum = 0.0, idDen = 0.0;
  const auto& areas = mesh.vertexAreas();
  for (int v = 0; v < n; ++v) {
    if (!valid[v]) continue;
    num += (Kphi.row(v) - Mphi.row(v)).squaredNorm();
    den += Kphi.row(v).squaredNorm();
    double lhs = phi.row(v).dot(Kphi.row(v));
    double rhs = areas[v] * rho[v];
    idNum += std::abs(lhs - rhs);
    idDen += std::abs(rhs);
  }
  out.weakResidual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.identityResidual = idDen > 0.0 ? idNum / idDen : 0.0;
  return out;
}

Eigen::VectorXd recoverDensity(const TriangleMesh& mesh, const SphereFrame& frame) {
  if (!(frame.lambda > 0.0)) throwInput("density recovery needs a positive eigenvalue");
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(mesh.vertexCount());
  for (int i = 0; i < frame.U.cols(); ++i) nu += gradientField(mesh, frame.U.col(i)).perVertex;
  nu /= frame.lambda;
  Eigen::Map<const Eigen::VectorXd> areas(mesh.vertexAreas().data(), mesh.vertexCount());
  double mass = nu.dot(areas);
  if (mass > 0.0) nu /= mass;
  return nu;
}

nlohmann::json frameToJson(const SphereFrame& f) {
  nlohmann::json j;
  j["ell"] = f.ell;
  j["lambda"] = f.lambda;
  j["objective"] = f.objective;
  j["rms_defect"] = f.rmsDefect;
  auto Q = nlohmann::json::array();
  for (int a = 0; a < f.Q.rows(); ++a) {
    auto row = nlohmann::json::array();
    for (int b = 0; b < f.Q.cols(); ++b) row.push_back(f.Q(a, b));
    Q.push_back(std::move(row));
  }
  j["Q"] = std::move(Q);
  j["q_spectrum"] = std::vector<double>(f.qSpectrum.data(), f.qSpectrum.data() + f.qSpectrum.size());
  auto u = nlohmann::json::array();
  for (int i = 0; i < f.U.cols(); ++i) u.push_back(std::vector<double>(f.U.col(i).data(), f.U.col(i).data() + f.U.rows()));
  j["u"] = std::move(u);
  j["warnings"] = f.warnings;
  return j;
}

} // namespace confspec
