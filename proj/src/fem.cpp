#include "confspec/fem.hpp"

#include "confspec/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace confspec {

Eigen::Matrix3d elementStiffness(const std::array<double, 3>& l, double area) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  for (int c = 0; c < 3; ++c) {
    int a = (c + 1) % 3, b = (c + 2) % 3;
    double cot = (l[a] * l[a] + l[b] * l[b] - l[c] * l[c]) / (4.0 * area);
    k(a, b) -= 0.5 * cot;
    k(b, a) -= 0.5 * cot;
    k(a, a) += 0.5 * cot;
    k(b, b) += 0.5 * cot;
  }
  return k;
}

StiffnessMatrix assembleStiffness(const TriangleMesh& mesh) {
  StiffnessMatrix out;
  out.meshId = mesh.id();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangleCount());
  for (int f = 0; f < mesh.triangleCount(); ++f) {
    auto l = mesh.triangleLengths(f);
    double area = mesh.triangleArea(f);
    for (int c = 0; c < 3; ++c) {
      int a = (c + 1) % 3, b = (c + 2) % 3;
      double angle = std::atan2(4.0 * area, l[a] * l[a] + l[b] * l[b] - l[c] * l[c]);
      if (angle < StiffnessMatrix::kMinAngle) {
        out.nearDegenerateTriangles.push_back(f);
        break;
      }
    }
    Eigen::Matrix3d k = elementStiffness(l, area);
    const Triangle& t = mesh.triangles()[f];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], k(i, j));
  }
  out.K.resize(mesh.vertexCount(), mesh.vertexCount());
  out.K.setFromTriplets(trip.begin(), trip.end());
  out.K.makeCompressed();
  return out;
}

MassMatrix assembleMass(const TriangleMesh& mesh, const Eigen::VectorXd& mu, MassMode mode) {
  if (mu.size() != mesh.vertexCount()) throwInput("mass weights do not match the mesh vertex count");
  MassMatrix out;
  out.mode = mode;
  out.meshId = mesh.id();
  const int n = mesh.vertexCount();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve((mode == MassMode::Consistent ? 9 : 3) * mesh.triangleCount());
  for (int f = 0; f < mesh.triangleCount(); ++f) {
    const Triangle& t = mesh.triangles()[f];
    const double A = mesh.triangleArea(f);
    const double m0 = mu[t[0]], m1 = mu[t[1]], m2 = mu[t[2]];
    const double sum = m0 + m1 + m2;
    // integral phi_a phi_b phi_c over the triangle: A/10 (a=b=c), A/30 (two equal), A/60 (distinct).
    Eigen::Matrix3d e;
    const double w[3] = {m0, m1, m2};
    for (int a = 0; a < 3; ++a) {
      e(a, a) = A / 10.0 * w[a] + A / 30.0 * (sum - w[a]);
      for (int b = a + 1; b < 3; ++b) {
        double other = sum - w[a] - w[b];
        e(a, b) = e(b, a) = A / 30.0 * (w[a] + w[b]) + A / 60.0 * other;
      }
    }
    if (mode == MassMode::Consistent) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) trip.emplace_back(t[a], t[b], e(a, b));
    } else {
      for (int a = 0; a < 3; ++a) trip.emplace_back(t[a], t[a], e.row(a).sum());
    }
  }
  out.M.resize(n, n);
  out.M.setFromTriplets(trip.begin(), trip.end());
  out.M.makeCompressed();
  return out;
}

MassMatrix assembleMass(const TriangleMesh& mesh, const DensityField& mu, MassMode mode) {
  if (mu.meshId() != mesh.id()) throwInput("density belongs to a different mesh");
  return assembleMass(mesh, mu.values(), mode);
}

GradientField gradientField(const TriangleMesh& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.vertexCount()) throwInput("vertex function does not match the mesh vertex count");
  GradientField g;
  g.perTriangle.resize(mesh.triangleCount());
  g.perVertex = Eigen::VectorXd::Zero(mesh.vertexCount());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.vertexCount());
  for (int f = 0; f < mesh.triangleCount(); ++f) {
    const Triangle& t = mesh.triangles()[f];
    const double A = mesh.triangleArea(f);
    Eigen::Matrix3d k = elementStiffness(mesh.triangleLengths(f), A);
    Eigen::Vector3d ue(u[t[0]], u[t[1]], u[t[2]]);
    double energy = std::max(0.0, ue.dot(k * ue));
    double grad2 = energy / A;
    g.perTriangle[f] = grad2;
    for (int c = 0; c < 3; ++c) {
      g.perVertex[t[c]] += A * grad2;
      weight[t[c]] += A;
    }
  }
  g.perVertex.array() /= weight.array();
  return g;
}

void writeMatrixMarket(const std::string& path, const SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
    }
  }
}

} // namespace confspec
