#include "confspec/fem.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

using namespace confspec;
using testing::kPi;

namespace {

Eigen::VectorXd randomVector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

TriangleMesh scaledCopy(const TriangleMesh& mesh, double c) {
  std::vector<EdgeLength> lengths;
  for (int e = 0; e < mesh.edgeCount(); ++e)
    lengths.push_back({mesh.edges()[e].first, mesh.edges()[e].second, c * mesh.edgeLengths()[e]});
  return TriangleMesh::fromIntrinsic(mesh.vertexCount(), mesh.triangles(), lengths);
}

} // namespace

TEST_CASE("element stiffness") {
  SUBCASE("equilateral triangle") {
    const double area = std::sqrt(3.0) / 4.0;
    Eigen::Matrix3d k = elementStiffness({1.0, 1.0, 1.0}, area);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) CHECK(k(a, b) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
        else CHECK(k(a, b) == doctest::Approx(-1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-14));
      }
  }
  SUBCASE("right angle gives a zero coupling across the hypotenuse") {
    // Corner 0 carries the right angle, edge (1,2) is the hypotenuse.
    Eigen::Matrix3d k = elementStiffness({std::sqrt(2.0), 1.0, 1.0}, 0.5);
    CHECK(std::abs(k(1, 2)) < 1e-15);
    CHECK(k(0, 1) == doctest::Approx(-0.5));
  }
  SUBCASE("linear functions are integrated exactly") {
    // Triangle (0,0), (2,0.3), (0.4,1.1); u = 1.7 x - 0.6 y.
    Eigen::Vector2d p[3] = {{0, 0}, {2, 0.3}, {0.4, 1.1}};
    std::array<double, 3> l;
    for (int c = 0; c < 3; ++c) l[c] = (p[(c + 1) % 3] - p[(c + 2) % 3]).norm();
    const double area = 0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
    Eigen::Vector3d u;
    for (int c = 0; c < 3; ++c) u[c] = 1.7 * p[c].x() - 0.6 * p[c].y();
    CHECK(u.dot(elementStiffness(l, area) * u) / area == doctest::Approx(1.7 * 1.7 + 0.6 * 0.6).epsilon(1e-13));
  }
}

TEST_CASE("assembled stiffness is symmetric, PSD and annihilates constants") {
  TriangleMesh mesh = generateIcosphere(3);
  StiffnessMatrix K = assembleStiffness(mesh);
  const int n = mesh.vertexCount();
  CHECK((K.K * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);
  SparseMatrix asym = K.K - SparseMatrix(K.K.transpose());
  CHECK(asym.norm() < 1e-14);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Eigen::VectorXd x = randomVector(n, seed);
    CHECK(x.dot(K.K * x) >= -1e-12 * x.squaredNorm());
  }
  CHECK(K.nearDegenerateTriangles.empty());
  CHECK(K.meshId == mesh.id());
}

TEST_CASE("stiffness is invariant under scaling of all lengths") {
  TriangleMesh mesh = generateIcosphere(2);
  SparseMatrix K = assembleStiffness(mesh).K;
  SUBCASE("dyadic factor is exact") {
    SparseMatrix K2 = assembleStiffness(scaledCopy(mesh, 4.0)).K;
    CHECK((K2 - K).norm() == 0.0);
  }
  SUBCASE("generic factor") {
    SparseMatrix K2 = assembleStiffness(scaledCopy(mesh, 3.7)).K;
    SparseMatrix diff = K2 - K;
    CHECK(diff.coeffs().cwiseAbs().maxCoeff() < 1e-13 * K.coeffs().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("consistent mass with unit density") {
  // Every triangle of the equilateral torus has the same area a, and every
  // vertex has six of them: M_vv = 6 * 2a/12, M_uv = 2 * a/12 along edges.
  TriangleMesh mesh = generateFlatTorus(testing::equilateralLattice(), 6, 6);
  const double a = mesh.triangleArea(0);
  MassMatrix M = assembleMass(mesh, Eigen::VectorXd::Ones(mesh.vertexCount()));
  for (int v = 0; v < mesh.vertexCount(); ++v) CHECK(M.M.coeff(v, v) == doctest::Approx(a).epsilon(1e-14));
  for (const auto& [u, v] : mesh.edges()) CHECK(M.M.coeff(u, v) == doctest::Approx(a / 6.0).epsilon(1e-14));
  CHECK(M.M.sum() == doctest::Approx(mesh.area()).epsilon(1e-14));
}

TEST_CASE("mass matrix totals and lumping") {
  TriangleMesh mesh = generateIcosphere(3);
  DensityField mu = DensityField::random(mesh, 11);
  MassMatrix Mc = assembleMass(mesh, mu);
  MassMatrix Ml = assembleMass(mesh, mu, MassMode::Lumped);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.vertexCount());
  CHECK(one.dot(Mc.M * one) == doctest::Approx(mu.mass(mesh)).epsilon(1e-12));
  CHECK(one.dot(Mc.M * one) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Ml.M.diagonal().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Ml.M.nonZeros() == mesh.vertexCount());
  // Row sums of the consistent matrix are the lumped diagonal.
  CHECK(((Mc.M * one) - Ml.M.diagonal()).cwiseAbs().maxCoeff() < 1e-15);

  MassMatrix Mu = assembleMass(mesh, one, MassMode::Lumped);
  for (int v = 0; v < mesh.vertexCount(); ++v)
    CHECK(Mu.M.coeff(v, v) == doctest::Approx(mesh.vertexAreas()[v]).epsilon(1e-14));
}

TEST_CASE("triangles where the density vanishes contribute nothing") {
  TriangleMesh mesh = generateIcosphere(2);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.vertexCount());
  w[0] = 1.0;
  MassMatrix M = assembleMass(mesh, w);
  for (const auto& [a, b] : mesh.edges()) {
    bool touches = false;
    for (const auto& nb : mesh.adjacency()[0]) touches = touches || nb.vertex == a || nb.vertex == b;
    if (a != 0 && b != 0 && !touches) CHECK(M.M.coeff(a, b) == 0.0);
  }
  CHECK(M.M.sum() == doctest::Approx(mesh.vertexAreas()[0]).epsilon(1e-14));
}

TEST_CASE("gradient field") {
  TriangleMesh ico = generateIcosphere(2);
  GradientField g0 = gradientField(ico, Eigen::VectorXd::Constant(ico.vertexCount(), 3.0));
  CHECK(g0.perTriangle.cwiseAbs().maxCoeff() < 1e-12);

  // Mean of |grad sin(2 pi x)|^2 over the unit square torus is 2 pi^2.
  double previous = 1e300;
  for (int n : {16, 32, 64}) {
    TriangleMesh mesh = generateFlatTorus(testing::squareLattice(), n, n);
    Eigen::VectorXd u(mesh.vertexCount());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) u[j * n + i] = std::sin(2 * kPi * i / n);
    GradientField g = gradientField(mesh, u);
    double mean = 0.0;
    for (int f = 0; f < mesh.triangleCount(); ++f) mean += g.perTriangle[f] * mesh.triangleArea(f);
    const double err = std::abs(mean - 2 * kPi * kPi) / (2 * kPi * kPi);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("MatrixMarket output") {
  TriangleMesh mesh = generateIcosphere(1);
  SparseMatrix K = assembleStiffness(mesh).K;
  auto dir = testing::scratchDir("mtx");
  writeMatrixMarket((dir / "K.mtx").string(), K);
  std::ifstream in(dir / "K.mtx");
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == mesh.vertexCount());
  CHECK(cols == mesh.vertexCount());
  CHECK(nnz == K.nonZeros());
  Eigen::SparseMatrix<double> back(rows, cols);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    trip.emplace_back(i - 1, j - 1, v);
  }
  back.setFromTriplets(trip.begin(), trip.end());
  CHECK((back - K).norm() == 0.0);
}
