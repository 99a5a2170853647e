#include "confspec/error.hpp"
#include "confspec/frame.hpp"
#include "confspec/spectrum.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <random>

using namespace confspec;
using testing::kPi;

namespace {

struct Setup {
  TriangleMesh mesh;
  DensityField mu;
  SpectralResult spectral;
};

Setup uniformSetup(TriangleMesh mesh, int k) {
  DensityField mu = DensityField::uniform(mesh);
  SolverOptions opt;
  opt.k = k;
  SpectralResult r = solvePencil(assembleStiffness(mesh), assembleMass(mesh, mu), opt);
  return {std::move(mesh), std::move(mu), std::move(r)};
}

Eigen::MatrixXd coordinates(const TriangleMesh& mesh) {
  Eigen::MatrixXd X(mesh.vertexCount(), 3);
  for (int v = 0; v < mesh.vertexCount(); ++v) X.row(v) = (*mesh.embedding())[v].transpose();
  return X;
}

Eigen::MatrixXd randomOrthogonal(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

} // namespace

TEST_CASE("sphere frame from the first cluster") {
  Setup s = uniformSetup(generateIcosphere(4), 4);
  SphereFrame f = selectFrame(s.mesh, s.mu, s.spectral.firstClusterBasis(), s.spectral.lambda1());
  CHECK(f.ell == 3);
  CHECK((f.w.array() - 1.0).abs().maxCoeff() < 2e-2);
  // The eigenbasis is an orthogonal change of the coordinate functions, so Q is nearly scalar.
  CHECK(f.qSpectrum[0] / f.qSpectrum[2] < 1.02);
  CHECK(f.warnings.empty());
  CHECK(f.rmsDefect < 1e-2);
}

TEST_CASE("a single sign-changing eigenfunction cannot reach the sphere") {
  Setup s = uniformSetup(generateIcosphere(3), 4);
  Eigen::MatrixXd basis = s.spectral.eigenvectors.col(0);
  SphereFrame f = selectFrame(s.mesh, s.mu, basis, s.spectral.lambda1());
  CHECK(f.ell == 1);
  CHECK(f.objective > 0.1);
  CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("equilateral torus frame") {
  Setup s = uniformSetup(generateFlatTorus(testing::equilateralLattice(), 48, 48), 8);
  REQUIRE(s.spectral.clusters[0].size() == 6);
  SphereFrame f = selectFrame(s.mesh, s.mu, s.spectral.firstClusterBasis(), s.spectral.lambda1());
  CHECK((f.w.array() - 1.0).abs().maxCoeff() < 5e-2);
  CHECK(f.ell >= 4);
}

TEST_CASE("frame objective is invariant under orthogonal change of basis") {
  Setup s = uniformSetup(generateIcosphere(3), 4);
  Eigen::MatrixXd basis = s.spectral.firstClusterBasis();
  SphereFrame f0 = selectFrame(s.mesh, s.mu, basis, s.spectral.lambda1());
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Eigen::MatrixXd R = randomOrthogonal(3, seed);
    SphereFrame f1 = selectFrame(s.mesh, s.mu, basis * R, s.spectral.lambda1());
    CHECK(std::abs(f1.objective - f0.objective) < 1e-10);
    // Q transforms by conjugation.
    FrameMoments mom = frameMoments(s.mesh, basis * R);
    CHECK(std::abs(frameObjective(mom, R.transpose() * f0.Q * R) - f0.objective) < 1e-10);
  }
}

TEST_CASE("frame moments") {
  Setup s = uniformSetup(generateIcosphere(2), 4);
  Eigen::MatrixXd basis = s.spectral.firstClusterBasis();
  FrameMoments mom = frameMoments(s.mesh, basis);
  CHECK(mom.pairs.size() == 6);
  CHECK(mom.area == doctest::Approx(s.mesh.area()));
  // Q = 0 gives the area.
  CHECK(frameObjective(mom, Eigen::MatrixXd::Zero(3, 3)) == doctest::Approx(s.mesh.area()).epsilon(1e-12));
}

TEST_CASE("harmonic residual of the identity map") {
  double previous = 1e300;
  for (int level : {3, 4, 5}) {
    TriangleMesh mesh = generateIcosphere(level);
    SphereFrame f = frameFromMap(mesh, coordinates(mesh), 2.0);
    HarmonicResidual h = harmonicResidual(mesh, f);
    CHECK(h.weakResidual < previous);
    CHECK(h.undefinedVertices.empty());
    previous = h.weakResidual;
  }
  CHECK(previous < 5e-2);
}

TEST_CASE("harmonic residual of a non-harmonic map") {
  TriangleMesh mesh = generateIcosphere(4);
  Eigen::MatrixXd X = coordinates(mesh);
  // (x, y, 4z) / |.| squeezes the sphere towards the poles.
  X.col(2) *= 4.0;
  SphereFrame f = frameFromMap(mesh, X, 2.0);
  CHECK(harmonicResidual(mesh, f).weakResidual > 0.3);
}

TEST_CASE("degenerate map is rejected") {
  TriangleMesh mesh = generateIcosphere(2);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(mesh.vertexCount(), 3);
  SphereFrame f = frameFromMap(mesh, X, 2.0);
  CHECK_THROWS_AS(harmonicResidual(mesh, f), Error);
}

TEST_CASE("density recovery") {
  SUBCASE("sphere") {
    Setup s = uniformSetup(generateIcosphere(4), 4);
    SphereFrame f = selectFrame(s.mesh, s.mu, s.spectral.firstClusterBasis(), s.spectral.lambda1());
    Eigen::VectorXd nu = recoverDensity(s.mesh, f);
    CHECK(DensityField(s.mesh, nu).mass(s.mesh) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(densityL1(s.mesh, nu, s.mu.values()) < 2e-2);
  }
  SUBCASE("equilateral torus") {
    Setup s = uniformSetup(generateFlatTorus(testing::equilateralLattice(), 24, 24), 8);
    SphereFrame f = selectFrame(s.mesh, s.mu, s.spectral.firstClusterBasis(), s.spectral.lambda1());
    CHECK(densityL1(s.mesh, recoverDensity(s.mesh, f), s.mu.values()) < 2e-2);
  }
  SUBCASE("single eigenfunction") {
    Setup s = uniformSetup(generateIcosphere(4), 4);
    SphereFrame f = frameFromMap(s.mesh, s.spectral.eigenvectors.col(0), s.spectral.lambda1());
    CHECK(densityL1(s.mesh, recoverDensity(s.mesh, f), s.mu.values()) > 0.1);
  }
}

TEST_CASE("frame JSON") {
  Setup s = uniformSetup(generateIcosphere(2), 4);
  SphereFrame f = selectFrame(s.mesh, s.mu, s.spectral.firstClusterBasis(), s.spectral.lambda1());
  nlohmann::json j = frameToJson(f);
  CHECK(j["ell"] == 3);
  CHECK(j["q_spectrum"].size() == 3);
  CHECK(j.contains("warnings"));
}
