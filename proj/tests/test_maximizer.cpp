#include "confspec/error.hpp"
#include "confspec/maximizer.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>

using namespace confspec;
using testing::kPi;

namespace {

AscentConfig defaultConfig(const TriangleMesh& mesh) { return AscentConfig::withScheduleTimesArea(mesh, {4, 16, 64}); }

StepResult oneStep(const TriangleMesh& mesh, const DensityField& mu, const AscentConfig& config) {
  StiffnessMatrix K = assembleStiffness(mesh);
  SpectralResult r = densitySpectrum(mesh, K, mu, config);
  return ascentStep(mesh, K, mu, r, config);
}

void checkAcceptedMonotone(const AscentTrace& trace) {
  double last = 0.0;
  double lastN = 0.0;
  for (const auto& rec : trace.records) {
    if (rec.N != lastN) last = 0.0;  // a new stage re-projects the density
    if (rec.step > 0.0) CHECK(rec.lambda1Area >= last * (1.0 - 1e-12));
    last = std::max(last, rec.lambda1Area);
    lastN = rec.N;
  }
}

} // namespace

TEST_CASE("uniform density is a fixed point") {
  SUBCASE("round sphere") {
    TriangleMesh mesh = generateIcosphere(4);
    AscentConfig config = defaultConfig(mesh);
    DensityField mu = DensityField::uniform(mesh, {0.0, config.nSchedule[0]});
    StepResult s = oneStep(mesh, mu, config);
    CHECK(densityL1(mesh, s.mu.values(), mu.values()) < 1e-6);
  }
  SUBCASE("equilateral torus") {
    TriangleMesh mesh = generateFlatTorus(testing::equilateralLattice(), 48, 48);
    AscentConfig config = defaultConfig(mesh);
    DensityField mu = DensityField::uniform(mesh, {0.0, config.nSchedule[0]});
    StepResult s = oneStep(mesh, mu, config);
    CHECK(densityL1(mesh, s.mu.values(), mu.values()) < 1e-6);
  }
}

TEST_CASE("perturbed hemisphere: one accepted step increases lambda_1") {
  TriangleMesh mesh = generateIcosphere(3);
  AscentConfig config = defaultConfig(mesh);
  Eigen::VectorXd v(mesh.vertexCount());
  for (int i = 0; i < mesh.vertexCount(); ++i) v[i] = (*mesh.embedding())[i].z() > 0 ? 1.2 : 1.0;
  v /= DensityField(mesh, v).mass(mesh);
  DensityField mu(mesh, v, {0.0, config.nSchedule[0]});
  StiffnessMatrix K = assembleStiffness(mesh);
  SpectralResult r = densitySpectrum(mesh, K, mu, config);
  StepResult s = ascentStep(mesh, K, mu, r, config);
  REQUIRE(s.accepted);
  CHECK(s.spectral.lambda1() > r.lambda1());
  CHECK(s.step > 0.0);
  CHECK(s.mu.constraintViolation(mesh) < 1e-10);
}

TEST_CASE("maximize on the sphere from a random start") {
  TriangleMesh mesh = generateIcosphere(4);
  AscentConfig config = defaultConfig(mesh);
  DensityField mu0 = DensityField::random(mesh, 12);
  MaximizeResult r = testing::maximizeChecked(mesh, mu0, config);
  CHECK(r.trace.status == AscentStatus::Converged);
  const double value = r.spectral.lambda1() * r.mu.mass(mesh);
  CHECK(value == doctest::Approx(8 * kPi).epsilon(2e-2));
  CHECK(r.mu.constraintViolation(mesh) < 1e-10);
  CHECK(r.trace.stages.size() == 3);
  checkAcceptedMonotone(r.trace);
  for (const auto& rec : r.trace.records) CHECK_FALSE(rec.collapse);
}

TEST_CASE("maximize on the equilateral torus") {
  TriangleMesh mesh = generateFlatTorus(testing::equilateralLattice(), 48, 48);
  MaximizeResult r = testing::maximizeChecked(mesh, DensityField::uniform(mesh), defaultConfig(mesh));
  CHECK(r.trace.status == AscentStatus::Converged);
  CHECK(r.certificate.lambda1Area == doctest::Approx(8 * kPi * kPi / std::sqrt(3.0)).epsilon(2e-2));
}

TEST_CASE("maximize on the square torus") {
  TriangleMesh mesh = generateFlatTorus(testing::squareLattice(), 48, 48);
  MaximizeResult r = testing::maximizeChecked(mesh, DensityField::uniform(mesh), defaultConfig(mesh));
  CHECK(r.certificate.lambda1Area >= 8 * kPi * 0.98);
}

TEST_CASE("square torus from a random start needs the wider frame") {
  TriangleMesh mesh = generateFlatTorus(testing::squareLattice(), 16, 16);
  MaximizeResult r = testing::maximizeChecked(mesh, DensityField::random(mesh, 5), defaultConfig(mesh));
  CHECK(r.trace.status == AscentStatus::Converged);
  CHECK(r.certificate.densityRecoveryL1 < 2e-2);
  checkAcceptedMonotone(r.trace);
}

TEST_CASE("signed densities with floor -1/2") {
  TriangleMesh mesh = generateIcosphere(3);
  AscentConfig config = defaultConfig(mesh);
  config.floor = -0.5;
  MaximizeResult r = testing::maximizeChecked(mesh, DensityField::random(mesh, 8), config);
  CHECK(r.trace.status == AscentStatus::Converged);
  CHECK(r.certificate.negSetMeasure < 1e-2 * mesh.area());
  CHECK(r.mu.values().minCoeff() >= -0.5);
}

TEST_CASE("N schedule in area units") {
  TriangleMesh mesh = generateIcosphere(2);
  AscentConfig c = AscentConfig::withScheduleTimesArea(mesh, {4, 16});
  REQUIRE(c.nSchedule.size() == 2);
  CHECK(c.nSchedule[0] == doctest::Approx(4 / mesh.area()));
  CHECK(c.nSchedule[1] == doctest::Approx(16 / mesh.area()));
}

TEST_CASE("configuration validation") {
  TriangleMesh mesh = generateIcosphere(1);
  AscentConfig good = defaultConfig(mesh);
  CHECK_NOTHROW(good.validate());
  auto bad = [&](auto edit) {
    AscentConfig c = good;
    edit(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  bad([](AscentConfig& c) { c.nSchedule.clear(); });
  bad([](AscentConfig& c) { c.nSchedule = {2.0, 1.0}; });
  bad([](AscentConfig& c) { c.nSchedule = {-1.0}; });
  bad([](AscentConfig& c) { c.damping = 0.0; });
  bad([](AscentConfig& c) { c.damping = 1.5; });
  bad([](AscentConfig& c) { c.floor = -0.3; });
  bad([](AscentConfig& c) { c.maxIters = 0; });
  bad([](AscentConfig& c) { c.eigenpairs = 0; });
  bad([](AscentConfig& c) { c.widenGap = -1.0; });

  TriangleMesh other = generateIcosphere(1);
  CHECK_THROWS_AS(maximize(mesh, DensityField::uniform(other), good), Error);
}

TEST_CASE("density spectrum completes the first cluster") {
  TriangleMesh mesh = generateFlatTorus(testing::equilateralLattice(), 24, 24);
  AscentConfig config = defaultConfig(mesh);
  config.eigenpairs = 2;
  SpectralResult r = densitySpectrum(mesh, assembleStiffness(mesh), DensityField::uniform(mesh), config);
  CHECK(r.clusters[0].size() == 6);
  CHECK(r.clusters.size() >= 2);
}

TEST_CASE("trace output") {
  TriangleMesh mesh = generateIcosphere(2);
  MaximizeResult r = testing::maximizeChecked(mesh, DensityField::random(mesh, 1), defaultConfig(mesh));
  auto dir = testing::scratchDir("trace");
  writeTraceCsv((dir / "trace.csv").string(), r.trace);
  std::ifstream in(dir / "trace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,N,lambda1_area,EN_measure,ENeg_measure,step,frame_obj,wall_ms");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == static_cast<int>(r.trace.records.size()));

  nlohmann::json j = traceSummaryToJson(r.trace);
  CHECK(j["status"] == statusName(r.trace.status));
  CHECK(j["stages"].size() == 3);
  CHECK(std::string(statusName(AscentStatus::IterationCap)) == "iteration-cap");
}

TEST_CASE("runs are reproducible") {
  TriangleMesh mesh = generateIcosphere(2);
  AscentConfig config = defaultConfig(mesh);
  MaximizeResult a = testing::maximizeChecked(mesh, DensityField::random(mesh, 3), config);
  MaximizeResult b = testing::maximizeChecked(mesh, DensityField::random(mesh, 3), config);
  CHECK(a.mu.values() == b.mu.values());
  CHECK(a.trace.records.size() == b.trace.records.size());
}
