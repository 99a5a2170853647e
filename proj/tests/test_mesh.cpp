#include "confspec/error.hpp"
#include "confspec/mesh.hpp"
#include "confspec/mesh_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace confspec;
using testing::kPi;

namespace {

std::string icosahedronOff() {
  TriangleMesh ico = generateIcosphere(0);
  std::ostringstream s;
  s << "OFF\n# regular icosahedron\n" << ico.vertexCount() << " " << ico.triangleCount() << " 0\n";
  s.precision(17);
  for (const auto& p : *ico.embedding()) s << p.x() << " " << p.y() << " " << p.z() << "\n";
  for (const auto& t : ico.triangles()) s << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  return s.str();
}

// Embedded torus of revolution, n x m quads split into triangles.
std::string torusObj(int n, int m) {
  std::ostringstream s;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double u = 2 * kPi * i / n, v = 2 * kPi * j / m;
      s << "v " << (2 + std::cos(v)) * std::cos(u) << " " << (2 + std::cos(v)) * std::sin(u) << " " << std::sin(v)
        << "\n";
    }
  auto id = [&](int i, int j) { return ((i + n) % n) * m + (j + m) % m + 1; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      s << "f " << id(i, j) << " " << id(i + 1, j) << " " << id(i + 1, j + 1) << "\n";
      s << "f " << id(i, j) << "/1/1 " << id(i + 1, j + 1) << "//2 " << id(i, j + 1) << "\n";
    }
  return s.str();
}

// Tetrahedron with intrinsic lengths; (0,1,2) gets lengths (1,1,3).
nlohmann::json badTetrahedron() {
  nlohmann::json j;
  j["vertices"] = 4;
  j["triangles"] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
  j["edge_lengths"] = {{0, 1, 3.0}, {0, 2, 1.0}, {1, 2, 1.0}, {0, 3, 2.0}, {1, 3, 2.0}, {2, 3, 2.0}};
  return j;
}

std::string errorOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("icosahedron OFF loads with sphere topology") {
  std::istringstream in(icosahedronOff());
  TriangleMesh mesh = parseOff(in);
  CHECK(mesh.vertexCount() == 12);
  CHECK(mesh.triangleCount() == 20);
  CHECK(mesh.edgeCount() == 30);
  CHECK(mesh.genus() == 0);
  // Circumradius 1 gives edge length 4 / sqrt(10 + 2 sqrt 5).
  const double edge = 4.0 / std::sqrt(10.0 + 2.0 * std::sqrt(5.0));
  for (double l : mesh.edgeLengths()) CHECK(l == doctest::Approx(edge).epsilon(1e-12));
  CHECK(mesh.area() == doctest::Approx(20 * std::sqrt(3.0) / 4 * edge * edge).epsilon(1e-12));
}

TEST_CASE("OBJ torus of revolution has genus 1") {
  std::istringstream in(torusObj(12, 8));
  TriangleMesh mesh = parseObj(in);
  CHECK(mesh.vertexCount() == 96);
  CHECK(mesh.triangleCount() == 192);
  CHECK(mesh.genus() == 1);
}

TEST_CASE("triangle inequality violation is rejected") {
  std::string msg = errorOf([] { meshFromJson(badTetrahedron()); });
  CHECK(msg.find("triangle inequality violated") != std::string::npos);
}

TEST_CASE("intrinsic JSON round trip keeps lengths and topology") {
  TriangleMesh ico = generateIcosphere(1);
  TriangleMesh back = meshFromJson(meshToJson(ico));
  CHECK(back.vertexCount() == ico.vertexCount());
  CHECK(back.triangles() == ico.triangles());
  CHECK(back.area() == doctest::Approx(ico.area()).epsilon(1e-14));
  CHECK_FALSE(back.embedding().has_value());
}

TEST_CASE("topological defects are reported") {
  SUBCASE("open boundary") {
    std::istringstream in("OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n3 0 1 2\n3 1 3 2\n");
    CHECK(errorOf([&] { parseOff(in); }).find("open boundary") != std::string::npos);
  }
  SUBCASE("non-manifold edge") {
    // Three triangles share the edge (0,1).
    std::istringstream in("OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n");
    std::string msg = errorOf([&] { parseOff(in); });
    CHECK(msg.find("non-manifold edge") != std::string::npos);
    CHECK(msg.find("(0,1)") != std::string::npos);
  }
  SUBCASE("orientation conflict") {
    TriangleMesh ico = generateIcosphere(0);
    auto tris = ico.triangles();
    std::swap(tris[0][1], tris[0][2]);
    CHECK(errorOf([&] { TriangleMesh::fromEmbedding(*ico.embedding(), tris); }).find("orientation conflict") !=
          std::string::npos);
  }
  SUBCASE("non-triangle face") {
    std::istringstream in("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
    CHECK(errorOf([&] { parseOff(in); }).find("not a triangle") != std::string::npos);
  }
  SUBCASE("disconnected") {
    TriangleMesh ico = generateIcosphere(0);
    auto pos = *ico.embedding();
    auto tris = ico.triangles();
    const int n = static_cast<int>(pos.size());
    for (int v = 0; v < n; ++v) pos.push_back(pos[v] + Eigen::Vector3d(5, 0, 0));
    for (int f = 0; f < ico.triangleCount(); ++f)
      tris.push_back({tris[f][0] + n, tris[f][1] + n, tris[f][2] + n});
    CHECK(errorOf([&] { TriangleMesh::fromEmbedding(pos, tris); }).find("not connected") != std::string::npos);
  }
  SUBCASE("missing edge length") {
    nlohmann::json j = badTetrahedron();
    j["edge_lengths"].erase(5);
    CHECK(errorOf([&] { meshFromJson(j); }).find("missing edge length") != std::string::npos);
  }
}

TEST_CASE("icosphere counts and area") {
  for (int s = 0; s <= 4; ++s) {
    TriangleMesh mesh = generateIcosphere(s);
    const int f = 20 * (1 << (2 * s));
    CHECK(mesh.triangleCount() == f);
    CHECK(mesh.vertexCount() == f / 2 + 2);
    CHECK(mesh.genus() == 0);
  }
  CHECK(generateIcosphere(4).area() == doctest::Approx(4 * kPi).epsilon(2e-3));
  CHECK_THROWS_AS(generateIcosphere(-1), Error);
}

TEST_CASE("flat tori") {
  TriangleMesh square = generateFlatTorus(testing::squareLattice(), 8, 8);
  CHECK(square.vertexCount() == 64);
  CHECK(square.triangleCount() == 128);
  CHECK(square.genus() == 1);
  CHECK(square.area() == doctest::Approx(1.0).epsilon(1e-14));

  TriangleMesh hex = generateFlatTorus(testing::equilateralLattice(), 6, 6);
  CHECK(hex.area() == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
  MeshStats st = meshStats(hex);
  CHECK(st.minTriangleQuality == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.minEdgeLength == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(st.maxEdgeLength == doctest::Approx(1.0 / 6).epsilon(1e-12));

  CHECK(errorOf([] { generateFlatTorus(testing::squareLattice(), 2, 8); }).find("grid too coarse") !=
        std::string::npos);
  Eigen::Matrix2d singular;
  singular << 1, 2, 1, 2;
  CHECK(errorOf([&] { generateFlatTorus(singular, 8, 8); }).find("singular lattice") != std::string::npos);
}

TEST_CASE("mesh stats") {
  TriangleMesh mesh = generateIcosphere(2);
  MeshStats st = meshStats(mesh);
  CHECK(st.vertices == 162);
  CHECK(st.edges == 480);
  CHECK(st.triangles == 320);
  CHECK(st.genus == 0);
  CHECK(st.area == doctest::Approx(mesh.area()));
  CHECK(st.minTriangleQuality > 0.8);
  CHECK(st.meanTriangleQuality <= 1.0);
  double sum = 0.0;
  for (double a : mesh.vertexAreas()) sum += a;
  CHECK(sum == doctest::Approx(mesh.area()).epsilon(1e-14));
}

TEST_CASE("Heron formula") {
  CHECK(heronArea(3, 4, 5) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(heronArea(1, 1, 3) < 0.0);
  // Needle triangle where the naive formula loses all digits.
  CHECK(heronArea(1e8, 1e8, 1.0) == doctest::Approx(0.5e8).epsilon(1e-12));
}

TEST_CASE("density files") {
  TriangleMesh mesh = generateIcosphere(1);
  auto dir = testing::scratchDir("density_files");
  Eigen::VectorXd values = Eigen::VectorXd::LinSpaced(mesh.vertexCount(), 1.0, 2.0);
  {
    std::ofstream out(dir / "d.json");
    out << densityToJson(mesh, values).dump();
  }
  CHECK((loadDensityValues((dir / "d.json").string(), mesh.vertexCount()) - values).norm() == 0.0);
  {
    std::ofstream out(dir / "d.txt");
    out.precision(17);
    for (double v : values) out << v << "\n";
  }
  CHECK((loadDensityValues((dir / "d.txt").string(), mesh.vertexCount()) - values).norm() == 0.0);
  CHECK(errorOf([&] { loadDensityValues((dir / "d.txt").string(), 5); }).find("mesh has 5 vertices") !=
        std::string::npos);
}
