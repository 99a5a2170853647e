#include "confspec/mesh.hpp"

#include "confspec/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace confspec {

namespace {

std::uint64_t nextMeshId() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::uint64_t edgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::string edgeName(int a, int b) {
  std::ostringstream s;
  s << "(" << std::min(a, b) << "," << std::max(a, b) << ")";
  return s.str();
}

} // namespace

double heronArea(double a, double b, double c) {
  // Sort so that a >= b >= c.
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  if (c <= 0.0) return -1.0;
  double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (p <= 0.0 || c - (a - b) <= 0.0) return -1.0;
  return 0.25 * std::sqrt(p);
}

std::array<double, 3> TriangleMesh::triangleLengths(int f) const {
  return {edgeLengths_[triangleEdges_[f][0]], edgeLengths_[triangleEdges_[f][1]], edgeLengths_[triangleEdges_[f][2]]};
}

void TriangleMesh::buildTopology() {
  if (vertexCount_ <= 0) throwInput("mesh has no vertices");
  if (triangles_.empty()) throwInput("mesh has no triangles");
  for (size_t f = 0; f < triangles_.size(); ++f) {
    const Triangle& t = triangles_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= vertexCount_) {
        throwInput("triangle " + std::to_string(f) + " references vertex " + std::to_string(t[c]) +
                   " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throwInput("degenerate triangle " + std::to_string(f) + ": repeated vertex");
    }
  }

  std::unordered_map<std::uint64_t, int> edgeIndex;
  edgeIndex.reserve(triangles_.size() * 2);
  triangleEdges_.resize(triangles_.size());
  for (size_t f = 0; f < triangles_.size(); ++f) {
    const Triangle& t = triangles_[f];
    for (int c = 0; c < 3; ++c) {
      int a = t[(c + 1) % 3];
      int b = t[(c + 2) % 3];
      auto [it, inserted] = edgeIndex.try_emplace(edgeKey(a, b), static_cast<int>(edges_.size()));
      if (inserted) edges_.emplace_back(std::min(a, b), std::max(a, b));
      triangleEdges_[f][c] = it->second;
    }
  }

  adjacency_.assign(vertexCount_, {});
  for (size_t e = 0; e < edges_.size(); ++e) {
    adjacency_[edges_[e].first].push_back({edges_[e].second, static_cast<int>(e)});
    adjacency_[edges_[e].second].push_back({edges_[e].first, static_cast<int>(e)});
  }
}

void TriangleMesh::validateTopology() const {
  // Each undirected edge must be used exactly twice, once in each direction.
  std::vector<int> forward(edges_.size(), 0), backward(edges_.size(), 0);
  for (size_t f = 0; f < triangles_.size(); ++f) {
    for (int c = 0; c < 3; ++c) {
      int a = triangles_[f][(c + 1) % 3];
      int b = triangles_[f][(c + 2) % 3];
      int e = triangleEdges_[f][c];
      (a < b ? forward : backward)[e]++;
    }
  }
  for (size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    if (forward[e] + backward[e] > 2) throwInput("non-manifold edge " + std::to_string(e) + " " + edgeName(a, b));
  }
  for (size_t e = 0; e < edges_.size(); ++e) {
    int uses = forward[e] + backward[e];
    const auto [a, b] = edges_[e];
    if (uses == 1) throwInput("open boundary at edge " + std::to_string(e) + " " + edgeName(a, b));
    if (forward[e] != 1) throwInput("orientation conflict at edge " + std::to_string(e) + " " + edgeName(a, b));
  }

  // Vertex links: the map next(a) = b over incident oriented triangles (v, a, b)
  // must be a single cycle.
  std::vector<std::vector<std::pair<int, int>>> fans(vertexCount_);
  for (const Triangle& t : triangles_) {
    for (int c = 0; c < 3; ++c) fans[t[c]].emplace_back(t[(c + 1) % 3], t[(c + 2) % 3]);
  }
  for (int v = 0; v < vertexCount_; ++v) {
    const auto& fan = fans[v];
    if (fan.empty()) throwInput("isolated vertex " + std::to_string(v));
    std::map<int, int> next(fan.begin(), fan.end());
    int start = fan.front().first;
    int cur = start;
    size_t steps = 0;
    do {
      auto it = next.find(cur);
      if (it == next.end()) throwInput("non-manifold vertex " + std::to_string(v));
      cur = it->second;
      ++steps;
    } while (cur != start && steps <= fan.size());
    if (steps != fan.size()) throwInput("non-manifold vertex " + std::to_string(v) + ": link is not a single cycle");
  }

  // Connectedness.
  std::vector<char> seen(vertexCount_, 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (const Neighbor& n : adjacency_[v]) {
      if (!seen[n.vertex]) {
        seen[n.vertex] = 1;
        ++reached;
        queue.push(n.vertex);
      }
    }
  }
  if (reached != vertexCount_) throwInput("mesh is not connected");

  int chi = eulerCharacteristic();
  if (chi > 2 || (chi % 2) != 0) throwInput("invalid Euler characteristic " + std::to_string(chi));
}

void TriangleMesh::computeGeometry() {
  triangleAreas_.resize(triangles_.size());
  vertexAreas_.assign(vertexCount_, 0.0);
  area_ = 0.0;
  for (size_t f = 0; f < triangles_.size(); ++f) {
    for (int c = 0; c < 3; ++c) {
      if (!(edgeLengths_[triangleEdges_[f][c]] > 0.0)) {
        throwInput("degenerate triangle " + std::to_string(f) + ": non-positive edge length");
      }
    }
    auto l = triangleLengths(static_cast<int>(f));
    double a = heronArea(l[0], l[1], l[2]);
    if (!(a > 0.0)) throwInput("triangle inequality violated in triangle " + std::to_string(f));
    triangleAreas_[f] = a;
    area_ += a;
    for (int c = 0; c < 3; ++c) vertexAreas_[triangles_[f][c]] += a / 3.0;
  }
}

TriangleMesh TriangleMesh::fromIntrinsic(int vertexCount, std::vector<Triangle> triangles,
                                         std::span<const EdgeLength> lengths) {
  TriangleMesh mesh;
  mesh.vertexCount_ = vertexCount;
  mesh.triangles_ = std::move(triangles);
  mesh.buildTopology();

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(mesh.edges_.size());
  for (size_t e = 0; e < mesh.edges_.size(); ++e) lookup[edgeKey(mesh.edges_[e].first, mesh.edges_[e].second)] = static_cast<int>(e);
  mesh.edgeLengths_.assign(mesh.edges_.size(), -1.0);
  for (const EdgeLength& el : lengths) {
    auto it = lookup.find(edgeKey(el.i, el.j));
    if (it == lookup.end()) throwInput("edge length given for non-edge " + edgeName(el.i, el.j));
    if (!(el.length > 0.0) || !std::isfinite(el.length)) {
      throwInput("non-positive edge length for edge " + edgeName(el.i, el.j));
    }
    mesh.edgeLengths_[it->second] = el.length;
  }
  for (size_t e = 0; e < mesh.edges_.size(); ++e) {
    if (mesh.edgeLengths_[e] < 0.0) {
      throwInput("missing edge length for edge " + edgeName(mesh.edges_[e].first, mesh.edges_[e].second));
    }
  }

  mesh.validateTopology();
  mesh.computeGeometry();
  mesh.id_ = nextMeshId();
  return mesh;
}

TriangleMesh TriangleMesh::fromEmbedding(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles) {
  TriangleMesh mesh;
  mesh.vertexCount_ = static_cast<int>(positions.size());
  mesh.triangles_ = std::move(triangles);
  mesh.buildTopology();
  mesh.edgeLengths_.resize(mesh.edges_.size());
  for (size_t e = 0; e < mesh.edges_.size(); ++e) {
    mesh.edgeLengths_[e] = (positions[mesh.edges_[e].first] - positions[mesh.edges_[e].second]).norm();
  }
  mesh.validateTopology();
  mesh.computeGeometry();
  mesh.embedding_ = std::move(positions);
  mesh.id_ = nextMeshId();
  return mesh;
}

MeshStats meshStats(const TriangleMesh& mesh) {
  MeshStats s{};
  s.area = mesh.area();
  s.genus = mesh.genus();
  s.vertices = mesh.vertexCount();
  s.edges = mesh.edgeCount();
  s.triangles = mesh.triangleCount();
  const auto& lengths = mesh.edgeLengths();
  auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
  s.minEdgeLength = *lo;
  s.maxEdgeLength = *hi;
  s.minTriangleQuality = 1.0;
  double sum = 0.0;
  for (int f = 0; f < mesh.triangleCount(); ++f) {
    auto l = mesh.triangleLengths(f);
    double q = 4.0 * std::sqrt(3.0) * mesh.triangleArea(f) / (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]);
    s.minTriangleQuality = std::min(s.minTriangleQuality, q);
    sum += q;
  }
  s.meanTriangleQuality = sum / mesh.triangleCount();
  return s;
}

TriangleMesh generateIcosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 8) throwInput("icosphere subdivisions must be in [0, 8]");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> pos = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
      {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& p : pos) p.normalize();
  std::vector<Triangle> tris = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
  };

  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, int> midpoints;
    midpoints.reserve(tris.size() * 2);
    auto midpoint = [&](int a, int b) {
      auto [it, inserted] = midpoints.try_emplace(edgeKey(a, b), static_cast<int>(pos.size()));
      if (inserted) pos.push_back((pos[a] + pos[b]).normalized());
      return it->second;
    };
    std::vector<Triangle> refined;
    refined.reserve(tris.size() * 4);
    for (const Triangle& t : tris) {
      int ab = midpoint(t[0], t[1]);
      int bc = midpoint(t[1], t[2]);
      int ca = midpoint(t[2], t[0]);
      refined.push_back({t[0], ab, ca});
      refined.push_back({t[1], bc, ab});
      refined.push_back({t[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    tris = std::move(refined);
  }
  return TriangleMesh::fromEmbedding(std::move(pos), std::move(tris));
}

TriangleMesh generateFlatTorus(const Eigen::Matrix2d& basis, int nx, int ny) {
  if (!basis.allFinite()) throwInput("lattice basis must be finite");
  double det = basis.determinant();
  if (std::abs(det) <= 1e-12 * basis.squaredNorm()) throwInput("singular lattice");
  if (nx < 3 || ny < 3) throwInput("grid too coarse: nx and ny must be at least 3");

  // Keep a positive orientation in the plane.
  Eigen::Vector2d b1 = basis.col(0) / nx;
  Eigen::Vector2d b2 = basis.col(1) / ny;
  bool flip = det < 0.0;

  auto vid = [&](int i, int j) { return ((i % nx + nx) % nx) + nx * ((j % ny + ny) % ny); };
  std::vector<Triangle> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if (!flip) {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      } else {
        tris.push_back({v00, v01, v10});
        tris.push_back({v10, v01, v11});
      }
    }
  }
  const double lx = b1.norm(), ly = b2.norm(), ld = (b1 - b2).norm();
  std::vector<EdgeLength> lengths;
  lengths.reserve(3 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      lengths.push_back({vid(i, j), vid(i + 1, j), lx});
      lengths.push_back({vid(i, j), vid(i, j + 1), ly});
      lengths.push_back({vid(i + 1, j), vid(i, j + 1), ld});
    }
  }
  return TriangleMesh::fromIntrinsic(nx * ny, std::move(tris), lengths);
}

} // namespace confspec
