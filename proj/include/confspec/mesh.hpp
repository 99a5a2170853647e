#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace confspec {

using Triangle = std::array<int, 3>;

struct EdgeLength {
  int i;
  int j;
  double length;
};

// Closed, orientable, connected triangulated surface described intrinsically by
// its connectivity and one length per undirected edge. An embedding, when
// present, is decoration and must reproduce the stored lengths.
//
// Instances are validated on construction and immutable afterwards.
class TriangleMesh {
public:
  // Lengths are matched to edges by unordered vertex pair; every edge of the
  // triangulation needs exactly one entry.
  static TriangleMesh fromIntrinsic(int vertexCount, std::vector<Triangle> triangles,
                                    std::span<const EdgeLength> lengths);
  static TriangleMesh fromEmbedding(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles);

  int vertexCount() const { return vertexCount_; }
  int triangleCount() const { return static_cast<int>(triangles_.size()); }
  int edgeCount() const { return static_cast<int>(edges_.size()); }

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<double>& edgeLengths() const { return edgeLengths_; }

  // Edge index of the edge opposite corner c of triangle f.
  int oppositeEdge(int f, int c) const { return triangleEdges_[f][c]; }
  // Lengths (l0, l1, l2) of triangle f, l_c opposite corner c.
  std::array<double, 3> triangleLengths(int f) const;

  double triangleArea(int f) const { return triangleAreas_[f]; }
  const std::vector<double>& triangleAreas() const { return triangleAreas_; }
  // One third of the area of each incident triangle (exact P1 integral of a hat function).
  const std::vector<double>& vertexAreas() const { return vertexAreas_; }
  double area() const { return area_; }

  int eulerCharacteristic() const { return vertexCount_ - edgeCount() + triangleCount(); }
  int genus() const { return (2 - eulerCharacteristic()) / 2; }
  bool orientable() const { return true; }

  const std::optional<std::vector<Eigen::Vector3d>>& embedding() const { return embedding_; }

  // Vertex adjacency with the connecting edge index.
  struct Neighbor {
    int vertex;
    int edge;
  };
  const std::vector<std::vector<Neighbor>>& adjacency() const { return adjacency_; }

  // Process-unique identity used to check that derived objects share a mesh.
  std::uint64_t id() const { return id_; }

private:
  TriangleMesh() = default;
  void buildTopology();
  void validateTopology() const;
  void computeGeometry();

  int vertexCount_ = 0;
  std::vector<Triangle> triangles_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> edgeLengths_;
  std::vector<std::array<int, 3>> triangleEdges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> triangleAreas_;
  std::vector<double> vertexAreas_;
  double area_ = 0.0;
  std::optional<std::vector<Eigen::Vector3d>> embedding_;
  std::uint64_t id_ = 0;
};

// Numerically stable Heron formula (Kahan's ordering). Returns a negative value
// when the lengths violate the strict triangle inequality.
double heronArea(double a, double b, double c);

struct MeshStats {
  double area;
  int genus;
  int vertices;
  int edges;
  int triangles;
  double minEdgeLength;
  double maxEdgeLength;
  // Quality: 4*sqrt(3)*A / (l0^2 + l1^2 + l2^2); 1 for equilateral triangles.
  double minTriangleQuality;
  double meanTriangleQuality;
};

MeshStats meshStats(const TriangleMesh& mesh);

// Embedded unit-sphere mesh by repeated 1-to-4 subdivision of the icosahedron.
TriangleMesh generateIcosphere(int subdivisions);

// Flat torus R^2 / (Z b1 + Z b2) on an nx-by-ny grid. Columns of `basis` are
// the lattice vectors. Each cell is cut along its (i+1,j)-(i,j+1) diagonal,
// which gives equilateral triangles on the hexagonal lattice.
TriangleMesh generateFlatTorus(const Eigen::Matrix2d& basis, int nx, int ny);

} // namespace confspec
