#pragma once

#include "confspec/mesh.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <string>

namespace confspec {

enum class MeshFormat { Off, Obj, IntrinsicJson };

// Guess the format from the file extension (.off, .obj, .json).
MeshFormat formatFromPath(const std::string& path);

TriangleMesh loadMesh(const std::string& path, MeshFormat format);
TriangleMesh loadMesh(const std::string& path);

TriangleMesh parseOff(std::istream& in);
TriangleMesh parseObj(std::istream& in);

// {"vertices": V, "triangles": [[i,j,k],...], "edge_lengths": [[i,j,len],...]}
TriangleMesh meshFromJson(const nlohmann::json& j);
nlohmann::json meshToJson(const TriangleMesh& mesh);

// Intrinsic JSON of the mesh plus a per-vertex "density" array.
nlohmann::json densityToJson(const TriangleMesh& mesh, const Eigen::VectorXd& density);
// Per-vertex values from JSON ({"density": [...]} or a bare array) or from
// whitespace-separated text.
Eigen::VectorXd loadDensityValues(const std::string& path, int vertexCount);

} // namespace confspec
