#include "confspec/mesh_io.hpp"

#include "confspec/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace confspec {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Next non-empty, non-comment line.
bool nextDataLine(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

} // namespace

MeshFormat formatFromPath(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "off") return MeshFormat::Off;
  if (ext == "obj") return MeshFormat::Obj;
  if (ext == "json") return MeshFormat::IntrinsicJson;
  throwInput("cannot infer mesh format from extension of '" + path + "'");
}

TriangleMesh parseOff(std::istream& in) {
  std::string line;
  if (!nextDataLine(in, line)) throwInput("OFF parse error: empty file");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") throwInput("OFF parse error: missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    if (!nextDataLine(in, line)) throwInput("OFF parse error: missing counts");
    header = std::istringstream(line);
    header >> nv;
  }
  if (!(header >> nf >> ne) || nv <= 0 || nf <= 0) throwInput("OFF parse error: invalid counts line");

  std::vector<Eigen::Vector3d> pos(nv);
  for (long v = 0; v < nv; ++v) {
    if (!nextDataLine(in, line)) throwInput("OFF parse error: missing vertex " + std::to_string(v));
    std::istringstream s(line);
    if (!(s >> pos[v].x() >> pos[v].y() >> pos[v].z())) {
      throwInput("OFF parse error: bad vertex " + std::to_string(v));
    }
  }
  std::vector<Triangle> tris(nf);
  for (long f = 0; f < nf; ++f) {
    if (!nextDataLine(in, line)) throwInput("OFF parse error: missing face " + std::to_string(f));
    std::istringstream s(line);
    int n = 0;
    if (!(s >> n)) throwInput("OFF parse error: bad face " + std::to_string(f));
    if (n != 3) throwInput("face " + std::to_string(f) + " is not a triangle (" + std::to_string(n) + " vertices)");
    if (!(s >> tris[f][0] >> tris[f][1] >> tris[f][2])) {
      throwInput("OFF parse error: bad face " + std::to_string(f));
    }
  }
  return TriangleMesh::fromEmbedding(std::move(pos), std::move(tris));
}

TriangleMesh parseObj(std::istream& in) {
  std::vector<Eigen::Vector3d> pos;
  std::vector<Triangle> tris;
  std::string line;
  long lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream s(line);
    std::string tag;
    if (!(s >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Eigen::Vector3d p;
      if (!(s >> p.x() >> p.y() >> p.z())) throwInput("OBJ parse error at line " + std::to_string(lineNo));
      pos.push_back(p);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string tok;
      while (s >> tok) {
        long idx = 0;
        try {
          idx = std::stol(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throwInput("OBJ parse error at line " + std::to_string(lineNo));
        }
        if (idx < 0) idx = static_cast<long>(pos.size()) + idx + 1;
        ids.push_back(static_cast<int>(idx - 1));
      }
      if (ids.size() != 3) {
        throwInput("face " + std::to_string(tris.size()) + " is not a triangle (" + std::to_string(ids.size()) +
                   " vertices)");
      }
      tris.push_back({ids[0], ids[1], ids[2]});
    }
  }
  if (pos.empty()) throwInput("OBJ parse error: no vertices");
  return TriangleMesh::fromEmbedding(std::move(pos), std::move(tris));
}

TriangleMesh meshFromJson(const nlohmann::json& j) {
  try {
    int nv = j.at("vertices").get<int>();
    std::vector<Triangle> tris;
    for (const auto& t : j.at("triangles")) {
      if (!t.is_array() || t.size() != 3) throwInput("face " + std::to_string(tris.size()) + " is not a triangle");
      tris.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    std::vector<EdgeLength> lengths;
    for (const auto& e : j.at("edge_lengths")) {
      if (!e.is_array() || e.size() != 3) throwInput("intrinsic-JSON parse error: edge_lengths entries are [i,j,len]");
      lengths.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return TriangleMesh::fromIntrinsic(nv, std::move(tris), lengths);
  } catch (const nlohmann::json::exception& ex) {
    throwInput(std::string("intrinsic-JSON parse error: ") + ex.what());
  }
}

nlohmann::json meshToJson(const TriangleMesh& mesh) {
  nlohmann::json j;
  j["vertices"] = mesh.vertexCount();
  auto tris = nlohmann::json::array();
  for (const Triangle& t : mesh.triangles()) tris.push_back({t[0], t[1], t[2]});
  j["triangles"] = std::move(tris);
  auto lengths = nlohmann::json::array();
  for (int e = 0; e < mesh.edgeCount(); ++e) {
    lengths.push_back({mesh.edges()[e].first, mesh.edges()[e].second, mesh.edgeLengths()[e]});
  }
  j["edge_lengths"] = std::move(lengths);
  return j;
}

nlohmann::json densityToJson(const TriangleMesh& mesh, const Eigen::VectorXd& density) {
  if (density.size() != mesh.vertexCount()) throwInput("density size does not match the mesh");
  nlohmann::json j = meshToJson(mesh);
  j["density"] = std::vector<double>(density.data(), density.data() + density.size());
  return j;
}

Eigen::VectorXd loadDensityValues(const std::string& path, int vertexCount) {
  std::ifstream in(path);
  if (!in) throwInput("cannot open density file '" + path + "'");
  std::vector<double> values;
  auto dot = path.rfind('.');
  if (dot != std::string::npos && lower(path.substr(dot + 1)) == "json") {
    try {
      nlohmann::json j;
      in >> j;
      const nlohmann::json& arr = j.is_object() ? j.at("density") : j;
      values = arr.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& ex) {
      throwInput(std::string("density JSON parse error: ") + ex.what());
    }
  } else {
    std::string token;
    while (in >> token) {
      try {
        size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throwInput("density file parse error at value " + std::to_string(values.size()) + ": '" + token + "'");
      }
    }
  }
  if (static_cast<int>(values.size()) != vertexCount) {
    throwInput("density file has " + std::to_string(values.size()) + " values, mesh has " +
               std::to_string(vertexCount) + " vertices");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), vertexCount);
}

TriangleMesh loadMesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throwInput("cannot open mesh file '" + path + "'");
  switch (format) {
  case MeshFormat::Off:
    return parseOff(in);
  case MeshFormat::Obj:
    return parseObj(in);
  case MeshFormat::IntrinsicJson: {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throwInput(std::string("intrinsic-JSON parse error: ") + ex.what());
    }
    return meshFromJson(j);
  }
  }
  throwInput("unknown mesh format");
}

TriangleMesh loadMesh(const std::string& path) { return loadMesh(path, formatFromPath(path)); }

} // namespace confspec
