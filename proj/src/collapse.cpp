#include "confspec/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace confspec {

namespace {

using QueueItem = std::pair<double, int>;

std::vector<double> dijkstra(const TriangleMesh& mesh, int source) {
  std::vector<double> dist(mesh.vertexCount(), std::numeric_limits<double>::infinity());
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  const auto& lengths = mesh.edgeLengths();
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& nb : mesh.adjacency()[v]) {
      double nd = d + lengths[nb.edge];
      if (nd < dist[nb.vertex]) {
        dist[nb.vertex] = nd;
        queue.emplace(nd, nb.vertex);
      }
    }
  }
  return dist;
}

} // namespace

double graphDiameter(const TriangleMesh& mesh, int sweeps) {
  int source = 0;
  double best = 0.0;
  for (int s = 0; s < sweeps; ++s) {
    auto dist = dijkstra(mesh, source);
    auto it = std::max_element(dist.begin(), dist.end());
    if (*it <= best && s > 0) break;
    best = std::max(best, *it);
    source = static_cast<int>(it - dist.begin());
  }
  return best;
}

CollapseDetector::CollapseDetector(const TriangleMesh& mesh) : mesh_(mesh), diameter_(graphDiameter(mesh)) {}

CollapseReport CollapseDetector::detect(const Eigen::VectorXd& mu, std::vector<double> radii) const {
  CollapseReport report;
  report.diameter = diameter_;
  report.radiusFractions = radii;
  report.maxBallMass.assign(radii.size(), 0.0);
  if (radii.empty()) return report;

  const int n = mesh_.vertexCount();
  const auto& areas = mesh_.vertexAreas();
  const auto& lengths = mesh_.edgeLengths();
  const double rmax = *std::max_element(radii.begin(), radii.end()) * diameter_;

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> touched;
  std::vector<double> mass(radii.size());
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
  for (int src = 0; src < n; ++src) {
    std::fill(mass.begin(), mass.end(), 0.0);
    dist[src] = 0.0;
    touched.push_back(src);
    queue.emplace(0.0, src);
    while (!queue.empty()) {
      auto [d, v] = queue.top();
      queue.pop();
      if (d > dist[v]) continue;
      double m = mu[v] * areas[v];
      for (size_t r = 0; r < radii.size(); ++r)
        if (d <= radii[r] * diameter_) mass[r] += m;
      for (const auto& nb : mesh_.adjacency()[v]) {
        double nd = d + lengths[nb.edge];
        if (nd <= rmax && nd < dist[nb.vertex]) {
          if (std::isinf(dist[nb.vertex])) touched.push_back(nb.vertex);
          dist[nb.vertex] = nd;
          queue.emplace(nd, nb.vertex);
        }
      }
    }
    for (int v : touched) dist[v] = std::numeric_limits<double>::infinity();
    touched.clear();
    for (size_t r = 0; r < radii.size(); ++r) report.maxBallMass[r] = std::max(report.maxBallMass[r], mass[r]);
  }

  // The flag always uses the 5% ball, computed separately if it was not requested.
  auto it = std::find(radii.begin(), radii.end(), kFlagRadius);
  double flagMass = it != radii.end() ? report.maxBallMass[it - radii.begin()]
                                      : detect(mu, {kFlagRadius}).maxBallMass[0];
  report.flag = flagMass > kFlagMass;
  return report;
}

nlohmann::json collapseToJson(const CollapseReport& r) {
  return nlohmann::json{{"radius_fractions", r.radiusFractions},
                        {"max_ball_mass", r.maxBallMass},
                        {"diameter", r.diameter},
                        {"flag", r.flag}};
}

} // namespace confspec
