#include "brute_force.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace confspec::oracle {

namespace {

// Degree-4 symmetric quadrature on the reference triangle (weights sum to 1).
struct QuadPoint {
  double b0, b1, b2, weight;
};
const std::array<QuadPoint, 6> kQuad = {{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
}};

struct Grid {
  int n;
  double h;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<Eigen::Vector2d, 3>> coords;  // unwrapped corner positions
  Eigen::MatrixXd K;
  Eigen::VectorXd vertexArea;

  explicit Grid(int size) : n(size), h(1.0 / size) {
    const int nv = n * n;
    auto id = [&](int i, int j) { return (i % n) + n * (j % n); };
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        Eigen::Vector2d p00(i * h, j * h), p10((i + 1) * h, j * h), p01(i * h, (j + 1) * h),
            p11((i + 1) * h, (j + 1) * h);
        tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        coords.push_back({p00, p10, p11});
        tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        coords.push_back({p00, p11, p01});
      }
    }
    K = Eigen::MatrixXd::Zero(nv, nv);
    vertexArea = Eigen::VectorXd::Zero(nv);
    for (size_t t = 0; t < tris.size(); ++t) {
      const auto& c = coords[t];
      Eigen::Matrix3d P;
      P << 1, c[0].x(), c[0].y(), 1, c[1].x(), c[1].y(), 1, c[2].x(), c[2].y();
      double area = 0.5 * std::abs(P.determinant());
      // Rows 1..2 of P^{-1} hold the barycentric gradients.
      Eigen::Matrix3d inv = P.inverse();
      Eigen::Matrix<double, 2, 3> G = inv.bottomRows<2>();
      Eigen::Matrix3d ke = area * G.transpose() * G;
      for (int a = 0; a < 3; ++a) {
        vertexArea[tris[t][a]] += area / 3.0;
        for (int b = 0; b < 3; ++b) K(tris[t][a], tris[t][b]) += ke(a, b);
      }
    }
  }

  double triangleArea() const { return 0.5 * h * h; }

  Eigen::MatrixXd mass(const Eigen::VectorXd& mu) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * n, n * n);
    const double area = triangleArea();
    for (const auto& t : tris) {
      for (const auto& q : kQuad) {
        const double b[3] = {q.b0, q.b1, q.b2};
        double m = b[0] * mu[t[0]] + b[1] * mu[t[1]] + b[2] * mu[t[2]];
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) M(t[a], t[c]) += area * q.weight * m * b[a] * b[c];
      }
    }
    return M;
  }

  // d(u^T M u)/d mu_v = int u^2 phi_v.
  Eigen::VectorXd massSensitivity(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n * n);
    const double area = triangleArea();
    for (const auto& t : tris) {
      for (const auto& q : kQuad) {
        const double b[3] = {q.b0, q.b1, q.b2};
        double uq = b[0] * u[t[0]] + b[1] * u[t[1]] + b[2] * u[t[2]];
        for (int a = 0; a < 3; ++a) g[t[a]] += area * q.weight * uq * uq * b[a];
      }
    }
    return g;
  }
};

// Box [0, cap] plus unit mass by bisection on the shift.
Eigen::VectorXd project(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double cap) {
  auto massAt = [&](double c) { return ((mu.array() + c).max(0.0).min(cap) * a.array()).sum(); };
  double lo = -mu.maxCoeff(), hi = cap - mu.minCoeff();
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (massAt(mid) < 1.0 ? lo : hi) = mid;
  }
  return (mu.array() + 0.5 * (lo + hi)).max(0.0).min(cap).matrix();
}

struct Spectrum {
  Eigen::VectorXd values;  // nonzero eigenvalues, ascending
  Eigen::MatrixXd vectors;
};

Spectrum spectrum(const Grid& g, const Eigen::VectorXd& mu, int modes) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(g.K, g.mass(mu));
  Spectrum s;
  s.values = es.eigenvalues().segment(1, modes);
  s.vectors = es.eigenvectors().middleCols(1, modes);
  return s;
}

} // namespace

double squareTorusLambda1(int grid, const std::vector<double>& density) {
  Grid g(grid);
  Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(density.data(), density.size());
  double mass = mu.dot(g.vertexArea);
  return spectrum(g, mu, 1).values[0] * mass;
}

BruteForceResult squareTorusBruteForce(const BruteForceOptions& opt) {
  Grid g(opt.grid);
  const int nv = opt.grid * opt.grid;
  const double cap = opt.capTimesArea;  // total area is 1
  BruteForceResult out;
  out.uniform = spectrum(g, Eigen::VectorXd::Ones(nv), 1).values[0];
  out.best = 0.0;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (int r = 0; r < opt.restarts; ++r) {
    Eigen::VectorXd mu(nv);
    for (int v = 0; v < nv; ++v) mu[v] = dist(rng);
    mu = project(mu, g.vertexArea, cap);

    double best = 0.0;
    double step = 0.2;
    double previous = 0.0;
    for (int it = 0; it < opt.iterations; ++it) {
      Spectrum s = spectrum(g, mu, opt.modes);
      double l1 = s.values[0];
      best = std::max(best, l1);
      if (it > 0 && l1 < previous) step *= 0.7;
      previous = l1;
      // Soft minimum over the lowest modes: weights exp(-beta (lambda_j - lambda_1)).
      const double beta = 200.0 / l1;
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv);
      double wsum = 0.0;
      for (int j = 0; j < opt.modes; ++j) {
        double w = std::exp(-beta * (s.values[j] - l1));
        wsum += w;
        Eigen::VectorXd u = s.vectors.col(j);
        // d lambda_j / d mu_v = -lambda_j int u_j^2 phi_v (u_j mass-normalized).
        grad -= w * s.values[j] * g.massSensitivity(u);
      }
      grad /= wsum;
      Eigen::VectorXd dir = grad.cwiseQuotient(g.vertexArea);
      double scale = dir.cwiseAbs().maxCoeff();
      if (!(scale > 0.0)) break;
      mu = project(mu + (step / scale) * dir, g.vertexArea, cap);
    }
    out.perRestart.push_back(best);
    out.best = std::max(out.best, best);
  }
  return out;
}

} // namespace confspec::oracle
