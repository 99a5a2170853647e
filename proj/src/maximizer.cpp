#include "confspec/maximizer.hpp"

#include "confspec/error.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <utility>

namespace confspec {

AscentConfig AscentConfig::withScheduleTimesArea(const TriangleMesh& mesh, std::vector<double> scheduleTimesArea) {
  AscentConfig c;
  for (double n : scheduleTimesArea) c.nSchedule.push_back(n / mesh.area());
  return c;
}

void AscentConfig::validate() const {
  if (nSchedule.empty()) throwInput("N schedule must not be empty");
  for (size_t i = 0; i < nSchedule.size(); ++i) {
    if (!(nSchedule[i] > 0.0)) throwInput("N schedule entries must be positive");
    if (i > 0 && !(nSchedule[i] > nSchedule[i - 1])) throwInput("N schedule must be strictly increasing");
  }
  if (!(damping > 0.0 && damping <= 1.0)) throwInput("damping must lie in (0, 1]");
  if (floor != 0.0 && floor != -0.5) throwInput("floor must be 0 or -0.5");
  if (maxIters < 1) throwInput("max iterations must be positive");
  if (eigenpairs < 1) throwInput("eigenpairs must be positive");
  if (maxHalvings < 0 || reweightHalvings < 0) throwInput("halving counts must be non-negative");
  if (!(widenGap >= 0.0)) throwInput("widen gap must be non-negative");
  if (!(reweightDefect >= 0.0)) throwInput("reweight defect must be non-negative");
}

const char* statusName(AscentStatus status) {
  switch (status) {
  case AscentStatus::Converged:
    return "converged";
  case AscentStatus::Collapse:
    return "collapse";
  case AscentStatus::IterationCap:
    return "iteration-cap";
  }
  return "unknown";
}

SpectralResult densitySpectrum(const TriangleMesh& mesh, const StiffnessMatrix& K, const DensityField& mu,
                               const AscentConfig& config) {
  MassMatrix M = assembleMass(mesh, mu);
  SolverOptions opt;
  opt.k = std::min(config.eigenpairs, mesh.vertexCount() - 3);
  opt.tol = config.solverTol;
  opt.relGap = config.relGap;
  opt.seed = config.seed;
  for (;;) {
    SpectralResult r = solvePencil(K, M, opt);
    if (static_cast<int>(r.clusters.front().size()) < opt.k || opt.k >= mesh.vertexCount() - 3) return r;
    opt.k = std::min(2 * opt.k, mesh.vertexCount() - 3);
  }
}

namespace {

// Eigenvectors of the clusters [0, count).
Eigen::MatrixXd leadingClusters(const SpectralResult& spectral, size_t count) {
  int cols = 0;
  for (size_t c = 0; c < count; ++c) cols += static_cast<int>(spectral.clusters[c].size());
  return spectral.eigenvectors.leftCols(cols);
}

} // namespace

StepResult ascentStep(const TriangleMesh& mesh, const StiffnessMatrix& K, const DensityField& mu,
                      const SpectralResult& spectral, const AscentConfig& config) {
  const DensityBounds bounds = mu.bounds();
  const double lambda0 = spectral.lambda1();

  // Projects a candidate and accepts it when lambda_1 does not decrease.
  auto attempt = [&](const Eigen::VectorXd& candidate) -> std::optional<std::pair<DensityField, SpectralResult>> {
    DensityField trial(mesh, projectToAdmissible(mesh, candidate, bounds).values, bounds);
    try {
      SpectralResult ts = densitySpectrum(mesh, K, trial, config);
      if (ts.lambda1() >= lambda0) return std::make_pair(std::move(trial), std::move(ts));
    } catch (const Error& e) {
      // An indefinite pencil (negative densities) counts as a failed trial.
      if (e.kind() != ErrorKind::Numerical) throw;
    }
    return std::nullopt;
  };
  auto accepted = [&](std::pair<DensityField, SpectralResult>&& r, SphereFrame frame, double t) {
    double l1 = densityL1(mesh, r.first.values(), mu.values());
    return StepResult{std::move(r.first), std::move(r.second), std::move(frame), t, l1, true};
  };

  std::optional<SphereFrame> firstFrame;
  for (size_t width = 1; width <= spectral.clusters.size(); ++width) {
    if (width > 1) {
      // Widen only to complete clusters close to lambda_1.
      if (width == spectral.clusters.size()) break;
      if (spectral.eigenvalues[spectral.clusters[width - 1].front()] > (1.0 + config.widenGap) * lambda0) break;
    }
    SphereFrame frame = selectFrame(mesh, mu, leadingClusters(spectral, width), lambda0);
    Eigen::VectorXd nu = recoverDensity(mesh, frame);
    if (!firstFrame) firstFrame = frame;

    double t = config.damping;
    for (int h = 0; h <= config.maxHalvings; ++h, t *= 0.5) {
      if (auto r = attempt((1.0 - t) * mu.values() + t * nu)) return accepted(std::move(*r), std::move(frame), t);
    }
  }

  // Last resort: mu <- mu (1 - s (w - 1)). By the optimality conditions of the
  // frame program no eigenvalue of the cluster decreases to first order.
  // Only used when the defect exceeds what discretization explains.
  const SphereFrame& frame = *firstFrame;
  Eigen::VectorXd defect = (frame.w.array() - 1.0).matrix();
  const double scale = defect.cwiseAbs().maxCoeff();
  const int halvings = scale > config.reweightDefect ? config.reweightHalvings : 0;
  double t = config.damping;
  for (int h = 0; h < halvings; ++h, t *= 0.5) {
    Eigen::VectorXd candidate = mu.values().array() * (1.0 - (t / scale) * defect.array());
    if (auto r = attempt(candidate)) return accepted(std::move(*r), frame, t);
  }
  return StepResult{mu, spectral, std::move(*firstFrame), 0.0, 0.0, false};
}

MaximizeResult maximize(const TriangleMesh& mesh, const DensityField& mu0, const AscentConfig& config) {
  config.validate();
  if (mu0.meshId() != mesh.id()) throwInput("initial density belongs to a different mesh");
  const auto clock0 = std::chrono::steady_clock::now();
  auto elapsedMs = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - clock0).count();
  };

  StiffnessMatrix K = assembleStiffness(mesh);
  CollapseDetector detector(mesh);
  AscentTrace trace;
  bool collapseSeen = false;
  bool lastConverged = false;

  DensityField mu = mu0;
  std::optional<SpectralResult> spectral;
  int iter = 0;
  for (double N : config.nSchedule) {
    const DensityBounds bounds{config.floor, N};
    mu = DensityField(mesh, projectToAdmissible(mesh, mu.values(), bounds).values, bounds);
    spectral = densitySpectrum(mesh, K, mu, config);
    // A degenerate start is reported even if the ascent spreads it out again.
    if (iter == 0) collapseSeen = detector.detect(mu.values(), {CollapseDetector::kFlagRadius}).flag;

    StageSummary stage;
    stage.N = N;
    bool converged = false;
    int it = 0;
    for (; it < config.maxIters; ++it) {
      StepResult step = ascentStep(mesh, K, mu, *spectral, config);
      const double gain = (step.spectral.lambda1() - spectral->lambda1()) / spectral->lambda1();

      TraceRecord rec;
      rec.iter = ++iter;
      rec.N = N;
      rec.lambda1Area = step.spectral.lambda1() * step.mu.mass(mesh);
      rec.enMeasure = saturatedMeasure(mesh, step.mu);
      rec.enegMeasure = negativeMeasure(mesh, step.mu);
      rec.step = step.step;
      rec.stepL1 = step.stepL1;
      rec.frameObjective = step.frame.objective;
      rec.collapse = detector.detect(step.mu.values(), {CollapseDetector::kFlagRadius}).flag;
      rec.wallMs = elapsedMs();
      collapseSeen = collapseSeen || rec.collapse;
      trace.records.push_back(rec);

      if (step.mu.constraintViolation(mesh) > 1e-10) {
        throwNumerical("iterate violates the admissible box or mass constraint");
      }
      mu = std::move(step.mu);
      spectral = std::move(step.spectral);
      if (!step.accepted || (gain <= config.lambdaTol && step.stepL1 <= config.stepTol)) {
        converged = true;
        ++it;
        break;
      }
    }
    stage.iterations = it;
    stage.converged = converged;
    stage.lambda1Area = spectral->lambda1() * mu.mass(mesh);
    stage.enMeasure = saturatedMeasure(mesh, mu);
    stage.enMeasureTimesN = stage.enMeasure * N;
    trace.saturationConstant = std::max(trace.saturationConstant, stage.enMeasureTimesN);
    trace.stages.push_back(stage);
    lastConverged = converged;
  }

  SphereFrame frame = selectFrame(mesh, mu, spectral->firstClusterBasis(), spectral->lambda1());
  Certificate cert = certify(mesh, mu, *spectral, frame, detector);
  if (collapseSeen || cert.collapse.flag) trace.status = AscentStatus::Collapse;
  else trace.status = lastConverged ? AscentStatus::Converged : AscentStatus::IterationCap;
  return MaximizeResult{std::move(mu), std::move(*spectral), std::move(frame), std::move(trace), std::move(cert)};
}

void writeTraceCsv(const std::string& path, const AscentTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << "iter,N,lambda1_area,EN_measure,ENeg_measure,step,frame_obj,wall_ms\n" << std::setprecision(17);
  for (const auto& r : trace.records) {
    out << r.iter << "," << r.N << "," << r.lambda1Area << "," << r.enMeasure << "," << r.enegMeasure << "," << r.step
        << "," << r.frameObjective << "," << std::setprecision(6) << r.wallMs << std::setprecision(17) << "\n";
  }
}

nlohmann::json traceSummaryToJson(const AscentTrace& trace) {
  auto stages = nlohmann::json::array();
  for (const auto& s : trace.stages) {
    stages.push_back({{"N", s.N},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"lambda1_area", s.lambda1Area},
                      {"EN_measure", s.enMeasure},
                      {"EN_measure_times_N", s.enMeasureTimesN}});
  }
  return nlohmann::json{{"status", statusName(trace.status)},
                        {"iterations", trace.records.size()},
                        {"saturation_constant", trace.saturationConstant},
                        {"stages", stages}};
}

} // namespace confspec
