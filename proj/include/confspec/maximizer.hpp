#pragma once

#include "confspec/certify.hpp"
#include "confspec/collapse.hpp"
#include "confspec/density.hpp"
#include "confspec/fem.hpp"
#include "confspec/frame.hpp"
#include "confspec/mesh.hpp"
#include "confspec/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace confspec {

struct AscentConfig {
  // Upper density bounds N, strictly increasing, in absolute density units.
  std::vector<double> nSchedule;
  double damping = 0.5;
  int maxIters = 500;
  double lambdaTol = 1e-7;   // relative gain below which an N stage has converged
  double stepTol = 1e-4;     // L1 step below which an N stage has converged
  double floor = 0.0;        // 0 or -1/2
  std::uint64_t seed = 1;
  int maxHalvings = 6;
  int eigenpairs = 8;
  double relGap = 0.02;
  double solverTol = 1e-9;
  // After a rejected step, eigenspaces of clusters within (1 + widenGap) lambda_1
  // are added one cluster at a time and the step is retried. 0 disables.
  double widenGap = 0.1;
  // Trials of the reweighting step mu (1 - s (w - 1)) tried when everything
  // else is rejected. 0 disables.
  int reweightHalvings = 12;
  double reweightDefect = 1e-2;  // minimal max |w - 1| for the reweighting step

  // Schedule given as multiples of 1/area, e.g. {4, 16, 64}.
  static AscentConfig withScheduleTimesArea(const TriangleMesh& mesh, std::vector<double> scheduleTimesArea);
  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double N = 0.0;
  double lambda1Area = 0.0;
  double enMeasure = 0.0;
  double enegMeasure = 0.0;
  double step = 0.0;  // accepted damping, 0 when every trial was rejected
  double frameObjective = 0.0;
  double stepL1 = 0.0;
  bool collapse = false;
  double wallMs = 0.0;
};

enum class AscentStatus { Converged, Collapse, IterationCap };
const char* statusName(AscentStatus status);

struct StageSummary {
  double N = 0.0;
  int iterations = 0;
  bool converged = false;
  double lambda1Area = 0.0;
  double enMeasure = 0.0;
  double enMeasureTimesN = 0.0;
};

struct AscentTrace {
  std::vector<TraceRecord> records;
  std::vector<StageSummary> stages;
  AscentStatus status = AscentStatus::IterationCap;
  // max over the schedule of A_g(E_N) * N at the end of each stage.
  double saturationConstant = 0.0;
};

// Spectrum of the pencil at mu, with k enlarged until the first cluster is complete.
SpectralResult densitySpectrum(const TriangleMesh& mesh, const StiffnessMatrix& K, const DensityField& mu,
                               const AscentConfig& config);

struct StepResult {
  DensityField mu;
  SpectralResult spectral;
  SphereFrame frame;  // frame at the input density, used for the update
  double step = 0.0;
  double stepL1 = 0.0;
  bool accepted = false;
};

// One damped fixed-point step mu <- P((1 - t) mu + t nu) where nu is the
// density recovered from the sphere frame. The damping is halved until
// lambda_1 does not decrease; if no trial qualifies the frame is rebuilt on a
// wider eigenspace, then a reweighting by the frame defect w - 1 is tried,
// and if that fails too the density is unchanged.
StepResult ascentStep(const TriangleMesh& mesh, const StiffnessMatrix& K, const DensityField& mu,
                      const SpectralResult& spectral, const AscentConfig& config);

struct MaximizeResult {
  DensityField mu;
  SpectralResult spectral;
  SphereFrame frame;
  AscentTrace trace;
  Certificate certificate;
};

MaximizeResult maximize(const TriangleMesh& mesh, const DensityField& mu0, const AscentConfig& config);

void writeTraceCsv(const std::string& path, const AscentTrace& trace);
nlohmann::json traceSummaryToJson(const AscentTrace& trace);

} // namespace confspec
