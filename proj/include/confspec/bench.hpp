#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace confspec {

struct BenchOptions {
  bool quick = false;  // coarse meshes, tolerances doubled
  std::uint64_t seed = 7;
  std::function<void(const std::string&)> progress;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// One row per (run, N stage): the decay of A_g(E_N) along the schedule.
struct DecayRow {
  std::string run;
  double nTimesArea = 0.0;
  double enMeasure = 0.0;
  double enMeasureTimesN = 0.0;
  double lambda1Area = 0.0;
  bool converged = false;
};

struct BenchRun {
  std::string name;
  std::string status;
  double lambda1Area = 0.0;
  double target = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  double saturationConstant = 0.0;
  nlohmann::json certificate;
};

struct BenchReport {
  bool quick = false;
  std::vector<CriterionResult> criteria;
  std::vector<BenchRun> runs;
  std::vector<DecayRow> decay;
  bool allPass() const;
};

// Runs the acceptance matrix: maximizer values on the sphere and tori,
// fixed points, eigensolver convergence, certificates, bound invariants,
// the brute-force square-torus cross-check and the property checks.
BenchReport runBench(const BenchOptions& options);

std::string formatBenchTable(const BenchReport& report);
nlohmann::json benchToJson(const BenchReport& report);

} // namespace confspec
