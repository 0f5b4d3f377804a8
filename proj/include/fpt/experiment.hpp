#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpt/filtration.hpp"
#include "fpt/mc.hpp"
#include "fpt/process.hpp"
#include "fpt/table.hpp"

namespace fpt {

enum class Method { FiltrationSeries, FiltrationLaplace, FiltrationMoving, Eigen, MonteCarlo };

std::string to_string(Method m);

/// Parsed and validated experiment.
struct ExperimentConfig {
  ProcessSpec process = ProcessSpec::free(1.0);
  MovingBoundaries boundaries;
  double x0 = 0.0;
  Target target = Target::Lower;
  std::vector<double> times;
  Method method = Method::FiltrationSeries;

  FiltrationOptions filtration;  // N, max_order, auto_tol, talbot_nodes
  MovingOptions moving;          // dt, conv_tol, max_order, N
  int eigen_modes = 30;
  McConfig mc;
  double sup_tol = 1e-6;
  double z_max = 3.0;
  long min_count = 50;
  std::optional<std::string> output;
};

/// Declarative experiment document: defaults, then a JSON file, then
/// `path=value` overrides. Unknown keys are rejected at every level.
class Experiment {
 public:
  Experiment();
  static Experiment from_json(const std::string& text);
  static Experiment load(const std::string& path);

  /// Dotted-path override, e.g. "filtration.N=5" or "process.kind=ou".
  /// The value is parsed as JSON, falling back to a plain string.
  void set(const std::string& assignment);

  /// The `output` entry, unvalidated.
  std::optional<std::string> output() const;

  /// Full document (defaults included), pretty-printed.
  std::string dump() const;

  /// Validates everything before any computation; throws ValidationError.
  ExperimentConfig config() const;

 private:
  struct Doc;
  std::shared_ptr<Doc> doc_;
};

/// Density on the configured grid: columns t, value, method, trunc_order.
DensityCurve run_density(const ExperimentConfig& cfg);

/// Signed terms (-1)^n f^(n)(t), one column per n < N.
Table run_terms(const ExperimentConfig& cfg);

struct McSummary {
  long n_traj = 0;
  long censored = 0;
  double dt = 0.0;
  double horizon = 0.0;
  double fraction_lower = 0.0, sigma_lower = 0.0;
  double fraction_upper = 0.0, sigma_upper = 0.0;
};

/// Monte Carlo histogram with the grid points as bin centres (uniform grid):
/// columns t, value, error, count.
Table run_mc(const ExperimentConfig& cfg, McSummary* summary = nullptr);

/// OU eigenmodes: n, s, rate, A, norm, residual, nodes.
Table run_spectrum(const ExperimentConfig& cfg);

struct CompareReport {
  double sup = 0.0;       ///< max |a - b| over compared points
  double l1 = 0.0;        ///< trapezoid (or bin-width) integral of |a - b|
  double max_abs_z = 0.0; ///< Monte Carlo side only
  int z_points = 0;       ///< bins that passed the count threshold
  bool has_mc = false;
  bool breached = false;
  std::string text;
};

/// Compares two experiments over the same grid. Tolerances come from `a`.
/// When one side is Monte Carlo the other is averaged over each bin.
Table compare(const ExperimentConfig& a, const ExperimentConfig& b, CompareReport& report);

}  // namespace fpt
