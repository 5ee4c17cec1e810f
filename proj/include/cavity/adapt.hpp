#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cavity/estimator.hpp"
#include "cavity/mesh.hpp"

namespace cavity {

enum class Method { Pml, Tbc };

const char* to_string(Method m);
Method parse_method(std::string_view name);

struct AdaptOptions {
  double tau = 0.5;
  std::optional<double> tol;
  int max_dof = 15000;
  double pml_error_cap = 1e-8;
  int max_iterations = 60;
  /// Initial mesh size; 0 selects min(lambda / 8, R / 4).
  double initial_h = 0.0;
  Method method = Method::Pml;
  /// DtN modes for the TBC method; 0 selects default_modes().
  int tbc_modes = 0;
  int threads = 1;
};

void validate(const AdaptOptions& o);

struct ConvergenceRecord {
  int iteration = 0;
  int dof_count = 0;
  int dof_physical = 0;
  double eps_h = 0.0;
  double eps_pml = 0.0;
  double wall_time_s = 0.0;
};

struct ConvergenceHistory {
  std::vector<ConvergenceRecord> records;
};

/// Keeps (sigma0, rho) when the propagation bound is already <= cap; otherwise doubles
/// sigma0 up to 128 and then widens rho by R until the bound is <= cap * 1e-2.
Scenario select_pml(const Scenario& s, double cap);

inline constexpr double kPmlSelectionMargin = 1e-2;
inline constexpr double kMaxSigma0 = 128.0;

/// Elements with eta_K > tau * max eta.
RefinementMarks mark(const EstimatorReport& report, double tau);

double default_initial_h(const Scenario& s);

struct AdaptResult {
  Scenario scenario;  // after PML selection
  std::shared_ptr<const Mesh> mesh;
  SolutionField field;
  ConvergenceHistory history;
  EstimatorReport report;
};

/// One assemble-and-solve on a fixed mesh.
SolutionField solve_on_mesh(std::shared_ptr<const Mesh> mesh, const Scenario& s, Method method, int tbc_modes = 0);

AdaptResult adapt_solve(const Scenario& s, const AdaptOptions& options);

}  // namespace cavity
