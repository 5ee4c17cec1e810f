#include "cavity/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "cavity/assembly.hpp"
#include "cavity/dtn.hpp"
#include "cavity/errors.hpp"
#include "cavity/pml.hpp"
#include "cavity/solver.hpp"
#include "cavity/specfun.hpp"

namespace cavity {

const char* to_string(Method m) { return m == Method::Pml ? "pml" : "tbc"; }

Method parse_method(std::string_view name) {
  if (name == "pml") return Method::Pml;
  if (name == "tbc") return Method::Tbc;
  throw ValidationError("method must be 'pml' or 'tbc', got '" + std::string(name) + "'");
}

void validate(const AdaptOptions& o) {
  if (!(o.tau > 0.0 && o.tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
  if (o.tol && !(*o.tol > 0.0)) throw ValidationError("tol must be positive");
  if (o.max_dof <= 0 && !o.tol) throw ValidationError("one of tol or max_dof must be set");
  if (!(o.pml_error_cap > 0.0)) throw ValidationError("pml_error_cap must be positive");
  if (o.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (o.initial_h < 0.0) throw ValidationError("initial_h must be >= 0");
  if (o.threads < 1) throw ValidationError("threads must be >= 1");
  if (o.tbc_modes < 0 || o.tbc_modes > specfun::kMaxOrder) throw ValidationError("tbc_modes must lie in [0, 200]");
}

Scenario select_pml(const Scenario& s, double cap) {
  if (!(cap > 0.0)) throw ValidationError("PML error cap must be positive");
  Scenario out = s;
  auto bound = [&] { return propagation_bound(PmlMap::from(out), out.kappa0); };
  if (bound() <= cap) return out;
  const double target = cap * kPmlSelectionMargin;
  const double rho_limit = s.rho + 64.0 * s.R;
  while (bound() > target) {
    if (out.sigma0 < kMaxSigma0) {
      out.sigma0 = std::min(2.0 * out.sigma0, kMaxSigma0);
    } else if (out.rho + s.R <= rho_limit) {
      out.rho += s.R;
    } else {
      throw NumericalError("PML error cap " + std::to_string(cap) + " unreachable with sigma0 <= 128");
    }
  }
  spdlog::info("PML parameters adjusted: sigma0 {} -> {}, rho {} -> {}", s.sigma0, out.sigma0, s.rho, out.rho);
  return out;
}

RefinementMarks mark(const EstimatorReport& report, double tau) {
  RefinementMarks m;
  if (report.eta.empty()) return m;
  const double threshold = tau * *std::max_element(report.eta.begin(), report.eta.end());
  for (size_t t = 0; t < report.eta.size(); ++t) {
    if (report.eta[t] > threshold) m.marked.push_back(int(t));
  }
  return m;
}

double default_initial_h(const Scenario& s) { return std::min(s.wavelength() / 8.0, s.R / 4.0); }

SolutionField solve_on_mesh(std::shared_ptr<const Mesh> mesh, const Scenario& s, Method method, int tbc_modes) {
  if (tbc_modes <= 0) tbc_modes = default_modes(s.kappa0, mesh->R).N;
  DofMap dofmap = build_dofmap(*mesh, s);
  const LinearSystem ls = method == Method::Pml ? assemble_pml(*mesh, s, dofmap)
                                                : assemble_tbc(*mesh, s, dofmap, tbc_modes);
  const Eigen::VectorXcd x = solve(ls.matrix, ls.rhs);
  Eigen::VectorXcd values = expand(dofmap, x, ls.lifting);
  return SolutionField{std::move(mesh), std::move(dofmap), std::move(values)};
}

AdaptResult adapt_solve(const Scenario& s, const AdaptOptions& options) {
  validate(s);
  validate(options);
  AdaptResult res;
  res.scenario = options.method == Method::Pml ? select_pml(s, options.pml_error_cap) : s;
  const Scenario& sc = res.scenario;
  const double h0 = options.initial_h > 0.0 ? options.initial_h : default_initial_h(sc);
  auto mesh = std::make_shared<const Mesh>(
      initial_mesh(sc, h0, options.method == Method::Pml ? MeshDomain::Pml : MeshDomain::Tbc));

  for (int it = 0;; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      res.field = solve_on_mesh(mesh, sc, options.method, options.tbc_modes);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("iteration " + std::to_string(it) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(it) + ": " + e.what());
    }
    res.report = global_estimate(res.field, sc, options.threads, options.tbc_modes);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.history.records.push_back(
        {it, res.report.dof_count, res.report.dof_physical, res.report.eps_h, res.report.eps_pml, wall});
    spdlog::debug("[{}] iteration {}: dof {} eps_h {:.4e} eps_pml {:.3e} ({:.2f} s)", to_string(options.method), it,
                  res.report.dof_count, res.report.eps_h, res.report.eps_pml, wall);

    if (options.tol && res.report.eps_h <= *options.tol) break;
    if (options.max_dof > 0 && res.report.dof_count >= options.max_dof) break;
    if (it + 1 >= options.max_iterations) break;
    const RefinementMarks marks = mark(res.report, options.tau);
    if (marks.marked.empty()) {
      throw NumericalError("stagnation: no element exceeds the marking threshold at iteration " + std::to_string(it));
    }
    mesh = std::make_shared<const Mesh>(bisect(*mesh, marks));
  }
  res.mesh = mesh;
  return res;
}

}  // namespace cavity
