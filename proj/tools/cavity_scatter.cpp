#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cavity/adapt.hpp"
#include "cavity/errors.hpp"
#include "cavity/postprocess.hpp"
#include "cavity/scenario.hpp"

namespace fs = std::filesystem;
using namespace cavity;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Manifest {
  std::string preset;
  std::string scenario_path;
  std::string out = ".";
  std::optional<double> theta;
  std::optional<double> tau;
  std::optional<double> tol;
  std::optional<int> max_dof;
  std::optional<double> sigma0;
  std::optional<double> rho_factor;
  std::optional<int> m_pml;
  std::optional<int> degree;
  std::optional<int> tbc_modes;
  std::optional<std::string> polarization;
  std::string method = "pml";
  int threads = 1;
  bool deterministic = false;
  std::string angles;
  std::string freqs_ghz;
};

void set_log_level() {
  const char* env = std::getenv("CAVITY_SCATTER_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw ValidationError("CAVITY_SCATTER_LOG must be one of error, warn, info, debug (got '" + level + "')");
  }
}

Scenario load_base(const Manifest& m) {
  if (m.preset.empty() == m.scenario_path.empty()) throw ValidationError("exactly one of --preset or --scenario is required");
  Scenario s = m.preset.empty() ? load_scenario_file(m.scenario_path) : preset(m.preset);
  if (m.polarization) {
    if (*m.polarization != to_string(s.polarization)) {
      throw ValidationError("--polarization " + *m.polarization + " does not match the scenario's " +
                            to_string(s.polarization));
    }
  }
  if (m.theta) s.theta = *m.theta;
  if (m.sigma0) s.sigma0 = *m.sigma0;
  if (m.rho_factor) s.rho = *m.rho_factor * s.R;
  if (m.m_pml) s.m_pml = *m.m_pml;
  if (m.degree) s.fem_degree = *m.degree;
  validate(s);
  return s;
}

AdaptOptions options_from(const Manifest& m) {
  AdaptOptions o;
  if (m.tau) o.tau = *m.tau;
  o.tol = m.tol;
  if (m.max_dof) o.max_dof = *m.max_dof;
  if (m.tbc_modes) o.tbc_modes = *m.tbc_modes;
  o.method = parse_method(m.method);
  o.threads = m.threads;
  validate(o);
  return o;
}

fs::path prepare_out(const Manifest& m) {
  const fs::path out(m.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ValidationError("cannot create output directory " + out.string());
  const fs::path probe = out / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ValidationError("output directory " + out.string() + " is not writable");
  }
  fs::remove(probe, ec);
  return out;
}

SweepSpec sweep_from(const Manifest& m) {
  if (m.angles.empty() == m.freqs_ghz.empty()) throw ValidationError("exactly one of --angles or --freqs-ghz is required");
  SweepSpec sp;
  sp.axis = m.angles.empty() ? SweepAxis::FrequencyGhz : SweepAxis::AngleDeg;
  sp.values = parse_range(m.angles.empty() ? m.freqs_ghz : m.angles);
  return sp;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  f.precision(17);
  return f;
}

int cmd_run(const Manifest& m) {
  const Scenario s = load_base(m);
  const AdaptOptions o = options_from(m);
  const fs::path out = prepare_out(m);
  const auto t0 = std::chrono::steady_clock::now();
  const AdaptResult r = adapt_solve(s, o);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto h = open_out(out / "history.csv");
  h << "iteration,dof_count,dof_physical,eps_h,eps_pml,wall_time_s\n";
  for (const auto& rec : r.history.records) {
    h << rec.iteration << ',' << rec.dof_count << ',' << rec.dof_physical << ',' << rec.eps_h << ',' << rec.eps_pml
      << ',' << (m.deterministic ? 0.0 : rec.wall_time_s) << '\n';
  }

  auto e = open_out(out / "estimate.csv");
  e << "element,eta\n";
  for (size_t t = 0; t < r.report.eta.size(); ++t) e << t << ',' << r.report.eta[t] << '\n';

  export_field(r.field, out / "field.vtk", &r.report);

  const double sigma = backscatter_rcs_linear(r.field, r.scenario);
  auto sm = open_out(out / "summary.txt");
  sm << "method " << to_string(o.method) << '\n'
     << "polarization " << to_string(s.polarization) << '\n'
     << "iterations " << r.history.records.size() << '\n'
     << "dof_count " << r.report.dof_count << '\n'
     << "dof_physical " << r.report.dof_physical << '\n'
     << "eps_h " << r.report.eps_h << '\n'
     << "eps_pml " << r.report.eps_pml << '\n'
     << "sigma0 " << r.scenario.sigma0 << '\n'
     << "rho " << r.scenario.rho << '\n'
     << "backscatter_rcs_db " << rcs_db(sigma, r.scenario.wavelength()) << '\n';
  if (!m.deterministic) sm << "wall_time_s " << wall << '\n';
  std::cout << fmt::format("{}: {} dof, eps_h {:.4e}, eps_pml {:.4e}, {:.2f} s\n", to_string(o.method),
                           r.report.dof_count, r.report.eps_h, r.report.eps_pml, wall);
  return 0;
}

int cmd_sweep(const Manifest& m) {
  const Scenario s = load_base(m);
  const AdaptOptions o = options_from(m);
  const SweepSpec sp = sweep_from(m);
  const fs::path out = prepare_out(m);
  const RcsCurve c = backscatter_rcs(s, sp, o);
  write_rcs_csv(c, out / "rcs.csv");
  std::cout << fmt::format("{} sweep points written to {}\n", c.samples.size(), (out / "rcs.csv").string());
  return 0;
}

int cmd_compare(const Manifest& m) {
  const Scenario s = load_base(m);
  AdaptOptions o = options_from(m);
  const SweepSpec sp = sweep_from(m);
  const fs::path out = prepare_out(m);
  o.method = Method::Pml;
  const RcsCurve pml = backscatter_rcs(s, sp, o);
  o.method = Method::Tbc;
  const RcsCurve tbc = backscatter_rcs(s, sp, o);
  write_rcs_csv(pml, out / "rcs_pml.csv");
  write_rcs_csv(tbc, out / "rcs_tbc.csv");
  const RcsComparison cmp = compare_curves(pml, tbc);
  write_delta_csv(cmp, sp.axis, out / "delta.csv");
  auto sm = open_out(out / "summary.txt");
  sm << "points " << cmp.axis_values.size() << '\n'
     << "max_abs_delta_db " << cmp.max_abs_db << '\n'
     << "mean_abs_delta_db " << cmp.mean_abs_db << '\n';
  std::cout << fmt::format("max |delta| {:.4f} dB, mean |delta| {:.4f} dB over {} points\n", cmp.max_abs_db,
                           cmp.mean_abs_db, cmp.axis_values.size());
  return 0;
}

void add_common(CLI::App* c, Manifest& m, bool sweep) {
  c->add_option("--preset", m.preset, "Benchmark preset name");
  c->add_option("--scenario", m.scenario_path, "Scenario JSON document");
  c->add_option("--theta", m.theta, "Incidence angle from the vertical (rad)");
  c->add_option("--tau", m.tau, "Marking fraction in (0, 1)");
  c->add_option("--tol", m.tol, "Stop once eps_h + eps_pml is below this value");
  c->add_option("--max-dof", m.max_dof, "Stop once the dof count reaches this value");
  c->add_option("--sigma0", m.sigma0, "PML absorption strength");
  c->add_option("--rho-factor", m.rho_factor, "Outer PML radius as a multiple of R");
  c->add_option("--m-pml", m.m_pml, "PML profile exponent");
  c->add_option("--degree", m.degree, "Finite element degree (1 or 2)");
  c->add_option("--tbc-modes", m.tbc_modes, "DtN modes for the TBC method (0 = default)");
  c->add_option("--polarization", m.polarization, "Expected polarization (TM or TE)")
      ->check(CLI::IsMember({"TM", "TE"}));
  c->add_option("--threads", m.threads, "Worker threads")->check(CLI::PositiveNumber);
  c->add_option("--out", m.out, "Output directory");
  c->add_flag("--deterministic", m.deterministic, "Write zero wall-clock times so outputs are byte-identical");
  if (sweep) {
    c->add_option("--angles", m.angles, "Incidence grid in degrees, start:step:stop");
    c->add_option("--freqs-ghz", m.freqs_ghz, "Frequency grid in GHz, start:step:stop");
  } else {
    c->add_option("--method", m.method, "pml or tbc")->check(CLI::IsMember({"pml", "tbc"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive PML finite element solver for cavity scattering"};
  app.require_subcommand(1);
  Manifest m;
  auto* run = app.add_subcommand("run", "Adaptive solve of one scenario");
  add_common(run, m, false);
  auto* sweep = app.add_subcommand("sweep", "Backscatter RCS over an angle or frequency grid");
  add_common(sweep, m, true);
  sweep->add_option("--method", m.method, "pml or tbc")->check(CLI::IsMember({"pml", "tbc"}));
  auto* compare = app.add_subcommand("compare", "PML and TBC backscatter RCS over a grid");
  add_common(compare, m, true);
  auto* pre = app.add_subcommand("preset", "Benchmark presets");
  pre->require_subcommand(1);
  auto* list = pre->add_subcommand("list", "Print preset names");
  std::string emit_name;
  auto* emit = pre->add_subcommand("emit", "Print the scenario document of a preset");
  emit->add_option("name", emit_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    set_log_level();
    if (*run) return cmd_run(m);
    if (*sweep) return cmd_sweep(m);
    if (*compare) return cmd_compare(m);
    if (*list) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (*emit) {
      std::cout << scenario_to_json(preset(emit_name)) << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NotFoundError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
