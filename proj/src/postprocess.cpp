#include "cavity/postprocess.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "cavity/errors.hpp"
#include "cavity/specfun.hpp"

namespace cavity {

TraceCoefficients scattered_coefficients(const SolutionField& field, const Scenario& s, int N, int M) {
  const auto m = default_modes(s.kappa0, field.mesh->R);
  if (N <= 0) N = m.N;
  if (M <= 0) M = 8 * N;
  return trace_coeffs(field, s, N, M, TracePart::Scattered);
}

cplx far_field(const TraceCoefficients& c, double kappa0, double phi) {
  const auto inv = specfun::hankel1_reciprocals(c.N, cplx(kappa0 * c.R, 0.0));
  const cplx mi(0.0, -1.0);
  cplx p = 0.0;
  cplx phase = 1.0;  // e^{-i n pi/2}
  for (int n = 0; n <= c.N; ++n) {
    if (n >= c.first_mode()) p += c.coeffs[n] * inv[n] * phase * mode_function(c.polarization, n, phi);
    phase *= mi;
  }
  return p;
}

cplx far_field(const SolutionField& field, const Scenario& s, double phi) {
  return far_field(scattered_coefficients(field, s), s.kappa0, phi);
}

double rcs_linear(cplx pattern, double kappa0) { return 4.0 / kappa0 * std::norm(pattern); }

double rcs_db(double sigma, double wavelength) {
  return 10.0 * std::log10(std::max(sigma / wavelength, std::numeric_limits<double>::min()));
}

double backscatter_rcs_linear(const SolutionField& field, const Scenario& s) {
  return rcs_linear(far_field(field, s, backscatter_angle(s.theta)), s.kappa0);
}

const char* to_string(SweepAxis a) { return a == SweepAxis::AngleDeg ? "angle_deg" : "frequency_ghz"; }

std::vector<double> parse_range(std::string_view text) {
  const std::string t(text);
  const auto c1 = t.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : t.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ValidationError("range must have the form start:step:stop, got '" + t + "'");
  double a, st, b;
  try {
    a = std::stod(t.substr(0, c1));
    st = std::stod(t.substr(c1 + 1, c2 - c1 - 1));
    b = std::stod(t.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ValidationError("range '" + t + "' has a non-numeric field");
  }
  if (!(st > 0.0)) throw ValidationError("range step must be positive");
  std::vector<double> v;
  const double n = std::floor((b - a) / st + 1e-9);
  for (long k = 0; k <= long(n); ++k) v.push_back(a + double(k) * st);
  if (v.empty()) throw ValidationError("range '" + t + "' is empty");
  return v;
}

Scenario sweep_scenario(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  if (axis == SweepAxis::AngleDeg) {
    s.theta = value * std::numbers::pi / 180.0;
  } else {
    s.kappa0 = 2.0 * std::numbers::pi * value * 1e9 / kSpeedOfLight;
  }
  validate(s);
  return s;
}

RcsCurve backscatter_rcs(const Scenario& s, const SweepSpec& sweep, const AdaptOptions& options) {
  if (sweep.values.empty()) throw ValidationError("sweep grid is empty");
  for (size_t k = 1; k < sweep.values.size(); ++k) {
    if (!(sweep.values[k] > sweep.values[k - 1])) throw ValidationError("sweep values must be strictly increasing");
  }
  RcsCurve curve{sweep.axis, s.polarization, options.method, std::vector<RcsSample>(sweep.values.size())};
  const int workers = std::min<int>(options.threads, int(sweep.values.size()));
  AdaptOptions inner = options;
  if (workers > 1) inner.threads = 1;

  auto run_point = [&](size_t k) {
    const Scenario sk = sweep_scenario(s, sweep.axis, sweep.values[k]);
    const AdaptResult r = adapt_solve(sk, inner);
    const double sigma = backscatter_rcs_linear(r.field, r.scenario);
    curve.samples[k] = {sweep.values[k], rcs_db(sigma, sk.wavelength()), sigma, r.report.dof_count};
  };

  if (workers <= 1) {
    for (size_t k = 0; k < sweep.values.size(); ++k) run_point(k);
    return curve;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t k = next++; k < sweep.values.size(); k = next++) {
        try {
          run_point(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return curve;
}

void write_rcs_csv(const RcsCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "axis,value,rcs_db,method,polarization\n";
  for (const auto& p : curve.samples) {
    out << fmt::format("{},{:.10g},{:.10g},{},{}\n", to_string(curve.axis), p.axis_value, p.rcs_db,
                       to_string(curve.method), to_string(curve.polarization));
  }
}

RcsComparison compare_curves(const RcsCurve& pml, const RcsCurve& tbc) {
  if (pml.samples.size() != tbc.samples.size()) throw ValidationError("curves have different lengths");
  RcsComparison c;
  double sum = 0.0;
  for (size_t k = 0; k < pml.samples.size(); ++k) {
    if (pml.samples[k].axis_value != tbc.samples[k].axis_value) throw ValidationError("curves have different axes");
    const double d = pml.samples[k].rcs_db - tbc.samples[k].rcs_db;
    c.axis_values.push_back(pml.samples[k].axis_value);
    c.delta_db.push_back(d);
    c.max_abs_db = std::max(c.max_abs_db, std::abs(d));
    sum += std::abs(d);
  }
  if (!c.delta_db.empty()) c.mean_abs_db = sum / double(c.delta_db.size());
  return c;
}

void write_delta_csv(const RcsComparison& c, SweepAxis axis, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "axis,value,delta_db\n";
  for (size_t k = 0; k < c.delta_db.size(); ++k) {
    out << fmt::format("{},{:.10g},{:.10g}\n", to_string(axis), c.axis_values[k], c.delta_db[k]);
  }
}

void export_field(const SolutionField& field, const std::filesystem::path& path, const EstimatorReport* report) {
  const Mesh& mesh = *field.mesh;
  VtkArrays arrays;
  std::vector<double> re(mesh.num_vertices()), im(mesh.num_vertices()), ab(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const cplx u = field.values[v];  // vertex dofs come first for both degrees
    re[v] = u.real();
    im[v] = u.imag();
    ab[v] = std::abs(u);
  }
  arrays.point_data = {{"re_u", std::move(re)}, {"im_u", std::move(im)}, {"abs_u", std::move(ab)}};
  if (report) arrays.cell_data.push_back({"eta", report->eta});
  write_vtk(mesh, path, arrays);
}

}  // namespace cavity
