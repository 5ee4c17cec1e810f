#pragma once

#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "cavity/adapt.hpp"
#include "cavity/dtn.hpp"

namespace cavity {

/// Modal coefficients of the scattered trace u_h - u^ref on Gamma_R (default N and M when 0).
TraceCoefficients scattered_coefficients(const SolutionField& field, const Scenario& s, int N = 0, int M = 0);

/// P(phi) = sum_n c_n / H_n(kappa0 R) e^{-i n pi/2} mode_n(phi).
cplx far_field(const TraceCoefficients& c, double kappa0, double phi);
cplx far_field(const SolutionField& field, const Scenario& s, double phi);

/// sigma = (4 / kappa0) |P|^2.
double rcs_linear(cplx pattern, double kappa0);
/// 10 log10(sigma / lambda).
double rcs_db(double sigma, double wavelength);

inline double backscatter_angle(double theta) { return std::numbers::pi / 2 + theta; }

/// Backscatter sigma of a solved field.
double backscatter_rcs_linear(const SolutionField& field, const Scenario& s);

enum class SweepAxis { AngleDeg, FrequencyGhz };

const char* to_string(SweepAxis a);

struct SweepSpec {
  SweepAxis axis = SweepAxis::AngleDeg;
  std::vector<double> values;
};

/// "start:step:stop" inclusive, strictly increasing.
std::vector<double> parse_range(std::string_view text);

/// The scenario at one sweep point (theta in degrees, or frequency in GHz).
Scenario sweep_scenario(const Scenario& base, SweepAxis axis, double value);

struct RcsSample {
  double axis_value = 0.0;
  double rcs_db = 0.0;
  double rcs_linear = 0.0;
  int dof_count = 0;
};

struct RcsCurve {
  SweepAxis axis = SweepAxis::AngleDeg;
  Polarization polarization = Polarization::TM;
  Method method = Method::Pml;
  std::vector<RcsSample> samples;
};

/// Runs adapt_solve per sweep point; points run on `threads` workers, each sequential inside.
RcsCurve backscatter_rcs(const Scenario& s, const SweepSpec& sweep, const AdaptOptions& options);

void write_rcs_csv(const RcsCurve& curve, const std::filesystem::path& path);

struct RcsComparison {
  std::vector<double> axis_values;
  std::vector<double> delta_db;  // pml - tbc
  double max_abs_db = 0.0;
  double mean_abs_db = 0.0;
};

RcsComparison compare_curves(const RcsCurve& pml, const RcsCurve& tbc);

void write_delta_csv(const RcsComparison& c, SweepAxis axis, const std::filesystem::path& path);

/// VTK with re(u), im(u), |u| at the mesh vertices and eta_K per cell when given.
void export_field(const SolutionField& field, const std::filesystem::path& path,
                  const EstimatorReport* report = nullptr);

}  // namespace cavity
