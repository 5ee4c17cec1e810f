#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cavity/geometry.hpp"

namespace cavity {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

inline constexpr double kSpeedOfLight = 299792458.0;

enum class Polarization { TM, TE };

const char* to_string(Polarization p);

struct MaterialRegion {
  Polygon region;
  cplx epsilon_rel{1.0, 0.0};
  cplx mu_rel{1.0, 0.0};
};

struct Scenario {
  Polarization polarization = Polarization::TM;
  // Empty cavity polygon means a flat ground plane.
  Polygon cavity;
  // Perfect-conductor obstacles removed from the domain.
  std::vector<Polygon> protrusions;
  std::vector<MaterialRegion> materials;
  double kappa0 = 0.0;
  double theta = 0.0;
  double R = 0.0;
  double rho = 0.0;
  double sigma0 = 20.0;
  int m_pml = 2;
  int fem_degree = 1;
  int n_arc = 64;

  double wavelength() const;
  double frequency_hz() const;
};

/// Throws ValidationError (or GeometryError) naming the violated constraint.
void validate(const Scenario& s);

/// Parses a JSON scenario document; errors carry the line of the offending value when known.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& s);

std::vector<std::string> preset_names();
Scenario preset(std::string_view name);

/// Flat ground plane, no cavity: the total field is exactly the reference field.
Scenario flat_ground(Polarization pol, double kappa0, double theta, double R_over_lambda = 0.5);

/// Index into scenario.materials of the region containing p, or -1 for background.
int material_at(const Scenario& s, const Vec2& p);

/// kappa0 * sqrt(eps*mu) of a material (principal branch); kappa0 for index -1.
cplx material_wavenumber(const Scenario& s, int material);

cplx wavenumber(const Scenario& s, const Vec2& p);

struct ReferenceJet {
  cplx value;
  Vec2c gradient;
  Mat2c hessian;
};

/// Incident plus ground-reflected plane wave and its exact derivatives.
ReferenceJet reference_jet(const Scenario& s, const Vec2& p);

struct ReferenceValue {
  cplx value;
  Vec2c gradient;
};

ReferenceValue reference_field(const Scenario& s, const Vec2& p);

}  // namespace cavity
