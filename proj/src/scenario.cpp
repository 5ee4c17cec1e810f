#include "cavity/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cavity/errors.hpp"

namespace cavity {

using nlohmann::json;
using std::numbers::pi;

const char* to_string(Polarization p) { return p == Polarization::TM ? "TM" : "TE"; }

double Scenario::wavelength() const { return 2.0 * pi / kappa0; }

double Scenario::frequency_hz() const { return kappa0 * kSpeedOfLight / (2.0 * pi); }

namespace {

double polygon_scale(const Polygon& poly) {
  double s = 0.0;
  for (const auto& p : poly) s = std::max(s, p.norm());
  return s;
}

bool on_polygon_boundary(const Polygon& poly, const Vec2& p, double tol) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
  }
  return false;
}

bool polygons_cross(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segment_crossing(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
    }
  }
  return false;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

// Inside the Gamma_R polyline: every point of the closed half disc of radius
// R cos(pi/n_arc) is inside the polygonal approximation.
bool inside_inner_polyline(const Scenario& s, const Vec2& p) {
  return p.norm() <= s.R * std::cos(pi / s.n_arc) * (1.0 + 1e-12);
}

void validate_cavity(const Scenario& s) {
  const Polygon& c = s.cavity;
  if (c.empty()) return;
  if (c.size() < 3) throw GeometryError("cavity_polygon needs at least 3 vertices");
  if (!is_simple_polygon(c)) throw GeometryError("cavity_polygon is self-intersecting");
  const double tol = 1e-12 * std::max(polygon_scale(c), s.R);
  int on_ground = 0;
  for (const auto& v : c) {
    if (v.y() > 0.0 && v.y() <= tol) {
      throw GeometryError("cavity aperture endpoints must lie exactly on x2 = 0");
    }
    if (v.y() > 0.0) throw GeometryError("cavity_polygon must lie in x2 <= 0");
    if (v.y() == 0.0) {
      ++on_ground;
      if (std::abs(v.x()) > s.R) {
        throw GeometryError("cavity aperture must lie inside [-R, R]");
      }
    } else if (v.y() >= -tol) {
      throw GeometryError("cavity aperture endpoints must lie exactly on x2 = 0");
    }
  }
  bool has_aperture_edge = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].y() == 0.0 && c[(i + 1) % c.size()].y() == 0.0) has_aperture_edge = true;
  }
  if (on_ground < 2 || !has_aperture_edge) {
    throw GeometryError("cavity aperture not on x2 = 0 (no polygon edge on the ground line)");
  }
}

}  // namespace

void validate(const Scenario& s) {
  require(std::isfinite(s.kappa0) && s.kappa0 > 0.0, "kappa0 > 0");
  require(std::isfinite(s.theta) && std::abs(s.theta) < pi / 2, "theta in (-pi/2, pi/2)");
  require(std::isfinite(s.R) && s.R > 0.0, "R > 0");
  require(std::isfinite(s.rho) && s.rho > s.R, "rho > R");
  require(std::isfinite(s.sigma0) && s.sigma0 > 0.0, "sigma0 > 0");
  require(s.m_pml >= 1, "m_pml >= 1");
  require(s.fem_degree == 1 || s.fem_degree == 2, "fem_degree in {1, 2}");
  require(s.n_arc >= 4 && s.n_arc <= 4096, "n_arc in [4, 4096]");

  validate_cavity(s);

  for (std::size_t k = 0; k < s.protrusions.size(); ++k) {
    const Polygon& p = s.protrusions[k];
    const std::string name = "protrusions[" + std::to_string(k) + "]";
    if (!is_simple_polygon(p)) throw GeometryError(name + " is not a simple polygon");
    for (const auto& v : p) {
      if (v.y() > 0.0 && !inside_inner_polyline(s, v)) {
        throw ValidationError(name + " must lie inside the half disc of radius R");
      }
    }
  }

  const double tol = 1e-12 * std::max(s.R, polygon_scale(s.cavity));
  for (std::size_t k = 0; k < s.materials.size(); ++k) {
    const MaterialRegion& m = s.materials[k];
    const std::string name = "materials[" + std::to_string(k) + "]";
    require(m.epsilon_rel.imag() >= 0.0, name + ": Im(epsilon_rel) >= 0");
    require(m.mu_rel.imag() >= 0.0, name + ": Im(mu_rel) >= 0");
    require(std::abs(m.epsilon_rel) > 0.0 && std::abs(m.mu_rel) > 0.0,
            name + ": epsilon_rel and mu_rel must be nonzero");
    if (!is_simple_polygon(m.region)) throw GeometryError(name + " is not a simple polygon");
    for (const auto& v : m.region) {
      if (v.y() > 0.0) {
        require(inside_inner_polyline(s, v), name + " must not intersect the PML annulus (|x| < R)");
      } else {
        const bool in_cavity = !s.cavity.empty() && (point_in_polygon(s.cavity, v) ||
                                                     on_polygon_boundary(s.cavity, v, tol));
        require(in_cavity || v.y() == 0.0, name + " must lie inside the cavity or above the ground");
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      const Polygon& o = s.materials[j].region;
      bool overlap = polygons_cross(m.region, o);
      for (const auto& v : m.region) {
        if (point_in_polygon(o, v) && !on_polygon_boundary(o, v, tol)) overlap = true;
      }
      for (const auto& v : o) {
        if (point_in_polygon(m.region, v) && !on_polygon_boundary(m.region, v, tol)) overlap = true;
      }
      require(!overlap, name + " overlaps materials[" + std::to_string(j) + "]; regions must be disjoint");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

int line_of_offset(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + int(std::count(text.begin(), text.begin() + byte, '\n'));
}

int line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] void field_error(std::string_view text, const std::string& key, const std::string& msg) {
  const int line = line_of_key(text, key);
  std::string what = "field '" + key + "': " + msg;
  if (line > 0) what += " (line " + std::to_string(line) + ")";
  throw ParseError(what, line);
}

double get_number(const json& doc, std::string_view text, const std::string& key) {
  if (!doc.contains(key)) field_error(text, key, "missing required field");
  const json& v = doc.at(key);
  if (!v.is_number()) field_error(text, key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& doc, std::string_view text, const std::string& key, double def) {
  return doc.contains(key) ? get_number(doc, text, key) : def;
}

int get_int_or(const json& doc, std::string_view text, const std::string& key, int def) {
  if (!doc.contains(key)) return def;
  const json& v = doc.at(key);
  if (!v.is_number_integer()) field_error(text, key, "expected an integer");
  return v.get<int>();
}

Polygon get_polygon(const json& v, std::string_view text, const std::string& key) {
  if (!v.is_array()) field_error(text, key, "expected an array of [x1, x2] pairs");
  Polygon poly;
  for (const auto& pt : v) {
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
      field_error(text, key, "expected an array of [x1, x2] pairs");
    }
    poly.emplace_back(pt[0].get<double>(), pt[1].get<double>());
  }
  return poly;
}

json polygon_json(const Polygon& poly) {
  json a = json::array();
  for (const auto& p : poly) a.push_back({p.x(), p.y()});
  return a;
}

}  // namespace

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("JSON syntax error at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) throw ParseError("scenario document must be a JSON object", 1);

  Scenario s;
  if (!doc.contains("polarization")) field_error(text, "polarization", "missing required field");
  const json& pol = doc.at("polarization");
  if (pol == "TM") {
    s.polarization = Polarization::TM;
  } else if (pol == "TE") {
    s.polarization = Polarization::TE;
  } else {
    field_error(text, "polarization", "expected \"TM\" or \"TE\"");
  }

  const bool has_k = doc.contains("kappa0");
  const bool has_f = doc.contains("frequency_hz");
  if (has_k == has_f) field_error(text, has_k ? "frequency_hz" : "kappa0", "exactly one of kappa0 / frequency_hz is required");
  if (has_k) {
    s.kappa0 = get_number(doc, text, "kappa0");
  } else {
    s.kappa0 = 2.0 * pi * get_number(doc, text, "frequency_hz") / kSpeedOfLight;
  }

  s.theta = get_number(doc, text, "theta_rad");
  if (doc.contains("cavity_polygon")) s.cavity = get_polygon(doc.at("cavity_polygon"), text, "cavity_polygon");
  if (doc.contains("protrusions")) {
    const json& a = doc.at("protrusions");
    if (!a.is_array()) field_error(text, "protrusions", "expected an array of polygons");
    for (const auto& p : a) s.protrusions.push_back(get_polygon(p, text, "protrusions"));
  }
  if (doc.contains("materials")) {
    const json& a = doc.at("materials");
    if (!a.is_array()) field_error(text, "materials", "expected an array");
    for (const auto& m : a) {
      if (!m.is_object() || !m.contains("polygon")) field_error(text, "materials", "each entry needs a polygon");
      MaterialRegion r;
      r.region = get_polygon(m.at("polygon"), text, "polygon");
      r.epsilon_rel = {get_number_or(m, text, "eps_re", 1.0), get_number_or(m, text, "eps_im", 0.0)};
      r.mu_rel = {get_number_or(m, text, "mu_re", 1.0), get_number_or(m, text, "mu_im", 0.0)};
      s.materials.push_back(std::move(r));
    }
  }
  s.R = get_number(doc, text, "R");
  s.rho = get_number(doc, text, "rho");
  s.sigma0 = get_number_or(doc, text, "sigma0", 20.0);
  s.m_pml = get_int_or(doc, text, "m_pml", 2);
  s.fem_degree = get_int_or(doc, text, "fem_degree", 1);
  s.n_arc = get_int_or(doc, text, "n_arc", 64);

  validate(s);
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["polarization"] = to_string(s.polarization);
  doc["kappa0"] = s.kappa0;
  doc["theta_rad"] = s.theta;
  doc["cavity_polygon"] = polygon_json(s.cavity);
  json prot = json::array();
  for (const auto& p : s.protrusions) prot.push_back(polygon_json(p));
  doc["protrusions"] = prot;
  json mats = json::array();
  for (const auto& m : s.materials) {
    mats.push_back({{"polygon", polygon_json(m.region)},
                    {"eps_re", m.epsilon_rel.real()},
                    {"eps_im", m.epsilon_rel.imag()},
                    {"mu_re", m.mu_rel.real()},
                    {"mu_im", m.mu_rel.imag()}});
  }
  doc["materials"] = mats;
  doc["R"] = s.R;
  doc["rho"] = s.rho;
  doc["sigma0"] = s.sigma0;
  doc["m_pml"] = s.m_pml;
  doc["fem_degree"] = s.fem_degree;
  doc["n_arc"] = s.n_arc;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Presets

namespace {

Polygon rectangle_cavity(double width, double depth) {
  const double a = 0.5 * width;
  return {Vec2(-a, 0.0), Vec2(-a, -depth), Vec2(a, -depth), Vec2(a, 0.0)};
}

Polygon box(double x0, double y0, double x1, double y1) {
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

Scenario example1(bool lossy) {
  Scenario s;
  s.polarization = Polarization::TM;
  s.kappa0 = 32.0 * pi;
  const double lambda = s.wavelength();
  s.theta = pi / 4;
  s.cavity = rectangle_cavity(lambda, 0.25 * lambda);
  if (lossy) s.materials.push_back({s.cavity, cplx(4.0, 1.0), cplx(1.0, 0.0)});
  s.R = 0.5 * lambda;
  s.rho = 3.0 * s.R;
  return s;
}

Scenario example2() {
  Scenario s;
  s.polarization = Polarization::TM;
  s.kappa0 = 32.0 * pi;
  const double lambda = s.wavelength();
  s.theta = pi / 4;
  const double a = 1.2 * lambda;
  const double depth = 1.6 * lambda;
  const double t = 0.024 * lambda;
  s.cavity = rectangle_cavity(2.0 * a, depth);
  const cplx eps(12.0, 0.144), mu(1.74, 3.306);
  s.materials.push_back({box(-a, -depth, -a + t, 0.0), eps, mu});
  s.materials.push_back({box(a - t, -depth, a, 0.0), eps, mu});
  s.R = a;
  s.rho = 3.0 * s.R;
  return s;
}

Scenario example3() {
  Scenario s;
  s.polarization = Polarization::TM;
  s.kappa0 = 32.0 * pi;
  const double lambda = s.wavelength();
  s.theta = pi / 4;
  const double a = 0.6 * lambda;
  const double depth = 0.8 * lambda;
  s.cavity = rectangle_cavity(2.0 * a, depth);
  const double w = lambda / 20.0;
  const double xc = 0.2 * lambda;
  s.protrusions.push_back(box(-xc - w / 2, -depth, -xc + w / 2, -depth + 16.0 / 15.0 * lambda));
  s.protrusions.push_back(box(xc - w / 2, -depth, xc + w / 2, -depth + 8.0 / 15.0 * lambda));
  s.R = a;
  s.rho = 3.0 * s.R;
  return s;
}

Scenario example4() {
  Scenario s;
  s.polarization = Polarization::TE;
  s.kappa0 = 2.0 * pi * 2e9 / kSpeedOfLight;
  s.theta = 4.0 * pi / 9.0;
  s.cavity = rectangle_cavity(0.025, 0.015);
  s.R = 0.0125;
  s.rho = 3.0 * s.R;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"example1_empty", "example1_lossy", "example2_coated", "example3_humps", "example4_sweep"};
}

Scenario preset(std::string_view name) {
  Scenario s;
  if (name == "example1_empty") {
    s = example1(false);
  } else if (name == "example1_lossy") {
    s = example1(true);
  } else if (name == "example2_coated") {
    s = example2();
  } else if (name == "example3_humps") {
    s = example3();
  } else if (name == "example4_sweep") {
    s = example4();
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + std::string(name) + "'; available: " + list);
  }
  validate(s);
  return s;
}

Scenario flat_ground(Polarization pol, double kappa0, double theta, double R_over_lambda) {
  Scenario s;
  s.polarization = pol;
  s.kappa0 = kappa0;
  s.theta = theta;
  s.R = R_over_lambda * s.wavelength();
  s.rho = 3.0 * s.R;
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Coefficients and reference field

int material_at(const Scenario& s, const Vec2& p) {
  for (std::size_t k = 0; k < s.materials.size(); ++k) {
    if (point_in_polygon(s.materials[k].region, p)) return int(k);
  }
  return -1;
}

cplx material_wavenumber(const Scenario& s, int material) {
  if (material < 0) return s.kappa0;
  const auto& m = s.materials.at(material);
  return s.kappa0 * std::sqrt(m.epsilon_rel * m.mu_rel);
}

cplx wavenumber(const Scenario& s, const Vec2& p) { return material_wavenumber(s, material_at(s, p)); }

ReferenceJet reference_jet(const Scenario& s, const Vec2& p) {
  const double k1 = s.kappa0 * std::sin(s.theta);
  const double k2 = s.kappa0 * std::cos(s.theta);
  const double sign = s.polarization == Polarization::TM ? -1.0 : 1.0;
  const cplx i(0.0, 1.0);
  const Eigen::Vector2d ki(k1, -k2), kr(k1, k2);
  const cplx ei = std::exp(i * ki.dot(p));
  const cplx er = sign * std::exp(i * kr.dot(p));
  ReferenceJet j;
  j.value = ei + er;
  j.gradient = i * (ki.cast<cplx>() * ei + kr.cast<cplx>() * er);
  j.hessian = -(ki * ki.transpose()).cast<cplx>() * ei - (kr * kr.transpose()).cast<cplx>() * er;
  return j;
}

ReferenceValue reference_field(const Scenario& s, const Vec2& p) {
  const auto j = reference_jet(s, p);
  return {j.value, j.gradient};
}

}  // namespace cavity
