#include "velast/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "velast/errors.hpp"

namespace velast {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size())
      throw ConfigError(key + ": trailing characters after number '" + value +
                        "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int x = std::stoi(value, &used);
    if (used != value.size())
      throw ConfigError(key + ": trailing characters after integer '" + value +
                        "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

Side parse_side(const std::string& key, const std::string& name) {
  if (name == "left") return Side::left;
  if (name == "right") return Side::right;
  if (name == "bottom") return Side::bottom;
  if (name == "top") return Side::top;
  throw ConfigError(key + ": unknown side '" + name +
                    "' (expected left, right, bottom or top)");
}

// The traction of the oscillating-load scenario; the cos(pi y) modulation
// makes the load exchange volume between boundary regions, which a globally
// uniform normal pressure cannot do on a volume-preserving body.
BoundaryFunction beat_traction() {
  return [](const Eigen::Vector2d& x, double t, const Eigen::Vector2d& n) {
    return Eigen::Vector2d(0.2 * std::sin(2.0 * kPi * t / 0.25) *
                           std::cos(kPi * x.y()) * n);
  };
}

BoundaryFunction crush_traction() {
  return [](const Eigen::Vector2d&, double t, const Eigen::Vector2d& n) {
    return t > 0.0 ? Eigen::Vector2d(-5e4 * n)
                   : Eigen::Vector2d(Eigen::Vector2d::Zero());
  };
}

// Loads manufactured from v(x, t) = (t sin(pi x), 0), p(t) = t with both
// vertical sides clamped; the discrete solution reproduces them to
// first/second order (velocity) and to roundoff (pressure).
VolumeFunction mms_body(double kappa) {
  return [kappa](const Eigen::Vector2d& x, double t) {
    return Eigen::Vector2d(
        (1.0 + kappa * kPi * kPi * t) * std::sin(kPi * x.x()), 0.0);
  };
}

BoundaryFunction mms_traction() {
  return [](const Eigen::Vector2d&, double t, const Eigen::Vector2d& n) {
    return Eigen::Vector2d(t * n);
  };
}

}  // namespace

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> preset_names() {
  return {"equilibrium", "beat", "crush", "mms-linear"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.scenario = name;
  if (name == "equilibrium") {
    cfg.mesh.nx = cfg.mesh.ny = 16;
    cfg.sim.t_end = 0.05;
  } else if (name == "beat") {
    cfg.mesh.nx = cfg.mesh.ny = 32;
    cfg.sim.t_end = 0.5;
    cfg.sim.g = beat_traction();
  } else if (name == "crush") {
    cfg.mesh.nx = cfg.mesh.ny = 32;
    cfg.sim.t_end = 0.5;
    cfg.sim.dt_min = 1e-5;
    cfg.sim.g = crush_traction();
  } else if (name == "mms-linear") {
    cfg.mesh.nx = cfg.mesh.ny = 16;
    cfg.mesh.dirichlet_sides = {Side::left, Side::right};
    cfg.sim.t_end = 0.1;
    cfg.sim.f = mms_body(cfg.sim.kappa);
    cfg.sim.g = mms_traction();
  } else {
    throw ConfigError("unknown scenario preset '" + name + "'");
  }
  return cfg;
}

namespace {

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "scenario.name") return;  // handled in the first pass

  if (key == "mesh.file") {
    cfg.mesh.file = value;
  } else if (key == "mesh.nx") {
    cfg.mesh.nx = parse_int(key, value);
  } else if (key == "mesh.ny") {
    cfg.mesh.ny = parse_int(key, value);
  } else if (key == "mesh.dirichlet") {
    cfg.mesh.dirichlet_sides.clear();
    for (const std::string& s : split_list(value))
      cfg.mesh.dirichlet_sides.insert(parse_side(key, s));
    if (cfg.mesh.dirichlet_sides.empty())
      throw ConfigError("mesh.dirichlet: needs at least one side");
  } else if (key == "sim.kappa") {
    cfg.sim.kappa = parse_double(key, value);
  } else if (key == "sim.dt") {
    cfg.sim.dt = parse_double(key, value);
  } else if (key == "sim.t_end") {
    cfg.sim.t_end = parse_double(key, value);
  } else if (key == "sim.fp_tol") {
    cfg.sim.fp_tol = parse_double(key, value);
  } else if (key == "sim.fp_max_iters") {
    cfg.sim.fp_max_iters = parse_int(key, value);
  } else if (key == "sim.dt_min") {
    cfg.sim.dt_min = parse_double(key, value);
  } else if (key == "sim.rho") {
    cfg.sim.rho = parse_double(key, value);
  } else if (key == "sim.newton_accel") {
    cfg.sim.newton_accel = parse_bool(key, value);
  } else if (key == "sim.constraint_mode") {
    if (value == "split_rhs" || value == "paper_split")
      cfg.sim.constraint_mode = ConstraintMode::split_rhs;
    else if (value == "frozen_geometry")
      cfg.sim.constraint_mode = ConstraintMode::frozen_geometry;
    else
      throw ConfigError(
          "sim.constraint_mode must be split_rhs or frozen_geometry, got '" +
          value + "'");
  } else if (key == "material.model") {
    if (value == "stvk")
      cfg.sim.material = StVK{};
    else if (value == "fung")
      cfg.sim.material = Fung{};
    else if (value == "ogden")
      cfg.sim.material = Ogden{{OgdenTerm{}}};
    else
      throw ConfigError("material.model must be stvk, fung or ogden, got '" +
                        value + "'");
  } else if (key == "material.mu") {
    auto* m = std::get_if<StVK>(&cfg.sim.material);
    if (!m) throw ConfigError("material.mu requires material.model = stvk");
    m->mu = parse_double(key, value);
  } else if (key == "material.lambda") {
    auto* m = std::get_if<StVK>(&cfg.sim.material);
    if (!m)
      throw ConfigError("material.lambda requires material.model = stvk");
    m->lambda = parse_double(key, value);
  } else if (key == "material.w0") {
    auto* m = std::get_if<Fung>(&cfg.sim.material);
    if (!m) throw ConfigError("material.w0 requires material.model = fung");
    m->w0 = parse_double(key, value);
  } else if (key == "material.beta") {
    auto* m = std::get_if<Fung>(&cfg.sim.material);
    if (!m) throw ConfigError("material.beta requires material.model = fung");
    m->beta = parse_double(key, value);
  } else if (key == "material.gamma") {
    auto* m = std::get_if<Fung>(&cfg.sim.material);
    if (!m)
      throw ConfigError("material.gamma requires material.model = fung");
    m->gamma = parse_double(key, value);
  } else if (key == "material.terms") {
    auto* m = std::get_if<Ogden>(&cfg.sim.material);
    if (!m)
      throw ConfigError("material.terms requires material.model = ogden");
    m->terms.clear();
    for (const std::string& item : split_list(value)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError(
            "material.terms: expected coeff:gamma pairs, got '" + item + "'");
      OgdenTerm term;
      term.coeff = parse_double(key, trim(item.substr(0, colon)));
      term.gamma = parse_double(key, trim(item.substr(colon + 1)));
      m->terms.push_back(term);
    }
  } else if (key == "output.directory") {
    cfg.output.directory = value;
  } else if (key == "output.snapshot_every") {
    cfg.output.snapshot_every = parse_int(key, value);
    if (cfg.output.snapshot_every < 0)
      throw ConfigError("output.snapshot_every must be >= 0");
  } else if (key == "output.csv_name") {
    cfg.output.csv_name = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos || key.empty())
      throw ConfigError("line " + std::to_string(line_no) +
                        ": keys take the form section.key, got '" + key + "'");
    entries.emplace_back(key, value);
  }

  RunConfig cfg;
  bool dt_min_given = false;
  for (const auto& [key, value] : entries) {
    if (key == "scenario.name") cfg = preset_config(value);
    if (key == "sim.dt_min") dt_min_given = true;
  }
  for (const auto& [key, value] : entries) apply_key(cfg, key, value);
  // The default floor follows an explicitly shrunk dt; an explicit floor
  // must stand on its own and is validated as given.
  if (!dt_min_given) cfg.sim.dt_min = std::min(cfg.sim.dt_min, cfg.sim.dt);
  cfg.sim.validate();
  if (cfg.mesh.file.empty() && (cfg.mesh.nx < 1 || cfg.mesh.ny < 1))
    throw ConfigError("mesh.nx and mesh.ny must be >= 1");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Mesh build_mesh(const MeshSpec& spec) {
  if (!spec.file.empty()) return load_mesh(spec.file);
  return structured_square_mesh(spec.nx, spec.ny, spec.dirichlet_sides);
}

}  // namespace velast
