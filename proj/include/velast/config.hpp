#pragma once

// Run configuration: strict flat "section.key = value" text files, built-in
// scenario presets, and mesh construction from either a file or a
// structured-square description.

#include <set>
#include <string>
#include <vector>

#include "velast/mesh.hpp"
#include "velast/stepper.hpp"

namespace velast {

struct MeshSpec {
  std::string file;  // mesh file path; empty = structured unit square
  int nx = 16;
  int ny = 16;
  std::set<Side> dirichlet_sides = {Side::left};
};

struct OutputConfig {
  std::string directory = ".";
  int snapshot_every = 0;  // 0 = no field snapshots
  std::string csv_name = "series.csv";
};

struct RunConfig {
  MeshSpec mesh;
  SimConfig sim;
  OutputConfig output;
  std::string scenario;  // preset name, or empty
};

// Built-in presets ("equilibrium", "beat", "crush", "mms-linear"); they fix
// loads, mesh and horizon in code and remain overridable by config keys.
bool is_preset(const std::string& name);
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Parses, applies defaults and validates. Lines are "section.key = value";
// '#' starts a comment; unknown keys are errors. A "scenario.name" key
// seeds the whole config from that preset before the other keys apply.
// Throws ConfigError carrying the offending key and reason.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Loads mesh.file when set, otherwise builds the structured square.
Mesh build_mesh(const MeshSpec& spec);

}  // namespace velast
