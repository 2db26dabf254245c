#pragma once

// Field snapshots in legacy ASCII VTK (UNSTRUCTURED_GRID): node positions
// with z = 0, triangle cells, point vectors "displacement" and "velocity",
// and the per-cell scalar "det_phi" (determinant of the deformation
// gradient). The format is stable and library-free; any VTK viewer reads it.

#include <iosfwd>
#include <string>

#include "velast/mesh.hpp"
#include "velast/stepper.hpp"

namespace velast {

void write_snapshot(const Mesh& mesh, const State& state, std::ostream& out);

// Throws std::runtime_error naming the path when the file cannot be written.
void write_snapshot(const Mesh& mesh, const State& state,
                    const std::string& path);

}  // namespace velast
