#include "velast/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "velast/assembly.hpp"
#include "velast/kinematics.hpp"

namespace velast {

void write_snapshot(const Mesh& mesh, const State& state, std::ostream& out) {
  const size_t n = mesh.nodes.size();
  const size_t m = mesh.triangles.size();
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "velast snapshot t=" << state.t << " pressure=" << state.p << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << n << " double\n";
  for (const auto& x : mesh.nodes) out << x.x() << ' ' << x.y() << " 0\n";

  out << "CELLS " << m << ' ' << 4 * m << "\n";
  for (const auto& tri : mesh.triangles)
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << "\n";
  out << "CELL_TYPES " << m << "\n";
  for (size_t t = 0; t < m; ++t) out << "5\n";

  out << "POINT_DATA " << n << "\n";
  out << "VECTORS displacement double\n";
  for (size_t i = 0; i < n; ++i)
    out << state.u(2 * i) << ' ' << state.u(2 * i + 1) << " 0\n";
  out << "VECTORS velocity double\n";
  for (size_t i = 0; i < n; ++i)
    out << state.v(2 * i) << ' ' << state.v(2 * i + 1) << " 0\n";

  out << "CELL_DATA " << m << "\n";
  out << "SCALARS det_phi double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (size_t t = 0; t < m; ++t) {
    const Mat2 phi = deformation_gradient(
        Mat2(element_grad(mesh, static_cast<int>(t), state.u)));
    out << phi.determinant() << "\n";
  }
}

void write_snapshot(const Mesh& mesh, const State& state,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot file '" + path + "'");
  write_snapshot(mesh, state, out);
  out.flush();
  if (!out) throw std::runtime_error("error writing snapshot file '" + path + "'");
}

}  // namespace velast
