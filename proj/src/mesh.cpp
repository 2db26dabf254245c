#include "velast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace velast {

namespace {

struct TokenStream {
  explicit TokenStream(std::istream& in) : in_(in) {}

  // Next whitespace-separated token, skipping '#' comments. Returns false at
  // end of input.
  bool next(std::string& tok) {
    while (true) {
      if (pos_ >= line_.size()) {
        if (!std::getline(in_, line_)) return false;
        ++line_number_;
        if (auto hash = line_.find('#'); hash != std::string::npos)
          line_.erase(hash);
        pos_ = 0;
        continue;
      }
      while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
        ++pos_;
      if (pos_ >= line_.size()) continue;
      size_t start = pos_;
      while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_])))
        ++pos_;
      tok = line_.substr(start, pos_ - start);
      return true;
    }
  }

  std::string require(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_number_, std::string("expected ") + what + ", got end of input");
    return tok;
  }

  long require_int(const char* what) {
    const std::string tok = require(what);
    size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(line_number_, std::string("expected integer ") + what + ", got '" + tok + "'");
    }
    if (used != tok.size())
      throw ParseError(line_number_, std::string("expected integer ") + what + ", got '" + tok + "'");
    return v;
  }

  double require_real(const char* what) {
    const std::string tok = require(what);
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(line_number_, std::string("expected number ") + what + ", got '" + tok + "'");
    }
    if (used != tok.size())
      throw ParseError(line_number_, std::string("expected number ") + what + ", got '" + tok + "'");
    return v;
  }

  int line_number() const { return line_number_; }

 private:
  std::istream& in_;
  std::string line_;
  size_t pos_ = 0;
  int line_number_ = 0;
};

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a, v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_mesh(Mesh& mesh) {
  const int n_nodes = static_cast<int>(mesh.nodes.size());
  if (n_nodes < 3) throw ValidationError("mesh needs at least 3 nodes");
  for (const auto& p : mesh.nodes)
    if (!p.allFinite()) throw ValidationError("non-finite node coordinate");

  struct EdgeUse {
    int count = 0;
    int triangle = -1;
    int opposite = -1;
  };
  std::map<EdgeKey, EdgeUse> edge_use;

  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri)
      if (v < 0 || v >= n_nodes)
        throw ValidationError("triangle " + std::to_string(t + 1) +
                              ": node index out of range");
    const double area =
        signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    if (!(area > 0.0))
      throw ValidationError("triangle " + std::to_string(t + 1) +
                            ": negative area (clockwise or degenerate)");
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3], c = tri[(k + 2) % 3];
      auto& use = edge_use[key(a, b)];
      ++use.count;
      if (use.count > 2)
        throw ValidationError("non-manifold edge shared by > 2 triangles");
      use.triangle = static_cast<int>(t);
      use.opposite = c;
    }
  }

  // Edges used by exactly one triangle form the topological boundary; the
  // tagged list must tile it exactly.
  std::map<EdgeKey, EdgeUse> boundary;
  for (const auto& [k, use] : edge_use)
    if (use.count == 1) boundary[k] = use;

  mesh.edge_triangle.assign(mesh.boundary_edges.size(), -1);
  mesh.edge_opposite_node.assign(mesh.boundary_edges.size(), -1);
  std::set<EdgeKey> seen;
  int n_dirichlet = 0, n_neumann = 0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.a < 0 || be.a >= n_nodes || be.b < 0 || be.b >= n_nodes)
      throw ValidationError("boundary edge " + std::to_string(e + 1) +
                            ": node index out of range");
    if (be.tag != 'D' && be.tag != 'N')
      throw ValidationError("boundary edge " + std::to_string(e + 1) +
                            ": tag must be D or N");
    const EdgeKey k = key(be.a, be.b);
    auto it = boundary.find(k);
    if (it == boundary.end())
      throw ValidationError("boundary edge " + std::to_string(e + 1) +
                            ": not a topological boundary edge");
    if (!seen.insert(k).second)
      throw ValidationError("boundary edge " + std::to_string(e + 1) +
                            ": duplicate");
    mesh.edge_triangle[e] = it->second.triangle;
    mesh.edge_opposite_node[e] = it->second.opposite;
    (be.tag == 'D' ? n_dirichlet : n_neumann)++;
  }
  if (seen.size() != boundary.size())
    throw ValidationError("boundary not covered by tagged edges");
  if (n_dirichlet == 0) throw ValidationError("no Dirichlet (D) edges");
  if (n_neumann == 0) throw ValidationError("no Neumann (N) edges");
}

Mesh load_mesh(std::istream& in) {
  TokenStream ts(in);
  Mesh mesh;
  std::string tok;

  bool saw_nodes = false, saw_triangles = false, saw_edges = false, saw_end = false;
  while (ts.next(tok)) {
    if (saw_end)
      throw ParseError(ts.line_number(), "content after $End");
    if (tok == "$Nodes") {
      if (saw_nodes) throw ParseError(ts.line_number(), "repeated $Nodes");
      saw_nodes = true;
      const long n = ts.require_int("node count");
      if (n < 0) throw ParseError(ts.line_number(), "negative node count");
      mesh.nodes.resize(n);
      for (long i = 0; i < n; ++i) {
        const long id = ts.require_int("node id");
        if (id != i + 1)
          throw ParseError(ts.line_number(),
                           "node ids must be 1..N in order, got " + std::to_string(id));
        const double x = ts.require_real("x");
        const double y = ts.require_real("y");
        mesh.nodes[i] = {x, y};
      }
    } else if (tok == "$Triangles") {
      if (!saw_nodes) throw ParseError(ts.line_number(), "$Triangles before $Nodes");
      if (saw_triangles) throw ParseError(ts.line_number(), "repeated $Triangles");
      saw_triangles = true;
      const long m = ts.require_int("triangle count");
      if (m < 0) throw ParseError(ts.line_number(), "negative triangle count");
      mesh.triangles.resize(m);
      for (long i = 0; i < m; ++i) {
        const long id = ts.require_int("triangle id");
        if (id != i + 1)
          throw ParseError(ts.line_number(), "triangle ids must be 1..M in order");
        for (int k = 0; k < 3; ++k)
          mesh.triangles[i][k] = static_cast<int>(ts.require_int("node index")) - 1;
      }
    } else if (tok == "$BoundaryEdges") {
      if (!saw_triangles)
        throw ParseError(ts.line_number(), "$BoundaryEdges before $Triangles");
      if (saw_edges) throw ParseError(ts.line_number(), "repeated $BoundaryEdges");
      saw_edges = true;
      const long k = ts.require_int("edge count");
      if (k < 0) throw ParseError(ts.line_number(), "negative edge count");
      mesh.boundary_edges.resize(k);
      for (long i = 0; i < k; ++i) {
        const long id = ts.require_int("edge id");
        if (id != i + 1)
          throw ParseError(ts.line_number(), "edge ids must be 1..K in order");
        mesh.boundary_edges[i].a = static_cast<int>(ts.require_int("node index")) - 1;
        mesh.boundary_edges[i].b = static_cast<int>(ts.require_int("node index")) - 1;
        const std::string tag = ts.require("edge tag");
        if (tag != "D" && tag != "N")
          throw ParseError(ts.line_number(), "edge tag must be D or N, got '" + tag + "'");
        mesh.boundary_edges[i].tag = tag[0];
      }
    } else if (tok == "$End") {
      if (!saw_edges) throw ParseError(ts.line_number(), "$End before $BoundaryEdges");
      saw_end = true;
    } else {
      throw ParseError(ts.line_number(), "unknown section '" + tok + "'");
    }
  }
  if (!saw_end) throw ParseError(ts.line_number(), "missing $End");

  validate_mesh(mesh);
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return load_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  out << "$Nodes " << mesh.nodes.size() << "\n";
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i + 1 << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << "\n";
  out << "$Triangles " << mesh.triangles.size() << "\n";
  for (size_t i = 0; i < mesh.triangles.size(); ++i)
    out << i + 1 << " " << mesh.triangles[i][0] + 1 << " "
        << mesh.triangles[i][1] + 1 << " " << mesh.triangles[i][2] + 1 << "\n";
  out << "$BoundaryEdges " << mesh.boundary_edges.size() << "\n";
  for (size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    out << i + 1 << " " << mesh.boundary_edges[i].a + 1 << " "
        << mesh.boundary_edges[i].b + 1 << " " << mesh.boundary_edges[i].tag
        << "\n";
  out << "$End\n";
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
}

Mesh structured_square_mesh(int nx, int ny,
                            const std::set<Side>& dirichlet_sides) {
  if (nx < 1 || ny < 1) throw InvalidArgument("structured mesh needs nx, ny >= 1");
  if (dirichlet_sides.empty())
    throw InvalidArgument("at least one side must be clamped");
  if (dirichlet_sides.size() == 4)
    throw InvalidArgument("clamping all four sides leaves no traction boundary");

  Mesh mesh;
  const auto idx = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.nodes.resize((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes[idx(i, j)] = {static_cast<double>(i) / nx,
                               static_cast<double>(j) / ny};

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = idx(i, j), n10 = idx(i + 1, j);
      const int n11 = idx(i + 1, j + 1), n01 = idx(i, j + 1);
      mesh.triangles.push_back({n00, n10, n11});
      mesh.triangles.push_back({n00, n11, n01});
    }
  }

  const auto tag_of = [&](Side s) {
    return dirichlet_sides.count(s) ? 'D' : 'N';
  };
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({idx(i, 0), idx(i + 1, 0), tag_of(Side::bottom)});
    mesh.boundary_edges.push_back({idx(i, ny), idx(i + 1, ny), tag_of(Side::top)});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({idx(0, j), idx(0, j + 1), tag_of(Side::left)});
    mesh.boundary_edges.push_back({idx(nx, j), idx(nx, j + 1), tag_of(Side::right)});
  }

  validate_mesh(mesh);
  return mesh;
}

double triangle_area(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
}

double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    a += triangle_area(mesh, static_cast<int>(t));
  return a;
}

double edge_length(const Mesh& mesh, int e) {
  const auto& be = mesh.boundary_edges[e];
  return (mesh.nodes[be.b] - mesh.nodes[be.a]).norm();
}

Eigen::Vector2d edge_midpoint(const Mesh& mesh, int e) {
  const auto& be = mesh.boundary_edges[e];
  return 0.5 * (mesh.nodes[be.a] + mesh.nodes[be.b]);
}

Eigen::Vector2d edge_normal(const Mesh& mesh, int e) {
  const auto& be = mesh.boundary_edges[e];
  const Eigen::Vector2d a = mesh.nodes[be.a], b = mesh.nodes[be.b];
  Eigen::Vector2d n(b.y() - a.y(), a.x() - b.x());
  n.normalize();
  // orient away from the opposite vertex of the adjacent triangle
  const Eigen::Vector2d c = mesh.nodes[mesh.edge_opposite_node[e]];
  if (n.dot(c - a) > 0.0) n = -n;
  return n;
}

double neumann_measure(const Mesh& mesh) {
  double len = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    if (mesh.boundary_edges[e].tag == 'N')
      len += edge_length(mesh, static_cast<int>(e));
  return len;
}

}  // namespace velast
