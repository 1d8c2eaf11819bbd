#include "hedgehog/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hedgehog {

namespace {

// VTK wants the normal of face (0, 1, 2) to point towards (3, 4, 5); the
// base triangles are counter-clockwise seen from outside.
constexpr std::array<int, 6> kWedgeOrder{0, 2, 1, 3, 5, 4};

std::runtime_error parse_error(const std::string& what) {
  return std::runtime_error("read_vtk: " + what);
}

void expect(std::istream& in, const std::string& token) {
  std::string t;
  if (!(in >> t) || t != token) throw parse_error("expected '" + token + "', found '" + t + "'");
}

}  // namespace

VtkGrid annulus_grid(const ExtrudedMesh& mesh) {
  VtkGrid g;
  g.title = "annulus mesh";
  g.points.reserve(static_cast<std::size_t>(mesh.n_vertices()));
  for (int v = 0; v < mesh.n_vertices(); ++v) g.points.push_back(mesh.vertex(v));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    g.cells.push_back(mesh.cell_vertices(c));
    g.column.push_back(mesh.column_of(c));
  }
  return g;
}

VtkGrid hedgehog_grid(const ExtrudedMesh& mesh, const CoordinateField& coords) {
  if (coords.n_cells() != mesh.n_cells()) {
    throw std::invalid_argument("hedgehog_grid: coordinate field does not match the mesh");
  }
  VtkGrid g;
  g.title = "hedgehog mesh";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    std::array<int, 6> ids{};
    for (std::size_t i = 0; i < 6; ++i) {
      ids[i] = static_cast<int>(g.points.size());
      g.points.push_back(coords.cell(c)[i]);
    }
    g.cells.push_back(ids);
    g.column.push_back(mesh.column_of(c));
  }
  return g;
}

void write_vtk(const VtkGrid& grid, std::ostream& out) {
  out << "# vtk DataFile Version 3.0\n" << grid.title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << grid.points.size() << " double\n" << std::setprecision(17);
  for (const Vec3& p : grid.points) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  out << "CELLS " << grid.cells.size() << ' ' << 7 * grid.cells.size() << '\n';
  for (const auto& c : grid.cells) {
    out << 6;
    for (int i : kWedgeOrder) out << ' ' << c[static_cast<std::size_t>(i)];
    out << '\n';
  }
  out << "CELL_TYPES " << grid.cells.size() << '\n';
  for (std::size_t i = 0; i < grid.cells.size(); ++i) out << kVtkWedge << '\n';
  if (!grid.column.empty()) {
    out << "CELL_DATA " << grid.cells.size() << "\nSCALARS column int 1\nLOOKUP_TABLE default\n";
    for (int c : grid.column) out << c << '\n';
  }
}

void write_vtk(const VtkGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_vtk(grid, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

VtkGrid read_vtk(std::istream& in) {
  VtkGrid g;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw parse_error("missing header");
  std::getline(in, g.title);
  expect(in, "ASCII");
  expect(in, "DATASET");
  expect(in, "UNSTRUCTURED_GRID");
  expect(in, "POINTS");
  std::size_t n = 0;
  std::string type;
  if (!(in >> n >> type)) throw parse_error("bad POINTS line");
  g.points.resize(n);
  for (auto& p : g.points) {
    if (!(in >> p[0] >> p[1] >> p[2])) throw parse_error("truncated POINTS");
  }
  expect(in, "CELLS");
  std::size_t nc = 0, size = 0;
  if (!(in >> nc >> size)) throw parse_error("bad CELLS line");
  g.cells.resize(nc);
  for (auto& c : g.cells) {
    int k = 0;
    std::array<int, 6> raw{};
    if (!(in >> k) || k != 6) throw parse_error("only wedge cells are supported");
    for (int& v : raw) {
      if (!(in >> v)) throw parse_error("truncated CELLS");
    }
    for (std::size_t i = 0; i < 6; ++i) c[static_cast<std::size_t>(kWedgeOrder[i])] = raw[i];
  }
  expect(in, "CELL_TYPES");
  std::size_t nt = 0;
  if (!(in >> nt) || nt != nc) throw parse_error("CELL_TYPES count mismatch");
  for (std::size_t i = 0; i < nt; ++i) {
    int t = 0;
    if (!(in >> t) || t != kVtkWedge) throw parse_error("unexpected cell type");
  }
  std::string token;
  if (in >> token) {
    if (token != "CELL_DATA") throw parse_error("unexpected section '" + token + "'");
    std::size_t nd = 0;
    in >> nd;
    expect(in, "SCALARS");
    std::string name, dtype;
    int ncomp = 0;
    in >> name >> dtype >> ncomp;
    expect(in, "LOOKUP_TABLE");
    in >> token;
    g.column.resize(nd);
    for (int& v : g.column) {
      if (!(in >> v)) throw parse_error("truncated CELL_DATA");
    }
  }
  return g;
}

VtkGrid read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_vtk(in);
}

}  // namespace hedgehog
