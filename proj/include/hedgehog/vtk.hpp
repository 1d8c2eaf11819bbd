#pragma once

// Legacy ASCII VTK unstructured grids made of wedges (cell type 13).

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hedgehog/geometry.hpp"
#include "hedgehog/mesh.hpp"

namespace hedgehog {

inline constexpr int kVtkWedge = 13;

/// Wedge grid with connectivity in prism node order (bottom 0..2, top 3..5).
/// The VTK node permutation is applied on write and undone on read.
struct VtkGrid {
  std::string title;
  std::vector<Vec3> points;
  std::vector<std::array<int, 6>> cells;
  /// Written as CELL_DATA scalars "column".
  std::vector<int> column;
};

/// Annulus mesh with points shared between cells.
VtkGrid annulus_grid(const ExtrudedMesh& mesh);

/// Six points per cell taken from a discontinuous coordinate field.
VtkGrid hedgehog_grid(const ExtrudedMesh& mesh, const CoordinateField& coords);

void write_vtk(const VtkGrid& grid, std::ostream& out);
/// Throws std::runtime_error when the file cannot be written.
void write_vtk(const VtkGrid& grid, const std::filesystem::path& path);

/// Parses files produced by write_vtk. Throws std::runtime_error on
/// malformed input.
VtkGrid read_vtk(std::istream& in);
VtkGrid read_vtk(const std::filesystem::path& path);

}  // namespace hedgehog
