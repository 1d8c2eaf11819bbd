#pragma once

// Icosahedral sphere triangulations and their radial extrusion into columns
// of triangular prisms covering the spherical annulus a <= |x| <= a + H.

#include <array>
#include <vector>

#include <Eigen/Core>

namespace hedgehog {

using Vec3 = Eigen::Vector3d;

struct MeshConfig {
  double inner_radius = 1.0;
  double thickness = 1.0;
  int refinement_level = 0;
  int n_layers = 1;

  double outer_radius() const { return inner_radius + thickness; }

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// Geodesic triangulation of the sphere of radius `radius`. Triangles are
/// counter-clockwise when seen from outside. Local edge i of a triangle is the
/// edge opposite its local vertex i.
struct BaseSphereMesh {
  double radius = 1.0;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;  // ascending vertex indices
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::array<int, 2>> edge_triangles;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  int euler_characteristic() const { return n_vertices() - n_edges() + n_triangles(); }

  /// Sum of the areas of the flat triangles.
  double chordal_area() const;
};

BaseSphereMesh build_icosahedral_sphere(int refinement_level, double radius);

/// Columnar prism mesh. Cells are numbered column-major: the cells of column
/// (base triangle) t are t * L, ..., t * L + L - 1 from bottom to top. Vertex
/// (base vertex v, interface l) sits at layer_radii[l] * v / |v|.
class ExtrudedMesh {
public:
  ExtrudedMesh() = default;
  ExtrudedMesh(BaseSphereMesh base, std::vector<double> layer_radii);

  const BaseSphereMesh& base() const { return base_; }
  const std::vector<double>& layer_radii() const { return layer_radii_; }

  double inner_radius() const { return layer_radii_.front(); }
  double outer_radius() const { return layer_radii_.back(); }
  double thickness() const { return outer_radius() - inner_radius(); }

  int n_layers() const { return static_cast<int>(layer_radii_.size()) - 1; }
  int n_columns() const { return base_.n_triangles(); }
  int n_cells() const { return n_columns() * n_layers(); }
  int n_vertices() const { return base_.n_vertices() * (n_layers() + 1); }

  int cell_index(int column, int layer) const { return column * n_layers() + layer; }
  int column_of(int cell) const { return cell / n_layers(); }
  int layer_of(int cell) const { return cell % n_layers(); }

  int vertex_index(int base_vertex, int interface) const {
    return base_vertex * (n_layers() + 1) + interface;
  }
  Vec3 vertex(int base_vertex, int interface) const;
  Vec3 vertex(int index) const {
    return vertex(index / (n_layers() + 1), index % (n_layers() + 1));
  }

  /// Prism nodes: 0..2 on the bottom interface, 3..5 on the top, node i + 3
  /// above node i, both following the base triangle's vertex order.
  std::array<int, 6> cell_vertices(int cell) const;
  std::array<Vec3, 6> cell_coordinates(int cell) const;

  /// Base vertex index of each prism node.
  std::array<int, 3> cell_base_vertices(int cell) const {
    return base_.triangles[static_cast<std::size_t>(column_of(cell))];
  }

private:
  BaseSphereMesh base_;
  std::vector<double> layer_radii_;
};

/// Uniform layers r_l = a + l * H / n_layers where a is the base radius.
ExtrudedMesh extrude_radial(BaseSphereMesh base, int n_layers, double thickness);

ExtrudedMesh build_extruded_mesh(const MeshConfig& config);

enum class FacetKind { inner_boundary, outer_boundary, interior_horizontal, interior_vertical };

// Local facet numbering of the reference prism: 0 bottom, 1 top, 2 + i the
// quadrilateral over triangle edge i.
inline constexpr int kBottomFacet = 0;
inline constexpr int kTopFacet = 1;
inline constexpr int quad_facet(int edge) { return 2 + edge; }

struct Facet {
  FacetKind kind{};
  /// cells[0] < cells[1]; cells[1] == -1 on the boundary. The global facet
  /// normal points out of cells[0].
  std::array<int, 2> cells{-1, -1};
  std::array<int, 2> local_facets{-1, -1};
  /// Base triangle for horizontal facets, base edge for vertical ones.
  int base_entity = -1;
  /// Interface index for horizontal facets, layer for vertical ones.
  int level = -1;

  bool is_boundary() const { return cells[1] < 0; }
  bool is_horizontal() const { return kind != FacetKind::interior_vertical; }
};

struct FacetSet {
  std::vector<Facet> facets;
  std::vector<int> inner_boundary;
  std::vector<int> outer_boundary;
  std::vector<int> interior_horizontal;
  std::vector<int> interior_vertical;
  std::vector<std::array<int, 5>> cell_facets;

  int n_facets() const { return static_cast<int>(facets.size()); }
  const Facet& facet(int index) const { return facets[static_cast<std::size_t>(index)]; }

  /// +1 when `cell` is the cell the global normal points out of, -1 otherwise.
  int orientation(int facet_index, int cell) const {
    return facet(facet_index).cells[0] == cell ? 1 : -1;
  }
};

/// Throws std::runtime_error on inconsistent topology (an edge without exactly
/// two adjacent base triangles).
FacetSet classify_facets(const ExtrudedMesh& mesh);

}  // namespace hedgehog
