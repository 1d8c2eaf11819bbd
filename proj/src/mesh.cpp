#include "hedgehog/mesh.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Geometry>

namespace hedgehog {

void MeshConfig::validate() const {
  if (!(inner_radius > 0.0)) throw std::invalid_argument("inner radius must be positive");
  if (!(thickness > 0.0)) throw std::invalid_argument("thickness must be positive");
  if (refinement_level < 0) throw std::invalid_argument("refinement level must be >= 0");
  if (n_layers < 1) throw std::invalid_argument("number of layers must be >= 1");
}

double BaseSphereMesh::chordal_area() const {
  double area = 0.0;
  for (const auto& t : triangles) {
    const Vec3& p0 = vertices[static_cast<std::size_t>(t[0])];
    const Vec3& p1 = vertices[static_cast<std::size_t>(t[1])];
    const Vec3& p2 = vertices[static_cast<std::size_t>(t[2])];
    area += 0.5 * (p1 - p0).cross(p2 - p0).norm();
  }
  return area;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

void build_edges(BaseSphereMesh& mesh) {
  std::map<EdgeKey, int> lookup;
  mesh.edges.clear();
  mesh.edge_triangles.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  std::vector<int> adjacency_count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const EdgeKey key = edge_key(tri[static_cast<std::size_t>((i + 1) % 3)],
                                   tri[static_cast<std::size_t>((i + 2) % 3)]);
      auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({key.first, key.second});
        mesh.edge_triangles.push_back({-1, -1});
        adjacency_count.push_back(0);
      }
      const auto e = static_cast<std::size_t>(it->second);
      mesh.triangle_edges[t][static_cast<std::size_t>(i)] = it->second;
      if (adjacency_count[e] < 2) {
        mesh.edge_triangles[e][static_cast<std::size_t>(adjacency_count[e])] = static_cast<int>(t);
      }
      ++adjacency_count[e];
    }
  }
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    if (adjacency_count[e] != 2) {
      std::ostringstream msg;
      msg << "topology inconsistency: edge (" << mesh.edges[e][0] << ", " << mesh.edges[e][1]
          << ") has " << adjacency_count[e] << " adjacent triangles";
      throw std::runtime_error(msg.str());
    }
  }
}

BaseSphereMesh icosahedron(double radius) {
  const double t = 0.5 * (1.0 + std::sqrt(5.0));
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  BaseSphereMesh mesh;
  mesh.radius = radius;
  for (const auto& p : raw) {
    mesh.vertices.push_back(radius * Vec3(p[0], p[1], p[2]).normalized());
  }
  for (const auto& f : faces) {
    std::array<int, 3> tri{f[0], f[1], f[2]};
    const Vec3& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec3& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec3& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    if ((p1 - p0).cross(p2 - p0).dot(p0 + p1 + p2) < 0.0) std::swap(tri[1], tri[2]);
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

// Splits every triangle into four; new vertices are edge midpoints pushed out
// to the sphere. Orientation is inherited from the parent.
void subdivide(BaseSphereMesh& mesh) {
  std::map<EdgeKey, int> midpoints;
  auto midpoint = [&](int a, int b) {
    const EdgeKey key = edge_key(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const Vec3 m = mesh.vertices[static_cast<std::size_t>(a)] + mesh.vertices[static_cast<std::size_t>(b)];
    const int index = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(mesh.radius * m.normalized());
    midpoints.emplace(key, index);
    return index;
  };
  std::vector<std::array<int, 3>> refined;
  refined.reserve(4 * mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    const int ab = midpoint(tri[0], tri[1]);
    const int bc = midpoint(tri[1], tri[2]);
    const int ca = midpoint(tri[2], tri[0]);
    refined.push_back({tri[0], ab, ca});
    refined.push_back({tri[1], bc, ab});
    refined.push_back({tri[2], ca, bc});
    refined.push_back({ab, bc, ca});
  }
  mesh.triangles = std::move(refined);
}

}  // namespace

BaseSphereMesh build_icosahedral_sphere(int refinement_level, double radius) {
  if (refinement_level < 0) throw std::invalid_argument("refinement level must be >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  BaseSphereMesh mesh = icosahedron(radius);
  for (int r = 0; r < refinement_level; ++r) subdivide(mesh);
  build_edges(mesh);
  return mesh;
}

ExtrudedMesh::ExtrudedMesh(BaseSphereMesh base, std::vector<double> layer_radii)
    : base_(std::move(base)), layer_radii_(std::move(layer_radii)) {
  if (layer_radii_.size() < 2) throw std::invalid_argument("extruded mesh needs at least one layer");
  for (std::size_t l = 1; l < layer_radii_.size(); ++l) {
    if (!(layer_radii_[l] > layer_radii_[l - 1])) {
      throw std::invalid_argument("layer radii must be strictly increasing");
    }
  }
}

Vec3 ExtrudedMesh::vertex(int base_vertex, int interface) const {
  const Vec3& v = base_.vertices[static_cast<std::size_t>(base_vertex)];
  return layer_radii_[static_cast<std::size_t>(interface)] * v.normalized();
}

std::array<int, 6> ExtrudedMesh::cell_vertices(int cell) const {
  const auto tri = cell_base_vertices(cell);
  const int layer = layer_of(cell);
  std::array<int, 6> nodes{};
  for (std::size_t i = 0; i < 3; ++i) {
    nodes[i] = vertex_index(tri[i], layer);
    nodes[i + 3] = vertex_index(tri[i], layer + 1);
  }
  return nodes;
}

std::array<Vec3, 6> ExtrudedMesh::cell_coordinates(int cell) const {
  const auto tri = cell_base_vertices(cell);
  const int layer = layer_of(cell);
  std::array<Vec3, 6> coords;
  for (std::size_t i = 0; i < 3; ++i) {
    coords[i] = vertex(tri[i], layer);
    coords[i + 3] = vertex(tri[i], layer + 1);
  }
  return coords;
}

ExtrudedMesh extrude_radial(BaseSphereMesh base, int n_layers, double thickness) {
  if (n_layers < 1) throw std::invalid_argument("number of layers must be >= 1");
  if (!(thickness > 0.0)) throw std::invalid_argument("thickness must be positive");
  const double a = base.radius;
  std::vector<double> radii(static_cast<std::size_t>(n_layers) + 1);
  for (int l = 0; l <= n_layers; ++l) {
    radii[static_cast<std::size_t>(l)] = a + thickness * static_cast<double>(l) / n_layers;
  }
  radii.back() = a + thickness;
  return ExtrudedMesh(std::move(base), std::move(radii));
}

ExtrudedMesh build_extruded_mesh(const MeshConfig& config) {
  config.validate();
  return extrude_radial(build_icosahedral_sphere(config.refinement_level, config.inner_radius),
                        config.n_layers, config.thickness);
}

FacetSet classify_facets(const ExtrudedMesh& mesh) {
  const BaseSphereMesh& base = mesh.base();
  const int L = mesh.n_layers();
  FacetSet set;
  set.cell_facets.assign(static_cast<std::size_t>(mesh.n_cells()), {-1, -1, -1, -1, -1});

  auto add = [&](Facet f) {
    const int index = set.n_facets();
    for (int side = 0; side < 2; ++side) {
      const int c = f.cells[static_cast<std::size_t>(side)];
      if (c < 0) continue;
      int& slot = set.cell_facets[static_cast<std::size_t>(c)][static_cast<std::size_t>(f.local_facets[static_cast<std::size_t>(side)])];
      if (slot != -1) throw std::runtime_error("topology inconsistency: cell facet assigned twice");
      slot = index;
    }
    switch (f.kind) {
      case FacetKind::inner_boundary: set.inner_boundary.push_back(index); break;
      case FacetKind::outer_boundary: set.outer_boundary.push_back(index); break;
      case FacetKind::interior_horizontal: set.interior_horizontal.push_back(index); break;
      case FacetKind::interior_vertical: set.interior_vertical.push_back(index); break;
    }
    set.facets.push_back(f);
  };

  for (int t = 0; t < base.n_triangles(); ++t) {
    for (int l = 0; l <= L; ++l) {
      Facet f;
      f.base_entity = t;
      f.level = l;
      if (l == 0) {
        f.kind = FacetKind::inner_boundary;
        f.cells = {mesh.cell_index(t, 0), -1};
        f.local_facets = {kBottomFacet, -1};
      } else if (l == L) {
        f.kind = FacetKind::outer_boundary;
        f.cells = {mesh.cell_index(t, L - 1), -1};
        f.local_facets = {kTopFacet, -1};
      } else {
        f.kind = FacetKind::interior_horizontal;
        f.cells = {mesh.cell_index(t, l - 1), mesh.cell_index(t, l)};
        f.local_facets = {kTopFacet, kBottomFacet};
      }
      add(f);
    }
  }

  for (int e = 0; e < base.n_edges(); ++e) {
    const auto& tris = base.edge_triangles[static_cast<std::size_t>(e)];
    if (tris[0] < 0 || tris[1] < 0 || tris[0] == tris[1]) {
      std::ostringstream msg;
      msg << "topology inconsistency: edge " << e << " is not shared by two distinct triangles";
      throw std::runtime_error(msg.str());
    }
    std::array<int, 2> local_edge{-1, -1};
    for (std::size_t side = 0; side < 2; ++side) {
      const auto& te = base.triangle_edges[static_cast<std::size_t>(tris[side])];
      for (int i = 0; i < 3; ++i) {
        if (te[static_cast<std::size_t>(i)] == e) local_edge[side] = i;
      }
      if (local_edge[side] < 0) throw std::runtime_error("topology inconsistency: edge incidence");
    }
    const bool swap = tris[0] > tris[1];
    for (int l = 0; l < L; ++l) {
      Facet f;
      f.kind = FacetKind::interior_vertical;
      f.base_entity = e;
      f.level = l;
      f.cells = {mesh.cell_index(tris[0], l), mesh.cell_index(tris[1], l)};
      f.local_facets = {quad_facet(local_edge[0]), quad_facet(local_edge[1])};
      if (swap) {
        std::swap(f.cells[0], f.cells[1]);
        std::swap(f.local_facets[0], f.local_facets[1]);
      }
      add(f);
    }
  }

  for (std::size_t c = 0; c < set.cell_facets.size(); ++c) {
    for (int slot : set.cell_facets[c]) {
      if (slot < 0) {
        std::ostringstream msg;
        msg << "topology inconsistency: cell " << c << " has an unassigned facet";
        throw std::runtime_error(msg.str());
      }
    }
  }
  return set;
}

}  // namespace hedgehog
