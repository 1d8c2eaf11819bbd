#pragma once

// The map between the extruded sphere S^2(a) x [0, H] in R^4 and the annulus
// in R^3, column-wise hedgehog coordinates, and reference-prism Jacobians.

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hedgehog/mesh.hpp"

namespace hedgehog {

using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat43 = Eigen::Matrix<double, 4, 3>;
using Mat34 = Eigen::Matrix<double, 3, 4>;

class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kDomainTolerance = 1e-9;

/// x = (1 + x4 / a) (x1, x2, x3).
Vec3 phi(const Vec4& xt, double a);

/// (a x / |x|, |x| - a). Throws GeometryError when |x| < a - 1e-9.
Vec4 phi_inverse(const Vec3& x, double a);

inline Vec3 horizontal(const Vec4& xt) { return xt.head<3>(); }

/// Zeroes the fourth component.
inline Vec4 project_horizontal(const Vec4& xt) { return {xt[0], xt[1], xt[2], 0.0}; }

/// Radially projects a point of the piecewise-flat approximation back onto
/// S^2(a) x R, leaving x4 untouched.
Vec4 project_to_manifold(const Vec4& xt, double a);

// Nodal basis on the reference prism: linear triangle times linear interval.
// Node numbering matches ExtrudedMesh::cell_vertices.
std::array<double, 6> prism_shape_values(const Vec3& xi);
std::array<Vec3, 6> prism_shape_gradients(const Vec3& xi);

/// Reference coordinates of the six prism nodes.
const std::array<Vec3, 6>& reference_prism_nodes();

enum class CoordinateKind { continuous, discontinuous };

/// How the per-column extrusion direction k_e of the hedgehog mesh is chosen.
/// vertex_average normalises the horizontal part of the mean of the element
/// vertices in R^4. facet_normal uses the unit normal of the flat base
/// triangle, which makes each hedgehog column an isometric copy of its element
/// in R^4.
enum class ColumnDirection { vertex_average, facet_normal };

struct CoordinateField {
  CoordinateKind kind = CoordinateKind::continuous;
  std::vector<std::array<Vec3, 6>> nodes;
  /// k_e per cell; only set for the discontinuous (hedgehog) kind.
  std::vector<Vec3> column_directions;

  int n_cells() const { return static_cast<int>(nodes.size()); }
  const std::array<Vec3, 6>& cell(int c) const { return nodes[static_cast<std::size_t>(c)]; }
};

/// Continuous coordinates of the annulus mesh: nodal values shared between
/// cells.
CoordinateField annulus_coordinates(const ExtrudedMesh& mesh);

/// Nodes of a cell pulled back to R^4, x~_v = phi_inverse(x_v).
std::array<Vec4, 6> manifold_nodes(const ExtrudedMesh& mesh, int cell);

/// Extrusion direction k_e of an element given its vertices in R^4.
/// Throws GeometryError for a degenerate element average.
Vec3 column_direction(std::span<const Vec4, 6> nodes, double a,
                      ColumnDirection rule = ColumnDirection::vertex_average);

/// a x / |x| + (|x| - a) k_e.
Vec3 hedgehog_node(const Vec3& x, const Vec3& k_e, double a);

/// Discontinuous coordinate field x' of the hedgehog mesh.
CoordinateField hedgehog_coordinates(const ExtrudedMesh& mesh,
                                     ColumnDirection rule = ColumnDirection::vertex_average);

struct JacobianSample {
  Mat3 J = Mat3::Zero();
  double det = 0.0;
  Mat3 inverse = Mat3::Zero();
};

/// J = sum_v x_v (grad N_v)^T. Throws GeometryError when det J <= 0.
JacobianSample jacobian(std::span<const Vec3, 6> nodes, const Vec3& xi);
JacobianSample jacobian(const CoordinateField& coords, int cell, const Vec3& xi);

/// Jacobian of the reference-to-R^4 map through the given nodes.
Mat43 manifold_jacobian(std::span<const Vec4, 6> nodes, const Vec3& xi);

struct PseudoInverse {
  Mat34 inverse = Mat34::Zero();
  double determinant = 0.0;
};

/// Moore-Penrose inverse and pseudodeterminant (product of the singular
/// values). Throws GeometryError unless J4 has numerical rank 3.
PseudoInverse pseudo_inverse_pseudo_det(const Mat43& J4);

/// Orthonormal tangent frame of S^2(a) x [0, H] at x~. Near the poles, where
/// the longitude direction is undefined, a fixed horizontal pair is used.
struct TangentFrame {
  Vec4 point = Vec4::Zero();
  Vec4 e_lambda = Vec4::Zero();
  Vec4 e_phi = Vec4::Zero();
  Vec4 i4{0.0, 0.0, 0.0, 1.0};
  Vec4 normal = Vec4::Zero();
  bool pole_fallback = false;

  /// Columns e_lambda, e_phi, i4.
  Mat43 basis() const;
  Vec3 components(const Vec4& v) const { return basis().transpose() * v; }
  Vec4 vector(const Vec3& c) const { return basis() * c; }
};

TangentFrame tangent_frame(const Vec4& xt);

/// chi_e restricted to tangent vectors: J_g(xi) pinv(J~(xi)) v4, with J_g from
/// the active nodes and J~ from the R^4 nodes. Components along the element
/// normal in R^4 are annihilated.
Vec3 pushforward_4to3(std::span<const Vec3, 6> active_nodes, std::span<const Vec4, 6> manifold,
                      const Vec3& xi, const Vec4& v4);

/// Largest distance between two nodes of a cell.
double cell_diameter(std::span<const Vec3, 6> nodes);

}  // namespace hedgehog
