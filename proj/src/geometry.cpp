#include "hedgehog/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace hedgehog {

Vec3 phi(const Vec4& xt, double a) { return (1.0 + xt[3] / a) * xt.head<3>(); }

Vec4 phi_inverse(const Vec3& x, double a) {
  const double r = x.norm();
  if (r < a - kDomainTolerance) {
    std::ostringstream msg;
    msg << "phi_inverse: point at radius " << r << " lies inside the inner sphere of radius " << a;
    throw GeometryError(msg.str());
  }
  Vec4 xt;
  xt.head<3>() = (a / r) * x;
  xt[3] = r - a;
  return xt;
}

Vec4 project_to_manifold(const Vec4& xt, double a) {
  const double h = xt.head<3>().norm();
  if (h < kDomainTolerance) throw GeometryError("project_to_manifold: point on the vertical axis");
  Vec4 out;
  out.head<3>() = (a / h) * xt.head<3>();
  out[3] = xt[3];
  return out;
}

std::array<double, 6> prism_shape_values(const Vec3& xi) {
  const double l0 = 1.0 - xi[0] - xi[1];
  const double l1 = xi[0];
  const double l2 = xi[1];
  const double b = 1.0 - xi[2];
  const double t = xi[2];
  return {l0 * b, l1 * b, l2 * b, l0 * t, l1 * t, l2 * t};
}

std::array<Vec3, 6> prism_shape_gradients(const Vec3& xi) {
  const double l0 = 1.0 - xi[0] - xi[1];
  const double l1 = xi[0];
  const double l2 = xi[1];
  const double b = 1.0 - xi[2];
  const double t = xi[2];
  return {Vec3(-b, -b, -l0), Vec3(b, 0.0, -l1), Vec3(0.0, b, -l2),
          Vec3(-t, -t, l0),  Vec3(t, 0.0, l1),  Vec3(0.0, t, l2)};
}

const std::array<Vec3, 6>& reference_prism_nodes() {
  static const std::array<Vec3, 6> nodes{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                                         Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0, 1, 1)};
  return nodes;
}

CoordinateField annulus_coordinates(const ExtrudedMesh& mesh) {
  CoordinateField field;
  field.kind = CoordinateKind::continuous;
  field.nodes.reserve(static_cast<std::size_t>(mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c) field.nodes.push_back(mesh.cell_coordinates(c));
  return field;
}

std::array<Vec4, 6> manifold_nodes(const ExtrudedMesh& mesh, int cell) {
  const auto coords = mesh.cell_coordinates(cell);
  std::array<Vec4, 6> nodes;
  for (std::size_t v = 0; v < 6; ++v) nodes[v] = phi_inverse(coords[v], mesh.inner_radius());
  return nodes;
}

Vec3 column_direction(std::span<const Vec4, 6> nodes, double a, ColumnDirection rule) {
  if (rule == ColumnDirection::facet_normal) {
    const Vec3 p0 = nodes[0].head<3>();
    const Vec3 p1 = nodes[1].head<3>();
    const Vec3 p2 = nodes[2].head<3>();
    Vec3 n = (p1 - p0).cross(p2 - p0);
    if (n.norm() < kDomainTolerance * a * a) throw GeometryError("column_direction: degenerate base triangle");
    n.normalize();
    if (n.dot(p0 + p1 + p2) < 0.0) n = -n;
    return n;
  }
  Vec4 mean = Vec4::Zero();
  for (const Vec4& v : nodes) mean += v;
  mean /= 6.0;
  const Vec3 h = mean.head<3>();
  if (h.norm() < kDomainTolerance * a) {
    throw GeometryError("column_direction: degenerate element average");
  }
  return h.normalized();
}

Vec3 hedgehog_node(const Vec3& x, const Vec3& k_e, double a) {
  const double r = x.norm();
  return (a / r) * x + (r - a) * k_e;
}

CoordinateField hedgehog_coordinates(const ExtrudedMesh& mesh, ColumnDirection rule) {
  const double a = mesh.inner_radius();
  CoordinateField field;
  field.kind = CoordinateKind::discontinuous;
  field.nodes.resize(static_cast<std::size_t>(mesh.n_cells()));
  field.column_directions.resize(static_cast<std::size_t>(mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto coords = mesh.cell_coordinates(c);
    const auto nodes4 = manifold_nodes(mesh, c);
    const Vec3 k = column_direction(nodes4, a, rule);
    auto& out = field.nodes[static_cast<std::size_t>(c)];
    for (std::size_t v = 0; v < 6; ++v) out[v] = hedgehog_node(coords[v], k, a);
    field.column_directions[static_cast<std::size_t>(c)] = k;
  }
  return field;
}

JacobianSample jacobian(std::span<const Vec3, 6> nodes, const Vec3& xi) {
  const auto grads = prism_shape_gradients(xi);
  JacobianSample s;
  for (std::size_t v = 0; v < 6; ++v) s.J += nodes[v] * grads[v].transpose();
  s.det = s.J.determinant();
  if (!(s.det > 0.0)) {
    std::ostringstream msg;
    msg << "jacobian: non-positive determinant " << s.det << " (inverted or degenerate cell)";
    throw GeometryError(msg.str());
  }
  s.inverse = s.J.inverse();
  return s;
}

JacobianSample jacobian(const CoordinateField& coords, int cell, const Vec3& xi) {
  return jacobian(std::span<const Vec3, 6>(coords.cell(cell)), xi);
}

Mat43 manifold_jacobian(std::span<const Vec4, 6> nodes, const Vec3& xi) {
  const auto grads = prism_shape_gradients(xi);
  Mat43 J = Mat43::Zero();
  for (std::size_t v = 0; v < 6; ++v) J += nodes[v] * grads[v].transpose();
  return J;
}

PseudoInverse pseudo_inverse_pseudo_det(const Mat43& J4) {
  Eigen::JacobiSVD<Mat43> svd(J4, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (!(sigma[2] >= 1e-12 * sigma[0]) || sigma[0] == 0.0) {
    std::ostringstream msg;
    msg << "pseudo_inverse_pseudo_det: rank-deficient map, singular values " << sigma.transpose();
    throw GeometryError(msg.str());
  }
  PseudoInverse out;
  const Eigen::Matrix<double, 4, 3> U = svd.matrixU().leftCols<3>();
  out.inverse = svd.matrixV() * sigma.cwiseInverse().asDiagonal() * U.transpose();
  out.determinant = sigma.prod();
  return out;
}

Mat43 TangentFrame::basis() const {
  Mat43 B;
  B.col(0) = e_lambda;
  B.col(1) = e_phi;
  B.col(2) = i4;
  return B;
}

TangentFrame tangent_frame(const Vec4& xt) {
  TangentFrame f;
  f.point = xt;
  const Vec3 h = xt.head<3>();
  const double a = h.norm();
  if (a == 0.0) throw GeometryError("tangent_frame: point on the vertical axis");
  f.normal << h / a, 0.0;
  const double rho = std::hypot(h[0], h[1]);
  if (rho < 1e-8 * a) {
    // (e_lambda, e_phi, up) stays right-handed at either pole.
    const double s = h[2] > 0.0 ? 1.0 : -1.0;
    f.e_lambda << 0.0, 1.0, 0.0, 0.0;
    f.e_phi << -s, 0.0, 0.0, 0.0;
    f.pole_fallback = true;
    return f;
  }
  const double cl = h[0] / rho;
  const double sl = h[1] / rho;
  const double sp = h[2] / a;
  const double cp = rho / a;
  f.e_lambda << -sl, cl, 0.0, 0.0;
  f.e_phi << -sp * cl, -sp * sl, cp, 0.0;
  return f;
}

Vec3 pushforward_4to3(std::span<const Vec3, 6> active_nodes, std::span<const Vec4, 6> manifold,
                      const Vec3& xi, const Vec4& v4) {
  const JacobianSample J = jacobian(active_nodes, xi);
  const PseudoInverse P = pseudo_inverse_pseudo_det(manifold_jacobian(manifold, xi));
  return J.J * (P.inverse * v4);
}

double cell_diameter(std::span<const Vec3, 6> nodes) {
  double d = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) d = std::max(d, (nodes[i] - nodes[j]).norm());
  }
  return d;
}

}  // namespace hedgehog
