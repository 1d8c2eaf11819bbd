#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hedgehog/element.hpp"
#include "hedgehog/geometry.hpp"
#include "hedgehog/mesh.hpp"

namespace hedgehog {

/// Global degrees of freedom of an element on an extruded mesh.
///
/// Facet DOFs are numbered facet by facet, followed by the interior DOFs cell
/// by cell. The sign of a (cell, local DOF) pair makes the physical normal
/// moment single-valued: it is -1 when the global facet normal points into the
/// cell, times (-1)^j for edge weights of degree j when the cell traverses the
/// edge against ascending global vertex order.
class FunctionSpace {
public:
  FunctionSpace(const ExtrudedMesh& mesh, const FacetSet& facets, FiniteElement element);

  const FiniteElement& element() const { return element_; }
  int n_dofs() const { return n_dofs_; }
  int n_cells() const { return n_cells_; }
  int dofs_per_cell() const { return element_.dimension(); }

  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::ptrdiff_t>(cell) * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  std::span<const double> cell_signs(int cell) const {
    return {signs_.data() + static_cast<std::ptrdiff_t>(cell) * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  /// Global DOFs attached to a facet (empty for cell-local spaces).
  std::vector<int> facet_dofs(int facet) const;

private:
  FiniteElement element_;
  int n_cells_ = 0;
  int n_dofs_ = 0;
  std::vector<int> facet_offsets_;
  std::vector<int> cell_dofs_;
  std::vector<double> signs_;
};

struct Field {
  std::shared_ptr<const FunctionSpace> space;
  Eigen::VectorXd coefficients;

  explicit Field(std::shared_ptr<const FunctionSpace> s)
      : space(std::move(s)), coefficients(Eigen::VectorXd::Zero(space->n_dofs())) {}
  Field(std::shared_ptr<const FunctionSpace> s, Eigen::VectorXd c)
      : space(std::move(s)), coefficients(std::move(c)) {}

  /// Signed local coefficients of one cell.
  Eigen::VectorXd local(int cell) const;
};

struct PiolaValue {
  Vec3 value = Vec3::Zero();
  double divergence = 0.0;
};

/// Contravariant Piola map: v = J v^ / det J, div v = div^ v^ / det J.
inline PiolaValue piola_push(const JacobianSample& J, const Vec3& ref_value, double ref_divergence) {
  return {J.J * ref_value / J.det, ref_divergence / J.det};
}

/// Inverse of piola_push for the value: v^ = det J J^{-1} v.
inline Vec3 piola_pull(const JacobianSample& J, const Vec3& value) {
  return J.det * (J.inverse * value);
}

PiolaValue evaluate_velocity(const Field& u, const CoordinateField& coords, int cell, const Vec3& xi);
double evaluate_pressure(const Field& p, int cell, const Vec3& xi);

/// Reference value of a velocity field, before the Piola map.
Vec3 evaluate_reference_velocity(const Field& u, int cell, const Vec3& xi);

/// Physical vector field given per (cell, reference point, physical point).
using CellVectorFunction = std::function<Vec3(int cell, const Vec3& xi, const Vec3& x)>;

/// Canonical H(div) interpolant: DOF functionals applied to the Piola pull-back
/// of `f` in every cell. A facet DOF seen from two cells takes the mean of the
/// two moments, which coincide for fields that are already conforming.
Field interpolate_hdiv(std::shared_ptr<const FunctionSpace> space, const CoordinateField& coords,
                       const CellVectorFunction& f, int quadrature_degree = 10);

}  // namespace hedgehog
