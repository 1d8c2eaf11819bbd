#pragma once

// Reference-prism finite elements.
//
// velocity(k): BDM_k(triangle) x DG_{k-1}(interval) for the horizontal part
// and DG_{k-1}(triangle) x CG_k(interval) for the vertical part, with degrees
// of freedom given by normal moments on the facets plus interior moments.
// pressure(k): DG_{k-1}(triangle) x DG_{k-1}(interval).
//
// Supported degrees: k = 1, 2.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hedgehog {

using Vec3 = Eigen::Vector3d;

enum class ElementFamily { velocity, pressure };

/// Geometry of the reference prism facets.
struct ReferenceFacet {
  bool quadrilateral = false;
  Vec3 normal = Vec3::Zero();  // unit outward normal
  double measure = 0.0;
  /// Quadrilaterals: local triangle vertices (p, q), p < q, spanning the edge.
  int edge_from = -1;
  int edge_to = -1;
  /// Point of the facet for parameters (t, z) on a quadrilateral, or
  /// (xi1, xi2) on a triangle.
  Vec3 point(double s, double t) const;
  /// Area element of the (s, t) parametrisation.
  double jacobian() const;
  double height = 0.0;  // xi3 of a triangular facet
};

const ReferenceFacet& reference_facet(int local_facet);

inline constexpr double kReferencePrismVolume = 0.5;

struct DofInfo {
  int facet = -1;  // local facet, -1 for interior
  int index_on_facet = 0;
  /// Degree of the edge Legendre weight (quadrilateral facets); reversing the
  /// edge parameter multiplies the functional by (-1)^edge_degree.
  int edge_degree = 0;
};

struct Tabulation {
  Eigen::MatrixXd values;      // basis x components (3 for velocity, 1 for pressure)
  Eigen::VectorXd divergence;  // velocity only
};

class FiniteElement {
public:
  FiniteElement(ElementFamily family, int degree);

  ElementFamily family() const { return family_; }
  int degree() const { return degree_; }
  int dimension() const { return static_cast<int>(dofs_.size()); }
  int value_size() const { return family_ == ElementFamily::velocity ? 3 : 1; }

  const std::vector<DofInfo>& dofs() const { return dofs_; }
  int n_facet_dofs(int local_facet) const;
  int n_interior_dofs() const;

  Tabulation tabulate(const Vec3& xi) const;
  std::vector<Tabulation> tabulate(std::span<const Vec3> points) const;

  /// Applies every DOF functional to a reference vector field (velocity only).
  /// Facet functionals are integrated with a Gauss rule exact to
  /// `quadrature_degree` in each direction.
  Eigen::VectorXd apply_functionals(const std::function<Vec3(const Vec3&)>& f,
                                    int quadrature_degree) const;

  /// Functionals applied to the basis; the identity for a dual basis.
  Eigen::MatrixXd dof_matrix() const;

private:
  struct Monomial {
    int component;  // 0..2 for velocity, 0 for pressure
    int a, b, m;    // xi1^a xi2^b xi3^m
  };

  Eigen::MatrixXd prime_values(const Vec3& xi, Eigen::VectorXd* divergence) const;
  Eigen::MatrixXd apply_functionals_prime(int quadrature_degree) const;
  template <class F>
  void for_each_functional_sample(int quadrature_degree, F&& visit) const;

  ElementFamily family_;
  int degree_;
  std::vector<Monomial> prime_;
  std::vector<DofInfo> dofs_;
  Eigen::MatrixXd coefficients_;  // basis_i = sum_j coefficients_(i, j) prime_j
};

/// Legendre polynomial P_n on [-1, 1].
double legendre(int n, double x);

}  // namespace hedgehog
