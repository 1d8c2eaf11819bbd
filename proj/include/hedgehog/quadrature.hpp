#pragma once

#include <vector>

#include <Eigen/Core>

namespace hedgehog {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr int kMaxQuadratureDegree = 40;

struct QuadratureRule1D {
  std::vector<double> points;  // on [0, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n - 1.
QuadratureRule1D gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight (1 - x)^alpha.
QuadratureRule1D gauss_jacobi(int n, int alpha);

struct TriangleRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Collapsed (conical product) rule on the triangle (0,0), (1,0), (0,1),
/// exact for polynomials of total degree <= degree.
TriangleRule quadrature_triangle(int degree);

/// Rule on the reference prism (triangle x [0, 1]).
struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Tensor product of quadrature_triangle(degree) with a Gauss-Legendre rule of
/// the same exactness. Throws std::invalid_argument outside [0, 40].
QuadratureRule quadrature_prism(int degree);

}  // namespace hedgehog
