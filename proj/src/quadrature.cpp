#include "hedgehog/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hedgehog {

namespace {

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree) {
    std::ostringstream msg;
    msg << "unsupported quadrature degree " << degree << "; supported range is 0.."
        << kMaxQuadratureDegree;
    throw std::invalid_argument(msg.str());
  }
}

// Golub-Welsch on [-1, 1] for the Jacobi weight (1 - x)^alpha (1 + x)^beta,
// mapped to [0, 1] with weights for (1 - u)^alpha.
QuadratureRule1D golub_welsch_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("quadrature rule needs at least one point");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    T(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    const double b = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    T(k, k - 1) = T(k - 1, k) = std::sqrt(b);
  }
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
  QuadratureRule1D rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double scale = std::pow(0.5, ab + 1.0);
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.points[static_cast<std::size_t>(k)] = 0.5 * (1.0 + eig.eigenvalues()[k]);
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0 * scale;
  }
  return rule;
}

}  // namespace

QuadratureRule1D gauss_legendre(int n) { return golub_welsch_jacobi(n, 0.0, 0.0); }

QuadratureRule1D gauss_jacobi(int n, int alpha) {
  return golub_welsch_jacobi(n, static_cast<double>(alpha), 0.0);
}

TriangleRule quadrature_triangle(int degree) {
  check_degree(degree);
  const int n = degree / 2 + 1;
  const QuadratureRule1D outer = gauss_jacobi(n, 1);
  const QuadratureRule1D inner = gauss_legendre(n);
  TriangleRule rule;
  rule.degree = degree;
  for (std::size_t i = 0; i < outer.points.size(); ++i) {
    const double u = outer.points[i];
    for (std::size_t j = 0; j < inner.points.size(); ++j) {
      rule.points.emplace_back(u, (1.0 - u) * inner.points[j]);
      rule.weights.push_back(outer.weights[i] * inner.weights[j]);
    }
  }
  return rule;
}

QuadratureRule quadrature_prism(int degree) {
  check_degree(degree);
  const TriangleRule tri = quadrature_triangle(degree);
  const QuadratureRule1D line = gauss_legendre(degree / 2 + 1);
  QuadratureRule rule;
  rule.degree = degree;
  for (std::size_t i = 0; i < tri.points.size(); ++i) {
    for (std::size_t j = 0; j < line.points.size(); ++j) {
      rule.points.emplace_back(tri.points[i][0], tri.points[i][1], line.points[j]);
      rule.weights.push_back(tri.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

}  // namespace hedgehog
