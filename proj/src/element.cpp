#include "hedgehog/element.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

#include "hedgehog/quadrature.hpp"

namespace hedgehog {

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

Vec3 ReferenceFacet::point(double s, double t) const {
  if (!quadrilateral) return {s, t, height};
  const std::array<Vec3, 3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  Vec3 p = v[static_cast<std::size_t>(edge_from)] +
           s * (v[static_cast<std::size_t>(edge_to)] - v[static_cast<std::size_t>(edge_from)]);
  p[2] = t;
  return p;
}

double ReferenceFacet::jacobian() const { return quadrilateral ? measure : 1.0; }

const ReferenceFacet& reference_facet(int local_facet) {
  static const std::array<ReferenceFacet, 5> facets = [] {
    std::array<ReferenceFacet, 5> f;
    f[0].normal = Vec3(0, 0, -1);
    f[0].measure = 0.5;
    f[0].height = 0.0;
    f[1].normal = Vec3(0, 0, 1);
    f[1].measure = 0.5;
    f[1].height = 1.0;
    // Quadrilateral over triangle edge i, the edge opposite vertex i.
    const int from[3] = {1, 0, 0};
    const int to[3] = {2, 2, 1};
    const Vec3 normals[3] = {Vec3(1, 1, 0).normalized(), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
    const double lengths[3] = {std::sqrt(2.0), 1.0, 1.0};
    for (int i = 0; i < 3; ++i) {
      ReferenceFacet& q = f[static_cast<std::size_t>(2 + i)];
      q.quadrilateral = true;
      q.edge_from = from[i];
      q.edge_to = to[i];
      q.normal = normals[i];
      q.measure = lengths[i];
    }
    return f;
  }();
  if (local_facet < 0 || local_facet > 4) throw std::out_of_range("reference prism has 5 facets");
  return facets[static_cast<std::size_t>(local_facet)];
}

namespace {

std::vector<std::array<int, 2>> triangle_exponents(int max_degree) {
  std::vector<std::array<int, 2>> out;
  for (int a = 0; a <= max_degree; ++a) {
    for (int b = 0; a + b <= max_degree; ++b) out.push_back({a, b});
  }
  return out;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double dpow(double x, int n) { return n == 0 ? 0.0 : n * ipow(x, n - 1); }

// Legendre on [0, 1].
double shifted_legendre(int n, double z) { return legendre(n, 2.0 * z - 1.0); }

// Lowest-order Nedelec (first kind) fields used for the interior moments
// of BDM_2 on the triangle.
Vec3 nedelec_weight(int j, const Vec3& xi) {
  switch (j) {
    case 0: return {1.0, 0.0, 0.0};
    case 1: return {0.0, 1.0, 0.0};
    default: return {-xi[1], xi[0], 0.0};
  }
}

}  // namespace

FiniteElement::FiniteElement(ElementFamily family, int degree) : family_(family), degree_(degree) {
  if (degree < 1 || degree > 2) {
    std::ostringstream msg;
    msg << "unsupported element degree k=" << degree << "; supported: 1, 2";
    throw std::invalid_argument(msg.str());
  }
  const int k = degree;
  if (family == ElementFamily::pressure) {
    for (const auto& [a, b] : triangle_exponents(k - 1)) {
      for (int m = 0; m <= k - 1; ++m) {
        prime_.push_back({0, a, b, m});
        dofs_.push_back(DofInfo{-1, static_cast<int>(dofs_.size()), 0});
      }
    }
    coefficients_ = Eigen::MatrixXd::Identity(dimension(), dimension());
    return;
  }

  for (int c = 0; c < 2; ++c) {
    for (const auto& [a, b] : triangle_exponents(k)) {
      for (int m = 0; m <= k - 1; ++m) prime_.push_back({c, a, b, m});
    }
  }
  for (const auto& [a, b] : triangle_exponents(k - 1)) {
    for (int m = 0; m <= k; ++m) prime_.push_back({2, a, b, m});
  }

  const int n_tri = static_cast<int>(triangle_exponents(k - 1).size());
  for (int f = 0; f < 2; ++f) {
    for (int i = 0; i < n_tri; ++i) dofs_.push_back(DofInfo{f, i, 0});
  }
  for (int f = 2; f < 5; ++f) {
    for (int j = 0; j <= k; ++j) {
      for (int m = 0; m <= k - 1; ++m) dofs_.push_back(DofInfo{f, j * k + m, j});
    }
  }
  const int n_interior = (k * k - 1) * k + n_tri * (k - 1);
  for (int i = 0; i < n_interior; ++i) dofs_.push_back(DofInfo{-1, i, 0});

  if (dimension() != static_cast<int>(prime_.size())) {
    throw std::logic_error("velocity element: functional count does not match space dimension");
  }
  // Basis dual to the functionals: C V^T = I with V(i, j) = l_i(prime_j).
  const Eigen::MatrixXd V = apply_functionals_prime(2 * k + 2);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible()) throw std::logic_error("velocity element: functionals are not unisolvent");
  coefficients_ = lu.inverse().transpose();
}

int FiniteElement::n_facet_dofs(int local_facet) const {
  int n = 0;
  for (const auto& d : dofs_) n += (d.facet == local_facet) ? 1 : 0;
  return n;
}

int FiniteElement::n_interior_dofs() const { return n_facet_dofs(-1); }

Eigen::MatrixXd FiniteElement::prime_values(const Vec3& xi, Eigen::VectorXd* divergence) const {
  const int n = static_cast<int>(prime_.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, value_size());
  if (divergence) divergence->setZero(n);
  for (int i = 0; i < n; ++i) {
    const Monomial& p = prime_[static_cast<std::size_t>(i)];
    const double x = ipow(xi[0], p.a);
    const double y = ipow(xi[1], p.b);
    const double z = ipow(xi[2], p.m);
    values(i, p.component) = x * y * z;
    if (divergence) {
      switch (p.component) {
        case 0: (*divergence)[i] = dpow(xi[0], p.a) * y * z; break;
        case 1: (*divergence)[i] = x * dpow(xi[1], p.b) * z; break;
        default: (*divergence)[i] = x * y * dpow(xi[2], p.m); break;
      }
    }
  }
  return values;
}

Tabulation FiniteElement::tabulate(const Vec3& xi) const {
  Tabulation t;
  if (family_ == ElementFamily::velocity) {
    Eigen::VectorXd div;
    t.values = coefficients_ * prime_values(xi, &div);
    t.divergence = coefficients_ * div;
  } else {
    t.values = coefficients_ * prime_values(xi, nullptr);
  }
  return t;
}

std::vector<Tabulation> FiniteElement::tabulate(std::span<const Vec3> points) const {
  std::vector<Tabulation> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(tabulate(p));
  return out;
}

template <class F>
void FiniteElement::for_each_functional_sample(int quadrature_degree, F&& visit) const {
  const int k = degree_;
  const QuadratureRule1D line = gauss_legendre(quadrature_degree / 2 + 1);
  const TriangleRule tri = quadrature_triangle(quadrature_degree);
  const QuadratureRule prism = quadrature_prism(quadrature_degree);
  const auto tri_exp = triangle_exponents(k - 1);
  const int n_tri = static_cast<int>(tri_exp.size());

  int offset = 0;
  for (int f = 0; f < 2; ++f) {
    const ReferenceFacet& facet = reference_facet(f);
    for (std::size_t q = 0; q < tri.points.size(); ++q) {
      const Vec3 x = facet.point(tri.points[q][0], tri.points[q][1]);
      for (int i = 0; i < n_tri; ++i) {
        const auto& e = tri_exp[static_cast<std::size_t>(i)];
        const double w = tri.weights[q] * ipow(x[0], e[0]) * ipow(x[1], e[1]);
        visit(offset + i, x, Vec3(w * facet.normal));
      }
    }
    offset += n_tri;
  }
  for (int f = 2; f < 5; ++f) {
    const ReferenceFacet& facet = reference_facet(f);
    for (std::size_t qs = 0; qs < line.points.size(); ++qs) {
      for (std::size_t qz = 0; qz < line.points.size(); ++qz) {
        const double s = line.points[qs];
        const double z = line.points[qz];
        const Vec3 x = facet.point(s, z);
        const double w0 = line.weights[qs] * line.weights[qz] * facet.jacobian();
        for (int j = 0; j <= k; ++j) {
          for (int m = 0; m <= k - 1; ++m) {
            const double w = w0 * legendre(j, 2.0 * s - 1.0) * shifted_legendre(m, z);
            visit(offset + j * k + m, x, Vec3(w * facet.normal));
          }
        }
      }
    }
    offset += (k + 1) * k;
  }
  for (int q = 0; q < prism.size(); ++q) {
    const Vec3& x = prism.points[static_cast<std::size_t>(q)];
    const double w0 = prism.weights[static_cast<std::size_t>(q)];
    int local = offset;
    for (int j = 0; j < k * k - 1; ++j) {
      for (int m = 0; m <= k - 1; ++m) {
        visit(local++, x, Vec3(w0 * shifted_legendre(m, x[2]) * nedelec_weight(j, x)));
      }
    }
    for (int i = 0; i < n_tri; ++i) {
      const auto& e = tri_exp[static_cast<std::size_t>(i)];
      for (int m = 0; m <= k - 2; ++m) {
        const double w = w0 * ipow(x[0], e[0]) * ipow(x[1], e[1]) * shifted_legendre(m, x[2]);
        visit(local++, x, Vec3(0.0, 0.0, w));
      }
    }
  }
}

Eigen::MatrixXd FiniteElement::apply_functionals_prime(int quadrature_degree) const {
  const int n = static_cast<int>(prime_.size());
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(dimension(), n);
  for_each_functional_sample(quadrature_degree, [&](int i, const Vec3& x, const Vec3& w) {
    V.row(i) += (w.transpose() * prime_values(x, nullptr).transpose());
  });
  return V;
}

Eigen::VectorXd FiniteElement::apply_functionals(const std::function<Vec3(const Vec3&)>& f,
                                                 int quadrature_degree) const {
  if (family_ != ElementFamily::velocity) {
    throw std::logic_error("apply_functionals: pressure element has no facet functionals");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
  for_each_functional_sample(quadrature_degree, [&](int i, const Vec3& x, const Vec3& w) {
    out[i] += w.dot(f(x));
  });
  return out;
}

Eigen::MatrixXd FiniteElement::dof_matrix() const {
  if (family_ != ElementFamily::velocity) return Eigen::MatrixXd::Identity(dimension(), dimension());
  Eigen::MatrixXd D(dimension(), dimension());
  for (int j = 0; j < dimension(); ++j) {
    const Eigen::VectorXd col = apply_functionals(
        [&](const Vec3& x) -> Vec3 { return tabulate(x).values.row(j).transpose(); }, 2 * degree_ + 2);
    D.col(j) = col;
  }
  return D;
}

}  // namespace hedgehog
