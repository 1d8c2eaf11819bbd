#pragma once

// Shared helpers for the test binaries.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "hedgehog/assembly.hpp"
#include "hedgehog/element.hpp"
#include "hedgehog/function_space.hpp"
#include "hedgehog/geometry.hpp"
#include "hedgehog/mesh.hpp"
#include "hedgehog/quadrature.hpp"

namespace hedgehog::testing {

class Random {
public:
  explicit Random(std::uint64_t seed = 12345) : rng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  Vec3 unit3() {
    const double z = uniform(-1.0, 1.0);
    const double t = uniform(0.0, 6.283185307179586);
    const double r = std::sqrt(1.0 - z * z);
    return {r * std::cos(t), r * std::sin(t), z};
  }
  /// Point of S^2(a) x [0, H].
  Vec4 manifold_point(double a = 1.0, double H = 1.0) {
    const Vec3 u = a * unit3();
    return {u[0], u[1], u[2], uniform(0.0, H)};
  }
  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
  }

private:
  std::mt19937_64 rng_;
};

/// max over quadrature points of ||J(xi) - J(xi0)||_F / ||J(xi0)||_F.
inline double jacobian_variation(const CoordinateField& coords, int cell, const QuadratureRule& rule) {
  const Mat3 J0 = jacobian(coords, cell, rule.points.front()).J;
  double worst = 0.0;
  for (const Vec3& xi : rule.points) {
    worst = std::max(worst, (jacobian(coords, cell, xi).J - J0).norm() / J0.norm());
  }
  return worst;
}

/// Sum over cells of the quadrature integral of det J.
inline double total_measure(const CoordinateField& coords, const QuadratureRule& rule) {
  double total = 0.0;
  for (int c = 0; c < coords.n_cells(); ++c) {
    for (int q = 0; q < rule.size(); ++q) {
      total += rule.weights[static_cast<std::size_t>(q)] *
               jacobian(coords, c, rule.points[static_cast<std::size_t>(q)]).det;
    }
  }
  return total;
}

/// Largest deviation of ||x'_c1(v) - x'_c2(v)|| from ||k_c1 - k_c2|| (r_l - a)
/// over all base edges, layers and both node levels of each shared vertex.
struct GapLaw {
  double max_deviation = 0.0;
  double max_bottom_gap = 0.0;
  double min_top_gap = 1e300;
};

inline GapLaw hedgehog_gap_law(const ExtrudedMesh& mesh, const CoordinateField& hog) {
  GapLaw g;
  const BaseSphereMesh& base = mesh.base();
  const double a = mesh.inner_radius();
  for (int e = 0; e < base.n_edges(); ++e) {
    const auto& tris = base.edge_triangles[static_cast<std::size_t>(e)];
    for (int v : base.edges[static_cast<std::size_t>(e)]) {
      for (int l = 0; l < mesh.n_layers(); ++l) {
        Vec3 x[2][2];
        Vec3 k[2];
        for (int s = 0; s < 2; ++s) {
          const int cell = mesh.cell_index(tris[static_cast<std::size_t>(s)], l);
          const auto tri = mesh.cell_base_vertices(cell);
          const auto i = static_cast<std::size_t>(std::find(tri.begin(), tri.end(), v) - tri.begin());
          x[s][0] = hog.cell(cell)[i];
          x[s][1] = hog.cell(cell)[i + 3];
          k[s] = hog.column_directions[static_cast<std::size_t>(cell)];
        }
        for (int level = 0; level < 2; ++level) {
          const double h = mesh.layer_radii()[static_cast<std::size_t>(l + level)] - a;
          const double gap = (x[0][level] - x[1][level]).norm();
          g.max_deviation = std::max(g.max_deviation, std::abs(gap - (k[0] - k[1]).norm() * h));
          if (h == 0.0) g.max_bottom_gap = std::max(g.max_bottom_gap, gap);
          if (l == mesh.n_layers() - 1 && level == 1) g.min_top_gap = std::min(g.min_top_gap, gap);
        }
      }
    }
  }
  return g;
}

/// Normal-trace jumps across interior facets for a random coefficient vector:
/// physical normal component on the annulus and reference flux density.
struct TraceJump {
  double physical = 0.0;
  double reference = 0.0;
};

inline TraceJump normal_trace_jump(const ExtrudedMesh& mesh, int k, std::uint64_t seed) {
  const FacetSet facets = classify_facets(mesh);
  auto space = std::make_shared<const FunctionSpace>(mesh, facets, FiniteElement(ElementFamily::velocity, k));
  const CoordinateField ann = annulus_coordinates(mesh);
  Random rnd(seed);
  const Field u(space, rnd.vector(space->n_dofs()));

  TraceJump jump;
  const QuadratureRule1D g = gauss_legendre(3);
  for (int f = 0; f < facets.n_facets(); ++f) {
    const Facet& facet = facets.facet(f);
    if (facet.is_boundary()) continue;
    const auto nodes0 = mesh.cell_vertices(facet.cells[0]);
    const auto nodes1 = mesh.cell_vertices(facet.cells[1]);
    const ReferenceFacet& r0 = reference_facet(facet.local_facets[0]);
    const ReferenceFacet& r1 = reference_facet(facet.local_facets[1]);
    for (double s : g.points) {
      for (double t : g.points) {
        // Point on the facet from side 0, located on side 1 through the
        // shared global vertices.
        const Vec3 xi0 = r0.point(s, t);
        const auto N = prism_shape_values(xi0);
        std::map<int, double> weights;
        for (std::size_t v = 0; v < 6; ++v) weights[nodes0[v]] += N[v];
        Vec3 xi1 = Vec3::Zero();
        for (std::size_t v = 0; v < 6; ++v) {
          auto it = weights.find(nodes1[v]);
          if (it != weights.end()) xi1 += it->second * reference_prism_nodes()[v];
        }
        const PiolaValue a = evaluate_velocity(u, ann, facet.cells[0], xi0);
        const PiolaValue b = evaluate_velocity(u, ann, facet.cells[1], xi1);
        const JacobianSample J0 = jacobian(ann, facet.cells[0], xi0);
        const Vec3 n = (J0.inverse.transpose() * r0.normal).normalized();
        jump.physical = std::max(jump.physical, std::abs(a.value.dot(n) - b.value.dot(n)));

        const Vec3 ra = evaluate_reference_velocity(u, facet.cells[0], xi0);
        const Vec3 rb = evaluate_reference_velocity(u, facet.cells[1], xi1);
        jump.reference = std::max(jump.reference,
                                  std::abs(ra.dot(r0.normal) * r0.measure + rb.dot(r1.normal) * r1.measure));
      }
    }
  }
  return jump;
}

/// L2 projection of the reference divergences onto the pressure element:
/// max pointwise residual divided by the max divergence magnitude.
inline double divergence_projection_residual(int k) {
  const FiniteElement v(ElementFamily::velocity, k);
  const FiniteElement p(ElementFamily::pressure, k);
  const QuadratureRule rule = quadrature_prism(2 * k + 4);
  const auto tv = v.tabulate(rule.points);
  const auto tp = p.tabulate(rule.points);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p.dimension(), p.dimension());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p.dimension(), v.dimension());
  for (int q = 0; q < rule.size(); ++q) {
    const auto sq = static_cast<std::size_t>(q);
    const Eigen::VectorXd phi = tp[sq].values.col(0);
    M += rule.weights[sq] * phi * phi.transpose();
    b += rule.weights[sq] * phi * tv[sq].divergence.transpose();
  }
  const Eigen::MatrixXd coeff = M.ldlt().solve(b);
  double residual = 0.0, scale = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const auto sq = static_cast<std::size_t>(q);
    const Eigen::VectorXd proj = coeff.transpose() * tp[sq].values.col(0);
    residual = std::max(residual, (proj - tv[sq].divergence).cwiseAbs().maxCoeff());
    scale = std::max(scale, tv[sq].divergence.cwiseAbs().maxCoeff());
  }
  return residual / scale;
}

}  // namespace hedgehog::testing
