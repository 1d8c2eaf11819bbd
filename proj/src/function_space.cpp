#include "hedgehog/function_space.hpp"

#include <stdexcept>

namespace hedgehog {

FunctionSpace::FunctionSpace(const ExtrudedMesh& mesh, const FacetSet& facets, FiniteElement element)
    : element_(std::move(element)), n_cells_(mesh.n_cells()) {
  if (static_cast<int>(facets.cell_facets.size()) != mesh.n_cells()) {
    throw std::invalid_argument("FunctionSpace: facet set does not belong to this mesh");
  }
  const int n_per_cell = element_.dimension();
  const int n_horizontal = element_.n_facet_dofs(kBottomFacet);
  const int n_vertical = element_.n_facet_dofs(quad_facet(0));
  const int n_interior = element_.n_interior_dofs();

  facet_offsets_.resize(static_cast<std::size_t>(facets.n_facets()) + 1);
  int next = 0;
  for (int f = 0; f < facets.n_facets(); ++f) {
    facet_offsets_[static_cast<std::size_t>(f)] = next;
    next += facets.facet(f).is_horizontal() ? n_horizontal : n_vertical;
  }
  facet_offsets_.back() = next;
  const int interior_offset = next;
  n_dofs_ = interior_offset + n_interior * n_cells_;

  cell_dofs_.resize(static_cast<std::size_t>(n_per_cell) * static_cast<std::size_t>(n_cells_));
  signs_.assign(cell_dofs_.size(), 1.0);
  for (int c = 0; c < n_cells_; ++c) {
    const auto tri = mesh.cell_base_vertices(c);
    const auto& cf = facets.cell_facets[static_cast<std::size_t>(c)];
    for (int i = 0; i < n_per_cell; ++i) {
      const DofInfo& d = element_.dofs()[static_cast<std::size_t>(i)];
      const auto slot = static_cast<std::size_t>(c) * static_cast<std::size_t>(n_per_cell) +
                        static_cast<std::size_t>(i);
      if (d.facet < 0) {
        cell_dofs_[slot] = interior_offset + c * n_interior + d.index_on_facet;
        continue;
      }
      const int gf = cf[static_cast<std::size_t>(d.facet)];
      cell_dofs_[slot] = facet_offsets_[static_cast<std::size_t>(gf)] + d.index_on_facet;
      double sign = facets.orientation(gf, c);
      const ReferenceFacet& rf = reference_facet(d.facet);
      if (rf.quadrilateral) {
        const int from = tri[static_cast<std::size_t>(rf.edge_from)];
        const int to = tri[static_cast<std::size_t>(rf.edge_to)];
        if (from > to && (d.edge_degree % 2) == 1) sign = -sign;
      }
      signs_[slot] = sign;
    }
  }
}

std::vector<int> FunctionSpace::facet_dofs(int facet) const {
  if (element_.family() == ElementFamily::pressure) return {};
  std::vector<int> out;
  for (int d = facet_offsets_[static_cast<std::size_t>(facet)];
       d < facet_offsets_[static_cast<std::size_t>(facet) + 1]; ++d) {
    out.push_back(d);
  }
  return out;
}

Eigen::VectorXd Field::local(int cell) const {
  const auto dofs = space->cell_dofs(cell);
  const auto signs = space->cell_signs(cell);
  Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = signs[i] * coefficients[dofs[i]];
  }
  return out;
}

Vec3 evaluate_reference_velocity(const Field& u, int cell, const Vec3& xi) {
  const Tabulation t = u.space->element().tabulate(xi);
  return t.values.transpose() * u.local(cell);
}

PiolaValue evaluate_velocity(const Field& u, const CoordinateField& coords, int cell, const Vec3& xi) {
  const Tabulation t = u.space->element().tabulate(xi);
  const Eigen::VectorXd c = u.local(cell);
  const JacobianSample J = jacobian(coords, cell, xi);
  return piola_push(J, t.values.transpose() * c, t.divergence.dot(c));
}

double evaluate_pressure(const Field& p, int cell, const Vec3& xi) {
  const Tabulation t = p.space->element().tabulate(xi);
  return t.values.col(0).dot(p.local(cell));
}

Field interpolate_hdiv(std::shared_ptr<const FunctionSpace> space, const CoordinateField& coords,
                       const CellVectorFunction& f, int quadrature_degree) {
  const FiniteElement& element = space->element();
  if (element.family() != ElementFamily::velocity) {
    throw std::invalid_argument("interpolate_hdiv: space is not an H(div) space");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(space->n_dofs());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(space->n_dofs());
  for (int c = 0; c < space->n_cells(); ++c) {
    const auto& nodes = coords.cell(c);
    const Eigen::VectorXd moments = element.apply_functionals(
        [&](const Vec3& xi) -> Vec3 {
          const JacobianSample J = jacobian(std::span<const Vec3, 6>(nodes), xi);
          Vec3 x = Vec3::Zero();
          const auto N = prism_shape_values(xi);
          for (std::size_t v = 0; v < 6; ++v) x += N[v] * nodes[v];
          return piola_pull(J, f(c, xi, x));
        },
        quadrature_degree);
    const auto dofs = space->cell_dofs(c);
    const auto signs = space->cell_signs(c);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      sum[dofs[i]] += signs[i] * moments[static_cast<Eigen::Index>(i)];
      count[dofs[i]] += 1.0;
    }
  }
  return Field(std::move(space), sum.cwiseQuotient(count));
}

}  // namespace hedgehog
