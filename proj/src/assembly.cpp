#include "hedgehog/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef HEDGEHOG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

namespace hedgehog {

const char* to_string(Mode mode) { return mode == Mode::shallow ? "shallow" : "deep"; }

Discretization::Discretization(ExtrudedMesh mesh, int degree, Mode mode, ColumnDirection rule)
    : mesh_(std::move(mesh)),
      facets_(classify_facets(mesh_)),
      mode_(mode),
      degree_(degree),
      velocity_(std::make_shared<const FunctionSpace>(mesh_, facets_,
                                                      FiniteElement(ElementFamily::velocity, degree))),
      pressure_(std::make_shared<const FunctionSpace>(mesh_, facets_,
                                                      FiniteElement(ElementFamily::pressure, degree))),
      coordinates_(mode == Mode::shallow ? hedgehog_coordinates(mesh_, rule) : annulus_coordinates(mesh_)) {
  manifold_.reserve(static_cast<std::size_t>(mesh_.n_cells()));
  for (int c = 0; c < mesh_.n_cells(); ++c) manifold_.push_back(hedgehog::manifold_nodes(mesh_, c));
}

double Discretization::mesh_size() const {
  double h = 0.0;
  for (int c = 0; c < coordinates_.n_cells(); ++c) {
    h = std::max(h, cell_diameter(std::span<const Vec3, 6>(coordinates_.cell(c))));
  }
  return h;
}

Coefficients pushed_forward(ManifoldCoefficients c) {
  Coefficients out;
  if (c.rotation) {
    out.rotation = [f = c.rotation](const PointContext& p) { return p.pushforward(f(p.manifold)); };
  }
  if (c.forcing) {
    out.forcing = [f = c.forcing](const PointContext& p) { return p.pushforward(f(p.manifold)); };
  }
  if (c.source) {
    out.source = [f = c.source](const PointContext& p) { return f(p.manifold); };
  }
  return out;
}

void for_each_quadrature_point(
    const Discretization& disc, int cell, const QuadratureRule& rule,
    const std::function<void(int q, const PointContext&, const JacobianSample&)>& visit,
    std::size_t* counter) {
  const auto nodes = std::span<const Vec3, 6>(disc.coordinates().cell(cell));
  const auto m4 = disc.manifold_nodes(cell);
  const double a = disc.mesh().inner_radius();
  const Vec3 centroid(1.0 / 3.0, 1.0 / 3.0, 0.5);
  // The reference-to-R^4 map of a radially extruded cell is affine.
  const PseudoInverse P = pseudo_inverse_pseudo_det(manifold_jacobian(m4, centroid));
  const bool affine = disc.coordinates().kind == CoordinateKind::discontinuous;

  JacobianSample J;
  if (affine) {
    J = jacobian(nodes, centroid);
    if (counter) ++*counter;
  }
  PointContext ctx;
  ctx.cell = cell;
  for (int q = 0; q < rule.size(); ++q) {
    const Vec3& xi = rule.points[static_cast<std::size_t>(q)];
    if (!affine) {
      J = jacobian(nodes, xi);
      if (counter) ++*counter;
    }
    const auto N = prism_shape_values(xi);
    ctx.xi = xi;
    ctx.x.setZero();
    Vec4 flat = Vec4::Zero();
    for (std::size_t v = 0; v < 6; ++v) {
      ctx.x += N[v] * nodes[v];
      flat += N[v] * m4[v];
    }
    ctx.manifold = project_to_manifold(flat, a);
    ctx.push = J.J * P.inverse;
    visit(q, ctx, J);
  }
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

Mat3 cross_matrix(const Vec3& w) {
  Mat3 K;
  K << 0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0;
  return K;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void check_pairing(const ProblemConfig& config, const Discretization& disc) {
  if (config.degree != disc.degree() || config.mode != disc.mode()) {
    std::ostringstream msg;
    msg << "assemble: inconsistent space/mesh pairing (config k=" << config.degree << ", "
        << to_string(config.mode) << "; discretisation k=" << disc.degree() << ", "
        << to_string(disc.mode()) << ")";
    throw std::invalid_argument(msg.str());
  }
}

struct CellKernel {
  const ProblemConfig& config;
  const Discretization& disc;
  QuadratureRule rule;
  std::vector<Tabulation> tab1;
  std::vector<Tabulation> tab2;

  CellKernel(const ProblemConfig& c, const Discretization& d)
      : config(c), disc(d), rule(quadrature_prism(c.effective_quadrature_degree())) {
    tab1 = d.velocity_space()->element().tabulate(rule.points);
    tab2 = d.pressure_space()->element().tabulate(rule.points);
  }

  bool with_coriolis() const { return config.coriolis_enabled && static_cast<bool>(config.coefficients.rotation); }

  void operator()(int cell, LocalSystem& out, std::size_t* counter) const {
    const int d1 = disc.velocity_space()->dofs_per_cell();
    const int d2 = disc.pressure_space()->dofs_per_cell();
    out.mass.setZero(d1, d1);
    out.coriolis.setZero(d1, d1);
    out.divergence.setZero(d2, d1);
    out.pressure_mass.setZero(d2, d2);
    out.forcing.setZero(d1);
    out.source.setZero(d2);
    const bool coriolis = with_coriolis();
    Eigen::Matrix<double, 3, Eigen::Dynamic> JV(3, d1);

    for_each_quadrature_point(
        disc, cell, rule,
        [&](int q, const PointContext& ctx, const JacobianSample& J) {
          const auto sq = static_cast<std::size_t>(q);
          const double w = rule.weights[sq];
          const Tabulation& t1 = tab1[sq];
          const auto phi = tab2[sq].values.col(0);
          JV.noalias() = J.J * t1.values.transpose();
          out.mass.noalias() += (w / J.det) * JV.transpose() * JV;
          if (coriolis) {
            const Mat3 K = cross_matrix(config.coefficients.rotation(ctx));
            out.coriolis.noalias() += (2.0 * w / J.det) * JV.transpose() * K * JV;
          }
          out.divergence.noalias() += w * phi * t1.divergence.transpose();
          out.pressure_mass.noalias() += (w * J.det) * phi * phi.transpose();
          if (config.coefficients.forcing) {
            out.forcing.noalias() += w * JV.transpose() * config.coefficients.forcing(ctx);
          }
          if (config.coefficients.source) {
            out.source += (w * J.det * config.coefficients.source(ctx)) * phi;
          }
        },
        counter);
  }
};

}  // namespace

Eigen::MatrixXd LocalSystem::matrix() const {
  const auto n1 = mass.rows();
  const auto n2 = pressure_mass.rows();
  Eigen::MatrixXd A(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = mass + coriolis;
  A.topRightCorner(n1, n2) = -divergence.transpose();
  A.bottomLeftCorner(n2, n1) = divergence;
  A.bottomRightCorner(n2, n2) = -pressure_mass;
  return A;
}

LocalSystem assemble_cell(const ProblemConfig& config, const Discretization& disc, int cell,
                          std::size_t* counter) {
  check_pairing(config, disc);
  if (cell < 0 || cell >= disc.mesh().n_cells()) throw std::out_of_range("assemble_cell: cell index out of range");
  LocalSystem local;
  CellKernel(config, disc)(cell, local, counter);
  return local;
}

LinearSystem assemble(const ProblemConfig& config, const Discretization& disc) {
  check_pairing(config, disc);
  const FunctionSpace& V1 = *disc.velocity_space();
  const FunctionSpace& V2 = *disc.pressure_space();
  const int n1 = V1.n_dofs();
  const int n2 = V2.n_dofs();
  const int d1 = V1.dofs_per_cell();
  const int d2 = V2.dofs_per_cell();
  const CellKernel kernel(config, disc);
  const bool coriolis = kernel.with_coriolis();

  LinearSystem sys;
  sys.n_velocity = n1;
  sys.n_pressure = n2;
  sys.rhs = Eigen::VectorXd::Zero(n1 + n2);

  Triplets tm, tc, tb, tp, tfull;
  const auto n_cells = static_cast<std::size_t>(disc.mesh().n_cells());
  tm.reserve(n_cells * static_cast<std::size_t>(d1 * d1));
  tb.reserve(n_cells * static_cast<std::size_t>(d1 * d2));
  tp.reserve(n_cells * static_cast<std::size_t>(d2 * d2));
  if (coriolis) tc.reserve(n_cells * static_cast<std::size_t>(d1 * d1));

  LocalSystem local;
  for (int c = 0; c < disc.mesh().n_cells(); ++c) {
    kernel(c, local, &sys.jacobian_evaluations);
    const auto dofs1 = V1.cell_dofs(c);
    const auto sign1 = V1.cell_signs(c);
    const auto dofs2 = V2.cell_dofs(c);
    for (int i = 0; i < d1; ++i) {
      const auto si = static_cast<std::size_t>(i);
      for (int j = 0; j < d1; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const double s = sign1[si] * sign1[sj];
        tm.emplace_back(dofs1[si], dofs1[sj], s * local.mass(i, j));
        if (coriolis) tc.emplace_back(dofs1[si], dofs1[sj], s * local.coriolis(i, j));
      }
      sys.rhs[dofs1[si]] += sign1[si] * local.forcing[i];
    }
    for (int p = 0; p < d2; ++p) {
      const auto sp = static_cast<std::size_t>(p);
      for (int j = 0; j < d1; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        tb.emplace_back(dofs2[sp], dofs1[sj], sign1[sj] * local.divergence(p, j));
      }
      for (int q = 0; q < d2; ++q) {
        tp.emplace_back(dofs2[sp], dofs2[static_cast<std::size_t>(q)], local.pressure_mass(p, q));
      }
      sys.rhs[n1 + dofs2[sp]] += local.source[p];
    }
  }

  sys.blocks.mass = from_triplets(n1, n1, tm);
  sys.blocks.coriolis = from_triplets(n1, n1, tc);
  sys.blocks.divergence = from_triplets(n2, n1, tb);
  sys.blocks.pressure_mass = from_triplets(n2, n2, tp);

  tfull.reserve(tm.size() + tc.size() + 2 * tb.size() + tp.size());
  tfull.insert(tfull.end(), tm.begin(), tm.end());
  tfull.insert(tfull.end(), tc.begin(), tc.end());
  for (const auto& t : tb) {
    tfull.emplace_back(n1 + t.row(), t.col(), t.value());
    tfull.emplace_back(t.col(), n1 + t.row(), -t.value());
  }
  for (const auto& t : tp) tfull.emplace_back(n1 + t.row(), n1 + t.col(), -t.value());
  sys.matrix = from_triplets(n1 + n2, n1 + n2, tfull);
  return sys;
}

LinearSystem apply_inner_bc(LinearSystem system, const Discretization& disc) {
  std::vector<char> essential(static_cast<std::size_t>(system.size()), 0);
  for (int f : disc.facets().inner_boundary) {
    for (int d : disc.velocity_space()->facet_dofs(f)) essential[static_cast<std::size_t>(d)] = 1;
  }
  for (int d : system.essential_dofs) essential[static_cast<std::size_t>(d)] = 1;
  system.essential_dofs.clear();
  for (int i = 0; i < system.size(); ++i) {
    if (essential[static_cast<std::size_t>(i)]) system.essential_dofs.push_back(i);
  }

  Triplets kept;
  kept.reserve(static_cast<std::size_t>(system.matrix.nonZeros()));
  for (int col = 0; col < system.matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(system.matrix, col); it; ++it) {
      if (essential[static_cast<std::size_t>(it.row())] || essential[static_cast<std::size_t>(it.col())]) {
        continue;
      }
      kept.emplace_back(it.row(), it.col(), it.value());
    }
  }
  // Prescribed values are zero, so eliminated columns add nothing to the RHS.
  for (int d : system.essential_dofs) {
    kept.emplace_back(d, d, 1.0);
    system.rhs[d] = 0.0;
  }
  system.matrix = from_triplets(system.size(), system.size(), kept);
  return system;
}

Solution solve(const LinearSystem& system, const Discretization& disc, double tolerance) {
  const Eigen::VectorXd& b = system.rhs;
  const double bnorm = b.norm();
  Solution out{Field(disc.velocity_space()), Field(disc.pressure_space()), 0.0};
  if (system.n_velocity != disc.velocity_space()->n_dofs() ||
      system.n_pressure != disc.pressure_space()->n_dofs()) {
    throw std::invalid_argument("solve: system does not match the discretisation");
  }
  if (bnorm == 0.0) return out;

#ifdef HEDGEHOG_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(system.matrix);
  if (lu.info() != Eigen::Success) {
    throw SolverError("solve: sparse LU factorization failed", std::numeric_limits<double>::infinity());
  }
  Eigen::VectorXd z = lu.solve(b);
  Eigen::VectorXd r = b - system.matrix * z;
  double rel = r.norm() / bnorm;
  for (int step = 0; step < 3 && rel > tolerance; ++step) {
    z += lu.solve(r);
    r = b - system.matrix * z;
    rel = r.norm() / bnorm;
  }
  if (!(rel <= tolerance)) {
    std::ostringstream msg;
    msg << "solve: relative residual " << rel << " above tolerance " << tolerance;
    throw SolverError(msg.str(), rel);
  }
  out.velocity.coefficients = z.head(system.n_velocity);
  out.pressure.coefficients = z.tail(system.n_pressure);
  out.relative_residual = rel;
  return out;
}

double weak_residual(const LinearSystem& system, const Field& velocity, const Field& pressure) {
  Eigen::VectorXd z(system.size());
  z << velocity.coefficients, pressure.coefficients;
  Eigen::VectorXd r = system.matrix * z - system.rhs;
  for (int d : system.essential_dofs) r[d] = 0.0;
  return r.lpNorm<Eigen::Infinity>();
}

}  // namespace hedgehog
