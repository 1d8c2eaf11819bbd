#pragma once

// Mixed discretisation of
//
//   u + 2 Omega x u + grad p = F,   div u - p = g
//
// with u in the BDM prism space V1 and p in the DG space V2:
//
//   [ M + C  -B^T ] [u]   [f]
//   [   B    -M_p ] [p] = [g]
//
// Shallow mode computes every metric term with the hedgehog coordinate field;
// deep mode uses the continuous annulus coordinates.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hedgehog/function_space.hpp"
#include "hedgehog/geometry.hpp"
#include "hedgehog/mesh.hpp"
#include "hedgehog/quadrature.hpp"

namespace hedgehog {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class Mode { shallow, deep };

const char* to_string(Mode mode);

/// Mesh, facets, spaces and the coordinate field used for metric terms.
class Discretization {
public:
  Discretization(ExtrudedMesh mesh, int degree, Mode mode,
                 ColumnDirection rule = ColumnDirection::vertex_average);

  const ExtrudedMesh& mesh() const { return mesh_; }
  const FacetSet& facets() const { return facets_; }
  Mode mode() const { return mode_; }
  int degree() const { return degree_; }
  const std::shared_ptr<const FunctionSpace>& velocity_space() const { return velocity_; }
  const std::shared_ptr<const FunctionSpace>& pressure_space() const { return pressure_; }
  /// Coordinates used for Jacobians: hedgehog (shallow) or annulus (deep).
  const CoordinateField& coordinates() const { return coordinates_; }
  /// Cell nodes pulled back to R^4.
  std::span<const Vec4, 6> manifold_nodes(int cell) const {
    return std::span<const Vec4, 6>(manifold_[static_cast<std::size_t>(cell)]);
  }
  int n_dofs() const { return velocity_->n_dofs() + pressure_->n_dofs(); }

  /// Largest cell diameter measured in the active coordinates.
  double mesh_size() const;

private:
  ExtrudedMesh mesh_;
  FacetSet facets_;
  Mode mode_;
  int degree_;
  std::shared_ptr<const FunctionSpace> velocity_;
  std::shared_ptr<const FunctionSpace> pressure_;
  CoordinateField coordinates_;
  std::vector<std::array<Vec4, 6>> manifold_;
};

/// What a coefficient provider sees at a quadrature point.
struct PointContext {
  int cell = -1;
  Vec3 xi = Vec3::Zero();
  /// Position in the active coordinates.
  Vec3 x = Vec3::Zero();
  /// Image of xi on the piecewise-flat element in R^4, radially projected onto
  /// S^2(a) x R.
  Vec4 manifold = Vec4::Zero();
  /// J pinv(J~): maps tangent 4-vectors into the active coordinates.
  Mat34 push = Mat34::Zero();

  Vec3 pushforward(const Vec4& v) const { return push * v; }
};

struct Coefficients {
  /// Rotation vector in the active coordinates; unset means zero.
  std::function<Vec3(const PointContext&)> rotation;
  std::function<Vec3(const PointContext&)> forcing;
  std::function<double(const PointContext&)> source;
};

/// Fields on S^2(a) x [0, H] in R^4 components.
struct ManifoldCoefficients {
  std::function<Vec4(const Vec4&)> rotation;
  std::function<Vec4(const Vec4&)> forcing;
  std::function<double(const Vec4&)> source;
};

/// Providers that push tangent 4-vectors forward with chi_e.
Coefficients pushed_forward(ManifoldCoefficients c);

struct ProblemConfig {
  Mode mode = Mode::shallow;
  bool coriolis_enabled = true;
  int degree = 1;
  /// 0 selects the default 2k + 8.
  int quadrature_degree = 0;
  double tolerance = 1e-10;
  Coefficients coefficients;

  int effective_quadrature_degree() const {
    return quadrature_degree > 0 ? quadrature_degree : 2 * degree + 8;
  }
};

struct SystemBlocks {
  SparseMatrix mass;           // V1 x V1
  SparseMatrix coriolis;       // V1 x V1
  SparseMatrix divergence;     // V2 x V1, B(i, j) = int phi_i div w_j
  SparseMatrix pressure_mass;  // V2 x V2
};

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> essential_dofs;
  int n_velocity = 0;
  int n_pressure = 0;
  SystemBlocks blocks;
  /// Jacobian factorizations performed while assembling.
  std::size_t jacobian_evaluations = 0;

  int size() const { return n_velocity + n_pressure; }
};

/// Visits the quadrature points of a cell. Affine cells factor their Jacobian
/// once; other cells once per point. `counter` accumulates factorizations.
void for_each_quadrature_point(
    const Discretization& disc, int cell, const QuadratureRule& rule,
    const std::function<void(int q, const PointContext&, const JacobianSample&)>& visit,
    std::size_t* counter = nullptr);

/// Element matrices of one cell in local, unsigned DOF order.
struct LocalSystem {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd coriolis;
  Eigen::MatrixXd divergence;  // dim V2 x dim V1
  Eigen::MatrixXd pressure_mass;
  Eigen::VectorXd forcing;
  Eigen::VectorXd source;

  /// [[M + C, -B^T], [B, -M_p]].
  Eigen::MatrixXd matrix() const;
};

/// Throws std::invalid_argument when config and discretisation disagree.
LocalSystem assemble_cell(const ProblemConfig& config, const Discretization& disc, int cell,
                          std::size_t* counter = nullptr);

/// Throws std::invalid_argument when config and discretisation disagree.
LinearSystem assemble(const ProblemConfig& config, const Discretization& disc);

/// Imposes u.n = 0 on every V1 DOF of the inner boundary by identity rows
/// and columns with zero right-hand side. The outer boundary stays natural.
LinearSystem apply_inner_bc(LinearSystem system, const Discretization& disc);

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

struct Solution {
  Field velocity;
  Field pressure;
  /// ||A z - b|| / ||b||, zero for a zero right-hand side.
  double relative_residual = 0.0;
};

/// Sparse LU solve. Throws SolverError when the factorization fails or the
/// relative residual stays above `tolerance`.
Solution solve(const LinearSystem& system, const Discretization& disc, double tolerance = 1e-10);

/// max |a(z; w_i) - L(w_i)| over the basis test functions, skipping
/// essential rows.
double weak_residual(const LinearSystem& system, const Field& velocity, const Field& pressure);

}  // namespace hedgehog
