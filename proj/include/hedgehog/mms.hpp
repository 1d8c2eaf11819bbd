#pragma once

// Manufactured-solution tooling: finite-difference shallow-atmosphere
// operators on S^2(a) x [0, H], the test case, forcing verification, error
// norms and the convergence driver.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hedgehog/assembly.hpp"
#include "hedgehog/geometry.hpp"

namespace hedgehog {

using ScalarField4 = std::function<double(const Vec4&)>;
using VectorField4 = std::function<Vec4(const Vec4&)>;
using ScalarField3 = std::function<double(const Vec3&)>;
using VectorField3 = std::function<Vec3(const Vec3&)>;

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Unit outward normal l = (x^, 0) of S^2(a) x R at x~.
Vec4 manifold_normal(const Vec4& xt);

/// u - (u.l) l.
Vec4 tangent_projection(const Vec4& u, const Vec4& xt);

/// Tangential calculus in the spherical frame (e_lambda, e_phi, i4), with
/// derivatives taken by central differences in (lambda, phi, x4). Points
/// close to the poles of the standard chart are handled in a chart whose
/// polar axis is x1.
class ShallowOperators {
public:
  explicit ShallowOperators(double a = 1.0, double H = 1.0, double step = kFiniteDifferenceStep);

  double a() const { return a_; }
  double H() const { return H_; }

  Vec4 grad(const ScalarField4& f, const Vec4& xt) const;
  /// Divergence of the tangential part of u.
  double div(const VectorField4& u, const Vec4& xt) const;
  /// Cross product of tangent vectors. Throws std::invalid_argument when an
  /// input has a normal component above 1e-10.
  Vec4 cross(const Vec4& v, const Vec4& w, const Vec4& xt) const;

  /// (I - l l^T) grad f computed with Cartesian differences in R^4.
  Vec4 projected_euclidean_grad(const ScalarField4& f, const Vec4& xt) const;

private:
  double a_;
  double H_;
  double step_;
};

/// Cartesian finite-difference operators in R^3 for the deep case.
class EuclideanOperators {
public:
  explicit EuclideanOperators(double step = kFiniteDifferenceStep) : step_(step) {}
  Vec3 grad(const ScalarField3& f, const Vec3& x) const;
  double div(const VectorField3& u, const Vec3& x) const;

private:
  double step_;
};

/// Exact fields compared against the discrete solution.
struct ExactSolution {
  std::function<Vec3(const PointContext&)> velocity;
  std::function<double(const PointContext&)> pressure;
};

/// The test problem on S^2(a) x [0, H] with q = (x4^2 - 1)(x4^2 - 4):
/// p = x1 x2 x3 q, u as printed, Omega = (0, 0, 0, x3 / 2).
class ManufacturedCase {
public:
  explicit ManufacturedCase(double a = 1.0, double H = 1.0, bool tangency_projection = true);

  double a() const { return ops_.a(); }
  double H() const { return ops_.H(); }
  bool tangency_projection() const { return tangency_projection_; }
  const ShallowOperators& operators() const { return ops_; }

  double pressure(const Vec4& xt) const;
  Vec4 velocity_printed(const Vec4& xt) const;
  /// Printed velocity, tangent-projected when the flag is set.
  Vec4 velocity(const Vec4& xt) const;
  Vec4 rotation(const Vec4& xt) const;

  Vec4 forcing_printed(const Vec4& xt) const;
  double source_printed(const Vec4& xt) const;

  /// u + 2 Omega x u + grad p with the (projected) velocity.
  Vec4 forcing(const Vec4& xt) const;
  /// div u - p with the (projected) velocity.
  double source(const Vec4& xt) const;

  /// u_printed . l = 2 x1 x2 x3 q / a, expanded by hand.
  static double normal_component_formula(const Vec4& xt, double a);

  /// Rotation and oracle-derived forcing on the manifold.
  ManifoldCoefficients manifold_coefficients() const;
  /// Same, or the printed forcing when `printed` is set.
  ManifoldCoefficients manifold_coefficients(bool printed) const;
  /// Fields pushed forward into the active coordinates at radially projected
  /// points.
  ExactSolution exact_solution() const;

private:
  ShallowOperators ops_;
  bool tangency_projection_;
};

/// Deep counterpart in R^3: p_d = p o phi^{-1}, u_d has the horizontal part of
/// the projected velocity and its x4 component along x^, and
/// Omega_d = (x~3 / 2) x^. Forcing from Euclidean differences.
class DeepCase {
public:
  explicit DeepCase(double a = 1.0, double H = 1.0);

  double pressure(const Vec3& x) const;
  Vec3 velocity(const Vec3& x) const;
  Vec3 rotation(const Vec3& x) const;
  Vec3 forcing(const Vec3& x) const;
  double source(const Vec3& x) const;

  /// Evaluated at the physical point of the active coordinates.
  Coefficients coefficients() const;
  ExactSolution exact_solution() const;

private:
  ManufacturedCase base_;
  EuclideanOperators ops_;
  double a_;
};

/// Deterministic points on S^2(a) x [0, H].
std::vector<Vec4> sample_points(std::size_t n, std::uint64_t seed, double a, double H);

inline constexpr std::uint64_t kDefaultSeed = 20260101;

struct ForcingReport {
  std::size_t n_points = 0;
  std::uint64_t seed = 0;
  double max_force_discrepancy = 0.0;   // max |F_derived - F_printed|
  double max_source_discrepancy = 0.0;  // max |g_derived - g_printed|
  double max_source_vs_pressure = 0.0;  // max |g_printed - p|
  double max_normal_component = 0.0;    // max |u_printed . l|
  double max_normal_formula = 0.0;      // max of the closed form
  double max_normal_mismatch = 0.0;     // max |u_printed . l - closed form|
  double max_normal_after_projection = 0.0;
  double max_force_normal = 0.0;        // max |F_derived . l|
  /// Values at (1, 1, 1, 0) / sqrt(3) a.
  Vec4 reference_point = Vec4::Zero();
  double reference_normal_component = 0.0;
  double reference_normal_formula = 0.0;
  double reference_source_printed = 0.0;
  double reference_velocity_x1 = 0.0;
  /// Derived forcing is used for solves when either discrepancy exceeds this.
  double consistency_threshold = 1e-8;

  bool printed_consistent() const {
    return max_force_discrepancy <= consistency_threshold &&
           max_source_discrepancy <= consistency_threshold;
  }
  std::string to_text() const;
  std::string to_json() const;
};

ForcingReport derive_forcing(const ManufacturedCase& mcase, const std::vector<Vec4>& points,
                             std::uint64_t seed = 0);
ForcingReport derive_forcing(const ManufacturedCase& mcase, std::size_t n = 100,
                             std::uint64_t seed = kDefaultSeed);

struct ErrorNorms {
  double err_u = 0.0;
  double err_p = 0.0;
  double norm_u = 0.0;
  double norm_p = 0.0;
};

/// L2 errors measured with the active Jacobian. quadrature_degree 0 selects
/// 2k + 8.
ErrorNorms l2_errors(const Field& u, const Field& p, const ExactSolution& exact,
                     const Discretization& disc, int quadrature_degree = 0);

struct StudyLevel {
  int refinement = 0;
  int layers = 1;
};

struct ConvergenceRow {
  int level = 0;
  int refinement = 0;
  int layers = 0;
  int ncells = 0;
  int ndofs = 0;
  double h_mesh = 0.0;
  double err_p = 0.0;
  double err_u = 0.0;
  std::optional<double> rate_p;
  std::optional<double> rate_u;
  double relative_residual = 0.0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  int degree = 1;
  Mode mode = Mode::shallow;
  bool derived_forcing = true;
  std::vector<ConvergenceRow> rows;

  static const char* csv_header();
  std::string to_csv() const;
  bool errors_decreasing() const;
};

struct StudyConfig {
  int degree = 1;
  Mode mode = Mode::shallow;
  std::vector<StudyLevel> levels{{1, 2}, {2, 4}, {3, 8}};
  double tolerance = 1e-10;
  int quadrature_degree = 0;
  ColumnDirection column_direction = ColumnDirection::vertex_average;
  bool coriolis_enabled = true;
  double inner_radius = 1.0;
  double thickness = 1.0;
};

/// Builds, assembles, solves and measures every level in order. `progress`
/// sees each completed row.
ConvergenceTable convergence_study(const StudyConfig& config,
                                   const std::function<void(const ConvergenceRow&)>& progress = {});

}  // namespace hedgehog
