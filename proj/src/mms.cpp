#include "hedgehog/mms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>
#include <json.hpp>

#include "hedgehog/quadrature.hpp"

namespace hedgehog {

Vec4 manifold_normal(const Vec4& xt) {
  const double r = xt.head<3>().norm();
  if (r == 0.0) throw GeometryError("manifold_normal: point on the axis x1 = x2 = x3 = 0");
  return {xt[0] / r, xt[1] / r, xt[2] / r, 0.0};
}

Vec4 tangent_projection(const Vec4& u, const Vec4& xt) {
  const Vec4 l = manifold_normal(xt);
  return u - u.dot(l) * l;
}

namespace {

// Spherical chart (lambda, phi, x4). The rotated chart relabels
// (X, Y, Z) = (x2, x3, x1) so that its poles sit on the x1 axis.
struct Chart {
  bool rotated = false;
  double a = 1.0;

  Vec4 lift(const Vec3& p, double s) const {
    return rotated ? Vec4(p[2], p[0], p[1], s) : Vec4(p[0], p[1], p[2], s);
  }
  Vec3 lower(const Vec4& x) const {
    return rotated ? Vec3(x[1], x[2], x[0]) : Vec3(x[0], x[1], x[2]);
  }
  Vec4 point(double lam, double ph, double s) const {
    return lift(a * Vec3(std::cos(ph) * std::cos(lam), std::cos(ph) * std::sin(lam), std::sin(ph)), s);
  }
  Vec4 e_lambda(double lam) const { return lift(Vec3(-std::sin(lam), std::cos(lam), 0.0), 0.0); }
  Vec4 e_phi(double lam, double ph) const {
    return lift(Vec3(-std::sin(ph) * std::cos(lam), -std::sin(ph) * std::sin(lam), std::cos(ph)), 0.0);
  }
};

struct ChartPoint {
  Chart chart;
  double lam = 0.0;
  double ph = 0.0;
  double s = 0.0;
};

ChartPoint locate(const Vec4& xt, double a) {
  const double r = xt.head<3>().norm();
  if (r == 0.0) throw GeometryError("shallow operators: point on the axis x1 = x2 = x3 = 0");
  ChartPoint c;
  c.chart.a = a;
  c.chart.rotated = std::abs(xt[2]) / r > 0.7;
  const Vec3 p = c.chart.lower(xt) / r;
  c.lam = std::atan2(p[1], p[0]);
  c.ph = std::asin(std::clamp(p[2], -1.0, 1.0));
  c.s = xt[3];
  return c;
}

template <class F>
double central(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

ShallowOperators::ShallowOperators(double a, double H, double step) : a_(a), H_(H), step_(step) {
  if (!(a > 0.0) || !(H > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("ShallowOperators: a, H and step must be positive");
  }
}

Vec4 ShallowOperators::grad(const ScalarField4& f, const Vec4& xt) const {
  const ChartPoint c = locate(xt, a_);
  const Chart& ch = c.chart;
  const double h = step_;
  const double d_lam = central([&](double t) { return f(ch.point(t, c.ph, c.s)); }, c.lam, h);
  const double d_phi = central([&](double t) { return f(ch.point(c.lam, t, c.s)); }, c.ph, h);
  const double d_s = central([&](double t) { return f(ch.point(c.lam, c.ph, t)); }, c.s, h);
  Vec4 g = d_lam / (a_ * std::cos(c.ph)) * ch.e_lambda(c.lam) + d_phi / a_ * ch.e_phi(c.lam, c.ph);
  g[3] = d_s;
  return g;
}

double ShallowOperators::div(const VectorField4& u, const Vec4& xt) const {
  const ChartPoint c = locate(xt, a_);
  const Chart& ch = c.chart;
  const double h = step_;
  const double d_lam = central(
      [&](double t) { return u(ch.point(t, c.ph, c.s)).dot(ch.e_lambda(t)); }, c.lam, h);
  const double d_phi = central(
      [&](double t) { return std::cos(t) * u(ch.point(c.lam, t, c.s)).dot(ch.e_phi(c.lam, t)); }, c.ph, h);
  const double d_s = central([&](double t) { return u(ch.point(c.lam, c.ph, t))[3]; }, c.s, h);
  return (d_lam + d_phi) / (a_ * std::cos(c.ph)) + d_s;
}

Vec4 ShallowOperators::cross(const Vec4& v, const Vec4& w, const Vec4& xt) const {
  const Vec4 l = manifold_normal(xt);
  if (std::abs(v.dot(l)) > 1e-10 || std::abs(w.dot(l)) > 1e-10) {
    std::ostringstream msg;
    msg << "tangent_cross: input not tangent (normal components " << v.dot(l) << ", " << w.dot(l) << ")";
    throw std::invalid_argument(msg.str());
  }
  const TangentFrame frame = tangent_frame(xt);
  return frame.vector(frame.components(v).cross(frame.components(w)));
}

Vec4 ShallowOperators::projected_euclidean_grad(const ScalarField4& f, const Vec4& xt) const {
  Vec4 g;
  for (int i = 0; i < 4; ++i) {
    g[i] = central(
        [&](double t) {
          Vec4 y = xt;
          y[i] = t;
          return f(y);
        },
        xt[i], step_);
  }
  return tangent_projection(g, xt);
}

Vec3 EuclideanOperators::grad(const ScalarField3& f, const Vec3& x) const {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    g[i] = central(
        [&](double t) {
          Vec3 y = x;
          y[i] = t;
          return f(y);
        },
        x[i], step_);
  }
  return g;
}

double EuclideanOperators::div(const VectorField3& u, const Vec3& x) const {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    d += central(
        [&](double t) {
          Vec3 y = x;
          y[i] = t;
          return u(y)[i];
        },
        x[i], step_);
  }
  return d;
}

namespace {

double vertical_profile(double x4) { return (x4 * x4 - 1.0) * (x4 * x4 - 4.0); }

}  // namespace

ManufacturedCase::ManufacturedCase(double a, double H, bool tangency_projection)
    : ops_(a, H), tangency_projection_(tangency_projection) {}

double ManufacturedCase::pressure(const Vec4& x) const {
  return x[0] * x[1] * x[2] * vertical_profile(x[3]);
}

Vec4 ManufacturedCase::velocity_printed(const Vec4& x) const {
  const double q = vertical_profile(x[3]);
  return {x[1] * x[2] * (1.0 - x[0] * x[0]) * q, x[0] * x[2] * (1.0 - x[1] * x[1]) * q,
          x[0] * x[1] * (1.0 - x[2] * x[2]) * q, 2.0 * x[0] * x[1] * x[2] * x[3] * (2.0 * x[3] * x[3] - 5.0)};
}

Vec4 ManufacturedCase::velocity(const Vec4& x) const {
  const Vec4 u = velocity_printed(x);
  return tangency_projection_ ? tangent_projection(u, x) : u;
}

Vec4 ManufacturedCase::rotation(const Vec4& x) const { return {0.0, 0.0, 0.0, 0.5 * x[2]}; }

Vec4 ManufacturedCase::forcing_printed(const Vec4& x) const {
  const double q = vertical_profile(x[3]);
  return x[2] * Vec4((x[1] * x[1] - x[2] * x[2]) * x[0] * q, (x[2] * x[2] - x[0] * x[0]) * x[1] * q,
                     (x[0] * x[0] - x[1] * x[1]) * x[2] * q, 0.0);
}

double ManufacturedCase::source_printed(const Vec4& x) const {
  return x[0] * x[1] * x[2] * vertical_profile(x[3]);
}

Vec4 ManufacturedCase::forcing(const Vec4& x) const {
  const Vec4 u = velocity(x);
  const Vec4 coriolis = ops_.cross(rotation(x), tangent_projection(u, x), x);
  return u + 2.0 * coriolis + ops_.grad([this](const Vec4& y) { return pressure(y); }, x);
}

double ManufacturedCase::source(const Vec4& x) const {
  return ops_.div([this](const Vec4& y) { return velocity(y); }, x) - pressure(x);
}

double ManufacturedCase::normal_component_formula(const Vec4& x, double a) {
  return 2.0 * x[0] * x[1] * x[2] * vertical_profile(x[3]) / a;
}

ManifoldCoefficients ManufacturedCase::manifold_coefficients() const { return manifold_coefficients(false); }

ManifoldCoefficients ManufacturedCase::manifold_coefficients(bool printed) const {
  ManifoldCoefficients c;
  const ManufacturedCase self = *this;
  c.rotation = [self](const Vec4& x) { return self.rotation(x); };
  if (printed) {
    c.forcing = [self](const Vec4& x) { return self.forcing_printed(x); };
    c.source = [self](const Vec4& x) { return self.source_printed(x); };
  } else {
    c.forcing = [self](const Vec4& x) { return self.forcing(x); };
    c.source = [self](const Vec4& x) { return self.source(x); };
  }
  return c;
}

ExactSolution ManufacturedCase::exact_solution() const {
  const ManufacturedCase self = *this;
  ExactSolution e;
  e.velocity = [self](const PointContext& c) { return c.pushforward(self.velocity(c.manifold)); };
  e.pressure = [self](const PointContext& c) { return self.pressure(c.manifold); };
  return e;
}

namespace {

// phi^{-1} without the domain check: chordal cells dip slightly below |x| = a.
Vec4 pull_back(const Vec3& x, double a) {
  const double r = x.norm();
  return {a * x[0] / r, a * x[1] / r, a * x[2] / r, r - a};
}

}  // namespace

DeepCase::DeepCase(double a, double H) : base_(a, H, true), a_(a) {}

double DeepCase::pressure(const Vec3& x) const { return base_.pressure(pull_back(x, a_)); }

Vec3 DeepCase::velocity(const Vec3& x) const {
  const Vec4 u = base_.velocity(pull_back(x, a_));
  return u.head<3>() + u[3] * x.normalized();
}

Vec3 DeepCase::rotation(const Vec3& x) const {
  const Vec4 xt = pull_back(x, a_);
  return 0.5 * xt[2] * x.normalized();
}

Vec3 DeepCase::forcing(const Vec3& x) const {
  const Vec3 u = velocity(x);
  return u + 2.0 * rotation(x).cross(u) + ops_.grad([this](const Vec3& y) { return pressure(y); }, x);
}

double DeepCase::source(const Vec3& x) const {
  return ops_.div([this](const Vec3& y) { return velocity(y); }, x) - pressure(x);
}

Coefficients DeepCase::coefficients() const {
  const DeepCase self = *this;
  Coefficients c;
  c.rotation = [self](const PointContext& p) { return self.rotation(p.x); };
  c.forcing = [self](const PointContext& p) { return self.forcing(p.x); };
  c.source = [self](const PointContext& p) { return self.source(p.x); };
  return c;
}

ExactSolution DeepCase::exact_solution() const {
  const DeepCase self = *this;
  ExactSolution e;
  e.velocity = [self](const PointContext& c) { return self.velocity(c.x); };
  e.pressure = [self](const PointContext& c) { return self.pressure(c.x); };
  return e;
}

std::vector<Vec4> sample_points(std::size_t n, std::uint64_t seed, double a, double H) {
  std::mt19937_64 rng(seed);
  // Raw 53-bit draws keep the sequence identical across standard libraries.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec4> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 2.0 * uniform() - 1.0;
    const double lam = 2.0 * std::numbers::pi * uniform();
    const double s = H * uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(a * rho * std::cos(lam), a * rho * std::sin(lam), a * z, s);
  }
  return out;
}

ForcingReport derive_forcing(const ManufacturedCase& mcase, const std::vector<Vec4>& points,
                             std::uint64_t seed) {
  ForcingReport r;
  r.n_points = points.size();
  r.seed = seed;
  const double a = mcase.a();
  for (const Vec4& x : points) {
    const Vec4 l = manifold_normal(x);
    const Vec4 F = mcase.forcing(x);
    r.max_force_discrepancy = std::max(r.max_force_discrepancy, (F - mcase.forcing_printed(x)).norm());
    r.max_source_discrepancy =
        std::max(r.max_source_discrepancy, std::abs(mcase.source(x) - mcase.source_printed(x)));
    r.max_source_vs_pressure =
        std::max(r.max_source_vs_pressure, std::abs(mcase.source_printed(x) - mcase.pressure(x)));
    const double un = mcase.velocity_printed(x).dot(l);
    const double formula = ManufacturedCase::normal_component_formula(x, a);
    r.max_normal_component = std::max(r.max_normal_component, std::abs(un));
    r.max_normal_formula = std::max(r.max_normal_formula, std::abs(formula));
    r.max_normal_mismatch = std::max(r.max_normal_mismatch, std::abs(un - formula));
    r.max_normal_after_projection =
        std::max(r.max_normal_after_projection, std::abs(tangent_projection(mcase.velocity_printed(x), x).dot(l)));
    r.max_force_normal = std::max(r.max_force_normal, std::abs(F.dot(l)));
  }
  const double c = a / std::sqrt(3.0);
  r.reference_point = Vec4(c, c, c, 0.0);
  r.reference_normal_component = mcase.velocity_printed(r.reference_point).dot(manifold_normal(r.reference_point));
  r.reference_normal_formula = ManufacturedCase::normal_component_formula(r.reference_point, a);
  r.reference_source_printed = mcase.source_printed(r.reference_point);
  r.reference_velocity_x1 = mcase.velocity_printed(r.reference_point)[0];
  return r;
}

ForcingReport derive_forcing(const ManufacturedCase& mcase, std::size_t n, std::uint64_t seed) {
  return derive_forcing(mcase, sample_points(n, seed, mcase.a(), mcase.H()), seed);
}

std::string ForcingReport::to_text() const {
  std::ostringstream s;
  s << std::scientific << std::setprecision(6);
  s << "forcing verification: " << n_points << " points, seed " << seed << "\n";
  s << "  max |F_derived - F_printed|      = " << max_force_discrepancy << "\n";
  s << "  max |g_derived - g_printed|      = " << max_source_discrepancy << "\n";
  s << "  max |g_printed - p|              = " << max_source_vs_pressure << "\n";
  s << "  max |u_printed . l|              = " << max_normal_component << "\n";
  s << "  max |2 x1 x2 x3 q / a|           = " << max_normal_formula << "\n";
  s << "  max |u.l - 2 x1 x2 x3 q / a|     = " << max_normal_mismatch << "\n";
  s << "  max |u.l| after projection       = " << max_normal_after_projection << "\n";
  s << "  max |F_derived . l|              = " << max_force_normal << "\n";
  s << "  at x = (1,1,1,0) a/sqrt(3): u.l = " << reference_normal_component
    << ", closed form = " << reference_normal_formula << ", g_printed = " << reference_source_printed
    << ", u_printed[0] = " << reference_velocity_x1 << "\n";
  s << "  printed forcing " << (printed_consistent() ? "consistent" : "inconsistent")
    << " with the exact solution (threshold " << consistency_threshold << "); solves use the "
    << (printed_consistent() ? "printed" : "derived") << " forcing\n";
  return s.str();
}

std::string ForcingReport::to_json() const {
  nlohmann::ordered_json j;
  j["n_points"] = n_points;
  j["seed"] = seed;
  j["max_force_discrepancy"] = max_force_discrepancy;
  j["max_source_discrepancy"] = max_source_discrepancy;
  j["max_source_vs_pressure"] = max_source_vs_pressure;
  j["max_normal_component"] = max_normal_component;
  j["max_normal_formula"] = max_normal_formula;
  j["max_normal_mismatch"] = max_normal_mismatch;
  j["max_normal_after_projection"] = max_normal_after_projection;
  j["max_force_normal"] = max_force_normal;
  j["reference_point"] = {reference_point[0], reference_point[1], reference_point[2], reference_point[3]};
  j["reference_normal_component"] = reference_normal_component;
  j["reference_normal_formula"] = reference_normal_formula;
  j["reference_source_printed"] = reference_source_printed;
  j["reference_velocity_x1"] = reference_velocity_x1;
  j["consistency_threshold"] = consistency_threshold;
  j["printed_consistent"] = printed_consistent();
  j["forcing_used"] = printed_consistent() ? "printed" : "derived";
  return j.dump(2) + "\n";
}

ErrorNorms l2_errors(const Field& u, const Field& p, const ExactSolution& exact, const Discretization& disc,
                     int quadrature_degree) {
  const int degree = quadrature_degree > 0 ? quadrature_degree : 2 * disc.degree() + 8;
  const QuadratureRule rule = quadrature_prism(degree);
  const auto tab_u = u.space->element().tabulate(rule.points);
  const auto tab_p = p.space->element().tabulate(rule.points);
  ErrorNorms e;
  for (int c = 0; c < disc.mesh().n_cells(); ++c) {
    const Eigen::VectorXd cu = u.local(c);
    const Eigen::VectorXd cp = p.local(c);
    for_each_quadrature_point(disc, c, rule, [&](int q, const PointContext& ctx, const JacobianSample& J) {
      const auto sq = static_cast<std::size_t>(q);
      const double dx = rule.weights[sq] * J.det;
      const Vec3 uh = J.J * (tab_u[sq].values.transpose() * cu) / J.det;
      const double ph = tab_p[sq].values.col(0).dot(cp);
      const Vec3 ue = exact.velocity(ctx);
      const double pe = exact.pressure(ctx);
      e.err_u += dx * (uh - ue).squaredNorm();
      e.norm_u += dx * ue.squaredNorm();
      e.err_p += dx * (ph - pe) * (ph - pe);
      e.norm_p += dx * pe * pe;
    });
  }
  e.err_u = std::sqrt(e.err_u);
  e.err_p = std::sqrt(e.err_p);
  e.norm_u = std::sqrt(e.norm_u);
  e.norm_p = std::sqrt(e.norm_p);
  return e;
}

const char* ConvergenceTable::csv_header() {
  return "level,refinement,layers,ncells,ndofs,h_mesh,err_p,err_u,rate_p,rate_u";
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream s;
  s << csv_header() << "\n" << std::setprecision(12);
  for (const auto& r : rows) {
    s << r.level << ',' << r.refinement << ',' << r.layers << ',' << r.ncells << ',' << r.ndofs << ','
      << r.h_mesh << ',' << r.err_p << ',' << r.err_u << ',';
    if (r.rate_p) s << *r.rate_p;
    s << ',';
    if (r.rate_u) s << *r.rate_u;
    s << "\n";
  }
  return s.str();
}

bool ConvergenceTable::errors_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].err_p < rows[i - 1].err_p) || !(rows[i].err_u < rows[i - 1].err_u)) return false;
  }
  return true;
}

ConvergenceTable convergence_study(const StudyConfig& config,
                                   const std::function<void(const ConvergenceRow&)>& progress) {
  if (config.levels.empty()) throw std::invalid_argument("convergence_study: no levels given");
  ConvergenceTable table;
  table.degree = config.degree;
  table.mode = config.mode;

  const ManufacturedCase mcase(config.inner_radius, config.thickness, true);
  const DeepCase dcase(config.inner_radius, config.thickness);
  const bool printed = derive_forcing(mcase).printed_consistent();
  table.derived_forcing = config.mode == Mode::deep || !printed;

  ProblemConfig problem;
  problem.mode = config.mode;
  problem.coriolis_enabled = config.coriolis_enabled;
  problem.degree = config.degree;
  problem.quadrature_degree = config.quadrature_degree;
  problem.tolerance = config.tolerance;
  problem.coefficients = config.mode == Mode::shallow ? pushed_forward(mcase.manifold_coefficients(printed))
                                                      : dcase.coefficients();
  const ExactSolution exact = config.mode == Mode::shallow ? mcase.exact_solution() : dcase.exact_solution();

  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const StudyLevel& lv = config.levels[i];
    MeshConfig mc;
    mc.inner_radius = config.inner_radius;
    mc.thickness = config.thickness;
    mc.refinement_level = lv.refinement;
    mc.n_layers = lv.layers;
    const Discretization disc(build_extruded_mesh(mc), config.degree, config.mode, config.column_direction);
    const LinearSystem system = apply_inner_bc(assemble(problem, disc), disc);
    const Solution sol = solve(system, disc, config.tolerance);
    const ErrorNorms err = l2_errors(sol.velocity, sol.pressure, exact, disc, config.quadrature_degree);

    ConvergenceRow row;
    row.level = static_cast<int>(i);
    row.refinement = lv.refinement;
    row.layers = lv.layers;
    row.ncells = disc.mesh().n_cells();
    row.ndofs = disc.n_dofs();
    row.h_mesh = disc.mesh_size();
    row.err_p = err.err_p;
    row.err_u = err.err_u;
    row.relative_residual = sol.relative_residual;
    if (!table.rows.empty()) {
      const ConvergenceRow& prev = table.rows.back();
      row.rate_p = std::log2(prev.err_p / row.err_p);
      row.rate_u = std::log2(prev.err_u / row.err_u);
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    table.rows.push_back(row);
    if (progress) progress(row);
  }
  return table;
}

}  // namespace hedgehog
