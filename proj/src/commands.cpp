#include "hedgehog/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hedgehog/vtk.hpp"

namespace hedgehog {

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid configuration: " + m); };
  if (degree < 1 || degree > 2) fail("k must be 1 or 2");
  if (!(tolerance > 0.0)) fail("tolerance must be positive");
  if (quadrature_degree < 0 || quadrature_degree > 40) fail("quadrature degree must lie in 0..40");
  if (refinement < 0 || refinement > 8) fail("refinement must lie in 0..8");
  if (layers < 1) fail("layers must be at least 1");
  if (n_points == 0) fail("at least one sample point is required");
  if (levels.empty()) fail("no convergence levels given");
  for (const auto& l : levels) {
    if (l.refinement < 0 || l.refinement > 8 || l.layers < 1) fail("bad level specification");
  }
}

std::vector<StudyLevel> parse_levels(const std::string& text) {
  std::vector<StudyLevel> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("level '" + item + "' is not refinement:layers");
    try {
      std::size_t used1 = 0, used2 = 0;
      const std::string r = item.substr(0, colon);
      const std::string l = item.substr(colon + 1);
      StudyLevel lv{std::stoi(r, &used1), std::stoi(l, &used2)};
      if (used1 != r.size() || used2 != l.size()) throw std::invalid_argument(item);
      out.push_back(lv);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("level '" + item + "' is not refinement:layers");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty level list");
  return out;
}

Mode parse_mode(const std::string& text) {
  if (text == "shallow") return Mode::shallow;
  if (text == "deep") return Mode::deep;
  throw std::invalid_argument("mode must be 'shallow' or 'deep', got '" + text + "'");
}

ColumnDirection parse_column_direction(const std::string& text) {
  if (text == "vertex-average") return ColumnDirection::vertex_average;
  if (text == "facet-normal") return ColumnDirection::facet_normal;
  throw std::invalid_argument("column direction must be 'vertex-average' or 'facet-normal', got '" + text + "'");
}

ExportResult cmd_export_mesh(const RunConfig& config, std::ostream& out) {
  config.validate();
  MeshConfig mc;
  mc.refinement_level = config.refinement;
  mc.n_layers = config.layers;
  const ExtrudedMesh mesh = build_extruded_mesh(mc);
  const CoordinateField hedgehog = hedgehog_coordinates(mesh, config.column_direction);

  ExportResult r;
  r.annulus_path = config.output_dir / (config.prefix + "_annulus.vtk");
  r.hedgehog_path = config.output_dir / (config.prefix + "_hedgehog.vtk");
  const VtkGrid annulus = annulus_grid(mesh);
  const VtkGrid hog = hedgehog_grid(mesh, hedgehog);
  write_vtk(annulus, r.annulus_path);
  write_vtk(hog, r.hedgehog_path);
  r.annulus_points = annulus.points.size();
  r.hedgehog_points = hog.points.size();
  r.cells = mesh.n_cells();

  const BaseSphereMesh& base = mesh.base();
  const int top = mesh.n_layers() - 1;
  r.min_outer_gap = std::numeric_limits<double>::infinity();
  for (int e = 0; e < base.n_edges(); ++e) {
    const int v = base.edges[static_cast<std::size_t>(e)][0];
    Vec3 copies[2];
    for (int s = 0; s < 2; ++s) {
      const int column = base.edge_triangles[static_cast<std::size_t>(e)][static_cast<std::size_t>(s)];
      const int cell = mesh.cell_index(column, top);
      const auto tri = mesh.cell_base_vertices(cell);
      const auto local = static_cast<std::size_t>(std::find(tri.begin(), tri.end(), v) - tri.begin());
      copies[s] = hedgehog.cell(cell)[3 + local];
    }
    const double gap = (copies[0] - copies[1]).norm();
    r.min_outer_gap = std::min(r.min_outer_gap, gap);
    r.max_outer_gap = std::max(r.max_outer_gap, gap);
  }

  out << std::setprecision(6);
  out << "annulus:  " << r.annulus_path.string() << " (" << r.annulus_points << " points, " << r.cells
      << " wedges)\n";
  out << "hedgehog: " << r.hedgehog_path.string() << " (" << r.hedgehog_points << " points, " << r.cells
      << " wedges)\n";
  out << "outer-surface gap between adjacent columns: min " << r.min_outer_gap << ", max " << r.max_outer_gap
      << "\n";
  return r;
}

ForcingReport cmd_verify_forcing(const RunConfig& config, std::ostream& out) {
  config.validate();
  const ManufacturedCase mcase;
  const ForcingReport report = derive_forcing(mcase, config.n_points, config.seed);
  out << report.to_text();
  if (config.json_path) {
    std::ofstream f(*config.json_path);
    if (!f) throw std::runtime_error("cannot open '" + config.json_path->string() + "' for writing");
    f << report.to_json();
  }
  return report;
}

bool RateWindows::contains(double rate_p, double rate_u) const {
  const bool p_ok = rate_p >= p_min && rate_p <= p_max;
  const bool u_lo = u_min_exclusive ? rate_u > u_min : rate_u >= u_min;
  const bool u_hi = u_max_exclusive ? rate_u < u_max : rate_u <= u_max;
  return p_ok && u_lo && u_hi;
}

std::string RateWindows::describe() const {
  std::ostringstream s;
  s << "rate_p in [" << p_min << ", ";
  if (p_max == std::numeric_limits<double>::infinity()) {
    s << "inf)";
  } else {
    s << p_max << "]";
  }
  s << ", rate_u in " << (u_min_exclusive ? "(" : "[") << u_min << ", " << u_max << (u_max_exclusive ? ")" : "]");
  return s.str();
}

RateWindows rate_windows(int degree) {
  if (degree == 1) return {0.8, 1.3, 0.8, 1.3, false, false};
  return {1.7, std::numeric_limits<double>::infinity(), 1.0, 2.0, true, true};
}

int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err, ConvergenceTable* table_out) {
  config.validate();
  StudyConfig study;
  study.degree = config.degree;
  study.mode = config.mode;
  study.levels = config.levels;
  study.tolerance = config.tolerance;
  study.quadrature_degree = config.quadrature_degree;
  study.column_direction = config.column_direction;

  const ForcingReport report = derive_forcing(ManufacturedCase{}, config.n_points, config.seed);
  std::optional<std::filesystem::path> report_path = config.forcing_report_path;
  if (!report_path && config.csv_path) {
    report_path = config.csv_path->parent_path() / (config.csv_path->stem().string() + "_forcing.json");
  }
  if (report_path) {
    std::ofstream f(*report_path);
    if (!f) {
      err << "error: cannot write forcing report '" << report_path->string() << "'\n";
      return 1;
    }
    f << report.to_json();
  }

  ConvergenceTable table;
  try {
    table = convergence_study(study, [&err](const ConvergenceRow& r) {
      err << "level " << r.level << " (refinement " << r.refinement << ", layers " << r.layers << "): "
          << r.ndofs << " dofs, residual " << std::scientific << std::setprecision(2) << r.relative_residual
          << std::defaultfloat << ", " << std::fixed << std::setprecision(1) << r.seconds << " s\n"
          << std::defaultfloat;
    });
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (table_out) *table_out = table;

  const std::string csv = table.to_csv();
  if (config.csv_path) {
    std::ofstream f(*config.csv_path);
    if (!f) {
      err << "error: cannot write '" << config.csv_path->string() << "'\n";
      return 1;
    }
    f << csv;
    out << "wrote " << config.csv_path->string() << "\n";
  } else {
    out << csv;
  }

  const ConvergenceRow& last = table.rows.back();
  std::ostringstream summary;
  summary << std::setprecision(4) << "k=" << config.degree << ", " << to_string(config.mode) << ", "
          << (table.derived_forcing ? "derived" : "printed") << " forcing: ";
  if (last.rate_p && last.rate_u) {
    summary << "final rate_p = " << *last.rate_p << ", rate_u = " << *last.rate_u;
  } else {
    summary << "single level, no rates";
  }
  summary << "; errors " << (table.errors_decreasing() ? "decrease" : "do not decrease") << " monotonically\n";
  (config.csv_path ? out : err) << summary.str();

  if (config.check) {
    const RateWindows w = rate_windows(config.degree);
    if (!last.rate_p || !last.rate_u || !w.contains(*last.rate_p, *last.rate_u)) {
      err << "check failed: expected " << w.describe() << "\n";
      return 2;
    }
    err << "check passed: " << w.describe() << "\n";
  }
  return 0;
}

}  // namespace hedgehog
