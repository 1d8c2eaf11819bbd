#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hedgehog/commands.hpp"
#include "hedgehog/vtk.hpp"

using namespace hedgehog;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hedgehog_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("export-mesh writes both grids") {
  RunConfig config;
  config.output_dir = scratch("export");
  config.refinement = 0;
  config.layers = 1;
  std::ostringstream out;
  const ExportResult r = cmd_export_mesh(config, out);
  CHECK(r.annulus_points == 24);
  CHECK(r.hedgehog_points == 120);
  CHECK(r.cells == 20);
  CHECK(r.min_outer_gap > 0.0);
  CHECK(r.max_outer_gap >= r.min_outer_gap);
  REQUIRE(fs::exists(r.annulus_path));
  REQUIRE(fs::exists(r.hedgehog_path));

  const VtkGrid annulus = read_vtk(r.annulus_path);
  const VtkGrid hog = read_vtk(r.hedgehog_path);
  CHECK(annulus.points.size() == 24);
  CHECK(annulus.cells.size() == 20);
  CHECK(hog.points.size() == 120);
  CHECK(hog.cells.size() == 20);
  for (std::size_t c = 0; c < hog.column.size(); ++c) CHECK(hog.column[c] == static_cast<int>(c));

  const ExtrudedMesh mesh = build_extruded_mesh({1.0, 1.0, 0, 1});
  const VtkGrid expected = hedgehog_grid(mesh, hedgehog_coordinates(mesh));
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.points.size(); ++i)
    worst = std::max(worst, (expected.points[i] - hog.points[i]).norm());
  CHECK(worst <= 1e-12);
  CHECK(expected.cells == hog.cells);
  CHECK(out.str().find("hedgehog") != std::string::npos);
}

TEST_CASE("VTK round trip through a stream") {
  const ExtrudedMesh mesh = build_extruded_mesh({1.0, 0.5, 1, 2});
  const VtkGrid grid = annulus_grid(mesh);
  std::stringstream s;
  write_vtk(grid, s);
  const std::string text = s.str();
  CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(text.find("CELL_TYPES") != std::string::npos);
  const VtkGrid back = read_vtk(s);
  REQUIRE(back.points.size() == grid.points.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) worst = std::max(worst, (grid.points[i] - back.points[i]).norm());
  CHECK(worst <= 1e-12);
  CHECK(back.cells == grid.cells);
  CHECK(back.column == grid.column);
  CHECK_THROWS(write_vtk(grid, fs::path("/nonexistent-dir/x/mesh.vtk")));
  std::istringstream junk("not a vtk file\n");
  CHECK_THROWS(read_vtk(junk));
}

TEST_CASE("verify-forcing output is deterministic") {
  const fs::path dir = scratch("forcing");
  RunConfig config;
  config.json_path = dir / "a.json";
  std::ostringstream out1, out2;
  const ForcingReport r1 = cmd_verify_forcing(config, out1);
  config.json_path = dir / "b.json";
  cmd_verify_forcing(config, out2);
  CHECK(out1.str() == out2.str());
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(nlohmann::json::parse(slurp(dir / "a.json")) == nlohmann::json::parse(r1.to_json()));
  CHECK(r1.n_points == 100);
  CHECK(r1.seed == kDefaultSeed);
}

TEST_CASE("convergence CSV") {
  const fs::path dir = scratch("convergence");
  RunConfig config;
  config.levels = {{0, 1}, {1, 2}};
  config.csv_path = dir / "k1.csv";
  std::ostringstream out, err;
  ConvergenceTable table;
  CHECK(cmd_convergence(config, out, err, &table) == 0);
  const std::string csv = slurp(dir / "k1.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "level,refinement,layers,ncells,ndofs,h_mesh,err_p,err_u,rate_p,rate_u");
  CHECK(count_lines(csv) == 1 + config.levels.size());
  const std::string first = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  CHECK(first.size() >= 2);
  CHECK(first.substr(first.size() - 2) == ",,");
  CHECK(fs::exists(dir / "k1_forcing.json"));

  config.csv_path = dir / "again.csv";
  std::ostringstream o2, e2;
  cmd_convergence(config, o2, e2);
  CHECK(slurp(dir / "again.csv") == csv);

  config.check = true;
  config.csv_path.reset();
  std::ostringstream o3, e3;
  const int status = cmd_convergence(config, o3, e3);
  const ConvergenceRow& last = table.rows.back();
  const bool inside = rate_windows(1).contains(*last.rate_p, *last.rate_u);
  CHECK(status == (inside ? 0 : 2));
  CHECK(o3.str().rfind("level,", 0) == 0);
}

TEST_CASE("rate windows") {
  const RateWindows w1 = rate_windows(1);
  CHECK(w1.contains(1.0, 1.0));
  CHECK_FALSE(w1.contains(0.7, 1.0));
  CHECK_FALSE(w1.contains(1.0, 1.31));
  const RateWindows w2 = rate_windows(2);
  CHECK(w2.contains(1.98, 1.48));
  CHECK_FALSE(w2.contains(1.6, 1.5));
  CHECK_FALSE(w2.contains(2.0, 1.0));
  CHECK_FALSE(w2.contains(2.0, 2.0));
}

TEST_CASE("argument parsing") {
  const auto levels = parse_levels("1:2,2:4,3:8");
  REQUIRE(levels.size() == 3);
  CHECK(levels[2].refinement == 3);
  CHECK(levels[2].layers == 8);
  CHECK_THROWS_AS(parse_levels("1-2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_levels("a:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_levels("1:2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_levels(""), std::invalid_argument);
  CHECK(parse_mode("deep") == Mode::deep);
  CHECK(parse_mode("shallow") == Mode::shallow);
  CHECK_THROWS_AS(parse_mode("medium"), std::invalid_argument);
  CHECK(parse_column_direction("facet-normal") == ColumnDirection::facet_normal);
  CHECK_THROWS_AS(parse_column_direction("up"), std::invalid_argument);

  RunConfig config;
  CHECK_NOTHROW(config.validate());
  config.degree = 3;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.degree = 1;
  config.tolerance = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
