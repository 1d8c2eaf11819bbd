#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hedgehog/commands.hpp"

int main(int argc, char** argv) {
  using namespace hedgehog;
  CLI::App app{"Shallow-atmosphere finite elements on the hedgehog mesh"};
  app.require_subcommand(1);

  RunConfig config;
  std::string mode = "shallow";
  std::string column = "vertex-average";
  std::string levels = "1:2,2:4,3:8";
  std::string json_path, csv_path, report_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-k,--degree", config.degree, "Element degree k (1 or 2)");
    sub->add_option("--mode", mode, "shallow or deep");
    sub->add_option("--column-direction", column, "vertex-average or facet-normal");
    sub->add_option("--quadrature-degree", config.quadrature_degree, "Quadrature degree (0: 2k+8)");
  };

  CLI::App* exp = app.add_subcommand("export-mesh", "Write the annulus and hedgehog meshes as legacy VTK");
  add_common(exp);
  exp->add_option("-r,--refinement", config.refinement, "Icosahedral refinement level");
  exp->add_option("-l,--layers", config.layers, "Number of radial layers");
  exp->add_option("-o,--output-dir", config.output_dir, "Output directory");
  exp->add_option("--prefix", config.prefix, "File name prefix");

  CLI::App* ver = app.add_subcommand("verify-forcing", "Compare printed and oracle-derived forcing");
  ver->add_option("-n,--points", config.n_points, "Number of sample points");
  ver->add_option("--seed", config.seed, "Sampling seed");
  ver->add_option("--json", json_path, "Write the report as JSON");

  CLI::App* conv = app.add_subcommand("convergence", "Run the manufactured-solution convergence study");
  add_common(conv);
  conv->add_option("--levels", levels, "Comma-separated refinement:layers pairs");
  conv->add_option("--tolerance", config.tolerance, "Relative residual tolerance of the solve");
  conv->add_option("--csv", csv_path, "CSV output path (default: stdout)");
  conv->add_option("--forcing-report", report_path, "Forcing report JSON path");
  conv->add_option("--seed", config.seed, "Seed of the forcing check");
  conv->add_flag("--check", config.check, "Exit nonzero when the final rates leave the acceptance windows");

  CLI11_PARSE(app, argc, argv);

  try {
    config.mode = parse_mode(mode);
    config.column_direction = parse_column_direction(column);
    if (!json_path.empty()) config.json_path = json_path;
    if (!csv_path.empty()) config.csv_path = csv_path;
    if (!report_path.empty()) config.forcing_report_path = report_path;
    if (*conv) config.levels = parse_levels(levels);

    if (*exp) {
      cmd_export_mesh(config, std::cout);
      return 0;
    }
    if (*ver) {
      cmd_verify_forcing(config, std::cout);
      return 0;
    }
    return cmd_convergence(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
