#pragma once

// Subcommands of the hedgehog command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hedgehog/assembly.hpp"
#include "hedgehog/mms.hpp"

namespace hedgehog {

struct RunConfig {
  int degree = 1;
  Mode mode = Mode::shallow;
  double tolerance = 1e-10;
  int quadrature_degree = 0;
  ColumnDirection column_direction = ColumnDirection::vertex_average;

  // export-mesh
  int refinement = 0;
  int layers = 1;
  std::filesystem::path output_dir = ".";
  std::string prefix = "mesh";

  // verify-forcing
  std::size_t n_points = 100;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::filesystem::path> json_path;

  // convergence
  std::vector<StudyLevel> levels{{1, 2}, {2, 4}, {3, 8}};
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> forcing_report_path;
  bool check = false;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// "1:2,2:4,3:8" -> {(1, 2), (2, 4), (3, 8)}.
std::vector<StudyLevel> parse_levels(const std::string& text);
Mode parse_mode(const std::string& text);
ColumnDirection parse_column_direction(const std::string& text);

struct ExportResult {
  std::filesystem::path annulus_path;
  std::filesystem::path hedgehog_path;
  std::size_t annulus_points = 0;
  std::size_t hedgehog_points = 0;
  int cells = 0;
  /// Distance at the outer surface between the copies of a shared vertex in
  /// two adjacent columns, over all base edges.
  double min_outer_gap = 0.0;
  double max_outer_gap = 0.0;
};

ExportResult cmd_export_mesh(const RunConfig& config, std::ostream& out);

/// Prints the text report and writes JSON to config.json_path when set.
ForcingReport cmd_verify_forcing(const RunConfig& config, std::ostream& out);

struct RateWindows {
  double p_min = 0.0;
  double p_max = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  bool u_min_exclusive = false;
  bool u_max_exclusive = false;

  bool contains(double rate_p, double rate_u) const;
  std::string describe() const;
};

/// Acceptance windows for the final observed rates.
RateWindows rate_windows(int degree);

/// Runs the study and writes CSV to config.csv_path (or `out`). Returns the
/// process exit status: 1 on solver failure, 2 when --check fails.
int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err,
                    ConvergenceTable* table = nullptr);

}  // namespace hedgehog
