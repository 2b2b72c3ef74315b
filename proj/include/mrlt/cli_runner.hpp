#ifndef MRLT_CLI_RUNNER_HPP_
#define MRLT_CLI_RUNNER_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrlt/diagnostics.hpp"
#include "mrlt/lt_scheduler.hpp"

namespace mrlt {

struct RunConfig {
  std::string problem;
  SchemeKind scheme = SchemeKind::MRLT_NERK2;
  int max_level = 8;
  double epsilon = 0.01;
  double sigma = 0.5;
  double t_final = 1.0;
  std::optional<double> dt;  // fixed finest step instead of the CFL limit
  std::string out_dir;       // empty: no files
  int snapshot_every = 0;    // in cycles (LT) or steps; 0 = final only
  int reference_level = 0;   // 0: no error evaluation
  std::string cache_dir = "ref_cache";
  std::map<std::string, double> params;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Line-oriented `key = value` text with [run] and [params] sections; keys
// before any section header belong to [run]. `overrides` are applied on
// top, as [run] keys. Unset values come from the problem's defaults.
RunConfig parse_config(const std::string& text, const KeyValues& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const KeyValues& overrides = {});

struct RunMetrics {
  std::vector<double> e_l1;  // per variable, empty without a reference
  double wall_seconds = 0.0;
  double final_time = 0.0;
  int cycles = 0;
  std::vector<std::size_t> leaf_counts;
  CompressionSeries compression;
  // Extremes over all recorded leaf states: variables, then derived columns.
  std::vector<double> value_min, value_max;
  UniformField final_field;  // level L
};

// Runs one configuration to t_final and writes its artifacts to out_dir.
RunMetrics run(const RunConfig& config);

// Uniform FV/RK3 solution at `level` for the config's problem, sigma and
// t_final; loaded from cache_dir when a valid copy exists.
UniformField reference_run_manager(const RunConfig& config, int level);
UniformField project_to_level(UniformField field, int level);

// Self-convergence on the frozen two-block advection grid (level 9 on
// [0, 0.5), level 8 on [0.5, 1)); FV schemes use the uniform level-9 grid.
struct ConvergenceRow {
  SchemeKind scheme;
  std::vector<double> dt;  // dt_list[i] for each p[i]
  std::vector<double> p;
};
std::vector<ConvergenceRow> convergence_harness(const std::vector<SchemeKind>& schemes,
                                                const std::vector<double>& dt_list,
                                                double t_final = 1.0);
std::string format_convergence_table(const std::vector<ConvergenceRow>& rows);

// Snapshot text for the leaves of a tree or a uniform field.
std::string snapshot_text(const Model& model, GradedTree& tree, double time, int64_t iteration,
                          SchemeKind scheme);
std::string snapshot_text(const Model& model, const UniformField& field, double time,
                          int64_t iteration, SchemeKind scheme);

}  // namespace mrlt

#endif  // MRLT_CLI_RUNNER_HPP_
