#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>

#include "mrlt/cli_runner.hpp"

using namespace mrlt;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multiresolution finite volumes with local time stepping"};
  std::string config_path, problem, scheme, out;
  int max_level = 0, snapshot_every = -1, reference_level = -1;
  double epsilon = 0.0, cfl = 0.0, tend = 0.0;
  bool convergence = false;

  app.add_option("--config", config_path, "config file (key = value, [run] and [params])");
  app.add_option("--problem", problem, "advection1d, burgers1d, burgers2d, flame1d, euler2d");
  app.add_option("--scheme", scheme, "fv-rk2, fv-rk3, mr-rk2, mr-rk3, mrlt-rk2, mrlt-nerk2, mrlt-nerk3");
  app.add_option("--max-level", max_level, "finest level L");
  app.add_option("--epsilon", epsilon, "threshold");
  app.add_option("--cfl", cfl, "Courant number");
  app.add_option("--tend", tend, "final time");
  app.add_option("--out", out, "output directory");
  app.add_option("--snapshot-every", snapshot_every, "cycles between snapshots (0: final only)");
  app.add_option("--reference-level", reference_level, "level of the FV/RK3 reference (0: none)");
  app.add_flag("--convergence", convergence, "run the fixed two-grid convergence harness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (convergence) {
      const std::vector<SchemeKind> schemes = {
          SchemeKind::FV_RK2, SchemeKind::MR_RK2, SchemeKind::MRLT_RK2, SchemeKind::MRLT_NERK2,
          SchemeKind::FV_RK3, SchemeKind::MR_RK3, SchemeKind::MRLT_NERK3};
      const auto rows = convergence_harness(schemes, {1.6e-4, 0.8e-4, 0.4e-4, 0.2e-4});
      const std::string table = format_convergence_table(rows);
      std::fputs(table.c_str(), stdout);
      if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream(std::filesystem::path(out) / "convergence.txt") << table;
      }
      return 0;
    }

    KeyValues kv;
    auto given = [&](const char* flag) { return app.count(flag) > 0; };
    if (given("--problem")) kv.emplace_back("problem", problem);
    if (given("--scheme")) kv.emplace_back("scheme", scheme);
    if (given("--max-level")) kv.emplace_back("L", std::to_string(max_level));
    if (given("--epsilon")) kv.emplace_back("epsilon", fmt::format("{}", epsilon));
    if (given("--cfl")) kv.emplace_back("sigma", fmt::format("{}", cfl));
    if (given("--tend")) kv.emplace_back("t_final", fmt::format("{}", tend));
    if (given("--out")) kv.emplace_back("out", out);
    if (given("--snapshot-every")) kv.emplace_back("snapshot_every", std::to_string(snapshot_every));
    if (given("--reference-level")) kv.emplace_back("reference_level", std::to_string(reference_level));

    const RunConfig cfg = config_path.empty() ? parse_config("", kv) : load_config(config_path, kv);
    const RunMetrics m = run(cfg);
    fmt::print("{} {} L={} cycles={} wall={:.3f}s compression mean={:.2f}% final={:.2f}%\n",
               cfg.problem, scheme_name(cfg.scheme), cfg.max_level, m.cycles, m.wall_seconds,
               m.compression.mean(), m.compression.final());
    for (std::size_t k = 0; k < m.e_l1.size(); ++k) fmt::print("e_L1[{}] = {:.6e}\n", k, m.e_l1[k]);
    return 0;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
