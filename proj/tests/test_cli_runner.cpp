#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fmt/format.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mrlt/cli_runner.hpp"

using namespace mrlt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mrlt_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> records(const std::string& snap) {
  std::vector<std::string> out;
  std::istringstream in(snap);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l[0] != '#') out.push_back(l);
  }
  return out;
}

int exit_code(const std::string& args) {
  const int st = std::system((std::string(MRLT_RUN_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config("problem = burgers2d\nscheme = mrlt-nerk2\nL = 8\n");
  CHECK(c.problem == "burgers2d");
  CHECK(c.scheme == SchemeKind::MRLT_NERK2);
  CHECK(c.max_level == 8);
  CHECK(c.epsilon == 0.01);
  CHECK(c.sigma == 0.5);
  CHECK(c.t_final == 0.9);
  CHECK_FALSE(c.dt.has_value());

  const RunConfig f = parse_config(
      "# flame\n[run]\nproblem = flame1d\nscheme = mr-rk2\n\n[params]\nze = 12  # hotter\n",
      {{"epsilon", "0.005"}});
  CHECK(f.t_final == 5.0);
  CHECK(f.epsilon == 0.005);
  CHECK(f.params.at("ze") == 12.0);

  try {
    parse_config("problem = burgers2d\nepsilon = -1\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
  }
  try {
    parse_config("problem = burgers2d\nscheme = mr-rk2\nfoo = 1\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("scheme = mr-rk2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = nowhere\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = burgers2d\nsigma = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = burgers2d\nL = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = burgers2d\n[params]\nze = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = burgers2d\nL = 8\nreference_level = 7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = burgers2d\n[other]\n"), ConfigError);
}

TEST_CASE("uniform run writes one record per cell") {
  const fs::path out = scratch("fv");
  RunConfig c = parse_config("problem=burgers2d\nscheme=fv-rk2\nL=6\nt_final=0.01\n");
  c.out_dir = out.string();
  const RunMetrics m = run(c);
  CHECK(m.final_time == 0.01);
  const auto rec = records(slurp(out / "snapshot_00001.txt"));
  REQUIRE(rec.size() == 4096);
  for (const auto& r : rec) CHECK(r.rfind("6 ", 0) == 0);
  CHECK(fs::exists(out / "metrics.txt"));
  CHECK(fs::exists(out / "timing.txt"));
  CHECK(m.compression.mean() == 100.0);
}

TEST_CASE("adaptive runs are deterministic and tile the domain") {
  RunConfig c = parse_config("problem=burgers2d\nscheme=mrlt-nerk2\nL=5\nt_final=0.1\nsnapshot_every=1\n");
  const fs::path a = scratch("a"), b = scratch("b");
  c.out_dir = a.string();
  const RunMetrics m1 = run(c);
  c.out_dir = b.string();
  run(c);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name == "timing.txt") continue;
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name);
  }
  CHECK(files >= 4);  // snapshots, grid, metrics
  CHECK(m1.final_time == 0.1);

  // Leaf areas add up to the unit square; no cell appears twice.
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snapshot", 0) != 0) continue;
    double area = 0.0;
    std::set<std::string> seen;
    for (const auto& r : records(slurp(e.path()))) {
      std::istringstream in(r);
      int level, i, j;
      double x, y, size;
      in >> level >> i >> j >> x >> y >> size;
      area += size * size;
      CHECK(seen.insert(fmt::format("{} {} {}", level, i, j)).second);
      CHECK(x == doctest::Approx((i + 0.5) * size));
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fv and mr with zero threshold coincide") {
  for (auto [fv, mr] : {std::pair{"fv-rk2", "mr-rk2"}, std::pair{"fv-rk3", "mr-rk3"}}) {
    const RunConfig a = parse_config(fmt::format("problem=burgers2d\nscheme={}\nL=5\nt_final=0.05\n", fv));
    const RunConfig b = parse_config(
        fmt::format("problem=burgers2d\nscheme={}\nL=5\nt_final=0.05\nepsilon=0\n", mr));
    const RunMetrics ma = run(a), mb = run(b);
    REQUIRE(ma.final_field.size() == mb.final_field.size());
    double d = 0.0;
    for (std::size_t i = 0; i < ma.final_field.size(); ++i) {
      d = std::max(d, std::fabs(ma.final_field.cells[i][0] - mb.final_field.cells[i][0]));
    }
    CHECK(d <= 1e-12);
    CHECK(mb.compression.final() == 100.0);
  }
}

TEST_CASE("reference runs and their cache") {
  const fs::path cache = scratch("cache");
  RunConfig c = parse_config("problem=burgers2d\nscheme=fv-rk3\nL=5\nt_final=0.05\n");
  c.cache_dir = cache.string();
  c.reference_level = 5;
  const RunMetrics m = run(c);
  REQUIRE(m.e_l1.size() == 1);
  CHECK(m.e_l1[0] == 0.0);

  // Second call reads the cache.
  int files = 0;
  fs::path file;
  for (const auto& e : fs::directory_iterator(cache)) {
    ++files;
    file = e.path();
  }
  REQUIRE(files == 1);
  const UniformField r1 = reference_run_manager(c, 5);
  CHECK(r1.cells == m.final_field.cells);

  // A corrupted body is detected and recomputed.
  std::string text = slurp(file);
  text[text.size() - 5] = text[text.size() - 5] == '1' ? '2' : '1';
  std::ofstream(file, std::ios::binary) << text;
  const UniformField r2 = reference_run_manager(c, 5);
  CHECK(r2.cells == m.final_field.cells);

  UniformField flat;
  flat.dim = 2;
  flat.level = 4;
  flat.cells.assign(256, State{0.7});
  const UniformField p = project_to_level(flat, 1);
  CHECK(p.size() == 4);
  for (const State& q : p.cells) CHECK(q[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(project_to_level(flat, 5), DomainError);
}

TEST_CASE("convergence harness") {
  CHECK_THROWS_AS(convergence_harness({SchemeKind::FV_RK2}, {1e-3, 5e-4}), ConfigError);
  CHECK_THROWS_AS(convergence_harness({SchemeKind::FV_RK2}, {1e-3, 4e-4, 2e-4}), ConfigError);
  // Short horizon: 20 finest steps at the coarsest dt.
  const auto rows = convergence_harness({SchemeKind::FV_RK2, SchemeKind::MRLT_NERK2},
                                        {1.6e-4, 0.8e-4, 0.4e-4}, 20 * 1.6e-4);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].p.size() == 1);
  CHECK(rows[0].p[0] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rows[1].p[0] == doctest::Approx(2.0).epsilon(0.1));
  const std::string t = format_convergence_table(rows);
  CHECK(t.find("mrlt-nerk2") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
  CHECK(exit_code("--problem burgers2d --scheme fv-rk2 --max-level 3 --tend 0.01") == 0);
  CHECK(exit_code("--problem burgers2d --epsilon -1") == 2);
  CHECK(exit_code("--problem nowhere") == 2);
  CHECK(exit_code("--bogus-flag") == 2);
  // Twenty times the stable Courant number blows up the Euler run.
  CHECK(exit_code("--problem euler2d --scheme fv-rk2 --max-level 4 --cfl 20 --tend 0.25") == 3);
}
