#include "mrlt/cli_runner.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mrlt {

namespace fs = std::filesystem;

// ------------------------------------------------------------------ config

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Draft {
  std::optional<std::string> problem, out, cache_dir;
  std::optional<SchemeKind> scheme;
  std::optional<int> L, snapshot_every, reference_level;
  std::optional<double> epsilon, sigma, t_final, dt;
  std::map<std::string, double> params;
};

std::string where(int line) { return line > 0 ? fmt::format("line {}: ", line) : std::string(); }

double to_double(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}bad number '{}' for '{}'", where(line), v, key));
  }
  return x;
}

int to_int(const std::string& key, const std::string& v, int line) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}bad integer '{}' for '{}'", where(line), v, key));
  }
  return x;
}

void apply_run_key(Draft& d, const std::string& key, const std::string& v, int line) {
  if (key == "problem") d.problem = v;
  else if (key == "scheme") d.scheme = parse_scheme(v);
  else if (key == "L") d.L = to_int(key, v, line);
  else if (key == "epsilon") d.epsilon = to_double(key, v, line);
  else if (key == "sigma") d.sigma = to_double(key, v, line);
  else if (key == "t_final") d.t_final = to_double(key, v, line);
  else if (key == "dt") d.dt = to_double(key, v, line);
  else if (key == "out") d.out = v;
  else if (key == "snapshot_every") d.snapshot_every = to_int(key, v, line);
  else if (key == "reference_level") d.reference_level = to_int(key, v, line);
  else if (key == "cache_dir") d.cache_dir = v;
  else throw ConfigError(fmt::format("{}unknown key '{}'", where(line), key));
}

RunConfig finish(const Draft& d) {
  if (!d.problem) throw ConfigError("missing key 'problem'");
  // Validates the problem name and its parameters.
  const auto model = make_model(*d.problem, d.params);
  const ProblemDefaults& def = model->defaults;

  RunConfig c;
  c.problem = *d.problem;
  c.params = d.params;
  c.scheme = d.scheme.value_or(SchemeKind::MRLT_NERK2);
  c.max_level = d.L.value_or(def.max_level);
  c.epsilon = d.epsilon.value_or(def.epsilon);
  c.sigma = d.sigma.value_or(def.sigma);
  c.t_final = d.t_final.value_or(def.t_final);
  c.dt = d.dt;
  c.out_dir = d.out.value_or("");
  c.snapshot_every = d.snapshot_every.value_or(0);
  c.reference_level = d.reference_level.value_or(0);
  c.cache_dir = d.cache_dir.value_or("ref_cache");

  if (c.max_level < 1 || c.max_level > kMaxLevel) {
    throw ConfigError(fmt::format("L must lie in [1, {}]", kMaxLevel));
  }
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(c.sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (!(c.t_final > 0.0)) throw ConfigError("t_final must be > 0");
  if (c.dt && !(*c.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (c.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  if (c.reference_level != 0 &&
      (c.reference_level < c.max_level || c.reference_level > kMaxLevel)) {
    throw ConfigError("reference_level must be 0 or lie in [L, " + std::to_string(kMaxLevel) + "]");
  }
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text, const KeyValues& overrides) {
  Draft d;
  std::istringstream in(text);
  std::string raw;
  std::string section = "run";
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", line));
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      if (section != "run" && section != "params") {
        throw ConfigError(fmt::format("line {}: unknown section '{}'", line, section));
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", line));
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(fmt::format("line {}: empty key or value", line));
    }
    if (section == "params") {
      d.params[key] = to_double(key, value, line);
    } else {
      apply_run_key(d, key, value, line);
    }
  }
  for (const auto& [k, v] : overrides) apply_run_key(d, k, v, 0);
  return finish(d);
}

RunConfig load_config(const fs::path& path, const KeyValues& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

// ---------------------------------------------------------------- output

namespace {

std::string header(const Model& model, SchemeKind scheme, double time, int64_t iteration,
                   std::size_t records) {
  std::string h = fmt::format("# problem={} scheme={} time={:.17g} iteration={} leaves={}\n# level",
                              model.name, scheme_name(scheme), time, iteration, records);
  const char* axes[] = {"i", "j", "k"};
  const char* xs[] = {"x", "y", "z"};
  for (int a = 0; a < model.dim; ++a) h += fmt::format(" {}", axes[a]);
  for (int a = 0; a < model.dim; ++a) h += fmt::format(" {}", xs[a]);
  h += " size";
  for (const auto& v : model.variables) h += " " + v;
  for (const auto& v : model.derived_names()) h += " " + v;
  return h + "\n";
}

void append_record(std::string& out, const Model& model, int level,
                   const std::array<int, kMaxDim>& coords, const std::array<double, kMaxDim>& x,
                   double size, const State& q) {
  out += std::to_string(level);
  for (int a = 0; a < model.dim; ++a) out += " " + std::to_string(coords[a]);
  for (int a = 0; a < model.dim; ++a) out += fmt::format(" {:.17g}", x[a]);
  out += fmt::format(" {:.17g}", size);
  for (int k = 0; k < model.nvars; ++k) out += fmt::format(" {:.17g}", q[k]);
  for (double v : model.derived(q)) out += fmt::format(" {:.17g}", v);
  out += '\n';
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::string snapshot_text(const Model& model, GradedTree& tree, double time, int64_t iteration,
                          SchemeKind scheme) {
  std::size_t count = 0;
  for (int l = 0; l <= tree.max_level(); ++l) count += tree.level(l).leaves.size();
  std::string out = header(model, scheme, time, iteration, count);
  for (int l = 0; l <= tree.max_level(); ++l) {
    for (int h : tree.handles_at(l)) {
      const CellRecord& c = tree.cell(h);
      if (c.kind != NodeKind::Leaf) continue;
      append_record(out, model, l, c.idx.coords, tree.center(c.idx), tree.dx(l, 0), c.q_n);
    }
  }
  return out;
}

std::string snapshot_text(const Model& model, const UniformField& field, double time,
                          int64_t iteration, SchemeKind scheme) {
  std::string out = header(model, scheme, time, iteration, field.size());
  const int n = field.n();
  for (std::size_t i = 0; i < field.size(); ++i) {
    std::array<int, kMaxDim> c{};
    std::array<double, kMaxDim> x{};
    std::size_t r = i;
    for (int a = 0; a < field.dim; ++a) {
      c[a] = static_cast<int>(r % n);
      r /= n;
      const double h = (model.hi[a] - model.lo[a]) / n;
      x[a] = model.lo[a] + (c[a] + 0.5) * h;
    }
    append_record(out, model, field.level, c, x, (model.hi[0] - model.lo[0]) / n, field.cells[i]);
  }
  return out;
}

namespace {

std::string grid_dump(GradedTree& tree) {
  std::string out = "# kind level coords (I internal, L leaf, V virtual)\n";
  for (int l = 0; l <= tree.max_level(); ++l) {
    for (int h : tree.handles_at(l)) {
      const CellRecord& c = tree.cell(h);
      const char k = c.kind == NodeKind::Leaf ? 'L' : c.kind == NodeKind::Virtual ? 'V' : 'I';
      out += fmt::format("{} {}", k, l);
      for (int a = 0; a < tree.dim(); ++a) out += " " + std::to_string(c.idx.coords[a]);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------- stepping

// Step for the next `span` finest steps so that t_final is hit exactly.
struct StepChoice {
  double dt;
  bool last;
};

StepChoice choose_step(double remaining, double limit, int64_t span) {
  const double whole = limit * static_cast<double>(span);
  const double k = std::max(1.0, std::ceil(remaining / whole * (1.0 - 1e-12)));
  return {remaining / (k * static_cast<double>(span)), k <= 1.0};
}

void check_states(const Model& model, std::span<const State> values, double t, RunMetrics* m) {
  for (const State& q : values) {
    for (int k = 0; k < model.nvars; ++k) {
      if (!std::isfinite(q[k])) throw NumericalError(fmt::format("non-finite state at t={}", t));
    }
    if (!model.admissible(q)) throw NumericalError(fmt::format("inadmissible state at t={}", t));
  }
  if (!m) return;
  for (const State& q : values) {
    std::vector<double> v(q.v.begin(), q.v.begin() + model.nvars);
    for (double d : model.derived(q)) v.push_back(d);
    if (m->value_min.empty()) {
      m->value_min = v;
      m->value_max = v;
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      m->value_min[k] = std::min(m->value_min[k], v[k]);
      m->value_max[k] = std::max(m->value_max[k], v[k]);
    }
  }
}

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

// Hook for per-record output; `tree` is null for uniform runs.
struct Recorder {
  const RunConfig& cfg;
  const Model& model;
  std::string metrics;
  int snapshots = 0;

  bool writing() const { return !cfg.out_dir.empty(); }
  void cycle(int n, double t, double dt, std::size_t leaves, double compression) {
    metrics += fmt::format("cycle={} time={:.17g} dt={:.17g} leaves={} compression={:.6f}\n", n, t,
                           dt, leaves, compression);
  }
  void snapshot(const std::string& text) {
    if (!writing()) return;
    write_file(fs::path(cfg.out_dir) / fmt::format("snapshot_{:05d}.txt", snapshots++), text);
  }
};

std::vector<double> uniform_volumes(std::size_t n, double v) { return std::vector<double>(n, v); }

double uniform_dt_limit(const Model& model, const UniformSolver& s, double sigma) {
  double dx = s.dx(0);
  for (int a = 1; a < model.dim; ++a) dx = std::min(dx, s.dx(a));
  return cfl_timestep(s.max_speed(), dx, sigma, model.dim, model.nu);
}

// Plain FV integration to t_final; shared by runs and reference runs.
void integrate_uniform(Model& model, UniformSolver& s, const RunConfig& cfg, RunMetrics* metrics,
                       Recorder* rec) {
  const std::vector<double> vol = uniform_volumes(s.cells().size(), s.cell_volume());
  double t = 0.0, wall = 0.0;
  int n = 0;
  for (bool last = false; !last;) {
    const auto t0 = SteadyClock::now();
    if (model.needs_cycle_update()) model.begin_cycle(s.cells(), vol);
    const double limit = cfg.dt ? *cfg.dt : uniform_dt_limit(model, s, cfg.sigma);
    const StepChoice c = choose_step(cfg.t_final - t, limit, 1);
    s.step(c.dt);
    last = c.last;
    t = last ? cfg.t_final : t + c.dt;
    wall += seconds_since(t0);
    check_states(model, s.cells(), t, metrics);
    ++n;
    if (metrics) {
      metrics->leaf_counts.push_back(s.cells().size());
      metrics->compression.percent.push_back(100.0);
    }
    if (rec) {
      rec->cycle(n, t, c.dt, s.cells().size(), 100.0);
      if (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0 && !last) {
        rec->snapshot(snapshot_text(model, s.field(), t, n, cfg.scheme));
      }
    }
  }
  if (metrics) {
    metrics->wall_seconds = wall;
    metrics->final_time = t;
    metrics->cycles = n;
  }
}

void run_uniform(Model& model, const RunConfig& cfg, RunMetrics& m, Recorder& rec) {
  UniformSolver s(model, cfg.max_level, scheme_order(cfg.scheme));
  s.init();
  rec.snapshot(snapshot_text(model, s.field(), 0.0, 0, cfg.scheme));
  integrate_uniform(model, s, cfg, &m, &rec);
  m.final_field = s.field();
  rec.snapshot(snapshot_text(model, m.final_field, m.final_time, m.cycles, cfg.scheme));
}

void run_tree(Model& model, const RunConfig& cfg, RunMetrics& m, Recorder& rec) {
  auto tree = model.make_tree(cfg.max_level);
  ThresholdPolicy policy;
  policy.epsilon = cfg.epsilon;
  build_adaptive_grid(
      *tree, [&](const GradedTree& g, const CellIndex& c) { return model.cell_average(g, c); },
      policy);
  rec.snapshot(snapshot_text(model, *tree, 0.0, 0, cfg.scheme));

  const bool lt = scheme_is_lt(cfg.scheme);
  std::optional<LtStepper> lts;
  std::optional<MrStepper> mrs;
  if (lt) lts.emplace(model, *tree, cfg.scheme, policy, true);
  else mrs.emplace(model, *tree, cfg.scheme, policy, true);
  const int64_t span = lt ? (int64_t{1} << cfg.max_level) : 1;

  std::vector<State> values;
  std::vector<double> volumes;
  double t = 0.0, wall = 0.0;
  int n = 0;
  for (bool last = false; !last;) {
    const auto t0 = SteadyClock::now();
    if (model.needs_cycle_update()) {
      collect_leaves(*tree, values, volumes);
      model.begin_cycle(values, volumes);
    }
    const double limit = cfg.dt ? *cfg.dt : cfl_timestep(model, *tree, cfg.sigma);
    const StepChoice c = choose_step(cfg.t_final - t, limit, span);
    if (lt && model.needs_cycle_update()) {
      lts->cycle(c.dt, [&] {
        collect_leaves(*tree, values, volumes);
        model.begin_cycle(values, volumes);
      });
    } else if (lt) {
      lts->cycle(c.dt);
    }
    else mrs->step(c.dt);
    last = c.last;
    t = last ? cfg.t_final : t + c.dt * static_cast<double>(span);
    wall += seconds_since(t0);
    collect_leaves(*tree, values, volumes);
    check_states(model, values, t, &m);
    ++n;
    const LeafStatistics st = leaf_statistics(*tree);
    m.leaf_counts.push_back(st.leaves);
    m.compression.percent.push_back(st.compression_percent);
    rec.cycle(n, t, c.dt, st.leaves, st.compression_percent);
    if (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0 && !last) {
      rec.snapshot(snapshot_text(model, *tree, t, n * span, cfg.scheme));
    }
  }
  m.wall_seconds = wall;
  m.final_time = t;
  m.cycles = n;
  rec.snapshot(snapshot_text(model, *tree, t, n * span, cfg.scheme));
  if (rec.writing()) write_file(fs::path(cfg.out_dir) / "grid.txt", grid_dump(*tree));
  m.final_field = reconstruct_uniform(*tree, cfg.max_level);
}

}  // namespace

RunMetrics run(const RunConfig& cfg) {
  auto model = make_model(cfg.problem, cfg.params);
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  Recorder rec{cfg, *model, {}, 0};
  RunMetrics m;
  if (scheme_is_adaptive(cfg.scheme)) run_tree(*model, cfg, m, rec);
  else run_uniform(*model, cfg, m, rec);

  if (cfg.reference_level > 0) {
    const UniformField ref = project_to_level(reference_run_manager(cfg, cfg.reference_level),
                                              cfg.max_level);
    m.e_l1 = l1_error(m.final_field, ref, model->nvars);
  }

  if (rec.writing()) {
    std::string s = fmt::format(
        "summary problem={} scheme={} L={} epsilon={} sigma={} t_final={} cycles={} "
        "mean_compression={:.6f} final_compression={:.6f}",
        cfg.problem, scheme_name(cfg.scheme), cfg.max_level, cfg.epsilon, cfg.sigma, cfg.t_final,
        m.cycles, m.compression.mean(), m.compression.final());
    for (std::size_t k = 0; k < m.e_l1.size(); ++k) {
      s += fmt::format(" e_l1_{}={:.10e}", model->variables[k], m.e_l1[k]);
    }
    write_file(fs::path(cfg.out_dir) / "metrics.txt", rec.metrics + s + "\n");
    // Wall time lives apart so the other artifacts stay byte-identical.
    write_file(fs::path(cfg.out_dir) / "timing.txt",
               fmt::format("wall_seconds={:.6f}\n", m.wall_seconds));
  }
  return m;
}

// ------------------------------------------------------------- reference

UniformField project_to_level(UniformField field, int level) {
  if (level > field.level || level < 0) {
    throw DomainError(fmt::format("cannot project level {} to level {}", field.level, level));
  }
  while (field.level > level) field = project_uniform(field);
  return field;
}

namespace {

uint32_t checksum(const std::string& s) {
  return static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

std::optional<UniformField> load_reference(const fs::path& p, const std::string& key, int dim,
                                           int level, int nvars) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return std::nullopt;
  std::string magic, k, sizes;
  if (!std::getline(f, magic) || magic != "mrlt-reference 1") return std::nullopt;
  if (!std::getline(f, k) || k != key) return std::nullopt;
  if (!std::getline(f, sizes)) return std::nullopt;
  std::size_t cells = 0;
  int nv = 0;
  unsigned crc = 0;
  if (std::sscanf(sizes.c_str(), "cells=%zu nvars=%d crc=%x", &cells, &nv, &crc) != 3) {
    return std::nullopt;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string body = ss.str();
  if (nv != nvars || checksum(body) != crc) return std::nullopt;

  UniformField out;
  out.dim = dim;
  out.level = level;
  out.cells.resize(cells);
  std::size_t expect = 1;
  for (int a = 0; a < dim; ++a) expect <<= level;
  if (cells != expect) return std::nullopt;
  const char* s = body.c_str();
  for (std::size_t i = 0; i < cells; ++i) {
    for (int v = 0; v < nvars; ++v) {
      char* end = nullptr;
      out.cells[i][v] = std::strtod(s, &end);
      if (end == s) return std::nullopt;
      s = end;
    }
  }
  return out;
}

}  // namespace

UniformField reference_run_manager(const RunConfig& cfg, int level) {
  auto model = make_model(cfg.problem, cfg.params);
  std::string key = fmt::format("problem={} level={} sigma={:a} t_final={:a}", cfg.problem, level,
                                cfg.sigma, cfg.t_final);
  if (cfg.dt) key += fmt::format(" dt={:a}", *cfg.dt);
  for (const auto& [k, v] : cfg.params) key += fmt::format(" {}={:a}", k, v);
  const fs::path dir = cfg.cache_dir;
  const fs::path file = dir / fmt::format("{}_L{}_{:08x}.ref", cfg.problem, level, checksum(key));

  if (auto cached = load_reference(file, key, model->dim, level, model->nvars)) return *cached;

  UniformSolver s(*model, level, 3);
  s.init();
  RunConfig rc = cfg;
  rc.scheme = SchemeKind::FV_RK3;
  integrate_uniform(*model, s, rc, nullptr, nullptr);
  UniformField out = s.field();

  std::string body;
  body.reserve(out.size() * model->nvars * 24);
  for (const State& q : out.cells) {
    for (int v = 0; v < model->nvars; ++v) body += fmt::format("{}{:a}", v ? " " : "", q[v]);
    body += '\n';
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!ec) {
    const fs::path tmp = file.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      f << "mrlt-reference 1\n" << key << '\n';
      f << fmt::format("cells={} nvars={} crc={:08x}\n", out.size(), model->nvars, checksum(body));
      f << body;
    }
    fs::rename(tmp, file, ec);
  }
  return out;
}

// ------------------------------------------------------------ convergence

namespace {

constexpr int kHarnessLevel = 9;

std::unique_ptr<GradedTree> harness_tree(const Model& m) {
  auto t = m.make_tree(kHarnessLevel);
  t->build_uniform(kHarnessLevel - 1);
  const std::vector<int> coarse = t->level(kHarnessLevel - 1).leaves;
  for (int h : coarse) {
    if (t->center(t->cell(h).idx)[0] >= 0.5) continue;
    const CellIndex idx = t->cell(h).idx;
    t->set_kind(h, NodeKind::Internal);
    for (const auto& c : t->child_indices(idx)) t->insert(c, NodeKind::Leaf);
  }
  ensure_graded_with_virtuals(*t, true);
  for (int h : t->all_leaves()) t->cell(h).q_n = m.cell_average(*t, t->cell(h).idx);
  return t;
}

// Leaf values weighted by cell size, so plain sums give the L1 norm.
std::vector<double> harness_run(Model& m, SchemeKind scheme, double dt, double t_final) {
  const double steps_d = std::round(t_final / dt);
  if (std::fabs(steps_d * dt - t_final) > 1e-9 * t_final) {
    throw ConfigError(fmt::format("dt={} does not divide t_final={}", dt, t_final));
  }
  const auto steps = static_cast<int64_t>(steps_d);
  std::vector<double> out;
  if (!scheme_is_adaptive(scheme)) {
    UniformSolver s(m, kHarnessLevel, scheme_order(scheme));
    s.init();
    for (int64_t i = 0; i < steps; ++i) s.step(dt);
    for (const State& q : s.cells()) out.push_back(q[0] * s.cell_volume());
    return out;
  }
  auto t = harness_tree(m);
  if (scheme_is_lt(scheme)) {
    if (steps % 2 != 0) throw ConfigError("LT harness needs an even number of fine steps");
    LtStepper lts(m, *t, scheme, ThresholdPolicy{}, false);
    for (int64_t i = 0; i < steps; ++i) lts.iteration(dt);
    lts.synchronize();
  } else {
    MrStepper mrs(m, *t, scheme, ThresholdPolicy{}, false);
    for (int64_t i = 0; i < steps; ++i) mrs.step(dt);
  }
  for (int l : {kHarnessLevel - 1, kHarnessLevel}) {
    for (int h : t->level(l).leaves) out.push_back(t->cell(h).q_n[0] * t->cell_volume(l));
  }
  return out;
}

}  // namespace

std::vector<ConvergenceRow> convergence_harness(const std::vector<SchemeKind>& schemes,
                                                const std::vector<double>& dt_list,
                                                double t_final) {
  if (dt_list.size() < 3) throw ConfigError("convergence harness needs at least 3 time steps");
  for (std::size_t i = 1; i < dt_list.size(); ++i) {
    if (std::fabs(dt_list[i] * 2.0 - dt_list[i - 1]) > 1e-12 * dt_list[i - 1]) {
      throw ConfigError("convergence harness: dt list must halve at each entry");
    }
  }
  auto m = make_model("advection1d");
  std::vector<ConvergenceRow> rows;
  for (SchemeKind s : schemes) {
    std::vector<std::vector<double>> runs;
    for (double dt : dt_list) runs.push_back(harness_run(*m, s, dt, t_final));
    ConvergenceRow r{s, {}, {}};
    for (std::size_t i = 0; i + 2 < runs.size(); ++i) {
      r.dt.push_back(dt_list[i]);
      r.p.push_back(self_convergence_order(runs[i], runs[i + 1], runs[i + 2]));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_convergence_table(const std::vector<ConvergenceRow>& rows) {
  if (rows.empty()) return {};
  std::string out = fmt::format("{:<12}", "scheme");
  for (double dt : rows.front().dt) out += fmt::format(" {:>12}", fmt::format("dt={:.1e}", dt));
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{:<12}", scheme_name(r.scheme));
    for (double p : r.p) out += fmt::format(" {:>12.4f}", p);
    out += '\n';
  }
  return out;
}

}  // namespace mrlt
