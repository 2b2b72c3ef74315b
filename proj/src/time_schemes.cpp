#include "mrlt/time_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrlt/models.hpp"

namespace mrlt {

std::pair<double, double> nerk_beta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("nerk_beta: theta must lie in (0, 1]");
  return {theta - 0.5 * theta * theta, 0.5 * theta * theta};
}

State nerk2_value(const State& qn, const State& f1, const State& f2, double dt, double theta) {
  const auto [b1, b2] = nerk_beta(theta);
  State partial = qn + (b1 * dt) * f1;
  return partial + (b2 * dt) * f2;
}

namespace {

struct SchemeName {
  SchemeKind kind;
  const char* name;
};

constexpr SchemeName kSchemes[] = {
    {SchemeKind::FV_RK2, "fv-rk2"},         {SchemeKind::FV_RK3, "fv-rk3"},
    {SchemeKind::MR_RK2, "mr-rk2"},         {SchemeKind::MR_RK3, "mr-rk3"},
    {SchemeKind::MRLT_RK2, "mrlt-rk2"},     {SchemeKind::MRLT_NERK2, "mrlt-nerk2"},
    {SchemeKind::MRLT_NERK3, "mrlt-nerk3"},
};

}  // namespace

SchemeKind parse_scheme(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) {
    return c == '/' || c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  for (const auto& s : kSchemes) {
    if (n == s.name) return s.kind;
  }
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string scheme_name(SchemeKind k) {
  for (const auto& s : kSchemes) {
    if (s.kind == k) return s.name;
  }
  return "?";
}

int scheme_order(SchemeKind k) {
  switch (k) {
    case SchemeKind::FV_RK3:
    case SchemeKind::MR_RK3:
    case SchemeKind::MRLT_NERK3: return 3;
    default: return 2;
  }
}

bool scheme_is_adaptive(SchemeKind k) { return k != SchemeKind::FV_RK2 && k != SchemeKind::FV_RK3; }

bool scheme_is_lt(SchemeKind k) {
  return k == SchemeKind::MRLT_RK2 || k == SchemeKind::MRLT_NERK2 || k == SchemeKind::MRLT_NERK3;
}

double cfl_timestep(double max_speed, double dx_finest, double sigma, int dim, double nu,
                    double fallback_dt) {
  double dt = std::numeric_limits<double>::infinity();
  if (max_speed > 0.0) dt = sigma * dx_finest / max_speed;
  if (nu > 0.0) dt = std::min(dt, sigma * dx_finest * dx_finest / (2.0 * dim * nu));
  if (!std::isfinite(dt)) {
    if (fallback_dt > 0.0) return fallback_dt;
    throw NumericalError("cfl_timestep: zero wave speed and no diffusion");
  }
  return dt;
}

double cfl_timestep(const Model& model, GradedTree& tree, double sigma, double fallback_dt) {
  double s = 0.0;
  for (int h : tree.all_leaves()) s = std::max(s, model.max_speed(tree.cell(h).q_n));
  double dx = tree.dx(tree.max_level(), 0);
  for (int a = 1; a < tree.dim(); ++a) dx = std::min(dx, tree.dx(tree.max_level(), a));
  return cfl_timestep(s, dx, sigma, tree.dim(), model.nu, fallback_dt);
}

}  // namespace mrlt
