#include "mrlt/models.hpp"

#include <cmath>
#include <numbers>

namespace mrlt {

double burgers_godunov_flux(double qL, double qR) {
  if (qL > qR) {
    const double s = 0.5 * (qL + qR);
    return s > 0.0 ? burgers_physical(qL) : burgers_physical(qR);
  }
  if (qL > 0.0) return burgers_physical(qL);
  if (qR < 0.0) return burgers_physical(qR);
  return 0.0;
}

double euler_pressure(const State& q, double gamma) {
  const double rho = q[0];
  if (!(rho > 0.0)) throw NumericalError("euler_pressure: nonpositive density");
  const double p = (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / rho);
  if (!(p > 0.0)) throw NumericalError("euler_pressure: nonpositive pressure");
  return p;
}

double euler_sound_speed(const State& q, double gamma) {
  return std::sqrt(gamma * euler_pressure(q, gamma) / q[0]);
}

State euler_physical_flux(const State& q, int axis, double gamma) {
  const double p = euler_pressure(q, gamma);
  const double un = q[1 + axis] / q[0];
  State f = un * q;
  f[1 + axis] += p;
  f[3] += un * p;
  return f;
}

State euler_from_primitive(double rho, double vx, double vy, double p, double gamma) {
  return State{rho, rho * vx, rho * vy, p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy)};
}

namespace {

constexpr double kAusmBeta = 1.0 / 8.0;
constexpr double kAusmAlpha = 3.0 / 16.0;

double mach_plus(double m) {
  if (std::fabs(m) >= 1.0) return 0.5 * (m + std::fabs(m));
  const double a = m * m - 1.0;
  return 0.25 * (m + 1.0) * (m + 1.0) + kAusmBeta * a * a;
}

double mach_minus(double m) {
  if (std::fabs(m) >= 1.0) return 0.5 * (m - std::fabs(m));
  const double a = m * m - 1.0;
  return -0.25 * (m - 1.0) * (m - 1.0) - kAusmBeta * a * a;
}

double pressure_plus(double m) {
  if (std::fabs(m) >= 1.0) return m > 0.0 ? 1.0 : 0.0;
  const double a = m * m - 1.0;
  return 0.25 * (m + 1.0) * (m + 1.0) * (2.0 - m) + kAusmAlpha * m * a * a;
}

double pressure_minus(double m) {
  if (std::fabs(m) >= 1.0) return m < 0.0 ? 1.0 : 0.0;
  const double a = m * m - 1.0;
  return 0.25 * (m - 1.0) * (m - 1.0) * (2.0 + m) - kAusmAlpha * m * a * a;
}

}  // namespace

State ausm_plus_flux(const State& left, const State& right, int axis, double gamma) {
  const double pL = euler_pressure(left, gamma), pR = euler_pressure(right, gamma);
  const double aL = std::sqrt(gamma * pL / left[0]), aR = std::sqrt(gamma * pR / right[0]);
  const double a = 0.5 * (aL + aR);
  const double uL = left[1 + axis] / left[0], uR = right[1 + axis] / right[0];
  const double mL = uL / a, mR = uR / a;
  const double m = mach_plus(mL) + mach_minus(mR);
  const double p = pressure_plus(mL) * pL + pressure_minus(mR) * pR;
  // Convected vectors (rho, rho v, rho H).
  State phiL = left, phiR = right;
  phiL[3] += pL;
  phiR[3] += pR;
  State f = (a * 0.5 * (m + std::fabs(m))) * phiL + (a * 0.5 * (m - std::fabs(m))) * phiR;
  f[1 + axis] += p;
  return f;
}

double maccormack_flux(double TL, double TR, double v, double dx, double dt) {
  return 0.5 * v * (TL + TR) - 0.5 * v * v * dt / dx * (TR - TL);
}

double maccormack_advective_update(double Tm, double T0, double Tp, double v, double dx,
                                   double dt) {
  const double c = v * dt / dx;
  const double pred0 = T0 - c * (Tp - T0);
  const double predm = Tm - c * (T0 - Tm);
  const double corr = 0.5 * (T0 + pred0 - c * (pred0 - predm));
  return corr - T0;
}

double flame_reaction_rate(double T, const FlameParams& p) {
  const double y = 1.0 - T;
  return 0.5 * p.ze * p.ze * y * std::exp(p.ze * y / (p.tau * y - 1.0));
}

double flame_velocity(std::span<const State> values, std::span<const double> volumes,
                      const FlameParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += flame_reaction_rate(values[i][0], p) * volumes[i];
  }
  return s;
}

// ------------------------------------------------------------------ Model

State Model::cell_average(const GradedTree& tree, const CellIndex& idx) const {
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  const auto c = tree.center(idx);
  std::array<double, kMaxDim> h{};
  for (int a = 0; a < dim; ++a) h[a] = 0.5 * tree.dx(idx.level, a);
  State sum;
  const int ny = dim > 1 ? 4 : 1, nz = dim > 2 ? 4 : 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < 4; ++i) {
        std::array<double, kMaxDim> x = c;
        double w = gw[i];
        x[0] += h[0] * gx[i];
        if (dim > 1) {
          x[1] += h[1] * gx[j];
          w *= gw[j];
        }
        if (dim > 2) {
          x[2] += h[2] * gx[k];
          w *= gw[k];
        }
        sum += w * point_value(x);
      }
    }
  }
  return sum * (1.0 / static_cast<double>(1 << dim));
}

State Model::ghost(const State& inside, int axis, int side) const {
  const BoundaryCondition& b = bc[axis][side > 0 ? 1 : 0];
  if (b.kind == BoundaryCondition::Kind::Dirichlet) return 2.0 * b.value - inside;
  return inside;
}

std::unique_ptr<GradedTree> Model::make_tree(int max_level) const {
  return std::make_unique<GradedTree>(dim, max_level, lo, hi, bc);
}

namespace {

void set_bc(Model& m, BoundaryCondition::Kind k) {
  for (auto& a : m.bc) a[0].kind = a[1].kind = k;
}

}  // namespace

AdvectionModel::AdvectionModel() {
  name = "advection1d";
  variables = {"q"};
  set_bc(*this, BoundaryCondition::Kind::Periodic);
  defaults = {0.5, 0.01, 1.0, 9, 9};
}

State AdvectionModel::flux(const State& qL, const State& qR, int, double, double) const {
  return centered_flux(qL, qR, [this](const State& q) { return speed * q; });
}

State AdvectionModel::point_value(const std::array<double, kMaxDim>& x) const {
  const double d = x[0] - 0.25;
  return State{std::exp(-100.0 * d * d)};
}

Burgers1dModel::Burgers1dModel() {
  name = "burgers1d";
  variables = {"q"};
  set_bc(*this, BoundaryCondition::Kind::Periodic);
  defaults = {0.5, 0.01, 0.1, 8, 10};
}

State Burgers1dModel::flux(const State& qL, const State& qR, int, double, double) const {
  return State{burgers_godunov_flux(qL[0], qR[0])};
}

State Burgers1dModel::point_value(const std::array<double, kMaxDim>& x) const {
  return State{1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x[0])};
}

Burgers2dModel::Burgers2dModel() {
  name = "burgers2d";
  dim = 2;
  variables = {"q"};
  set_bc(*this, BoundaryCondition::Kind::Dirichlet);
  defaults = {0.5, 0.01, 0.9, 8, 10};
}

State Burgers2dModel::flux(const State& qL, const State& qR, int, double, double) const {
  return State{burgers_godunov_flux(qL[0], qR[0])};
}

State Burgers2dModel::point_value(const std::array<double, kMaxDim>& x) const {
  const double tp = 2.0 * std::numbers::pi;
  return State{std::sin(tp * x[0]) * std::sin(tp * x[1])};
}

FlameModel::FlameModel() {
  name = "flame1d";
  variables = {"T"};
  lo[0] = -15.0;
  hi[0] = 15.0;
  nu = 1.0;
  bc[0][0].kind = BoundaryCondition::Kind::Neumann;
  bc[0][1].kind = BoundaryCondition::Kind::Dirichlet;
  bc[0][1].value = State{0.0};
  defaults = {0.5, 0.01, 5.0, 10, 12};
}

State FlameModel::flux(const State& qL, const State& qR, int, double dx, double dt) const {
  return State{maccormack_flux(qL[0], qR[0], velocity, dx, dt)} + diffusive_flux(qL, qR, dx, nu);
}

State FlameModel::source(const State& q) const { return State{flame_reaction_rate(q[0], params)}; }

State FlameModel::point_value(const std::array<double, kMaxDim>& x) const {
  return State{x[0] <= 1.0 ? 1.0 : std::exp(1.0 - x[0])};
}

void FlameModel::begin_cycle(std::span<const State> values, std::span<const double> volumes) {
  velocity = flame_velocity(values, volumes, params);
}

std::vector<double> FlameModel::derived(const State& q) const {
  return {1.0 - q[0], flame_reaction_rate(q[0], params)};
}

EulerModel::EulerModel() {
  name = "euler2d";
  dim = 2;
  nvars = 4;
  variables = {"rho", "rho_vx", "rho_vy", "E"};
  set_bc(*this, BoundaryCondition::Kind::Neumann);
  defaults = {0.5, 0.01, 0.25, 8, 9};
  quadrants = {{{1.0, 1.0, 0.75, -0.5}, {2.0, 1.0, 0.75, 0.5}, {1.0, 1.0, -0.75, 0.5},
                {3.0, 1.0, -0.75, -0.5}}};
}

State EulerModel::flux(const State& qL, const State& qR, int axis, double, double) const {
  return ausm_plus_flux(qL, qR, axis, gamma);
}

double EulerModel::max_speed(const State& q) const {
  const double c = euler_sound_speed(q, gamma);
  return std::max(std::fabs(q[1] / q[0]), std::fabs(q[2] / q[0])) + c;
}

State EulerModel::point_value(const std::array<double, kMaxDim>& x) const {
  int k;
  if (x[1] >= 0.5) k = x[0] >= 0.5 ? 0 : 1;
  else k = x[0] >= 0.5 ? 3 : 2;
  const auto& s = quadrants[k];
  return euler_from_primitive(s[0], s[2], s[3], s[1], gamma);
}

bool EulerModel::admissible(const State& q) const {
  if (!(q[0] > 0.0)) return false;
  const double p = (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
  return p > 0.0;
}

std::vector<double> EulerModel::derived(const State& q) const {
  if (!admissible(q)) return {std::nan("")};
  return {euler_pressure(q, gamma)};
}

std::vector<std::string> builtin_problem_names() {
  return {"advection1d", "burgers1d", "burgers2d", "flame1d", "euler2d"};
}

std::unique_ptr<Model> make_model(const std::string& name,
                                  const std::map<std::string, double>& overrides) {
  std::unique_ptr<Model> m;
  if (name == "advection1d") m = std::make_unique<AdvectionModel>();
  else if (name == "burgers1d") m = std::make_unique<Burgers1dModel>();
  else if (name == "burgers2d") m = std::make_unique<Burgers2dModel>();
  else if (name == "flame1d") m = std::make_unique<FlameModel>();
  else if (name == "euler2d") m = std::make_unique<EulerModel>();
  else throw ConfigError("unknown problem '" + name + "'");

  for (const auto& [key, value] : overrides) {
    if (auto* a = dynamic_cast<AdvectionModel*>(m.get()); a && key == "speed") {
      a->speed = value;
    } else if (auto* f = dynamic_cast<FlameModel*>(m.get()); f && key == "ze") {
      f->params.ze = value;
    } else if (f && key == "tau") {
      if (!(value > 0.0 && value < 1.0)) throw ConfigError("tau must lie in (0, 1)");
      f->params.tau = value;
    } else if (auto* e = dynamic_cast<EulerModel*>(m.get()); e && key == "gamma") {
      e->gamma = value;
    } else {
      throw ConfigError("problem '" + name + "' has no parameter '" + key + "'");
    }
  }
  return m;
}

}  // namespace mrlt
