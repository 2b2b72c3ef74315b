#ifndef MRLT_MODELS_HPP_
#define MRLT_MODELS_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mrlt/tree_mesh.hpp"

namespace mrlt {

// ----------------------------------------------------------------- fluxes

inline double burgers_physical(double q) { return 0.5 * q * q; }

template <class F>
State centered_flux(const State& qL, const State& qR, F physical) {
  return 0.5 * (physical(qL) + physical(qR));
}

// Exact Riemann flux for f(q) = q^2 / 2.
double burgers_godunov_flux(double qL, double qR);

// Euler state layout: (rho, rho vx, rho vy, E).
double euler_pressure(const State& q, double gamma);
double euler_sound_speed(const State& q, double gamma);
State euler_physical_flux(const State& q, int axis, double gamma);
State euler_from_primitive(double rho, double vx, double vy, double p, double gamma);

// AUSM+ interface flux normal to `axis`.
State ausm_plus_flux(const State& left, const State& right, int axis, double gamma);

// Diffusive part -nu (qR - qL) / dx of the interface flux.
inline State diffusive_flux(const State& qL, const State& qR, double dx, double nu) {
  return (-nu / dx) * (qR - qL);
}

// Interface flux of the MacCormack predictor-corrector for v dT/dx with
// constant v; in conservation form it is the Lax-Wendroff flux.
double maccormack_flux(double TL, double TR, double v, double dx, double dt);
// Predictor-corrector increment of the centre value of (Tm, T0, Tp).
double maccormack_advective_update(double Tm, double T0, double Tp, double v, double dx,
                                   double dt);

struct FlameParams {
  double ze = 10.0;
  double tau = 0.8;
};

double flame_reaction_rate(double T, const FlameParams& p);

// ------------------------------------------------------------------ model

struct ProblemDefaults {
  double sigma = 0.5;
  double epsilon = 0.01;
  double t_final = 1.0;
  int max_level = 8;
  int reference_level = 10;
};

class Model {
 public:
  virtual ~Model() = default;

  std::string name;
  int dim = 1;
  int nvars = 1;
  std::array<double, kMaxDim> lo{0.0, 0.0, 0.0};
  std::array<double, kMaxDim> hi{1.0, 1.0, 1.0};
  std::array<std::array<BoundaryCondition, 2>, kMaxDim> bc{};
  double nu = 0.0;
  ProblemDefaults defaults;
  std::vector<std::string> variables;

  // Interface flux along `axis`; dx is the face cell width, dt the step of
  // the cell being updated.
  virtual State flux(const State& qL, const State& qR, int axis, double dx, double dt) const = 0;
  virtual bool has_source() const { return false; }
  virtual State source(const State&) const { return {}; }
  // max over axes of |v_axis| + c
  virtual double max_speed(const State& q) const = 0;
  virtual State point_value(const std::array<double, kMaxDim>& x) const = 0;
  virtual bool admissible(const State&) const { return true; }

  // Hook run once per coarsest cycle with the current leaf values.
  virtual bool needs_cycle_update() const { return false; }
  virtual void begin_cycle(std::span<const State>, std::span<const double>) {}

  // Extra output columns derived from a state (e.g. pressure).
  virtual std::vector<std::string> derived_names() const { return {}; }
  virtual std::vector<double> derived(const State&) const { return {}; }

  // Cell average of the initial condition by tensor Gauss quadrature.
  State cell_average(const GradedTree& tree, const CellIndex& idx) const;
  State ghost(const State& inside, int axis, int side) const;
  std::unique_ptr<GradedTree> make_tree(int max_level) const;
};

class AdvectionModel : public Model {
 public:
  AdvectionModel();
  double speed = 1.0;
  State flux(const State& qL, const State& qR, int axis, double dx, double dt) const override;
  double max_speed(const State&) const override { return std::fabs(speed); }
  State point_value(const std::array<double, kMaxDim>& x) const override;
};

class Burgers1dModel : public Model {
 public:
  Burgers1dModel();
  State flux(const State& qL, const State& qR, int axis, double dx, double dt) const override;
  double max_speed(const State& q) const override { return std::fabs(q[0]); }
  State point_value(const std::array<double, kMaxDim>& x) const override;
};

class Burgers2dModel : public Model {
 public:
  Burgers2dModel();
  State flux(const State& qL, const State& qR, int axis, double dx, double dt) const override;
  double max_speed(const State& q) const override { return std::fabs(q[0]); }
  State point_value(const std::array<double, kMaxDim>& x) const override;
};

class FlameModel : public Model {
 public:
  FlameModel();
  FlameParams params;
  double velocity = 0.0;  // v_f, frozen between cycle updates

  State flux(const State& qL, const State& qR, int axis, double dx, double dt) const override;
  bool has_source() const override { return true; }
  State source(const State& q) const override;
  double max_speed(const State&) const override { return std::fabs(velocity); }
  State point_value(const std::array<double, kMaxDim>& x) const override;
  bool needs_cycle_update() const override { return true; }
  void begin_cycle(std::span<const State> values, std::span<const double> volumes) override;
  std::vector<std::string> derived_names() const override { return {"Y", "omega"}; }
  std::vector<double> derived(const State& q) const override;
};

class EulerModel : public Model {
 public:
  EulerModel();
  double gamma = 1.4;
  double mach = 1.0;
  // Quadrant states (rho, p, vx, vy), quadrants 1..4.
  std::array<std::array<double, 4>, 4> quadrants{};

  State flux(const State& qL, const State& qR, int axis, double dx, double dt) const override;
  double max_speed(const State& q) const override;
  State point_value(const std::array<double, kMaxDim>& x) const override;
  bool admissible(const State& q) const override;
  std::vector<std::string> derived_names() const override { return {"p"}; }
  std::vector<double> derived(const State& q) const override;
};

// Sum of omega(T_i) dx_i over the given cells.
double flame_velocity(std::span<const State> values, std::span<const double> volumes,
                      const FlameParams& p);

std::vector<std::string> builtin_problem_names();
// Named problem with optional parameter overrides; unknown names or keys
// raise ConfigError.
std::unique_ptr<Model> make_model(const std::string& name,
                                  const std::map<std::string, double>& overrides = {});

}  // namespace mrlt

#endif  // MRLT_MODELS_HPP_
