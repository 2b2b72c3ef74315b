#ifndef MRLT_LT_SCHEDULER_HPP_
#define MRLT_LT_SCHEDULER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "mrlt/models.hpp"
#include "mrlt/mr_analysis.hpp"
#include "mrlt/sync_formulas.hpp"
#include "mrlt/time_schemes.hpp"

namespace mrlt {

inline double level_timestep(int level, int L, double dt) {
  return std::ldexp(dt, L - level);
}

// Smallest level whose steps start at iteration n.
int min_active_level(int64_t n, int L);

// Right-hand sides -div F + S of the leaves of one level, read from the
// `work` slot of the leaves, virtual leaves and face neighbours and
// written to `flux_acc`.
class FluxSweep {
 public:
  FluxSweep(const Model& model, GradedTree& tree) : model_(model), tree_(tree) {}
  // dt_same / dt_finer: steps passed to the flux at same-level faces and
  // at faces resolved through virtual children.
  void rhs_level(int level, double dt_same, double dt_finer);

 private:
  const Model& model_;
  GradedTree& tree_;
};

// Leaf values gathered with their cell volumes, for cycle hooks.
void collect_leaves(GradedTree& tree, std::vector<State>& values, std::vector<double>& volumes);

// Global-step multiresolution scheme (MR/RK2, MR/RK3).
class MrStepper {
 public:
  MrStepper(Model& model, GradedTree& tree, SchemeKind scheme, ThresholdPolicy policy,
            bool remesh);
  void step(double dt);

 private:
  void stage(Slot input, double dt);
  Model& model_;
  GradedTree& tree_;
  int order_;
  ThresholdPolicy policy_;
  bool remesh_;
  FluxSweep sweep_;
};

// Scale-dependent local time stepping (MRLT/RK2, MRLT/NERK2, MRLT/NERK3).
class LtStepper {
 public:
  LtStepper(Model& model, GradedTree& tree, SchemeKind scheme, ThresholdPolicy policy,
            bool remesh);

  // 2^L iterations of finest step dt; all leaves end at one instant.
  // `at_sync` runs before each iteration at which every leaf starts a new
  // step, with q_n already moved to that instant.
  void cycle(double dt, const std::function<void()>& at_sync = {});
  void iteration(double dt);
  // Moves q_n to the end of every leaf's last step; all leaf levels must
  // have completed their steps (e.g. frozen grids with few levels).
  void synchronize();
  bool leaves_synchronized();

  // Phases of one iteration, exposed for inspection.
  void refresh_before_stage1();
  void remesh();
  void stage1();
  void refresh_before_stage2();
  void perform_stage2();
  void stage2_projection(int level);
  void refresh_before_stage3();
  void perform_stage3();
  void stage3_projection(int level);

  int64_t iteration_index() const { return n_; }
  int lmin() const { return lmin_; }
  void begin_iteration(double dt);  // sets dt and lmin for iteration n
  void end_iteration() { ++n_; }

 private:
  bool rk3() const { return scheme_ == SchemeKind::MRLT_NERK3; }
  double dtl(int l) const { return level_timestep(l, L_, dt_); }
  // Value of an inactive node (level < lmin) at t0 + frac * dt_lmin.
  State inactive_value(const CellRecord& c, double frac) const;
  State value_at_t0(const CellRecord& c) const;
  Getter getter(Getter active, double frac) const;
  void project_t0_level(int level);

  Model& model_;
  GradedTree& tree_;
  SchemeKind scheme_;
  ThresholdPolicy policy_;
  bool remesh_;
  FluxSweep sweep_;
  int L_;
  int64_t n_ = 0;
  int lmin_ = 0;
  double dt_ = 0.0;
  bool started_ = false;
};

// Uniform-grid finite volumes (FV/RK2, FV/RK3) on plain arrays.
class UniformSolver {
 public:
  UniformSolver(Model& model, int level, int order);
  void init();  // cell averages of the initial condition
  void step(double dt);
  double max_speed() const;

  int level() const { return level_; }
  int n() const { return n_; }
  std::vector<State>& cells() { return q_; }
  const std::vector<State>& cells() const { return q_; }
  double dx(int axis) const;
  double cell_volume() const;
  UniformField field() const;

 private:
  void rhs(const std::vector<State>& u, double dt, std::vector<State>& out) const;
  Model& model_;
  int level_, n_, order_, dim_;
  std::vector<State> q_, qs_, qdd_, r_;
};

}  // namespace mrlt

#endif  // MRLT_LT_SCHEDULER_HPP_
