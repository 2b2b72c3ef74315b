#include "mrlt/lt_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrlt {

int min_active_level(int64_t n, int L) {
  if (n < 0) throw DomainError("min_active_level: negative iteration");
  for (int l = 0; l < L; ++l) {
    if (n % (int64_t{1} << (L - l)) == 0) return l;
  }
  return L;
}

// ------------------------------------------------------------ flux sweep

void FluxSweep::rhs_level(int l, double dt_same, double dt_finer) {
  const LevelCache& lc = tree_.level(l);
  const int d = tree_.dim(), nf = 2 * d;
  const double sub = 1.0 / (1 << (d - 1));
  const bool src = model_.has_source();
  for (std::size_t i = 0; i < lc.leaves.size(); ++i) {
    CellRecord& c = tree_.cell(lc.leaves[i]);
    const State w = c.work;
    State r;
    for (int a = 0; a < d; ++a) {
      const double dx = tree_.dx(l, a);
      for (int s = 0; s < 2; ++s) {
        const FaceLink& f = lc.faces[i * nf + 2 * a + s];
        State F;
        if (f.kind == FaceLink::kBoundary) {
          const State g = tree_.ghost(w, a, s == 0 ? -1 : 1);
          F = s == 0 ? model_.flux(g, w, a, dx, dt_same) : model_.flux(w, g, a, dx, dt_same);
        } else if (f.kind == FaceLink::kSame) {
          const State& o = tree_.cell(f.other[0]).work;
          F = s == 0 ? model_.flux(o, w, a, dx, dt_same) : model_.flux(w, o, a, dx, dt_same);
        } else {
          const double dxf = tree_.dx(l + 1, a);
          for (int k = 0; k < f.count; ++k) {
            const State& mine = tree_.cell(f.own[k]).work;
            const State& theirs = tree_.cell(f.other[k]).work;
            F += s == 0 ? model_.flux(theirs, mine, a, dxf, dt_finer)
                        : model_.flux(mine, theirs, a, dxf, dt_finer);
          }
          F = sub * F;
        }
        r += (s == 0 ? 1.0 / dx : -1.0 / dx) * F;
      }
    }
    if (src) r += model_.source(w);
    c.flux_acc = r;
  }
}

void collect_leaves(GradedTree& tree, std::vector<State>& values, std::vector<double>& volumes) {
  values.clear();
  volumes.clear();
  for (int l = 0; l <= tree.max_level(); ++l) {
    const double v = tree.cell_volume(l);
    for (int h : tree.level(l).leaves) {
      values.push_back(tree.cell(h).q_n);
      volumes.push_back(v);
    }
  }
}

namespace {

State mean_children(GradedTree& tree, const Family& f, const Getter& get) {
  const int nc = tree.children_per_node();
  State s;
  for (int k = 0; k < nc; ++k) s += get(tree.cell(f.children[k]));
  return (1.0 / nc) * s;
}

void copy_slot(GradedTree& tree, const std::vector<int>& hs, Slot from, Slot to) {
  for (int h : hs) slot(tree.cell(h), to) = slot(tree.cell(h), from);
}

}  // namespace

// ------------------------------------------------------------ MR stepper

MrStepper::MrStepper(Model& model, GradedTree& tree, SchemeKind scheme, ThresholdPolicy policy,
                     bool remesh)
    : model_(model), tree_(tree), order_(scheme_order(scheme)), policy_(policy),
      remesh_(remesh), sweep_(model, tree) {}

void MrStepper::stage(Slot input, double dt) {
  const int L = tree_.max_level();
  for (int l = 0; l <= L; ++l) copy_slot(tree_, tree_.level(l).leaves, input, Slot::Work);
  project_tree(tree_, Slot::Work);
  update_all_virtual_leaves(tree_, Slot::Work);
  for (int l = 0; l <= L; ++l) sweep_.rhs_level(l, dt, dt);
}

void MrStepper::step(double dt) {
  if (remesh_) adapt_grid(tree_, policy_);
  const int L = tree_.max_level();
  stage(Slot::QN, dt);
  for (int l = 0; l <= L; ++l) {
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      c.q_star = rk_stage1(c.q_n, c.flux_acc, dt);
    }
  }
  stage(Slot::QStar, dt);
  for (int l = 0; l <= L; ++l) {
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      if (order_ == 2) {
        c.q_n = rk2_stage2(c.q_n, c.q_star, c.flux_acc, dt);
      } else {
        c.q_dstar = rk3_stage2(c.q_n, c.q_star, c.flux_acc, dt);
      }
    }
  }
  if (order_ == 2) return;
  stage(Slot::QDStar, dt);
  for (int l = 0; l <= L; ++l) {
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      c.q_n = rk3_stage3(c.q_n, c.q_dstar, c.flux_acc, dt);
    }
  }
}

// ------------------------------------------------------------ LT stepper

LtStepper::LtStepper(Model& model, GradedTree& tree, SchemeKind scheme, ThresholdPolicy policy,
                     bool remesh)
    : model_(model), tree_(tree), scheme_(scheme), policy_(policy), remesh_(remesh),
      sweep_(model, tree), L_(tree.max_level()) {
  if (!scheme_is_lt(scheme)) throw ConfigError("LtStepper needs an MRLT scheme");
  for (int h : tree_.all_leaves()) {
    tree_.cell(h).q_end = tree_.cell(h).q_n;
    tree_.cell(h).t_start = 0;
  }
}

State LtStepper::value_at_t0(const CellRecord& c) const {
  if (rk3()) return c.q_dstar;
  if (c.kind == NodeKind::Internal) return c.nerk_half;
  if (c.kind == NodeKind::Leaf && scheme_ == SchemeKind::MRLT_NERK2) return c.nerk_half;
  return c.q_mid;
}

State LtStepper::inactive_value(const CellRecord& c, double frac) const {
  if (frac == 0.0 || scheme_ == SchemeKind::MRLT_RK2) return value_at_t0(c);
  if (frac == 1.0) return c.q_end;
  if (rk3()) {
    if (frac == 0.5) return c.nerk_threequarter;
    return sync::nerk_reconstruct(c.q_n, c.q_star, c.nerk_quarter, 0.5 + 0.5 * frac);
  }
  return (1.0 - frac) * value_at_t0(c) + frac * c.q_end;
}

Getter LtStepper::getter(Getter active, double frac) const {
  return [this, active = std::move(active), frac](const CellRecord& c) {
    return c.idx.level >= lmin_ ? active(c) : inactive_value(c, frac);
  };
}

void LtStepper::begin_iteration(double dt) {
  if (!(dt > 0.0)) throw NumericalError("LtStepper: non-positive time step");
  dt_ = dt;
  lmin_ = min_active_level(n_, L_);
}

void LtStepper::refresh_before_stage1() {
  for (int l = lmin_; l <= L_; ++l) {
    const int64_t span = int64_t{1} << (L_ - l);
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      if (started_ && c.t_start + span != n_) {
        throw NumericalError("LT clock mismatch at level " + std::to_string(l) + ": started " +
                             std::to_string(c.t_start) + ", now " + std::to_string(n_));
      }
      c.q_n = c.q_end;
      c.t_start = n_;
    }
  }
  project_t0_level(lmin_);
}

// Internal and virtual values at t0 for all levels >= lmin - 1.
void LtStepper::project_t0_level(int lmin) {
  for (int l = L_ - 1; l >= lmin; --l) project_level(tree_, l, Slot::QN);
  if (lmin > 0) {
    const int l0 = lmin - 1;
    const LevelCache& lc = tree_.level(l0);
    const Getter qn = slot_getter(Slot::QN);
    for (const Family& f : lc.internal_families) {
      CellRecord& c = tree_.cell(f.parent);
      State& mid = rk3() ? c.q_dstar : c.nerk_half;
      mid = mean_children(tree_, f, qn);
      c.q_end = sync::post_evolution(c.q_n, c.q_star, mid);
    }
    for (int h : lc.virtuals) {
      CellRecord& c = tree_.cell(h);
      c.q_end = sync::post_evolution(c.q_n, c.q_star, rk3() ? c.q_dstar : c.q_mid);
    }
  }
  const Getter g = getter(slot_getter(Slot::QN), 0.0);
  for (int l = std::max(lmin, 1); l <= L_; ++l) update_virtual_leaves(tree_, l, g, Slot::QN);
}

void LtStepper::remesh() {
  if (lmin_ >= L_) return;
  AdaptOptions opt;
  opt.coarsest_active = lmin_;
  opt.inactive_value = [this](const CellRecord& c) { return inactive_value(c, 0.0); };
  const AdaptReport rep = adapt_grid(tree_, policy_, opt);
  if (rep.merged == 0 && rep.split == 0) return;
  for (int l = lmin_; l <= L_; ++l) {
    for (int h : tree_.level(l).leaves) tree_.cell(h).t_start = n_;
  }
  project_t0_level(lmin_);
}

void LtStepper::stage1() {
  for (int l = lmin_; l <= L_; ++l) {
    const LevelCache& lc = tree_.level(l);
    copy_slot(tree_, lc.leaves, Slot::QN, Slot::Work);
    copy_slot(tree_, lc.virtuals, Slot::QN, Slot::Work);
  }
  for (int l = lmin_; l <= L_; ++l) {
    const double dt = dtl(l);
    sweep_.rhs_level(l, dt, dtl(l + 1));
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      const State k1 = dt * c.flux_acc;
      c.q_star = rk_stage1_k(c.q_n, k1);
      c.q_mid = 0.5 * (c.q_n + c.q_star);
      if (scheme_ == SchemeKind::MRLT_NERK2) {
        c.nerk_half = nerk_substep1(c.q_n, k1, NerkPoint::Half);
      } else if (rk3()) {
        c.nerk_quarter = nerk_substep1(c.q_n, k1, NerkPoint::Quarter);
        c.nerk_threequarter = nerk_substep1(c.q_n, k1, NerkPoint::ThreeQuarter);
      }
    }
  }
}

void LtStepper::refresh_before_stage2() {
  const Getter qs = slot_getter(Slot::QStar);
  for (int l = L_ - 1; l >= lmin_; --l) {
    for (const Family& f : tree_.level(l).internal_families) {
      CellRecord& c = tree_.cell(f.parent);
      c.q_mid = mean_children(tree_, f, qs);
      c.q_star = sync::refresh_extrapolation(c.q_n, c.q_mid);
    }
  }
  for (int l = std::max(lmin_, 1); l <= L_; ++l) {
    update_virtual_leaves(tree_, l, getter(slot_getter(Slot::QMid), std::ldexp(1.0, lmin_ - l)),
                          Slot::QStar);
    for (int h : tree_.level(l).virtuals) {
      CellRecord& c = tree_.cell(h);
      c.q_mid = 0.5 * (c.q_n + c.q_star);
    }
  }
}

void LtStepper::stage2_projection(int l) {
  for (const Family& f : tree_.level(l).internal_families) {
    tree_.cell(f.parent).q_ext = mean_children(tree_, f, [](const CellRecord& c) {
      return c.kind == NodeKind::Leaf ? c.q_ext : sync::node_extrapolation(c.q_n, c.q_ext);
    });
  }
  const Getter at_end = [](const CellRecord& c) {
    return c.kind == NodeKind::Internal ? c.q_ext : c.q_star;
  };
  update_virtual_leaves(tree_, l + 1, getter(at_end, std::ldexp(1.0, lmin_ - l)), Slot::Work);
  copy_slot(tree_, tree_.level(l + 1).leaves, Slot::QExt, Slot::Work);
}

void LtStepper::perform_stage2() {
  for (int l = L_; l >= lmin_; --l) {
    if (l != L_) stage2_projection(l);
    const LevelCache& lc = tree_.level(l);
    copy_slot(tree_, lc.leaves, Slot::QStar, Slot::Work);
    copy_slot(tree_, lc.virtuals, Slot::QStar, Slot::Work);
    const double dt = dtl(l);
    sweep_.rhs_level(l, dt, dtl(l + 1));
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      const State k2 = dt * c.flux_acc;
      if (rk3()) {
        c.q_dstar = rk3_stage2_k(c.q_n, c.q_star, k2);
        c.nerk_quarter = nerk_substep2(c.nerk_quarter, k2, NerkPoint::Quarter);
        c.nerk_threequarter = nerk_substep2(c.nerk_threequarter, k2, NerkPoint::ThreeQuarter);
      } else {
        c.q_end = rk2_stage2_k(c.q_n, c.q_star, k2);
        if (scheme_ == SchemeKind::MRLT_NERK2) {
          c.nerk_half = nerk_substep2(c.nerk_half, k2, NerkPoint::Half);
        }
      }
      c.q_ext = sync::leaf_extrapolation(c.q_star, k2);
    }
  }
}

void LtStepper::refresh_before_stage3() {
  const Getter qdd = slot_getter(Slot::QDStar);
  for (int l = L_ - 1; l >= lmin_; --l) {
    for (const Family& f : tree_.level(l).internal_families) {
      CellRecord& c = tree_.cell(f.parent);
      c.nerk_quarter = mean_children(tree_, f, qdd);
      c.nerk_threequarter = sync::rk3_three_quarter(c.q_n, c.q_star, c.nerk_quarter);
      c.q_dstar = sync::rk3_dstar(c.q_n, c.q_star, c.nerk_quarter);
    }
  }
  for (int l = std::max(lmin_, 1); l <= L_; ++l) {
    update_virtual_leaves(tree_, l,
                          getter(slot_getter(Slot::NerkQuarter), std::ldexp(0.5, lmin_ - l)),
                          Slot::QDStar);
    for (int h : tree_.level(l).virtuals) {
      CellRecord& c = tree_.cell(h);
      c.nerk_quarter = sync::rk3_quarter_from_dstar(c.q_n, c.q_star, c.q_dstar);
      c.nerk_threequarter = sync::rk3_three_quarter(c.q_n, c.q_star, c.nerk_quarter);
    }
  }
}

void LtStepper::stage3_projection(int l) {
  const Getter qe = slot_getter(Slot::QEnd);
  for (const Family& f : tree_.level(l).internal_families) {
    CellRecord& c = tree_.cell(f.parent);
    c.q_dstar = mean_children(tree_, f, qe);
    c.q_end = sync::rk3_end(c.q_n, c.nerk_quarter, c.nerk_threequarter);
  }
  update_virtual_leaves(tree_, l + 1, getter(slot_getter(Slot::QDStar), std::ldexp(0.5, lmin_ - l)),
                        Slot::Work);
  copy_slot(tree_, tree_.level(l + 1).leaves, Slot::QEnd, Slot::Work);
}

void LtStepper::perform_stage3() {
  for (int l = L_; l >= lmin_; --l) {
    if (l != L_) stage3_projection(l);
    const LevelCache& lc = tree_.level(l);
    copy_slot(tree_, lc.leaves, Slot::QDStar, Slot::Work);
    copy_slot(tree_, lc.virtuals, Slot::QDStar, Slot::Work);
    const double dt = dtl(l);
    sweep_.rhs_level(l, dt, dtl(l + 1));
    for (int h : tree_.level(l).leaves) {
      CellRecord& c = tree_.cell(h);
      c.q_end = rk3_stage3_k(c.q_n, c.q_dstar, dt * c.flux_acc);
    }
  }
}

void LtStepper::iteration(double dt) {
  begin_iteration(dt);
  refresh_before_stage1();
  if (remesh_) remesh();
  stage1();
  refresh_before_stage2();
  perform_stage2();
  if (rk3()) {
    refresh_before_stage3();
    perform_stage3();
  }
  started_ = true;
  end_iteration();
}

void LtStepper::cycle(double dt, const std::function<void()>& at_sync) {
  if (n_ % (int64_t{1} << L_) != 0) throw NumericalError("LtStepper: cycle started mid-cycle");
  for (int64_t i = 0; i < (int64_t{1} << L_); ++i) {
    if (at_sync && leaves_synchronized()) {
      synchronize();
      at_sync();
    }
    iteration(dt);
  }
  // Every leaf ends its interval here.
  for (int h : tree_.all_leaves()) tree_.cell(h).q_n = tree_.cell(h).q_end;
}

bool LtStepper::leaves_synchronized() {
  for (int l = 0; l <= L_; ++l) {
    if (!tree_.level(l).leaves.empty()) return n_ % (int64_t{1} << (L_ - l)) == 0;
  }
  return true;
}

void LtStepper::synchronize() {
  if (!leaves_synchronized()) throw NumericalError("LtStepper: some leaves are mid-step");
  for (int h : tree_.all_leaves()) tree_.cell(h).q_n = tree_.cell(h).q_end;
}

// -------------------------------------------------------- uniform solver

UniformSolver::UniformSolver(Model& model, int level, int order)
    : model_(model), level_(level), n_(1 << level), order_(order), dim_(model.dim) {
  if (level < 0 || level > kMaxLevel) throw ConfigError("UniformSolver: bad level");
  std::size_t size = 1;
  for (int a = 0; a < dim_; ++a) size *= static_cast<std::size_t>(n_);
  q_.resize(size);
  qs_.resize(size);
  qdd_.resize(size);
  r_.resize(size);
}

double UniformSolver::dx(int axis) const {
  return (model_.hi[axis] - model_.lo[axis]) / n_;
}

double UniformSolver::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= dx(a);
  return v;
}

void UniformSolver::init() {
  auto tree = model_.make_tree(level_);
  CellIndex idx;
  idx.level = level_;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    std::size_t r = i;
    for (int a = 0; a < dim_; ++a) {
      idx.coords[a] = static_cast<int>(r % n_);
      r /= n_;
    }
    q_[i] = model_.cell_average(*tree, idx);
  }
}

UniformField UniformSolver::field() const {
  UniformField f;
  f.dim = dim_;
  f.level = level_;
  f.cells = q_;
  return f;
}

double UniformSolver::max_speed() const {
  double s = 0.0;
  for (const State& q : q_) s = std::max(s, model_.max_speed(q));
  return s;
}

void UniformSolver::rhs(const std::vector<State>& u, double dt, std::vector<State>& out) const {
  const std::size_t size = u.size();
  std::array<std::size_t, kMaxDim> stride{1, 1, 1};
  for (int a = 1; a < dim_; ++a) stride[a] = stride[a - 1] * n_;
  for (std::size_t i = 0; i < size; ++i) out[i] = model_.has_source() ? model_.source(u[i]) : State{};
  // One flux per face: the face on the low side of each cell, plus the
  // high boundary face of the last cell when the axis is not periodic.
  for (int a = 0; a < dim_; ++a) {
    const double h = dx(a), inv = 1.0 / h;
    const std::size_t st = stride[a];
    const bool per = model_.bc[a][0].kind == BoundaryCondition::Kind::Periodic;
    for (std::size_t i = 0; i < size; ++i) {
      const int ci = static_cast<int>(i / st % n_);
      const State& w = u[i];
      if (ci > 0) {
        const State f = inv * model_.flux(u[i - st], w, a, h, dt);
        out[i] += f;
        out[i - st] -= f;
      } else if (per) {
        const std::size_t j = i + (n_ - 1) * st;
        const State f = inv * model_.flux(u[j], w, a, h, dt);
        out[i] += f;
        out[j] -= f;
      } else {
        out[i] += inv * model_.flux(model_.ghost(w, a, -1), w, a, h, dt);
      }
      if (ci == n_ - 1 && !per) out[i] -= inv * model_.flux(w, model_.ghost(w, a, 1), a, h, dt);
    }
  }
}

void UniformSolver::step(double dt) {
  rhs(q_, dt, r_);
  for (std::size_t i = 0; i < q_.size(); ++i) qs_[i] = rk_stage1(q_[i], r_[i], dt);
  rhs(qs_, dt, r_);
  if (order_ == 2) {
    for (std::size_t i = 0; i < q_.size(); ++i) q_[i] = rk2_stage2(q_[i], qs_[i], r_[i], dt);
    return;
  }
  for (std::size_t i = 0; i < q_.size(); ++i) qdd_[i] = rk3_stage2(q_[i], qs_[i], r_[i], dt);
  rhs(qdd_, dt, r_);
  for (std::size_t i = 0; i < q_.size(); ++i) q_[i] = rk3_stage3(q_[i], qdd_[i], r_[i], dt);
}

}  // namespace mrlt
