#include "mrlt/mr_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace mrlt {

namespace {

constexpr int kPow3[4] = {1, 3, 9, 27};

// Same-level index of stencil entry s around `center`, clamped into the
// domain, with the boundary faces crossed recorded in `reflect`.
CellIndex stencil_index(const GradedTree& tree, const CellIndex& center, int s, uint8_t& reflect) {
  CellIndex c = center;
  reflect = 0;
  const int n = 1 << center.level;
  for (int a = 0; a < tree.dim(); ++a) {
    const int o = (s / kPow3[a]) % 3 - 1;
    int x = center.coords[a] + o;
    if (x < 0 || x >= n) {
      if (tree.periodic(a)) {
        x = (x + n) % n;
      } else {
        const int side = x < 0 ? 0 : 1;
        x = side == 0 ? 0 : n - 1;
        reflect |= static_cast<uint8_t>(1u << (2 * a + side));
      }
    }
    c.coords[a] = x;
  }
  return c;
}

State apply_ghosts(const GradedTree& tree, State v, uint8_t reflect) {
  for (int a = 0; a < tree.dim(); ++a) {
    if (reflect & (1u << (2 * a))) v = tree.ghost(v, a, -1);
    if (reflect & (1u << (2 * a + 1))) v = tree.ghost(v, a, 1);
  }
  return v;
}

int child_slot(const CellIndex& idx, int dim) {
  int k = 0;
  for (int a = 0; a < dim; ++a) k |= (idx.coords[a] & 1) << a;
  return k;
}

}  // namespace

State project(std::span<const State> children) {
  State m;
  for (const auto& c : children) m += c;
  return m * (1.0 / static_cast<double>(children.size()));
}

std::array<State, 8> predict(int dim, const std::array<State, 27>& stencil) {
  std::array<State, 27> v = stencil;
  for (int a = 0; a < dim; ++a) {
    const int stride = kPow3[a];
    for (int s = 0; s < kPow3[dim]; ++s) {
      if ((s / stride) % 3 != 0) continue;
      // Earlier axes are already reduced to offsets {0, 1}.
      bool skip = false;
      for (int b = 0; b < a; ++b) skip |= (s / kPow3[b]) % 3 == 2;
      if (skip) continue;
      const State qm = v[s], q0 = v[s + stride], qp = v[s + 2 * stride];
      const State slope = 0.125 * (qp - qm);
      v[s] = q0 - slope;
      v[s + stride] = q0 + slope;
    }
  }
  std::array<State, 8> out{};
  for (int k = 0; k < (1 << dim); ++k) {
    int s = 0;
    for (int a = 0; a < dim; ++a) s += ((k >> a) & 1) * kPow3[a];
    out[k] = v[s];
  }
  return out;
}

double detail_norm(const State& d, const ThresholdPolicy& policy) {
  double m = 0.0;
  for (int k = 0; k < policy.nvars; ++k) m = std::fmax(m, std::fabs(d[k]) / policy.scale[k]);
  return m;
}

// ---------------------------------------------------------------- uniform

namespace {

std::size_t lin(const std::array<int, kMaxDim>& c, int n, int dim) {
  std::size_t i = 0;
  for (int a = dim - 1; a >= 0; --a) i = i * n + c[a];
  return i;
}

std::array<State, 27> uniform_stencil(const UniformField& f, const std::array<int, kMaxDim>& c,
                                      const BcSet& bc) {
  std::array<State, 27> st{};
  const int n = f.n();
  for (int s = 0; s < kPow3[f.dim]; ++s) {
    std::array<int, kMaxDim> x = c;
    uint8_t refl = 0;
    for (int a = 0; a < f.dim; ++a) {
      x[a] += (s / kPow3[a]) % 3 - 1;
      if (x[a] < 0 || x[a] >= n) {
        if (bc[a][0].kind == BoundaryCondition::Kind::Periodic) {
          x[a] = (x[a] + n) % n;
        } else {
          const int side = x[a] < 0 ? 0 : 1;
          x[a] = side == 0 ? 0 : n - 1;
          refl |= static_cast<uint8_t>(1u << (2 * a + side));
        }
      }
    }
    State v = f.cells[lin(x, n, f.dim)];
    for (int a = 0; a < f.dim; ++a) {
      for (int side = 0; side < 2; ++side) {
        if (!(refl & (1u << (2 * a + side)))) continue;
        if (bc[a][side].kind == BoundaryCondition::Kind::Dirichlet) v = 2.0 * bc[a][side].value - v;
      }
    }
    st[s] = v;
  }
  return st;
}

template <class Fn>
void for_each_cell(int dim, int n, Fn fn) {
  std::array<int, kMaxDim> c{};
  const int nz = dim > 2 ? n : 1, ny = dim > 1 ? n : 1;
  for (c[2] = 0; c[2] < nz; ++c[2])
    for (c[1] = 0; c[1] < ny; ++c[1])
      for (c[0] = 0; c[0] < n; ++c[0]) fn(c);
}

}  // namespace

UniformField project_uniform(const UniformField& fine) {
  if (fine.level == 0) throw DomainError("project_uniform: already at level 0");
  UniformField out{fine.dim, fine.level - 1, {}};
  const int n = out.n();
  out.cells.assign(fine.cells.size() >> fine.dim, State{});
  std::array<State, 8> ch;
  for_each_cell(fine.dim, n, [&](const std::array<int, kMaxDim>& c) {
    for (int k = 0; k < (1 << fine.dim); ++k) {
      std::array<int, kMaxDim> x{};
      for (int a = 0; a < fine.dim; ++a) x[a] = 2 * c[a] + ((k >> a) & 1);
      ch[k] = fine.cells[lin(x, fine.n(), fine.dim)];
    }
    out.cells[lin(c, n, fine.dim)] = project(std::span<const State>(ch.data(), 1u << fine.dim));
  });
  return out;
}

UniformField predict_uniform(const UniformField& coarse, const BcSet& bc) {
  UniformField out{coarse.dim, coarse.level + 1, {}};
  out.cells.assign(coarse.cells.size() << coarse.dim, State{});
  for_each_cell(coarse.dim, coarse.n(), [&](const std::array<int, kMaxDim>& c) {
    const auto pred = predict(coarse.dim, uniform_stencil(coarse, c, bc));
    for (int k = 0; k < (1 << coarse.dim); ++k) {
      std::array<int, kMaxDim> x{};
      for (int a = 0; a < coarse.dim; ++a) x[a] = 2 * c[a] + ((k >> a) & 1);
      out.cells[lin(x, out.n(), coarse.dim)] = pred[k];
    }
  });
  return out;
}

MrPyramid mr_transform(const UniformField& fine, const BcSet& bc) {
  MrPyramid p;
  p.details.resize(fine.level + 1);
  UniformField cur = fine;
  while (cur.level > 0) {
    UniformField coarse = project_uniform(cur);
    UniformField pred = predict_uniform(coarse, bc);
    UniformField d{cur.dim, cur.level, std::vector<State>(cur.size())};
    for (std::size_t i = 0; i < cur.size(); ++i) d.cells[i] = detail(cur.cells[i], pred.cells[i]);
    p.details[cur.level] = std::move(d);
    cur = std::move(coarse);
  }
  p.root = cur.cells[0];
  return p;
}

UniformField inverse_transform(const MrPyramid& pyramid, int dim, const BcSet& bc) {
  UniformField cur{dim, 0, {pyramid.root}};
  for (std::size_t l = 1; l < pyramid.details.size(); ++l) {
    UniformField next = predict_uniform(cur, bc);
    const auto& d = pyramid.details[l].cells;
    if (d.size() != next.size()) throw DomainError("inverse_transform: detail level size mismatch");
    for (std::size_t i = 0; i < next.size(); ++i) next.cells[i] += d[i];
    cur = std::move(next);
  }
  return cur;
}

// ------------------------------------------------------------------- tree

State value_or_predicted(const GradedTree& tree, const CellIndex& idx, const Getter& get) {
  const int h = tree.find(idx);
  if (h >= 0) return get(tree.cell(h));
  if (idx.level == 0) throw TopologyError("value_or_predicted: root missing");
  const CellIndex p = parent_of(idx);
  std::array<State, 27> st{};
  for (int s = 0; s < kPow3[tree.dim()]; ++s) {
    uint8_t refl;
    const CellIndex nb = stencil_index(tree, p, s, refl);
    st[s] = apply_ghosts(tree, value_or_predicted(tree, nb, get), refl);
  }
  return predict(tree.dim(), st)[child_slot(idx, tree.dim())];
}

void gather_stencil(const GradedTree& tree, const Family& fam, const Getter& get,
                    std::array<State, 27>& out) {
  const CellIndex& center = tree.cell(fam.parent).idx;
  for (int s = 0; s < kPow3[tree.dim()]; ++s) {
    const int h = fam.stencil[s];
    State v;
    if (h >= 0) {
      v = get(tree.cell(h));
    } else {
      uint8_t refl;
      v = value_or_predicted(tree, stencil_index(tree, center, s, refl), get);
    }
    out[s] = apply_ghosts(tree, v, fam.reflect[s]);
  }
}

void project_level(GradedTree& tree, int l, Slot s) {
  const int nc = tree.children_per_node();
  std::array<State, 8> ch;
  for (const Family& f : tree.level(l).internal_families) {
    for (int k = 0; k < nc; ++k) ch[k] = slot(tree.cell(f.children[k]), s);
    slot(tree.cell(f.parent), s) = project(std::span<const State>(ch.data(), nc));
  }
}

void project_tree(GradedTree& tree, Slot s, int coarsest) {
  for (int l = tree.max_level() - 1; l >= coarsest; --l) project_level(tree, l, s);
}

void update_virtual_leaves(GradedTree& tree, int level, const Getter& get, Slot dst) {
  if (level <= 0) return;
  std::array<State, 27> st;
  const int nc = tree.children_per_node();
  for (const Family& f : tree.level(level - 1).virtual_families) {
    gather_stencil(tree, f, get, st);
    const auto pred = predict(tree.dim(), st);
    for (int k = 0; k < nc; ++k) slot(tree.cell(f.children[k]), dst) = pred[k];
  }
}

void update_virtual_leaves(GradedTree& tree, int level, Slot s) {
  update_virtual_leaves(tree, level, slot_getter(s), s);
}

void update_all_virtual_leaves(GradedTree& tree, Slot s) {
  for (int l = 1; l <= tree.max_level(); ++l) update_virtual_leaves(tree, l, s);
}

UniformField reconstruct_uniform(GradedTree& tree, int level, Slot s) {
  if (level < 0 || level > tree.max_level()) throw DomainError("reconstruct_uniform: bad level");
  project_tree(tree, s);
  BcSet bc{};
  for (int a = 0; a < kMaxDim; ++a) {
    bc[a][0] = tree.bc(a, 0);
    bc[a][1] = tree.bc(a, 1);
  }
  UniformField f;
  f.dim = tree.dim();
  f.level = 0;
  CellIndex root;
  f.cells.assign(1, slot(tree.cell(tree.find(root)), s));
  for (int l = 1; l <= level; ++l) {
    f = predict_uniform(f, bc);
    const std::size_t n = std::size_t{1} << l;
    for (int h : tree.handles_at(l)) {
      const CellRecord& c = tree.cell(h);
      if (c.kind == NodeKind::Virtual) continue;
      std::size_t i = 0, stride = 1;
      for (int a = 0; a < tree.dim(); ++a) {
        i += static_cast<std::size_t>(c.idx.coords[a]) * stride;
        stride *= n;
      }
      f.cells[i] = slot(c, s);
    }
  }
  return f;
}

// ------------------------------------------------------------- adaptation

namespace {

struct Adapter {
  GradedTree& tree;
  const ThresholdPolicy& policy;
  int lmin;
  Getter get;

  // Real leaf covering a face neighbour at the leaf's level, or -1 when
  // the neighbour exists as a real node or lies outside the domain.
  int coarser_face_leaf(const CellIndex& idx, int axis, int side) const {
    auto nb = tree.same_level_neighbor(idx, axis, side);
    if (!nb) return -1;
    const int h = tree.find(*nb);
    if (h >= 0 && tree.cell(h).kind != NodeKind::Virtual) return -1;
    return tree.covering(parent_of(*nb));
  }

  bool can_split(int h, int depth = 0) const {
    const CellRecord& c = tree.cell(h);
    if (c.kind != NodeKind::Leaf || c.idx.level < lmin || c.idx.level >= tree.max_level()) {
      return false;
    }
    if (depth > tree.max_level()) return false;
    for (int a = 0; a < tree.dim(); ++a) {
      for (int side : {-1, 1}) {
        const int cov = coarser_face_leaf(c.idx, a, side);
        if (cov >= 0 && !can_split(cov, depth + 1)) return false;
      }
    }
    return true;
  }

  void split(int h, AdaptReport& rep) {
    const CellIndex idx = tree.cell(h).idx;
    for (int a = 0; a < tree.dim(); ++a) {
      for (int side : {-1, 1}) {
        const int cov = coarser_face_leaf(idx, a, side);
        if (cov >= 0 && tree.cell(cov).kind == NodeKind::Leaf) split(cov, rep);
      }
    }
    std::array<State, 27> st;
    for (int s = 0; s < kPow3[tree.dim()]; ++s) {
      uint8_t refl;
      st[s] = apply_ghosts(tree, value_or_predicted(tree, stencil_index(tree, idx, s, refl), get),
                           refl);
    }
    const auto pred = predict(tree.dim(), st);
    const int64_t t0 = tree.cell(h).t_start;
    tree.set_kind(h, NodeKind::Internal);
    const auto kids = tree.child_indices(idx);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      int ch = tree.find(kids[k]);
      if (ch >= 0) {
        tree.set_kind(ch, NodeKind::Leaf);
      } else {
        ch = tree.insert(kids[k], NodeKind::Leaf);
      }
      CellRecord& c = tree.cell(ch);
      c.q_n = pred[k];
      c.detail = State{};
      c.t_start = t0;
    }
    ++rep.split;
  }

  // Leaves owning virtual children need their face neighbours at their
  // own level; split coarser neighbours where allowed.
  void complete_stencils(AdaptReport& rep) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int l = tree.max_level() - 1; l >= std::max(lmin, 1); --l) {
        for (int h : tree.handles_at(l)) {
          const CellRecord& c = tree.cell(h);
          if (!c.alive || c.kind != NodeKind::Leaf || !faces_finer_leaf(tree, h)) continue;
          for (int a = 0; a < tree.dim(); ++a) {
            for (int side : {-1, 1}) {
              const int cov = coarser_face_leaf(tree.cell(h).idx, a, side);
              if (cov >= 0 && can_split(cov)) {
                split(cov, rep);
                changed = true;
              }
            }
          }
        }
      }
    }
  }

  bool neighbour_owns_virtuals(const CellIndex& idx) const {
    for (int a = 0; a < tree.dim(); ++a) {
      for (int side : {-1, 1}) {
        auto nb = tree.same_level_neighbor(idx, a, side);
        if (!nb) continue;
        const int h = tree.find(*nb);
        if (h >= 0 && tree.cell(h).kind == NodeKind::Leaf && faces_finer_leaf(tree, h)) {
          return true;
        }
      }
    }
    return false;
  }

  AdaptReport run(bool allow_split) {
    AdaptReport rep;
    const int L = tree.max_level();
    project_tree(tree, Slot::QN, lmin);
    std::array<State, 27> st;
    const double eps = policy.epsilon;
    for (int l = std::max(lmin - 1, 0); l < L; ++l) {
      for (const Family& f : tree.level(l).internal_families) {
        gather_stencil(tree, f, get, st);
        const auto pred = predict(tree.dim(), st);
        for (int k = 0; k < tree.children_per_node(); ++k) {
          CellRecord& c = tree.cell(f.children[k]);
          c.detail = detail(c.q_n, pred[k]);
        }
      }
    }
    const int nc = tree.children_per_node();
    for (int l = L - 1; l >= lmin; --l) {
      for (int h : tree.handles_at(l)) {
        CellRecord& p = tree.cell(h);
        if (!p.alive || p.kind != NodeKind::Internal) continue;
        if (l > 0 && detail_norm(p.detail, policy) > eps) continue;
        std::array<int, 8> kids{};
        bool ok = true;
        for (int k = 0; k < nc && ok; ++k) {
          CellIndex ci = p.idx;
          ci.level = l + 1;
          for (int a = 0; a < tree.dim(); ++a) ci.coords[a] = 2 * p.idx.coords[a] + ((k >> a) & 1);
          kids[k] = tree.find(ci);
          const CellRecord& c = tree.cell(kids[k]);
          ok = c.kind == NodeKind::Leaf && detail_norm(c.detail, policy) <= eps &&
               !faces_finer_leaf(tree, kids[k]) && !neighbour_owns_virtuals(c.idx);
        }
        if (!ok) continue;
        const int64_t t0 = tree.cell(kids[0]).t_start;
        for (int k = 0; k < nc; ++k) tree.erase(kids[k]);
        tree.set_kind(h, NodeKind::Leaf);
        tree.cell(h).t_start = t0;
        ++rep.merged;
      }
    }
    if (allow_split) {
      std::vector<int> cand;
      for (int l = std::max(lmin, 1); l < L; ++l) {
        // The level cache is not usable until virtual leaves are restored.
        for (int h : tree.handles_at(l)) {
          const CellRecord& c = tree.cell(h);
          if (c.kind == NodeKind::Leaf && detail_norm(c.detail, policy) > eps) cand.push_back(h);
        }
      }
      for (int h : cand) {
        if (tree.cell(h).alive && tree.cell(h).kind == NodeKind::Leaf && can_split(h)) split(h, rep);
      }
      complete_stencils(rep);
    }
    ensure_graded_with_virtuals(tree, false);
    return rep;
  }
};

}  // namespace

AdaptReport adapt_grid(GradedTree& tree, const ThresholdPolicy& policy, const AdaptOptions& opt) {
  if (policy.epsilon < 0) throw ConfigError("epsilon must be nonnegative");
  // Nothing may change when only the finest level is active.
  if (opt.coarsest_active >= tree.max_level()) return {};
  Getter get;
  if (opt.inactive_value && opt.coarsest_active > 0) {
    const int lmin = opt.coarsest_active;
    Getter inactive = opt.inactive_value;
    get = [lmin, inactive](const CellRecord& c) {
      return c.idx.level < lmin ? inactive(c) : c.q_n;
    };
  } else {
    get = slot_getter(Slot::QN);
  }
  Adapter ad{tree, policy, opt.coarsest_active, get};
  return ad.run(opt.allow_split);
}

void build_adaptive_grid(GradedTree& tree, const CellInit& init, const ThresholdPolicy& policy) {
  tree.build_uniform(tree.max_level());
  for (int h : tree.level(tree.max_level()).leaves) {
    tree.cell(h).q_n = init(tree, tree.cell(h).idx);
  }
  AdaptOptions opt;
  opt.allow_split = false;
  while (adapt_grid(tree, policy, opt).merged > 0) {
  }
  project_tree(tree, Slot::QN);
}

}  // namespace mrlt
