#include "mrlt/tree_mesh.hpp"

#include <algorithm>
#include <string>

namespace mrlt {

namespace {

constexpr int kCoordBits = 19;
constexpr uint64_t kCoordMask = (1ull << kCoordBits) - 1;

int ipow3(int d) { return d == 1 ? 3 : (d == 2 ? 9 : 27); }

}  // namespace

uint64_t pack_key(const CellIndex& idx) {
  return (static_cast<uint64_t>(idx.level) << (3 * kCoordBits)) |
         ((static_cast<uint64_t>(idx.coords[0]) & kCoordMask) << (2 * kCoordBits)) |
         ((static_cast<uint64_t>(idx.coords[1]) & kCoordMask) << kCoordBits) |
         (static_cast<uint64_t>(idx.coords[2]) & kCoordMask);
}

CellIndex parent_of(const CellIndex& idx) {
  CellIndex p;
  p.level = idx.level - 1;
  for (int a = 0; a < kMaxDim; ++a) p.coords[a] = idx.coords[a] >> 1;
  return p;
}

GradedTree::GradedTree(int dim, int max_level, std::array<double, kMaxDim> lo,
                       std::array<double, kMaxDim> hi,
                       std::array<std::array<BoundaryCondition, 2>, kMaxDim> bc)
    : dim_(dim), max_level_(max_level), lo_(lo), hi_(hi), bc_(bc) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be 1, 2 or 3");
  if (max_level < 0 || max_level > kMaxLevel) throw DomainError("max level out of range");
  maps_.resize(max_level + 1);
  version_.assign(max_level + 2, 0);
  caches_.resize(max_level + 1);
  sorted_.assign(max_level + 1, {~0ull, {}});
  insert(CellIndex{}, NodeKind::Leaf);
}

double GradedTree::dx(int level, int axis) const {
  return (hi_[axis] - lo_[axis]) / static_cast<double>(1 << level);
}

double GradedTree::cell_volume(int level) const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= dx(level, a);
  return v;
}

std::array<double, kMaxDim> GradedTree::center(const CellIndex& idx) const {
  std::array<double, kMaxDim> c{};
  for (int a = 0; a < dim_; ++a) c[a] = lo_[a] + (idx.coords[a] + 0.5) * dx(idx.level, a);
  return c;
}

bool GradedTree::in_domain(const CellIndex& idx) const {
  if (idx.level < 0 || idx.level > max_level_) return false;
  const int n = 1 << idx.level;
  for (int a = 0; a < kMaxDim; ++a) {
    if (a < dim_) {
      if (idx.coords[a] < 0 || idx.coords[a] >= n) return false;
    } else if (idx.coords[a] != 0) {
      return false;
    }
  }
  return true;
}

int GradedTree::find(const CellIndex& idx) const {
  if (idx.level < 0 || idx.level > max_level_) return -1;
  const auto& m = maps_[idx.level];
  auto it = m.find(pack_key(idx));
  return it == m.end() ? -1 : it->second;
}

int GradedTree::insert(const CellIndex& idx, NodeKind kind) {
  if (!in_domain(idx)) throw TopologyError("insert: cell outside the domain");
  if (idx.level > 0 && find(parent_of(idx)) < 0) {
    throw TopologyError("insert: parent missing at level " + std::to_string(idx.level - 1));
  }
  const uint64_t key = pack_key(idx);
  auto& m = maps_[idx.level];
  if (m.count(key)) throw TopologyError("insert: cell already present");
  int h;
  if (!free_.empty()) {
    h = free_.back();
    free_.pop_back();
    pool_[h] = CellRecord{};
  } else {
    h = static_cast<int>(pool_.size());
    pool_.emplace_back();
  }
  pool_[h].idx = idx;
  pool_[h].kind = kind;
  pool_[h].alive = true;
  m.emplace(key, h);
  ++node_count_;
  touch(idx.level);
  return h;
}

void GradedTree::erase(int h) {
  CellRecord& c = pool_[h];
  if (!c.alive) return;
  maps_[c.idx.level].erase(pack_key(c.idx));
  c.alive = false;
  free_.push_back(h);
  --node_count_;
  touch(c.idx.level);
}

void GradedTree::set_kind(int h, NodeKind kind) {
  if (pool_[h].kind != kind) {
    pool_[h].kind = kind;
    touch(pool_[h].idx.level);
  }
}

std::vector<CellIndex> GradedTree::child_indices(const CellIndex& idx) const {
  if (idx.level >= max_level_) {
    throw DomainError("child_indices: level " + std::to_string(idx.level) +
                      " is the finest level");
  }
  std::vector<CellIndex> out;
  out.reserve(1 << dim_);
  for (int k = 0; k < (1 << dim_); ++k) {
    CellIndex c;
    c.level = idx.level + 1;
    for (int a = 0; a < dim_; ++a) c.coords[a] = 2 * idx.coords[a] + ((k >> a) & 1);
    out.push_back(c);
  }
  return out;
}

std::optional<CellIndex> GradedTree::same_level_neighbor(const CellIndex& idx, int axis,
                                                         int side) const {
  if (axis < 0 || axis >= dim_) throw DomainError("same_level_neighbor: bad axis");
  CellIndex nb = idx;
  const int n = 1 << idx.level;
  nb.coords[axis] += side;
  if (nb.coords[axis] < 0 || nb.coords[axis] >= n) {
    if (!periodic(axis)) return std::nullopt;
    nb.coords[axis] = (nb.coords[axis] + n) % n;
  }
  return nb;
}

int GradedTree::covering(const CellIndex& idx) const {
  CellIndex c = idx;
  while (c.level >= 0) {
    const int h = find(c);
    if (h >= 0) return h;
    if (c.level == 0) break;
    c = parent_of(c);
  }
  return -1;
}

void GradedTree::build_uniform(int level) {
  if (level > max_level_) throw DomainError("build_uniform: level above max level");
  for (int l = 0; l <= max_level_; ++l) {
    for (int h : handles_at(l)) erase(h);
  }
  int root = insert(CellIndex{}, NodeKind::Leaf);
  std::vector<int> front{root};
  for (int l = 0; l < level; ++l) {
    std::vector<int> next;
    next.reserve(front.size() << dim_);
    for (int h : front) {
      set_kind(h, NodeKind::Internal);
      for (const auto& c : child_indices(pool_[h].idx)) next.push_back(insert(c, NodeKind::Leaf));
    }
    front.swap(next);
  }
}

State GradedTree::ghost(const State& inside, int axis, int side) const {
  const BoundaryCondition& b = bc_[axis][side > 0 ? 1 : 0];
  if (b.kind == BoundaryCondition::Kind::Dirichlet) return 2.0 * b.value - inside;
  return inside;
}

std::vector<int> GradedTree::handles_at(int level) const {
  auto& [ver, out] = sorted_[level];
  if (ver == version_[level]) return out;
  std::vector<std::pair<uint64_t, int>> kv(maps_[level].begin(), maps_[level].end());
  std::sort(kv.begin(), kv.end());
  out.clear();
  out.reserve(kv.size());
  for (const auto& p : kv) out.push_back(p.second);
  ver = version_[level];
  return out;
}

Family GradedTree::make_family(int parent, int level) const {
  Family f;
  f.parent = parent;
  f.stencil.fill(kGhost);
  f.reflect.fill(0);
  f.children.fill(-1);
  const CellIndex& p = pool_[parent].idx;
  const int n = 1 << level;
  const int count = ipow3(dim_);
  for (int s = 0; s < count; ++s) {
    CellIndex c = p;
    uint8_t refl = 0;
    int rem = s;
    for (int a = 0; a < dim_; ++a) {
      const int o = rem % 3 - 1;
      rem /= 3;
      int x = p.coords[a] + o;
      if (x < 0 || x >= n) {
        if (periodic(a)) {
          x = (x + n) % n;
        } else {
          const int side = x < 0 ? 0 : 1;
          x = side == 0 ? 0 : n - 1;
          refl |= static_cast<uint8_t>(1u << (2 * a + side));
        }
      }
      c.coords[a] = x;
    }
    const int h = find(c);
    f.stencil[s] = h >= 0 ? h : kMissing;
    f.reflect[s] = refl;
  }
  if (level < max_level_) {
    for (int k = 0; k < (1 << dim_); ++k) {
      CellIndex c;
      c.level = level + 1;
      for (int a = 0; a < dim_; ++a) c.coords[a] = 2 * p.coords[a] + ((k >> a) & 1);
      f.children[k] = find(c);
    }
  }
  return f;
}

void GradedTree::rebuild(int l) {
  LevelCache& lc = caches_[l];
  lc.leaves.clear();
  lc.internals.clear();
  lc.virtuals.clear();
  lc.faces.clear();
  lc.internal_families.clear();
  lc.virtual_families.clear();
  for (int h : handles_at(l)) {
    switch (pool_[h].kind) {
      case NodeKind::Leaf: lc.leaves.push_back(h); break;
      case NodeKind::Internal: lc.internals.push_back(h); break;
      case NodeKind::Virtual: lc.virtuals.push_back(h); break;
    }
  }
  const int nf = 2 * dim_;
  lc.faces.resize(lc.leaves.size() * nf);
  for (std::size_t i = 0; i < lc.leaves.size(); ++i) {
    const int h = lc.leaves[i];
    const CellIndex& idx = pool_[h].idx;
    bool owns_virtuals = false;
    for (int a = 0; a < dim_; ++a) {
      for (int s = 0; s < 2; ++s) {
        FaceLink& f = lc.faces[i * nf + 2 * a + s];
        const int side = s == 0 ? -1 : 1;
        auto nb = same_level_neighbor(idx, a, side);
        if (!nb) {
          f.kind = FaceLink::kBoundary;
          f.count = 1;
          f.own[0] = h;
          f.other[0] = -1;
          continue;
        }
        const int nh = find(*nb);
        if (nh < 0) {
          throw TopologyError("leaf at level " + std::to_string(l) +
                              " faces a coarser leaf without virtual children");
        }
        if (pool_[nh].kind != NodeKind::Internal) {
          f.kind = FaceLink::kSame;
          f.count = 1;
          f.own[0] = h;
          f.other[0] = nh;
          continue;
        }
        f.kind = FaceLink::kFiner;
        f.count = 0;
        owns_virtuals = true;
        for (int k = 0; k < (1 << dim_); ++k) {
          if (((k >> a) & 1) != s) continue;
          CellIndex mine, theirs;
          mine.level = theirs.level = l + 1;
          for (int b = 0; b < dim_; ++b) {
            const int bit = (k >> b) & 1;
            mine.coords[b] = 2 * idx.coords[b] + bit;
            theirs.coords[b] = 2 * nb->coords[b] + (b == a ? 1 - bit : bit);
          }
          const int mh = find(mine);
          const int th = find(theirs);
          if (mh < 0 || pool_[mh].kind != NodeKind::Virtual) {
            throw TopologyError("leaf at level " + std::to_string(l) +
                                " lacks virtual children at a refinement interface");
          }
          if (th < 0 || pool_[th].kind != NodeKind::Leaf) {
            throw TopologyError("ungraded tree at level " + std::to_string(l));
          }
          f.own[f.count] = mh;
          f.other[f.count] = th;
          ++f.count;
        }
      }
    }
    (void)owns_virtuals;
    if (l < max_level_) {
      CellIndex c0;
      c0.level = l + 1;
      for (int a = 0; a < dim_; ++a) c0.coords[a] = 2 * idx.coords[a];
      if (find(c0) >= 0) lc.virtual_families.push_back(make_family(h, l));
    }
  }
  for (int h : lc.internals) lc.internal_families.push_back(make_family(h, l));
  lc.built_self = version_[l];
  lc.built_finer = version_[l + 1];
}

const LevelCache& GradedTree::level(int l) {
  LevelCache& lc = caches_[l];
  if (lc.built_self != version_[l] || lc.built_finer != version_[l + 1]) rebuild(l);
  return lc;
}

std::vector<int> GradedTree::all_leaves() {
  std::vector<int> out;
  for (int l = 0; l <= max_level_; ++l) {
    const auto& lv = level(l).leaves;
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

std::vector<CellIndex> child_indices(const GradedTree& tree, const CellIndex& idx) {
  return tree.child_indices(idx);
}

std::optional<CellIndex> same_level_neighbor(const GradedTree& tree, const CellIndex& idx,
                                             int axis, int side) {
  return tree.same_level_neighbor(idx, axis, side);
}

bool faces_finer_leaf(const GradedTree& tree, int h) {
  const CellIndex& idx = tree.cell(h).idx;
  for (int a = 0; a < tree.dim(); ++a) {
    for (int side : {-1, 1}) {
      auto nb = tree.same_level_neighbor(idx, a, side);
      if (!nb) continue;
      const int nh = tree.find(*nb);
      if (nh >= 0 && tree.cell(nh).kind == NodeKind::Internal) return true;
    }
  }
  return false;
}

namespace {

// Real (non-virtual) leaf covering `idx`, or -1.
int covering_leaf(const GradedTree& tree, CellIndex idx) {
  while (true) {
    const int h = tree.find(idx);
    if (h >= 0 && tree.cell(h).kind == NodeKind::Leaf) return h;
    if (h >= 0 && tree.cell(h).kind == NodeKind::Internal) return -1;
    if (idx.level == 0) return -1;
    idx = parent_of(idx);
  }
}

void split_leaf(GradedTree& tree, int h) {
  tree.set_kind(h, NodeKind::Internal);
  for (const auto& c : tree.child_indices(tree.cell(h).idx)) {
    const int ch = tree.find(c);
    if (ch >= 0) {
      tree.set_kind(ch, NodeKind::Leaf);
    } else {
      tree.insert(c, NodeKind::Leaf);
    }
  }
}

}  // namespace

int ensure_graded_with_virtuals(GradedTree& tree, bool full_face_stencils) {
  int changes = 0;
  const int L = tree.max_level();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int m = L; m >= 1; --m) {
      for (int h : tree.handles_at(m)) {
        if (!tree.cell(h).alive) continue;
        const NodeKind k = tree.cell(h).kind;
        if (k == NodeKind::Virtual) continue;
        if (k == NodeKind::Leaf &&
            (!full_face_stencils || m == L || !faces_finer_leaf(tree, h))) {
          continue;
        }
        const CellIndex idx = tree.cell(h).idx;
        for (int a = 0; a < tree.dim(); ++a) {
          for (int side : {-1, 1}) {
            auto nb = tree.same_level_neighbor(idx, a, side);
            if (!nb) continue;
            const int nh = tree.find(*nb);
            if (nh >= 0 && tree.cell(nh).kind != NodeKind::Virtual) continue;
            const int c = covering_leaf(tree, *nb);
            if (c < 0) continue;
            split_leaf(tree, c);
            ++changes;
            changed = true;
          }
        }
      }
    }
  }
  // Virtual children: exactly the leaves facing an internal node own them.
  for (int l = 0; l <= L; ++l) {
    for (int h : tree.handles_at(l)) {
      CellRecord& c = tree.cell(h);
      if (!c.alive) continue;
      if (c.kind == NodeKind::Virtual) {
        const int p = tree.find(parent_of(c.idx));
        if (p < 0 || tree.cell(p).kind != NodeKind::Leaf || !faces_finer_leaf(tree, p)) {
          tree.erase(h);
          ++changes;
        }
        continue;
      }
      if (c.kind != NodeKind::Leaf || l == L) continue;
      if (!faces_finer_leaf(tree, h)) continue;
      for (const auto& ci : tree.child_indices(c.idx)) {
        if (tree.find(ci) < 0) {
          tree.insert(ci, NodeKind::Virtual);
          ++changes;
        }
      }
    }
  }
  return changes;
}

bool is_graded(const GradedTree& tree) {
  for (int l = 0; l <= tree.max_level(); ++l) {
    for (int h : tree.handles_at(l)) {
      if (tree.cell(h).kind != NodeKind::Leaf) continue;
      const CellIndex& idx = tree.cell(h).idx;
      for (int a = 0; a < tree.dim(); ++a) {
        for (int side : {-1, 1}) {
          auto nb = tree.same_level_neighbor(idx, a, side);
          if (!nb) continue;
          const int nh = tree.find(*nb);
          if (nh >= 0 && tree.cell(nh).kind == NodeKind::Internal) {
            for (const auto& c : tree.child_indices(*nb)) {
              if (c.coords[a] % 2 != (side < 0 ? 1 : 0)) continue;
              const int ch = tree.find(c);
              if (ch < 0 || tree.cell(ch).kind == NodeKind::Internal) return false;
            }
          } else if (nh < 0 || tree.cell(nh).kind == NodeKind::Virtual) {
            const int cov = covering_leaf(tree, *nb);
            if (cov < 0 || tree.cell(cov).idx.level < l - 1) return false;
          }
        }
      }
    }
  }
  return true;
}

bool is_virtual_complete(const GradedTree& tree) {
  for (int l = 0; l <= tree.max_level(); ++l) {
    for (int h : tree.handles_at(l)) {
      const CellRecord& c = tree.cell(h);
      if (c.kind == NodeKind::Virtual) {
        const int p = tree.find(parent_of(c.idx));
        if (p < 0 || tree.cell(p).kind != NodeKind::Leaf || !faces_finer_leaf(tree, p)) {
          return false;
        }
      } else if (c.kind == NodeKind::Leaf && l < tree.max_level() && faces_finer_leaf(tree, h)) {
        for (const auto& ci : tree.child_indices(c.idx)) {
          const int ch = tree.find(ci);
          if (ch < 0 || tree.cell(ch).kind != NodeKind::Virtual) return false;
        }
      }
    }
  }
  return true;
}

FluxPartner find_flux_partner(const GradedTree& tree, const CellIndex& leaf, int axis, int side) {
  const int h = tree.find(leaf);
  if (h < 0 || tree.cell(h).kind != NodeKind::Leaf) {
    throw TopologyError("find_flux_partner: not a leaf");
  }
  FluxPartner fp;
  auto nb = tree.same_level_neighbor(leaf, axis, side);
  if (!nb) return fp;
  const int nh = tree.find(*nb);
  if (nh < 0) throw TopologyError("find_flux_partner: ungraded tree or missing virtual leaf");
  const NodeKind k = tree.cell(nh).kind;
  if (k == NodeKind::Leaf) {
    fp.kind = FluxPartner::Kind::SameLevelLeaf;
    fp.cells.push_back(*nb);
    return fp;
  }
  if (k == NodeKind::Virtual) {
    fp.kind = FluxPartner::Kind::SameLevelVirtual;
    fp.cells.push_back(*nb);
    return fp;
  }
  fp.kind = FluxPartner::Kind::FinerViaVirtualChildren;
  const int s = side > 0 ? 1 : 0;
  for (int k2 = 0; k2 < (1 << tree.dim()); ++k2) {
    if (((k2 >> axis) & 1) != s) continue;
    CellIndex mine, theirs;
    mine.level = theirs.level = leaf.level + 1;
    for (int b = 0; b < tree.dim(); ++b) {
      const int bit = (k2 >> b) & 1;
      mine.coords[b] = 2 * leaf.coords[b] + bit;
      theirs.coords[b] = 2 * nb->coords[b] + (b == axis ? 1 - bit : bit);
    }
    const int th = tree.find(theirs);
    if (th < 0 || tree.cell(th).kind != NodeKind::Leaf) {
      throw TopologyError("find_flux_partner: neighbour level differs by more than one");
    }
    const int mh = tree.find(mine);
    if (mh < 0 || tree.cell(mh).kind != NodeKind::Virtual) {
      throw TopologyError("find_flux_partner: virtual children missing");
    }
    fp.cells.push_back(mine);
    fp.fine.push_back(theirs);
  }
  return fp;
}

LeafStatistics leaf_statistics(const GradedTree& tree) {
  LeafStatistics st;
  for (int l = 0; l <= tree.max_level(); ++l) {
    for (int h : tree.handles_at(l)) {
      if (tree.cell(h).kind == NodeKind::Leaf) ++st.leaves;
      if (tree.cell(h).kind == NodeKind::Virtual) ++st.virtuals;
    }
  }
  const double full = std::ldexp(1.0, tree.max_level() * tree.dim());
  st.compression_percent = 100.0 * static_cast<double>(st.leaves) / full;
  return st;
}

}  // namespace mrlt
