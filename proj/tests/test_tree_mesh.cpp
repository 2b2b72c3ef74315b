#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "mrlt/tree_mesh.hpp"

using namespace mrlt;

namespace {

using Bc = std::array<std::array<BoundaryCondition, 2>, kMaxDim>;

Bc all_bc(BoundaryCondition::Kind k) {
  Bc bc;
  for (auto& a : bc) a[0].kind = a[1].kind = k;
  return bc;
}

GradedTree line(int L, BoundaryCondition::Kind k = BoundaryCondition::Kind::Neumann) {
  return GradedTree(1, L, {0, 0, 0}, {1, 1, 1}, all_bc(k));
}

CellIndex ci(int level, int i, int j = 0) {
  CellIndex c;
  c.level = level;
  c.coords = {i, j, 0};
  return c;
}

// Refine ancestors until `leaf` exists as a leaf.
void force_leaf(GradedTree& t, const CellIndex& leaf) {
  std::vector<CellIndex> chain{leaf};
  while (chain.back().level > 0) chain.push_back(parent_of(chain.back()));
  for (auto it = chain.rbegin(); it != chain.rend() - 1; ++it) {
    const int h = t.find(*it);
    if (t.cell(h).kind == NodeKind::Internal) continue;
    t.set_kind(h, NodeKind::Internal);
    for (const auto& c : t.child_indices(*it)) {
      const int ch = t.find(c);
      if (ch < 0) t.insert(c, NodeKind::Leaf);
      else t.set_kind(ch, NodeKind::Leaf);
    }
  }
}

// Adapted line used for the interface scenarios: leaves 3:0, 3:1, 4:4, 4:5,
// 3:3, 2:2, 2:3 over L = 4.
GradedTree interface_tree() {
  GradedTree t = line(4);
  for (auto c : {ci(3, 0), ci(3, 1), ci(4, 4), ci(4, 5), ci(3, 3), ci(2, 2), ci(2, 3)}) {
    force_leaf(t, c);
  }
  ensure_graded_with_virtuals(t);
  return t;
}

std::set<std::tuple<int, int, int, int>> shape(const GradedTree& t) {
  std::set<std::tuple<int, int, int, int>> s;
  for (int l = 0; l <= t.max_level(); ++l) {
    for (int h : t.handles_at(l)) {
      const auto& c = t.cell(h);
      s.emplace(l, c.idx.coords[0], c.idx.coords[1], static_cast<int>(c.kind));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("child indices") {
  GradedTree t = line(4);
  auto ch = t.child_indices(ci(2, 3));
  REQUIRE(ch.size() == 2);
  CHECK(ch[0] == ci(3, 6));
  CHECK(ch[1] == ci(3, 7));
  ch = t.child_indices(ci(0, 0));
  CHECK(ch[0] == ci(1, 0));
  CHECK(ch[1] == ci(1, 1));
  CHECK_THROWS_AS(t.child_indices(ci(4, 0)), DomainError);

  GradedTree q(2, 3, {0, 0, 0}, {1, 1, 1}, all_bc(BoundaryCondition::Kind::Neumann));
  ch = q.child_indices(ci(0, 0, 0));
  REQUIRE(ch.size() == 4);
  CHECK(ch[0] == ci(1, 0, 0));
  CHECK(ch[1] == ci(1, 1, 0));
  CHECK(ch[2] == ci(1, 0, 1));
  CHECK(ch[3] == ci(1, 1, 1));
  for (const auto& c : q.child_indices(ci(2, 1, 3))) CHECK(parent_of(c) == ci(2, 1, 3));
}

TEST_CASE("same level neighbour") {
  GradedTree d = line(3, BoundaryCondition::Kind::Dirichlet);
  CHECK_FALSE(d.same_level_neighbor(ci(3, 0), 0, -1).has_value());
  GradedTree p = line(3, BoundaryCondition::Kind::Periodic);
  CHECK(*p.same_level_neighbor(ci(3, 0), 0, -1) == ci(3, 7));
  GradedTree q(2, 3, {0, 0, 0}, {1, 1, 1}, all_bc(BoundaryCondition::Kind::Neumann));
  CHECK(*q.same_level_neighbor(ci(2, 1, 1), 0, 1) == ci(2, 2, 1));
}

TEST_CASE("grading and virtual leaves") {
  GradedTree t = line(3);
  t.build_uniform(3);
  const auto before = shape(t);
  CHECK(ensure_graded_with_virtuals(t) == 0);
  CHECK(shape(t) == before);

  GradedTree a = interface_tree();
  CHECK(is_graded(a));
  CHECK(is_virtual_complete(a));
  // 2:2 faces internal 2:1, 3:3 faces internal 3:2.
  CHECK(a.cell(a.find(ci(3, 4))).kind == NodeKind::Virtual);
  CHECK(a.cell(a.find(ci(3, 5))).kind == NodeKind::Virtual);
  CHECK(a.cell(a.find(ci(4, 6))).kind == NodeKind::Virtual);
  CHECK(a.cell(a.find(ci(4, 7))).kind == NodeKind::Virtual);
  CHECK(a.find(ci(3, 6)) < 0);
  const auto once = shape(a);
  CHECK(ensure_graded_with_virtuals(a) == 0);
  CHECK(shape(a) == once);

  // With full stencils, 3:3 needs its right uncle 3:4, so 2:2 is split.
  GradedTree s = interface_tree();
  CHECK(ensure_graded_with_virtuals(s, true) > 0);
  CHECK(s.cell(s.find(ci(2, 2))).kind == NodeKind::Internal);
  CHECK(s.cell(s.find(ci(3, 4))).kind == NodeKind::Leaf);
  CHECK(is_graded(s));
  CHECK(is_virtual_complete(s));

  // A level-4 leaf next to a level-1 leaf forces intermediate splits.
  GradedTree b = line(4);
  force_leaf(b, ci(4, 7));
  CHECK_FALSE(is_graded(b));
  CHECK(ensure_graded_with_virtuals(b) > 0);
  CHECK(is_graded(b));
  CHECK(is_virtual_complete(b));
}

TEST_CASE("flux partners") {
  GradedTree a = interface_tree();
  auto fp = find_flux_partner(a, ci(3, 0), 0, 1);
  CHECK(fp.kind == FluxPartner::Kind::SameLevelLeaf);
  CHECK(fp.cells[0] == ci(3, 1));
  fp = find_flux_partner(a, ci(4, 5), 0, 1);
  CHECK(fp.kind == FluxPartner::Kind::SameLevelVirtual);
  CHECK(fp.cells[0] == ci(4, 6));
  fp = find_flux_partner(a, ci(2, 2), 0, -1);
  CHECK(fp.kind == FluxPartner::Kind::FinerViaVirtualChildren);
  REQUIRE(fp.cells.size() == 1);
  CHECK(fp.cells[0] == ci(3, 4));
  CHECK(fp.fine[0] == ci(3, 3));
  fp = find_flux_partner(a, ci(3, 0), 0, -1);
  CHECK(fp.kind == FluxPartner::Kind::Boundary);

  // Cached face links agree with the partner query.
  const auto& lc = a.level(2);
  REQUIRE(lc.leaves.size() == 2);
  CHECK(lc.faces[0].kind == FaceLink::kFiner);
  CHECK(lc.faces[0].own[0] == a.find(ci(3, 4)));
  CHECK(lc.faces[0].other[0] == a.find(ci(3, 3)));
}

TEST_CASE("leaf statistics") {
  GradedTree t = line(4);
  t.build_uniform(4);
  CHECK(leaf_statistics(t).compression_percent == doctest::Approx(100.0));

  GradedTree r(2, 10, {0, 0, 0}, {1, 1, 1}, all_bc(BoundaryCondition::Kind::Neumann));
  CHECK(leaf_statistics(r).compression_percent == doctest::Approx(100.0 / (1 << 20)));

  // Leaves at levels 2,2,3,3,4,4,4,4: 8 of 16.
  GradedTree f = line(4);
  for (auto c : {ci(4, 0), ci(4, 1), ci(4, 2), ci(4, 3), ci(3, 2), ci(3, 3), ci(2, 2), ci(2, 3)}) {
    force_leaf(f, c);
  }
  ensure_graded_with_virtuals(f);
  CHECK(leaf_statistics(f).leaves == 8);
  CHECK(leaf_statistics(f).compression_percent == doctest::Approx(50.0));

  // The interface tree holds 7 leaves.
  CHECK(leaf_statistics(interface_tree()).compression_percent == doctest::Approx(43.75));
}

TEST_CASE("2-D families and faces") {
  GradedTree q(2, 3, {0, 0, 0}, {1, 1, 1}, all_bc(BoundaryCondition::Kind::Periodic));
  q.build_uniform(2);
  force_leaf(q, ci(3, 0, 0));
  ensure_graded_with_virtuals(q);
  CHECK(is_graded(q));
  CHECK(is_virtual_complete(q));
  // Periodic wrap: 2:(3,0) and 2:(0,3) face the refined 2:(0,0).
  CHECK(q.find(ci(3, 6, 0)) >= 0);
  CHECK(q.cell(q.find(ci(3, 0, 6))).kind == NodeKind::Virtual);
  const auto& lc = q.level(2);
  CHECK(lc.internal_families.size() == 1);
  CHECK(lc.virtual_families.size() == 4);
  for (const auto& f : lc.internal_families) {
    for (int s = 0; s < 9; ++s) CHECK(f.stencil[s] >= 0);
  }
}
