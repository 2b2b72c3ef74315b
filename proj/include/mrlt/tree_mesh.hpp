#ifndef MRLT_TREE_MESH_HPP_
#define MRLT_TREE_MESH_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mrlt/state.hpp"

namespace mrlt {

constexpr int kMaxDim = 3;
constexpr int kMaxLevel = 19;

struct CellIndex {
  int level = 0;
  std::array<int, kMaxDim> coords{};

  friend bool operator==(const CellIndex& a, const CellIndex& b) {
    return a.level == b.level && a.coords == b.coords;
  }
  friend bool operator!=(const CellIndex& a, const CellIndex& b) { return !(a == b); }
};

uint64_t pack_key(const CellIndex& idx);
CellIndex parent_of(const CellIndex& idx);

enum class NodeKind : uint8_t { Internal, Leaf, Virtual };

struct BoundaryCondition {
  enum class Kind : uint8_t { Periodic, Neumann, Dirichlet };
  Kind kind = Kind::Neumann;
  State value{};
};

// Per-cell storage. Slot names follow the compact RK layout; the last
// four slots are scratch used by the schedulers.
struct CellRecord {
  CellIndex idx;
  NodeKind kind = NodeKind::Leaf;
  bool alive = true;
  int64_t t_start = 0;  // iteration index where the current interval began

  State q_n, q_star, q_dstar;
  State nerk_quarter, nerk_half, nerk_threequarter;
  State detail, flux_acc;

  State q_mid;  // first-order value at the interval midpoint
  State q_ext;  // first-order value extrapolated to the interval end
  State q_end;  // value at the interval end
  State work;   // value read by the flux sweep
};

// One face of a leaf as seen by the flux sweep.
struct FaceLink {
  enum Kind : int8_t { kBoundary = 0, kSame = 1, kFiner = 2 };
  int8_t kind = kBoundary;
  int8_t count = 0;
  std::array<int, 4> own{};    // self, or own virtual children on this face
  std::array<int, 4> other{};  // cells across the face
};

constexpr int kGhost = -1;
constexpr int kMissing = -2;

// A parent with its 3^d same-level neighbourhood and its 2^d children.
struct Family {
  int parent = -1;
  std::array<int, 27> stencil{};
  std::array<uint8_t, 27> reflect{};  // bit 2a+s set: mirrored through face (a, s)
  std::array<int, 8> children{};
};

struct LevelCache {
  std::vector<int> leaves, internals, virtuals;
  std::vector<FaceLink> faces;          // 2d entries per leaf, in leaves order
  std::vector<Family> internal_families;
  std::vector<Family> virtual_families;  // leaves owning virtual children
  uint64_t built_self = ~0ull, built_finer = ~0ull;
};

struct FluxPartner {
  enum class Kind { Boundary, SameLevelLeaf, SameLevelVirtual, FinerViaVirtualChildren };
  Kind kind = Kind::Boundary;
  std::vector<CellIndex> cells;  // neighbour, or own virtual children facing the finer side
  std::vector<CellIndex> fine;   // finer leaves across the face, matched to cells
};

struct LeafStatistics {
  std::size_t leaves = 0;
  std::size_t virtuals = 0;
  double compression_percent = 0.0;
};

class GradedTree {
 public:
  GradedTree(int dim, int max_level, std::array<double, kMaxDim> lo,
             std::array<double, kMaxDim> hi,
             std::array<std::array<BoundaryCondition, 2>, kMaxDim> bc);

  int dim() const { return dim_; }
  int max_level() const { return max_level_; }
  int children_per_node() const { return 1 << dim_; }
  bool periodic(int axis) const {
    return bc_[axis][0].kind == BoundaryCondition::Kind::Periodic;
  }
  const BoundaryCondition& bc(int axis, int side) const { return bc_[axis][side]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double dx(int level, int axis) const;
  double cell_volume(int level) const;
  std::array<double, kMaxDim> center(const CellIndex& idx) const;

  int find(const CellIndex& idx) const;
  bool contains(const CellIndex& idx) const { return find(idx) >= 0; }
  CellRecord& cell(int h) { return pool_[h]; }
  const CellRecord& cell(int h) const { return pool_[h]; }
  int insert(const CellIndex& idx, NodeKind kind);
  void erase(int h);
  void set_kind(int h, NodeKind kind);
  std::size_t node_count() const { return node_count_; }

  std::vector<CellIndex> child_indices(const CellIndex& idx) const;
  std::optional<CellIndex> same_level_neighbor(const CellIndex& idx, int axis, int side) const;
  bool in_domain(const CellIndex& idx) const;

  // Handle of the node covering (level, coords) at the deepest existing
  // level <= `level`; -1 if even the root is missing.
  int covering(const CellIndex& idx) const;

  // Full tree refined uniformly to `level`; leaves are at `level`.
  void build_uniform(int level);

  // Ghost value across boundary face (axis, side) of a cell holding `inside`.
  State ghost(const State& inside, int axis, int side) const;

  // Cached connectivity for one level; rebuilt when levels l or l+1 changed.
  const LevelCache& level(int l);
  std::vector<int> all_leaves();
  std::vector<int> handles_at(int level) const;  // sorted by key

  uint64_t level_version(int l) const { return l <= max_level_ ? version_[l] : 0; }

 private:
  void touch(int level) { ++version_[level]; }
  void rebuild(int l);
  Family make_family(int parent, int level) const;

  int dim_;
  int max_level_;
  std::array<double, kMaxDim> lo_, hi_;
  std::array<std::array<BoundaryCondition, 2>, kMaxDim> bc_;
  std::vector<CellRecord> pool_;
  std::vector<int> free_;
  std::vector<std::unordered_map<uint64_t, int>> maps_;
  std::vector<uint64_t> version_;
  std::vector<LevelCache> caches_;
  mutable std::vector<std::pair<uint64_t, std::vector<int>>> sorted_;  // (version, handles)
  std::size_t node_count_ = 0;
};

std::vector<CellIndex> child_indices(const GradedTree& tree, const CellIndex& idx);
std::optional<CellIndex> same_level_neighbor(const GradedTree& tree, const CellIndex& idx,
                                             int axis, int side);

// Restores face gradedness by splitting leaves and inserts the virtual
// children required at every refinement interface. With
// `full_face_stencils`, leaves owning virtual children also get their
// same-level face neighbours, so prediction never falls back to coarser
// data along an axis. Returns the number of topology changes made. Values
// of new cells are left untouched.
int ensure_graded_with_virtuals(GradedTree& tree, bool full_face_stencils = false);

// True when every pair of face-adjacent leaves differs by at most one level.
bool is_graded(const GradedTree& tree);
// True when every leaf facing a finer leaf owns all its virtual children
// and no other virtual leaves exist.
bool is_virtual_complete(const GradedTree& tree);

FluxPartner find_flux_partner(const GradedTree& tree, const CellIndex& leaf, int axis, int side);

LeafStatistics leaf_statistics(const GradedTree& tree);

// Whether the leaf `h` has a face neighbour region refined below its level.
bool faces_finer_leaf(const GradedTree& tree, int h);

}  // namespace mrlt

#endif  // MRLT_TREE_MESH_HPP_
