#ifndef MRLT_MR_ANALYSIS_HPP_
#define MRLT_MR_ANALYSIS_HPP_

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "mrlt/tree_mesh.hpp"

namespace mrlt {

enum class Slot : uint8_t {
  QN,
  QStar,
  QDStar,
  NerkQuarter,
  NerkHalf,
  NerkThreeQuarter,
  QMid,
  QExt,
  QEnd,
  Work,
};

inline State& slot(CellRecord& c, Slot s) {
  switch (s) {
    case Slot::QN: return c.q_n;
    case Slot::QStar: return c.q_star;
    case Slot::QDStar: return c.q_dstar;
    case Slot::NerkQuarter: return c.nerk_quarter;
    case Slot::NerkHalf: return c.nerk_half;
    case Slot::NerkThreeQuarter: return c.nerk_threequarter;
    case Slot::QMid: return c.q_mid;
    case Slot::QExt: return c.q_ext;
    case Slot::QEnd: return c.q_end;
    case Slot::Work: return c.work;
  }
  return c.q_n;
}
inline const State& slot(const CellRecord& c, Slot s) {
  return slot(const_cast<CellRecord&>(c), s);
}

struct ThresholdPolicy {
  double epsilon = 0.0;
  int nvars = 1;
  State scale{1.0, 1.0, 1.0, 1.0};  // per-component reference magnitude
};

// Value of a node as seen by a stencil read.
using Getter = std::function<State(const CellRecord&)>;
inline Getter slot_getter(Slot s) {
  return [s](const CellRecord& c) { return slot(c, s); };
}

State project(std::span<const State> children);

// Children of the centre of a 3^d stencil. Stencil entry s holds offset
// (s % 3 - 1, s / 3 % 3 - 1, s / 9 - 1); child k has offset bit a along axis a.
std::array<State, 8> predict(int dim, const std::array<State, 27>& stencil);

inline State detail(const State& actual, const State& predicted) { return actual - predicted; }
double detail_norm(const State& d, const ThresholdPolicy& policy);

// Uniform level data in lexicographic order (axis 0 fastest).
struct UniformField {
  int dim = 1;
  int level = 0;
  std::vector<State> cells;

  int n() const { return 1 << level; }
  std::size_t size() const { return cells.size(); }
};

using BcSet = std::array<std::array<BoundaryCondition, 2>, kMaxDim>;

struct MrPyramid {
  State root;
  std::vector<UniformField> details;  // details[l] holds level-l details, l = 1..L
};

UniformField project_uniform(const UniformField& fine);
UniformField predict_uniform(const UniformField& coarse, const BcSet& bc);
MrPyramid mr_transform(const UniformField& fine, const BcSet& bc);
UniformField inverse_transform(const MrPyramid& pyramid, int dim, const BcSet& bc);

// Gather the 3^d stencil of `fam` through `get`, applying boundary ghosts
// and predicting missing neighbours from coarser data on the fly.
void gather_stencil(const GradedTree& tree, const Family& fam, const Getter& get,
                    std::array<State, 27>& out);

// Value of any cell index: stored value if present, else predicted from
// its ancestors through the same getter.
State value_or_predicted(const GradedTree& tree, const CellIndex& idx, const Getter& get);

// Internal nodes of level l take the mean of their children in `s`.
void project_level(GradedTree& tree, int l, Slot s);
void project_tree(GradedTree& tree, Slot s, int coarsest = 0);

// Virtual leaves at `level` get the prediction from their parents' stencil.
void update_virtual_leaves(GradedTree& tree, int level, const Getter& get, Slot dst);
void update_virtual_leaves(GradedTree& tree, int level, Slot s);
void update_all_virtual_leaves(GradedTree& tree, Slot s);

// Values on the uniform grid of `level`: stored nodes where present,
// predictions from the level above elsewhere (inverse transform with zero
// details below the leaves). Internal nodes are projected first.
UniformField reconstruct_uniform(GradedTree& tree, int level, Slot s = Slot::QN);

struct AdaptOptions {
  int coarsest_active = 0;   // merges and splits only between levels >= this
  Getter inactive_value;     // value of nodes below coarsest_active; q_n if empty
  bool allow_split = true;
};

struct AdaptReport {
  int merged = 0;
  int split = 0;
};

// Remeshing pass on the leaf values in q_n. Internal nodes are projected,
// details thresholded, sibling groups merged bottom-up and significant
// leaves split. Gradedness and virtual leaves are restored afterwards;
// virtual values are not filled.
AdaptReport adapt_grid(GradedTree& tree, const ThresholdPolicy& policy,
                       const AdaptOptions& opt = {});

// Uniform level-L tree filled by `init`, then coarsened to a fixed point.
using CellInit = std::function<State(const GradedTree&, const CellIndex&)>;
void build_adaptive_grid(GradedTree& tree, const CellInit& init, const ThresholdPolicy& policy);

}  // namespace mrlt

#endif  // MRLT_MR_ANALYSIS_HPP_
