#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regsets/cantor.hpp"
#include "regsets/covering.hpp"
#include "regsets/net.hpp"

namespace regsets {

enum class BuildMode { Strict, Adaptive };

using Word = std::vector<std::uint32_t>;

// Tree of nested balls indexed by words. Nodes are stored per level in
// breadth-first order; children of node (level k, slot i) occupy a contiguous
// run at level k+1.
struct BallNode {
  std::uint32_t point = 0;        // index into the source net
  double rho = 0.0;               // node ball radius
  std::uint32_t parent = 0;       // slot at the previous level
  std::uint32_t first_child = 0;  // slot at the next level
  std::uint32_t child_count = 0;
};

struct BallHierarchy {
  std::vector<std::vector<BallNode>> levels;  // levels[0] = root only
  double d = 0.0;                             // level ratio
  double scale = 1.0;                         // radius of the root ball (= net diameter)
  double multiplier_cap = 1.0;                // rho(level k) <= cap * d^k * scale

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  Word word_of(int level, std::uint32_t slot) const;
  std::uint32_t slot_of(const Word& word) const;
};

// Depth-wise partition of the source net's point indices; cells follow the
// same level/slot layout as the hierarchy they were built with.
struct CellPartition {
  std::vector<std::vector<std::vector<std::uint32_t>>> cells;  // [level][slot] -> indices
};

struct SubsetBuild {
  BallHierarchy hierarchy;  // on the source net
  CantorSpec spec;          // target Cantor set C(t, scale)
  int digits_per_level = 1;  // hierarchy symbol = this many base-2^n Cantor digits
  double d = 0.0;            // = spec.d ^ digits_per_level
  std::optional<WeightedNet> leaf_net;  // deepest-level centers, weighted to t-mass
};

struct SubsetStrictParams {
  int N = 0;
  double d = 0.0;
};

// Smallest N with d = 2^{-Nn/t} satisfying d < 1/3 and d^{s-t} < (15^s C_E)^{-1}.
SubsetStrictParams subset_strict_params(double s, double C_E, double t, int n);

struct SubsetOptions {
  BuildMode mode = BuildMode::Adaptive;
  std::size_t node_budget = kDefaultNodeBudget;
  int max_N = 12;
};

// Nested 2^{Nn}-ary ball system on an s-regular net, realizing a bilipschitz
// copy of the Cantor set C(t, diam). Children are greedy packings at radius
// 3 d^{k+1} inside the parent ball of radius d^k (all radii carry the net
// diameter as a unit).
SubsetBuild build_subset_hierarchy(const WeightedNet& net, double s, double C_E, double t, int n,
                                   int depth, const SubsetOptions& opts = {});

// Prefix-preserving bijection between two hierarchies, or a hierarchy and a
// Cantor target, evaluable as a point map on deepest-level members.
struct Correspondence {
  enum class Target { Cantor, Net };
  Target target = Target::Cantor;

  // Source structure.
  const WeightedNet* source_net = nullptr;
  BallHierarchy source;
  CellPartition source_cells;  // empty for ball-based sources
  bool cell_based = false;

  // Target structure (one of).
  CantorSpec cantor_spec;
  int cantor_digits = 1;
  const WeightedNet* target_net = nullptr;
  BallHierarchy target_hierarchy;

  double L_bound = 0.0;
  double L_measured = 0.0;
};

struct EmbeddingBuild {
  CellPartition cells;       // on E
  BallHierarchy e_hierarchy; // centers/rho backing the cells
  BallHierarchy f_hierarchy; // on F
  double d = 0.0;
  double D = 0.0;            // ring-cover multiplier cap
  Correspondence corr;
};

// Subset-to-Cantor map: identity word map onto the Cantor target,
// L_bound = max{sqrt(n)/d, 4/(1-2d)}; L_measured over deepest-level pairs
// (seeded sampling once the pair count passes pair_budget).
Correspondence subset_map(const WeightedNet& net, const SubsetBuild& build,
                          std::size_t pair_budget = 200000, std::uint64_t seed = 1);

struct EmbeddingOptions {
  BuildMode mode = BuildMode::Adaptive;
  double d_initial = 0.25;    // adaptive grid starts here and halves
  int d_tries = 14;
  double d_strict = 0.0;      // strict mode: 0 = largest power of two satisfying the bounds
  std::size_t pair_budget = 200000;
  std::uint64_t seed = 1;
};

// Net-into-net embedding: E-side cells by ring covers, F-side centers by
// greedy packings, paired level by level. Both nets must have diameter 1.
EmbeddingBuild build_embedding(const WeightedNet& E, const WeightedNet& F, double s, double t,
                               double C_E, double C_F, int depth, const EmbeddingOptions& opts = {});

// Deepest-cell (or deepest-ball) lookup followed by the node-to-node map,
// truncated at the given level (-1 = full depth).
Point evaluate_correspondence(const Correspondence& corr, PointView x, int truncate_level = -1);

// Max two-sided distance distortion over explicit point pairs.
using PointMap = std::function<Point(PointView)>;
double distortion(const PointMap& map, const std::vector<std::pair<Point, Point>>& pairs);

// Local convenience: restrict to E cap B(center, r), rescale, build.
struct SubsetInBall {
  std::vector<std::uint32_t> indices;  // original net indices of the subnet
  SubsetBuild build;                   // on the subnet (leaf_net in original coordinates)
};
SubsetInBall subset_in_ball(const WeightedNet& net, std::size_t center_index, double r, double t,
                            int n, int depth, const SubsetOptions& opts = {});

}  // namespace regsets
