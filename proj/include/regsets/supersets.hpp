#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regsets/covering.hpp"
#include "regsets/hierarchy.hpp"
#include "regsets/net.hpp"

namespace regsets {

// One vacant-ball planting site: the ball B(y_{k,i}, d^{k+1}) around a
// level-(k+1) packing center clear of E, and the regular set grown inside it.
struct PlantSite {
  int level = 0;                 // k
  std::uint32_t e_center = 0;    // x_{k,i}, index into X (E-part center)
  std::uint32_t y_center = 0;    // y_{k,i} = x_{k+1,j}
  double ball_radius = 0.0;      // d^{k+1}
  std::size_t J = 0, Jp = 0, I = 0;  // index-set sizes
  bool Jp_subset_J = false;
  std::vector<std::uint32_t> plant_points;  // indices into X
  std::vector<double> plant_weights;        // nu_{k,i} masses
  double plant_diameter = 0.0;
};

struct SupersetBuild {
  double d = 0.0;
  int depth = 0;
  std::vector<std::vector<std::uint32_t>> e_packings;  // per level: E-part centers (X indices)
  std::vector<std::vector<std::uint32_t>> x_packings;  // per level: full center list
  std::vector<PlantSite> sites;
  std::optional<WeightedNet> result;  // E points (zero mass) + planted points
  std::vector<char> is_e_point;       // marks E members inside result
};

struct SupersetOptions {
  BuildMode mode = BuildMode::Adaptive;
  double d_initial = 1.0 / 16.0;
  int d_tries = 4;
  int plant_depth = 1;
  std::size_t node_budget = kDefaultNodeBudget;
};

// t-regular superset: level-k packings of E and X, vacant-ball
// selection j in J \ I, and a regular set planted in every vacant ball via
// the subset pathway. E's points must be a subset of X's and diam(E) = 1.
SupersetBuild build_superset(const WeightedNet& E, const WeightedNet& X, double s, double t,
                             double u, double C_E, double C_X, int depth,
                             const SupersetOptions& opts = {});

// Exact audits: pairwise disjointness of the doubled balls 2B_{k,i} within a
// level and across levels |k - l| >= 2; returns false with no tolerance slack.
bool superset_disjointness_audit(const WeightedNet& X, const SupersetBuild& build);

}  // namespace regsets
