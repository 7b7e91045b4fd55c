#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regsets/covering.hpp"
#include "regsets/hierarchy.hpp"
#include "regsets/net.hpp"

namespace regsets {

// Ball-translation problem: move each B(x_i, r_i) onto B(y_i, r_i)
// by a global bilipschitz map that is the translation x - p + q outside
// B(p, 2R).
struct BallTranslationTask {
  Point p, q;
  double R = 1.0;
  std::vector<Point> xs, ys;
  std::vector<double> radii;
  double delta = 0.0;  // delta * R <= r_i <= R / 3

  int dim() const { return static_cast<int>(p.size()); }
  void validate() const;
};

// Piecewise-linear radial reparameterization around a center: the radius map
// interpolates the (rho, sigma) knots, starts at (0, 0) and is the identity
// beyond the last knot. Unit-slope identity segments pass points through
// bitwise.
struct RadialGadget {
  Point center;
  std::vector<double> rho_knots;    // strictly increasing, rho_knots[last] = sigma_knots[last]
  std::vector<double> sigma_knots;  // strictly increasing

  Point forward(PointView x) const;
  Point inverse(PointView y) const;
};

// One direction's slab construction in normalized coordinates: rotation
// sending theta to the last axis, sorted breakpoints t_i -> u_i, per-slab
// gadget parameters in R^{n-1}.
struct SlabPass {
  int n = 2;
  double eps = 0.0;
  Point theta;                       // unit direction
  std::vector<double> t, u;          // m interior breakpoints, strictly increasing
  std::vector<Point> a_tilde, b_tilde;  // slab gadget centers (rotated frame)

  enum class Region { Slab, Collar, Between, Band, SideCollar, Outside };

  Point rotate(PointView x) const;    // theta -> e_n frame
  Point unrotate(PointView w) const;
  Region classify(PointView w) const;            // rotated-frame point
  Point apply_rotated(PointView w) const;        // total map in the rotated frame
  Point apply_region(PointView w, Region r) const;  // forced-branch evaluation (tests)
  Point apply(PointView x) const;                // unrotated in/out
  double profile(double wn) const;               // the 1-d breakpoint rearrangement
};

// Ambient ball-translation map: normalization, conjugating ball gadgets, global
// stretch, one or two slab passes, exact translation shortcuts on the inner
// balls and outside B(p, 2R).
struct PiecewiseAmbientMap {
  BallTranslationTask task;
  double eps = 0.0;
  std::vector<RadialGadget> gx, gy;   // per-ball rescalers (normalized frame)
  RadialGadget stretch;               // global radial map around the origin
  std::vector<SlabPass> passes;       // empty for m = 0; one or two otherwise
  std::vector<Point> staging;         // two-pass intermediate centers
  bool one_dimensional = false;
  std::vector<double> knots_x, knots_y;  // n = 1 monotone interpolation

  Point eval(PointView x) const;
  // Composite without the exact-translation shortcuts (tests compare both).
  Point eval_no_shortcut(PointView x) const;
};

// Unit vector with |theta . (x_i - x_j)| > 5 eps and |theta . (y_i - y_j)| > 5 eps
// for all i != j, by seeded rejection sampling.
Point choose_direction(const std::vector<Point>& xs, const std::vector<Point>& ys, double eps,
                       std::uint64_t seed, std::size_t draw_budget = 1000000);

constexpr std::size_t kDefaultDrawBudget = 1000000;

// The segment-interpolation gadget g(a, b) on Q = [-2, 2]^{n-1}: translation
// on B(a, eps), affine on each ray segment [v, v'], identity on the boundary.
Point eval_radial(PointView a, PointView b, double eps, PointView x);

PiecewiseAmbientMap build_slab_map(const BallTranslationTask& task, std::uint64_t seed,
                                   std::size_t draw_budget = kDefaultDrawBudget);

inline Point eval_piecewise(const PiecewiseAmbientMap& map, PointView x) { return map.eval(x); }

struct AmbientEmbedding {
  std::vector<std::vector<PiecewiseAmbientMap>> stages;  // stages[k]: maps with disjoint supports
  BallHierarchy e_hierarchy;  // gap-cover centers/radii on E
  BallHierarchy f_hierarchy;  // packing centers on F
  double d = 0.0;
  double D = 0.0;  // realized multiplier cap

  // f_k with k = upto (0 = identity, stages.size() = full map).
  Point eval(PointView x, std::size_t upto) const;
  Point eval(PointView x) const { return eval(x, stages.size()); }
};

struct AmbientOptions {
  BuildMode mode = BuildMode::Adaptive;
  double lambda = 18.0;
  double d_initial = 1.0 / 16.0;
  int d_tries = 8;
  std::uint64_t seed = 1;
  std::size_t draw_budget = kDefaultDrawBudget;
};

// Depth-K composition: per level, geometric gap covers on E
// cells and packings on F, realized as one ball-translation map per parent.
// E and F must sit inside B(0, 1) with diameter 1/2.
AmbientEmbedding build_ambient_embedding(const WeightedNet& E, const WeightedNet& F, double s,
                                         double t, double C, int depth,
                                         const AmbientOptions& opts = {});

// Translate/scale a net into B(0,1) with diameter 1/2.
WeightedNet normalize_to_half_ball(const WeightedNet& net, double s_mass);

}  // namespace regsets
