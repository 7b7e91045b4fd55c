#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regsets/net.hpp"

namespace regsets {

// Greedy 5r-covering: disjoint closed r-balls whose 5r-dilations cover the
// query region.
struct Packing {
  std::vector<std::uint32_t> centers;  // net point indices
  double r = 0.0;
  double cover_radius = 0.0;  // 5r
  bool truncated = false;     // stopped at max_centers; cover not asserted
  std::size_t count() const { return centers.size(); }
};

enum class GapMode { Linear, Geometric };

struct GapCover {
  struct Item {
    std::uint32_t center;
    double rho;
  };
  std::vector<Item> items;
  double r = 0.0;
  double D = 0.0;       // allowed multiplier cap: rho in [r, D*r]
  GapMode mode = GapMode::Linear;
  double lambda = 0.0;  // geometric mode only
};

struct GapConstants {
  double s0 = 0.0;
  double D = 0.0;
  double c = 0.0;  // log D / log lambda
};

struct PackOptions {
  bool restrict_to_ball = true;
  std::size_t max_centers = 0;  // 0 = run to completion
};

// Maximal greedy 2r-separated selection over E cap B(p, R) in candidate
// order. Every candidate ends within 2r (hence 5r) of a chosen center.
Packing greedy_packing(const WeightedNet& net, PointView p, double r, double R,
                       const PackOptions& opts = {});
Packing greedy_packing(const WeightedNet& net, std::size_t p_index, double r, double R,
                       const PackOptions& opts = {});

// Exhaustive validity check used by tests: disjointness (> 2r) and the
// cover property at cover_radius for every point of the region.
bool packing_valid(const WeightedNet& net, PointView p, double R, bool restrict_to_ball,
                   const Packing& packing);

// Greedy continuation of an existing packing: candidates outside `excluded`
// are added in candidate order whenever they clear 2r against every seed and
// every center chosen so far. Returns the newly added centers appended to the
// seeds.
Packing greedy_extend(const WeightedNet& net, const std::vector<std::uint32_t>& seeds,
                      const std::vector<char>& excluded, double r);

// Smallest rho = (l+1) r, l >= 0, whose annulus (rho, rho + r] around x
// contains no net point; searched while rho <= D_cap * r.
double annulus_gap(const WeightedNet& net, std::size_t x_index, double r, double D_cap);
double annulus_gap(const WeightedNet& net, PointView x, double r, double D_cap);

enum class CoverMode { Strict, Adaptive };

struct RingOptions {
  CoverMode mode = CoverMode::Adaptive;
  double D_override = 0.0;  // 0 = formula value (3 C 2^s)^{1/(1-s)} + 1
};

double ring_cover_D(double C, double s);

// Linear gap cover: greedy removal of B(x_k, rho_k) with
// annulus_gap radii. Gaps are measured against the whole net.
GapCover ring_cover(const WeightedNet& net, double r, double s, double C,
                    const RingOptions& opts = {});

// Constants backing the geometric gap search. D_choice <= 0 requests auto mode.
GapConstants geometric_gap_constants(double C, double lambda, double D_choice);

// The bound expression lambda * (1 - 3 C lambda^{2s}(lambda^s - 1))^{-1/s};
// NaN when the base is nonpositive.
double geometric_gap_expression(double C, double lambda, double s);

struct LambdaGapOptions {
  CoverMode mode = CoverMode::Adaptive;
  double D_cap = 0.0;  // adaptive: 0 = extend past the diameter
};

// Geometric gap cover with greedy largest-first selection: per-point radii
// r(x) in [r, D r] with empty annulus (r(x), lambda r(x)], selected in rounds
// of r(x) > M/2. Balls B(x_i, lambda rho_i / 3) come out pairwise disjoint.
GapCover lambda_gap_cover(const WeightedNet& net, double r, double s, double C, double lambda,
                          const LambdaGapOptions& opts = {});

// Exact audits shared by tests and pipeline verdicts.
bool gap_cover_valid(const WeightedNet& net, const GapCover& cover);

// As gap_cover_valid, but names the first violated property and the offending
// center/point pair; empty result means the cover is valid.
std::optional<std::string> gap_cover_audit(const WeightedNet& net, const GapCover& cover);

}  // namespace regsets
