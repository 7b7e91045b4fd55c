#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regsets/error.hpp"
#include "regsets/geometry.hpp"

namespace regsets {

// Distance oracle for nets without coordinates. Distances are memoized into a
// dense symmetric matrix at construction.
using DistanceFn = std::function<double(std::size_t, std::size_t)>;

struct BallResult {
  std::vector<std::uint32_t> indices;  // ascending
  double mass = 0.0;
};

struct RegularityParams {
  double exponent = 0.0;   // s
  double constant = 1.0;   // C, >= 1
  double r_min = 0.0;
  double r_max = 0.0;
};

struct RegularityEstimate {
  double c_lower = 0.0;
  double C_upper = 0.0;
  // Witnesses attaining the extremes.
  std::uint32_t min_center = 0;
  double min_radius = 0.0;
  std::uint32_t max_center = 0;
  double max_radius = 0.0;
};

struct ScaleGapWitness {
  std::uint32_t center = 0;
  double r_inner = 0.0;  // ball at this radius and at r_outer hold equal mass
  double r_outer = 0.0;
  double ratio_power = 0.0;  // (r_outer / r_inner)^s
};

// Finite weighted point set standing in for a regular set (E, mu) at
// resolution delta. Immutable after construction; queries are pure.
class WeightedNet {
 public:
  // Euclidean net. coords is row-major, size = count * dim.
  WeightedNet(int dim, std::vector<double> coords, std::vector<double> weights, double resolution);

  // Oracle net over point ids 0..count-1; fn is evaluated once per pair.
  WeightedNet(std::size_t count, const DistanceFn& fn, std::vector<double> weights, double resolution);

  std::size_t size() const { return weights_.size(); }
  int dim() const { return dim_; }
  bool euclidean() const { return dim_ > 0; }
  double resolution() const { return resolution_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& coords() const { return coords_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double total_weight() const { return total_weight_; }

  PointView point(std::size_t i) const {
    return PointView(coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  }
  Point point_copy(std::size_t i) const {
    auto v = point(i);
    return Point(v.begin(), v.end());
  }

  double distance(std::size_t i, std::size_t j) const {
    if (euclidean()) return dist(point(i), point(j));
    return oracle_[i * size() + j];
  }
  // Distance from an arbitrary Euclidean point; oracle nets only support net ids.
  double distance_to(PointView x, std::size_t j) const;

  // Deterministic candidate order: ascending lexicographic coordinates
  // (ties by index); oracle mode keeps insertion order.
  const std::vector<std::uint32_t>& candidate_order() const;

  // Checks symmetry/nonnegativity and, for oracle nets, the triangle
  // inequality on sampled triples. Throws on violation.
  void validate(std::uint64_t seed = 1) const;

  const GridIndex& index() const;

 private:
  int dim_ = 0;  // 0 for oracle mode
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<double> oracle_;  // dense matrix when dim_ == 0
  double resolution_ = 0.0;
  double total_weight_ = 0.0;
  mutable std::vector<std::uint32_t> order_;
  mutable GridIndex index_;
  mutable double index_cell_ = -1.0;
};

// Max pairwise distance; 0 for a singleton. Exact (1-d nets use a min/max
// sweep, otherwise the full pairwise scan).
double diameter(const WeightedNet& net);

// Closed ball query: indices (ascending) of net points with d(x, p_i) <= r and
// their total weight. The grid fast path must agree with brute force exactly.
BallResult ball_query(const WeightedNet& net, PointView x, double r);
BallResult ball_query(const WeightedNet& net, std::size_t center_index, double r);

// Brute-force reference for ball_query (always scans every point).
BallResult ball_query_brute(const WeightedNet& net, PointView x, double r);
BallResult ball_query_brute(const WeightedNet& net, std::size_t center_index, double r);

struct EstimateOptions {
  std::size_t centers_sample = 0;   // 0 = all eligible centers
  int radii_per_decade = 16;
  bool positive_weight_centers_only = true;
};

// Empirical inf/sup of mass(B(x, r)) / r^s over sampled centers and a
// geometric radius grid spanning [r_min, r_max].
RegularityEstimate estimate_regularity(const WeightedNet& net, double s, double r_min, double r_max,
                                       const EstimateOptions& opts = {});

// Distances rescaled by 1/diameter, weights by diameter^{-s}; the regularity
// estimate at exponent s is invariant under this.
WeightedNet rescale_to_unit(const WeightedNet& net, double s);

// Largest empty-annulus ratio probe: if some point has equal ball mass at two
// radii a < b inside [r_min, r_max] with (b/a)^s > C, no measure can satisfy
// the two-sided (s, C) bounds there. Returns the strongest such witness.
std::optional<ScaleGapWitness> scale_gap_witness(const WeightedNet& net, double s, double C,
                                                 double r_min, double r_max);

// Subnet of the given point indices (shares dim/metric; weights kept).
WeightedNet subnet(const WeightedNet& net, const std::vector<std::uint32_t>& indices);

}  // namespace regsets
