#include "regsets/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "regsets/rng.hpp"

namespace regsets {

WeightedNet::WeightedNet(int dim, std::vector<double> coords, std::vector<double> weights,
                         double resolution)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)), resolution_(resolution) {
  require(dim_ >= 1, ErrorCode::InvalidDimension, "point dimension must be >= 1");
  require(!weights_.empty(), ErrorCode::EmptyNet, "net has no points");
  require(coords_.size() == weights_.size() * static_cast<std::size_t>(dim_), ErrorCode::InvalidParams,
          "coords/weights size mismatch");
  for (double c : coords_)
    require(std::isfinite(c), ErrorCode::InvalidParams, "non-finite coordinate");
  total_weight_ = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidParams, "weights must be finite and >= 0");
    total_weight_ += w;
  }
  require(total_weight_ > 0.0, ErrorCode::InvalidParams, "total weight must be positive");
  require(resolution_ > 0.0, ErrorCode::InvalidParams, "resolution must be positive");
}

WeightedNet::WeightedNet(std::size_t count, const DistanceFn& fn, std::vector<double> weights,
                         double resolution)
    : dim_(0), weights_(std::move(weights)), resolution_(resolution) {
  require(count >= 1, ErrorCode::EmptyNet, "net has no points");
  require(weights_.size() == count, ErrorCode::InvalidParams, "weights size mismatch");
  total_weight_ = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidParams, "weights must be finite and >= 0");
    total_weight_ += w;
  }
  require(total_weight_ > 0.0, ErrorCode::InvalidParams, "total weight must be positive");
  require(resolution_ > 0.0, ErrorCode::InvalidParams, "resolution must be positive");
  oracle_.assign(count * count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double d = fn(i, j);
      require(std::isfinite(d) && d >= 0.0, ErrorCode::InvalidParams, "oracle distance must be finite and >= 0");
      oracle_[i * count + j] = d;
      oracle_[j * count + i] = d;
    }
  }
}

double WeightedNet::distance_to(PointView x, std::size_t j) const {
  require(euclidean(), ErrorCode::InvalidParams, "oracle nets only support net-point centers");
  return dist(x, point(j));
}

const std::vector<std::uint32_t>& WeightedNet::candidate_order() const {
  if (order_.empty()) {
    order_.resize(size());
    std::iota(order_.begin(), order_.end(), 0);
    if (euclidean()) {
      std::sort(order_.begin(), order_.end(), [this](std::uint32_t a, std::uint32_t b) {
        const auto pa = point(a);
        const auto pb = point(b);
        if (lex_less(pa, pb)) return true;
        if (lex_less(pb, pa)) return false;
        return a < b;
      });
    }
  }
  return order_;
}

void WeightedNet::validate(std::uint64_t seed) const {
  if (size() > 1)
    require(resolution_ <= diameter(*this) * (1.0 + 1e-12), ErrorCode::InvalidParams,
            "resolution exceeds the net diameter");
  if (euclidean()) return;  // Euclidean distances satisfy the axioms by construction
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    require(oracle_[i * n + i] == 0.0, ErrorCode::InvalidParams, "oracle d(i,i) != 0");
  auto check_triple = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double dij = oracle_[i * n + j];
    const double dik = oracle_[i * n + k];
    const double dkj = oracle_[k * n + j];
    require(dij <= dik + dkj + 1e-12 * (dik + dkj + 1.0), ErrorCode::InvalidParams,
            "oracle violates the triangle inequality on a sampled triple");
  };
  if (n * n * n <= 10000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) check_triple(i, j, k);
  } else {
    Rng rng(seed);
    for (std::size_t s = 0; s < 10000; ++s) check_triple(rng.below(n), rng.below(n), rng.below(n));
  }
}

const GridIndex& WeightedNet::index() const {
  if (index_cell_ < 0.0 && euclidean()) {
    // Cell size targeting a few points per cell for typical nets.
    double cell = resolution_ * 4.0;
    if (!(cell > 0.0) || !std::isfinite(cell)) cell = 1.0;
    index_.build(coords_, dim_, cell);
    index_cell_ = cell;
  }
  return index_;
}

namespace {

// Exact planar diameter: the farthest pair are convex-hull vertices, so the
// hull pair scan reproduces the brute-force maximum with the same distance
// formula.
double diameter_2d(const WeightedNet& net) {
  std::vector<std::uint32_t> idx(net.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto pa = net.point(a);
    const auto pb = net.point(b);
    if (pa[0] != pb[0]) return pa[0] < pb[0];
    return pa[1] < pb[1];
  });
  auto cross = [&](std::uint32_t o, std::uint32_t a, std::uint32_t b) {
    const auto po = net.point(o);
    const auto pa = net.point(a);
    const auto pb = net.point(b);
    return (pa[0] - po[0]) * (pb[1] - po[1]) - (pa[1] - po[1]) * (pb[0] - po[0]);
  };
  std::vector<std::uint32_t> hull(2 * idx.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], idx[i]) <= 0.0) --h;
    hull[h++] = idx[i];
  }
  const std::size_t lower = h + 1;
  for (std::size_t i = idx.size(); i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], idx[i]) <= 0.0) --h;
    hull[h++] = idx[i];
  }
  hull.resize(h > 1 ? h - 1 : h);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      best = std::max(best, net.distance(hull[i], hull[j]));
  return best;
}

}  // namespace

double diameter(const WeightedNet& net) {
  require(net.size() >= 1, ErrorCode::EmptyNet, "diameter of empty net");
  if (net.size() == 1) return 0.0;
  if (net.euclidean() && net.dim() == 1) {
    double lo = net.coords()[0], hi = net.coords()[0];
    for (double c : net.coords()) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return hi - lo;
  }
  if (net.euclidean() && net.dim() == 2 && net.size() > 256) return diameter_2d(net);
  double best = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      best = std::max(best, net.distance(i, j));
  return best;
}

namespace {

BallResult ball_scan(const WeightedNet& net, PointView x, const std::size_t* center_index, double r) {
  require(r >= 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "ball radius must be finite and >= 0");
  BallResult out;
  for (std::uint32_t i = 0; i < net.size(); ++i) {
    const double d = center_index ? net.distance(*center_index, i) : net.distance_to(x, i);
    if (d <= r) {
      out.indices.push_back(i);
      out.mass += net.weight(i);
    }
  }
  return out;
}

// Mass summed in ascending index order so the fast path is bit-identical to
// the brute-force scan.
BallResult ball_grid(const WeightedNet& net, PointView x, double r) {
  const GridIndex& gi = net.index();
  // Fall back when the cell sweep would touch more cells than a plain scan.
  const double cells = std::pow(2.0 * r / (gi.built() ? gi.cell_size() : 1.0) + 1.0, net.dim());
  if (!gi.built() || cells > static_cast<double>(net.size()) * 0.5) return ball_scan(net, x, nullptr, r);
  BallResult out;
  std::vector<std::uint32_t> cand;
  gi.candidates(x, r, cand);
  std::sort(cand.begin(), cand.end());
  for (std::uint32_t i : cand) {
    if (dist(x, net.point(i)) <= r) {
      out.indices.push_back(i);
      out.mass += net.weight(i);
    }
  }
  return out;
}

}  // namespace

BallResult ball_query(const WeightedNet& net, PointView x, double r) {
  require(r >= 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "ball radius must be finite and >= 0");
  if (net.euclidean()) return ball_grid(net, x, r);
  fail(ErrorCode::InvalidParams, "oracle nets require a net-point center");
}

BallResult ball_query(const WeightedNet& net, std::size_t center_index, double r) {
  require(r >= 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "ball radius must be finite and >= 0");
  if (net.euclidean()) return ball_grid(net, net.point(center_index), r);
  return ball_scan(net, {}, &center_index, r);
}

BallResult ball_query_brute(const WeightedNet& net, PointView x, double r) {
  return ball_scan(net, x, nullptr, r);
}

BallResult ball_query_brute(const WeightedNet& net, std::size_t center_index, double r) {
  if (!net.euclidean()) return ball_scan(net, {}, &center_index, r);
  return ball_scan(net, net.point(center_index), nullptr, r);
}

RegularityEstimate estimate_regularity(const WeightedNet& net, double s, double r_min, double r_max,
                                       const EstimateOptions& opts) {
  require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidParams, "exponent s must be positive");
  require(r_min > 0.0 && r_min < r_max, ErrorCode::InvalidParams, "need 0 < r_min < r_max");
  require(r_min >= net.resolution(), ErrorCode::ScaleBelowResolution,
          "scale range extends below the net resolution");

  std::vector<std::uint32_t> centers;
  for (std::uint32_t i : net.candidate_order()) {
    if (!opts.positive_weight_centers_only || net.weight(i) > 0.0) centers.push_back(i);
  }
  require(!centers.empty(), ErrorCode::InvalidParams, "no eligible centers");
  if (opts.centers_sample > 0 && centers.size() > opts.centers_sample) {
    std::vector<std::uint32_t> sampled;
    sampled.reserve(opts.centers_sample);
    const double stride = static_cast<double>(centers.size()) / static_cast<double>(opts.centers_sample);
    for (std::size_t k = 0; k < opts.centers_sample; ++k)
      sampled.push_back(centers[static_cast<std::size_t>(static_cast<double>(k) * stride)]);
    centers.swap(sampled);
  }

  std::vector<double> radii;
  const double factor = std::pow(10.0, 1.0 / std::max(1, opts.radii_per_decade));
  for (double r = r_min; r < r_max; r *= factor) radii.push_back(r);
  radii.push_back(r_max);

  RegularityEstimate est;
  est.c_lower = std::numeric_limits<double>::infinity();
  est.C_upper = 0.0;
  for (std::uint32_t c : centers) {
    for (double r : radii) {
      const double mass = ball_query(net, c, r).mass;
      const double ratio = mass / std::pow(r, s);
      if (ratio < est.c_lower) {
        est.c_lower = ratio;
        est.min_center = c;
        est.min_radius = r;
      }
      if (ratio > est.C_upper) {
        est.C_upper = ratio;
        est.max_center = c;
        est.max_radius = r;
      }
    }
  }
  return est;
}

WeightedNet rescale_to_unit(const WeightedNet& net, double s) {
  const double diam = diameter(net);
  require(diam > 0.0, ErrorCode::CannotRescale, "singleton or zero-diameter net cannot be rescaled");
  const double inv = 1.0 / diam;
  std::vector<double> weights(net.size());
  const double wscale = std::pow(diam, -s);
  for (std::size_t i = 0; i < net.size(); ++i) weights[i] = net.weight(i) * wscale;
  if (net.euclidean()) {
    std::vector<double> coords(net.coords().size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = net.coords()[i] * inv;
    return WeightedNet(net.dim(), std::move(coords), std::move(weights), net.resolution() * inv);
  }
  return WeightedNet(
      net.size(), [&](std::size_t i, std::size_t j) { return net.distance(i, j) * inv; },
      std::move(weights), net.resolution() * inv);
}

std::optional<ScaleGapWitness> scale_gap_witness(const WeightedNet& net, double s, double C,
                                                 double r_min, double r_max) {
  require(s > 0.0 && C >= 1.0, ErrorCode::InvalidParams, "need s > 0 and C >= 1");
  std::optional<ScaleGapWitness> best;
  std::vector<double> dists;
  for (std::uint32_t i = 0; i < net.size(); ++i) {
    if (net.weight(i) <= 0.0) continue;
    dists.clear();
    for (std::uint32_t j = 0; j < net.size(); ++j) {
      if (net.weight(j) <= 0.0) continue;
      const double d = net.distance(i, j);
      if (d > 0.0) dists.push_back(d);
    }
    dists.push_back(r_max);  // nothing beyond the window matters
    std::sort(dists.begin(), dists.end());
    double prev = r_min;
    for (double d : dists) {
      if (d <= prev) continue;
      if (prev >= r_min && d <= r_max && prev > 0.0) {
        const double ratio_power = std::pow(d / prev, s);
        if (ratio_power > C && (!best || ratio_power > best->ratio_power)) {
          best = ScaleGapWitness{i, prev, d, ratio_power};
        }
      }
      if (d >= r_max) break;
      prev = std::max(prev, d);
    }
  }
  return best;
}

WeightedNet subnet(const WeightedNet& net, const std::vector<std::uint32_t>& indices) {
  require(!indices.empty(), ErrorCode::EmptyNet, "empty subnet");
  std::vector<double> weights;
  weights.reserve(indices.size());
  for (auto i : indices) weights.push_back(net.weight(i));
  if (net.euclidean()) {
    std::vector<double> coords;
    coords.reserve(indices.size() * static_cast<std::size_t>(net.dim()));
    for (auto i : indices) {
      const auto p = net.point(i);
      coords.insert(coords.end(), p.begin(), p.end());
    }
    return WeightedNet(net.dim(), std::move(coords), std::move(weights), net.resolution());
  }
  return WeightedNet(
      indices.size(),
      [&](std::size_t a, std::size_t b) { return net.distance(indices[a], indices[b]); },
      std::move(weights), net.resolution());
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::EmptyNet: return "EmptyNet";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::ScaleBelowResolution: return "ScaleBelowResolution";
    case ErrorCode::CannotRescale: return "CannotRescale";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::GapNotFound: return "GapNotFound";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::TooDeep: return "TooDeep";
    case ErrorCode::BadAddress: return "BadAddress";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::InsufficientChildren: return "InsufficientChildren";
    case ErrorCode::InsufficientTargets: return "InsufficientTargets";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::OutsideCell: return "OutsideCell";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::DirectionNotFound: return "DirectionNotFound";
    case ErrorCode::SlabOverlap: return "SlabOverlap";
    case ErrorCode::PrecisionLoss: return "PrecisionLoss";
    case ErrorCode::NoVacantBall: return "NoVacantBall";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace regsets
