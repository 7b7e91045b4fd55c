#include "regsets/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace regsets {

namespace {

// Incremental hash grid over chosen centers so greedy separation checks stay
// near-linear on large nets. Order-independent membership queries only.
class CenterGrid {
 public:
  CenterGrid(const WeightedNet& net, double cell) : net_(net), cell_(cell) {}

  void insert(std::uint32_t idx) {
    if (!net_.euclidean()) {
      flat_.push_back(idx);
      return;
    }
    cells_[key(net_.point(idx))].push_back(idx);
  }

  bool any_within(std::uint32_t idx, double r) const {
    if (!net_.euclidean()) {
      for (auto c : flat_)
        if (net_.distance(idx, c) <= r) return true;
      return false;
    }
    const auto p = net_.point(idx);
    const double slack = r * (1.0 + 1e-12) + 1e-300;
    std::vector<std::int64_t> lo(p.size()), hi(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      lo[k] = cell_index(p[k] - slack);
      hi[k] = cell_index(p[k] + slack);
    }
    std::vector<std::int64_t> cur(lo);
    while (true) {
      auto it = cells_.find(pack(cur));
      if (it != cells_.end()) {
        for (auto c : it->second)
          if (net_.distance(idx, c) <= r) return true;
      }
      int axis = static_cast<int>(p.size()) - 1;
      while (axis >= 0) {
        if (++cur[static_cast<std::size_t>(axis)] <= hi[static_cast<std::size_t>(axis)]) break;
        cur[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)];
        --axis;
      }
      if (axis < 0) return false;
    }
  }

 private:
  std::int64_t cell_index(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  std::int64_t key(PointView p) const {
    std::vector<std::int64_t> cur(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) cur[k] = cell_index(p[k]);
    return pack(cur);
  }

  static std::int64_t pack(const std::vector<std::int64_t>& cur) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto c : cur) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::int64_t>(h);
  }

  const WeightedNet& net_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
  std::vector<std::uint32_t> flat_;
};

std::vector<std::uint32_t> region_candidates(const WeightedNet& net, PointView p,
                                             const std::size_t* p_index, double R,
                                             bool restrict_to_ball) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i : net.candidate_order()) {
    if (restrict_to_ball) {
      const double d = p_index ? net.distance(*p_index, i) : net.distance_to(p, i);
      if (d > R) continue;
    }
    out.push_back(i);
  }
  return out;
}

Packing greedy_packing_impl(const WeightedNet& net, PointView p, const std::size_t* p_index,
                            double r, double R, const PackOptions& opts) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "packing radius must be positive");
  if (opts.restrict_to_ball)
    require(r < R, ErrorCode::InvalidParams, "need r < R");

  const auto candidates = region_candidates(net, p, p_index, R, opts.restrict_to_ball);
  require(!candidates.empty(), ErrorCode::EmptyRegion, "no net point in the query region");

  Packing packing;
  packing.r = r;
  packing.cover_radius = 5.0 * r;
  CenterGrid grid(net, 2.0 * r);
  for (std::uint32_t i : candidates) {
    if (!packing.centers.empty() && grid.any_within(i, 2.0 * r)) continue;
    packing.centers.push_back(i);
    grid.insert(i);
    if (opts.max_centers > 0 && packing.centers.size() >= opts.max_centers) {
      packing.truncated = true;
      break;
    }
  }
  return packing;
}

}  // namespace

Packing greedy_packing(const WeightedNet& net, PointView p, double r, double R,
                       const PackOptions& opts) {
  return greedy_packing_impl(net, p, nullptr, r, R, opts);
}

Packing greedy_packing(const WeightedNet& net, std::size_t p_index, double r, double R,
                       const PackOptions& opts) {
  const std::size_t idx = p_index;
  return greedy_packing_impl(net, {}, &idx, r, R, opts);
}

Packing greedy_extend(const WeightedNet& net, const std::vector<std::uint32_t>& seeds,
                      const std::vector<char>& excluded, double r) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "packing radius must be positive");
  require(excluded.size() == net.size(), ErrorCode::InvalidParams, "exclusion mask size mismatch");
  Packing packing;
  packing.r = r;
  packing.cover_radius = 5.0 * r;
  CenterGrid grid(net, 2.0 * r);
  for (auto s : seeds) {
    packing.centers.push_back(s);
    grid.insert(s);
  }
  for (std::uint32_t i : net.candidate_order()) {
    if (excluded[i]) continue;
    if (!packing.centers.empty() && grid.any_within(i, 2.0 * r)) continue;
    packing.centers.push_back(i);
    grid.insert(i);
  }
  return packing;
}

bool packing_valid(const WeightedNet& net, PointView p, double R, bool restrict_to_ball,
                   const Packing& packing) {
  for (std::size_t a = 0; a < packing.centers.size(); ++a)
    for (std::size_t b = a + 1; b < packing.centers.size(); ++b)
      if (net.distance(packing.centers[a], packing.centers[b]) <= 2.0 * packing.r) return false;
  if (packing.truncated) return true;
  for (std::uint32_t i = 0; i < net.size(); ++i) {
    if (restrict_to_ball && net.distance_to(p, i) > R) continue;
    bool covered = false;
    for (auto c : packing.centers) {
      if (net.distance(c, i) <= packing.cover_radius) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

namespace {

double annulus_gap_impl(const WeightedNet& net, PointView x, const std::size_t* x_index, double r,
                        double D_cap) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidRadius, "annulus width must be positive");
  require(D_cap >= 1.0, ErrorCode::InvalidParams, "D_cap must be >= 1");
  // Annulus membership is checked with the same expressions the audits use
  // (d > rho, d <= rho + r), so search and verification can never disagree.
  std::vector<double> dists;
  dists.reserve(net.size());
  for (std::uint32_t i = 0; i < net.size(); ++i)
    dists.push_back(x_index ? net.distance(*x_index, i) : net.distance_to(x, i));
  std::sort(dists.begin(), dists.end());
  for (std::size_t l = 1;; ++l) {
    const double rho = static_cast<double>(l) * r;
    if (rho > D_cap * r * (1.0 + 1e-12)) break;
    auto it = std::upper_bound(dists.begin(), dists.end(), rho);
    if (it == dists.end() || *it > rho + r) return rho;
  }
  fail(ErrorCode::GapNotFound,
       "no empty annulus of width r found within D_cap*r; the net is denser than the assumed "
       "regularity allows at this scale");
}

}  // namespace

double annulus_gap(const WeightedNet& net, std::size_t x_index, double r, double D_cap) {
  const std::size_t idx = x_index;
  return annulus_gap_impl(net, {}, &idx, r, D_cap);
}

double annulus_gap(const WeightedNet& net, PointView x, double r, double D_cap) {
  return annulus_gap_impl(net, x, nullptr, r, D_cap);
}

double ring_cover_D(double C, double s) {
  require(s > 0.0 && s < 1.0, ErrorCode::InvalidParams, "need 0 < s < 1");
  require(C >= 1.0, ErrorCode::InvalidParams, "need C >= 1");
  return std::pow(3.0 * C * std::pow(2.0, s), 1.0 / (1.0 - s)) + 1.0;
}

GapCover ring_cover(const WeightedNet& net, double r, double s, double C, const RingOptions& opts) {
  const double D = opts.D_override > 0.0 ? opts.D_override : ring_cover_D(C, s);
  const double diam = diameter(net);
  require(r > 0.0, ErrorCode::InvalidRadius, "need r > 0");
  if (opts.mode == CoverMode::Strict)
    require(r < diam / (2.0 * D), ErrorCode::InvalidParams, "strict mode needs r < diam/(2D)");
  else if (net.size() > 1)
    require(r < diam, ErrorCode::InvalidParams, "need r < diameter");

  GapCover cover;
  cover.r = r;
  cover.D = D;
  cover.mode = GapMode::Linear;

  std::vector<char> covered(net.size(), 0);
  std::size_t remaining = net.size();
  while (remaining > 0) {
    std::uint32_t next = 0;
    bool found = false;
    for (std::uint32_t i : net.candidate_order()) {
      if (!covered[i]) {
        next = i;
        found = true;
        break;
      }
    }
    if (!found) break;
    double rho = 0.0;
    try {
      rho = annulus_gap(net, static_cast<std::size_t>(next), r, D);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::GapNotFound)
        fail(ErrorCode::GapNotFound, "ring_cover: no gap at center index " + std::to_string(next));
      throw;
    }
    cover.items.push_back({next, rho});
    for (std::uint32_t i = 0; i < net.size(); ++i) {
      if (!covered[i] && net.distance(next, i) <= rho) {
        covered[i] = 1;
        --remaining;
      }
    }
  }
  return cover;
}

double geometric_gap_expression(double C, double lambda, double s) {
  const double base = 1.0 - 3.0 * C * std::pow(lambda, 2.0 * s) * (std::pow(lambda, s) - 1.0);
  if (!(base > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return lambda * std::pow(base, -1.0 / s);
}

GapConstants geometric_gap_constants(double C, double lambda, double D_choice) {
  require(lambda >= 9.0, ErrorCode::InvalidLambda, "need lambda >= 9");
  require(C >= 1.0, ErrorCode::InvalidParams, "need C >= 1");

  // Positivity threshold of the base expression: base(s) is strictly
  // decreasing in s, find its root by bisection.
  double lo = 0.0, hi = 1.0;
  {
    auto base = [&](double s) {
      return 1.0 - 3.0 * C * std::pow(lambda, 2.0 * s) * (std::pow(lambda, s) - 1.0);
    };
    if (base(1.0) > 0.0) {
      lo = 1.0;
    } else {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (base(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
    }
  }
  const double s_pos = lo;
  require(s_pos > 0.0, ErrorCode::InvalidParams, "base expression nonpositive for all s");

  GapConstants out;
  if (D_choice <= 0.0) {
    // Auto: anchor D at twice the expression value midway into the positive
    // region, then recompute the supremum against that D.
    const double mid = s_pos / 2.0;
    const double v = geometric_gap_expression(C, lambda, mid);
    require(std::isfinite(v), ErrorCode::InvalidParams, "expression not finite at s_pos/2");
    out.D = 2.0 * v;
  } else {
    out.D = D_choice;
  }
  require(out.D > 1.0, ErrorCode::InvalidParams, "D must exceed 1");

  // s0: largest prefix of (0, s_pos) on which the expression stays <= D.
  // Monotonicity is not assumed; scan a grid and keep the prefix, then refine.
  const int grid_n = 4096;
  double s0 = 0.0;
  double prev = 0.0;
  for (int i = 1; i <= grid_n; ++i) {
    const double s = s_pos * static_cast<double>(i) / (grid_n + 1);
    const double v = geometric_gap_expression(C, lambda, s);
    if (!(v <= out.D)) {
      // Refine between prev (ok) and s (violating).
      double a = prev, b = s;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double vm = geometric_gap_expression(C, lambda, m);
        if (vm <= out.D)
          a = m;
        else
          b = m;
      }
      s0 = a;
      break;
    }
    prev = s;
    s0 = s;
  }
  require(s0 > 0.0, ErrorCode::InvalidParams, "no positive s satisfies the bound for this D");
  out.s0 = s0;
  out.c = std::log(out.D) / std::log(lambda);
  return out;
}

namespace {

// Geometric annulus gap: smallest i >= 1 with (lambda^{i-1} r, lambda^i r]
// empty, returning rho = lambda^{i-1} r, capped at D_cap * r.
double geometric_gap(const WeightedNet& net, std::uint32_t x, double r, double lambda, double D_cap) {
  double rho = r;
  while (rho <= D_cap * r * (1.0 + 1e-12)) {
    bool empty = true;
    const double outer = lambda * rho;
    for (std::uint32_t i = 0; i < net.size(); ++i) {
      const double d = net.distance(x, i);
      if (d > rho && d <= outer) {
        empty = false;
        break;
      }
    }
    if (empty) return rho;
    rho *= lambda;
  }
  fail(ErrorCode::GapNotFound, "no empty geometric annulus within the multiplier cap");
}

}  // namespace

GapCover lambda_gap_cover(const WeightedNet& net, double r, double s, double C, double lambda,
                          const LambdaGapOptions& opts) {
  require(lambda >= 9.0, ErrorCode::InvalidLambda, "need lambda >= 9");
  require(r > 0.0, ErrorCode::InvalidRadius, "need r > 0");

  double D_cap = opts.D_cap;
  if (opts.mode == CoverMode::Strict) {
    const GapConstants gc = geometric_gap_constants(C, lambda, opts.D_cap);
    require(s < gc.s0, ErrorCode::InvalidParams, "strict mode needs s < s0(C, lambda)");
    D_cap = gc.D;
  } else if (D_cap <= 0.0) {
    // Wide enough that an annulus past the diameter is always available.
    const double diam = net.size() > 1 ? diameter(net) : 0.0;
    D_cap = 1.0;
    while (D_cap * r <= diam) D_cap *= lambda;
  }

  GapCover cover;
  cover.r = r;
  cover.D = D_cap;
  cover.mode = GapMode::Geometric;
  cover.lambda = lambda;

  const std::size_t n = net.size();
  std::vector<double> gap_radius(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) gap_radius[i] = geometric_gap(net, i, r, lambda, D_cap);

  std::vector<char> covered(n, 0);
  std::size_t remaining = n;
  while (remaining > 0) {
    // Round threshold: half the largest remaining gap radius.
    double M = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (!covered[i]) M = std::max(M, gap_radius[i]);
    const double threshold = M / 2.0;
    bool progressed = false;
    while (true) {
      std::uint32_t pick = 0;
      bool found = false;
      for (std::uint32_t i : net.candidate_order()) {
        if (!covered[i] && gap_radius[i] > threshold) {
          pick = i;
          found = true;
          break;
        }
      }
      if (!found) break;
      const double rho = gap_radius[pick];
      cover.items.push_back({pick, rho});
      for (std::uint32_t i = 0; i < n; ++i) {
        if (!covered[i] && net.distance(pick, i) <= rho) {
          covered[i] = 1;
          --remaining;
        }
      }
      progressed = true;
    }
    require(progressed, ErrorCode::InvalidParams, "largest-first selection stalled");
  }
  return cover;
}

std::optional<std::string> gap_cover_audit(const WeightedNet& net, const GapCover& cover) {
  std::vector<char> covered(net.size(), 0);
  for (std::size_t k = 0; k < cover.items.size(); ++k) {
    const auto& item = cover.items[k];
    if (item.rho < cover.r * (1.0 - 1e-12) || item.rho > cover.D * cover.r * (1.0 + 1e-12))
      return "rho outside [r, D r] at item " + std::to_string(k);
    const double outer = cover.mode == GapMode::Linear ? item.rho + cover.r : cover.lambda * item.rho;
    for (std::uint32_t i = 0; i < net.size(); ++i) {
      const double d = net.distance(item.center, i);
      if (d > item.rho && d <= outer)
        return "annulus of item " + std::to_string(k) + " contains point " + std::to_string(i);
      if (d <= item.rho) covered[i] = 1;
    }
  }
  for (std::uint32_t i = 0; i < net.size(); ++i)
    if (!covered[i]) return "point " + std::to_string(i) + " left uncovered";
  if (cover.mode == GapMode::Geometric) {
    // B(x_i, lambda rho_i / 3) pairwise disjoint.
    for (std::size_t a = 0; a < cover.items.size(); ++a)
      for (std::size_t b = a + 1; b < cover.items.size(); ++b) {
        const double lim = cover.lambda * (cover.items[a].rho + cover.items[b].rho) / 3.0;
        if (net.distance(cover.items[a].center, cover.items[b].center) <= lim)
          return "lambda/3 balls of items " + std::to_string(a) + " and " + std::to_string(b) +
                 " intersect";
      }
  } else {
    // Disjoint closed r-balls and x_j outside B(x_i, rho_i) for i < j.
    for (std::size_t a = 0; a < cover.items.size(); ++a)
      for (std::size_t b = a + 1; b < cover.items.size(); ++b) {
        const double d = net.distance(cover.items[a].center, cover.items[b].center);
        if (d <= 2.0 * cover.r)
          return "r-balls of items " + std::to_string(a) + " and " + std::to_string(b) +
                 " intersect";
        if (d <= cover.items[a].rho)
          return "center of item " + std::to_string(b) + " inside ball of item " +
                 std::to_string(a);
      }
  }
  return std::nullopt;
}

bool gap_cover_valid(const WeightedNet& net, const GapCover& cover) {
  return !gap_cover_audit(net, cover).has_value();
}

}  // namespace regsets
