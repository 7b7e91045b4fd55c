#include "regsets/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regsets/rng.hpp"

namespace regsets {

void BallTranslationTask::validate() const {
  const int n = dim();
  require(n >= 1, ErrorCode::InvalidDimension, "need dimension >= 1");
  require(q.size() == p.size(), ErrorCode::InvalidParams, "p/q dimension mismatch");
  require(R > 0.0 && std::isfinite(R), ErrorCode::InvalidParams, "need R > 0");
  require(xs.size() == ys.size() && xs.size() == radii.size(), ErrorCode::InvalidParams,
          "xs/ys/radii size mismatch");
  require(delta > 0.0 && delta < 0.5, ErrorCode::InvalidParams, "need 0 < delta < 1/2");
  const double tol = 1e-12 * R;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(static_cast<int>(xs[i].size()) == n && static_cast<int>(ys[i].size()) == n,
            ErrorCode::InvalidDimension, "ball center dimension mismatch");
    require(radii[i] >= delta * R - tol && radii[i] <= R / 3.0 + tol, ErrorCode::InvalidParams,
            "ball radius outside [delta R, R/3]");
    require(dist(xs[i], p) <= R + tol, ErrorCode::InvalidParams, "x_i outside B(p, R)");
    require(dist(ys[i], q) <= R + tol, ErrorCode::InvalidParams, "y_i outside B(q, R)");
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      require(dist(xs[i], xs[j]) > 3.0 * (radii[i] + radii[j]), ErrorCode::InvalidParams,
              "B(x_i, 3 r_i) balls are not disjoint");
      require(dist(ys[i], ys[j]) > 3.0 * (radii[i] + radii[j]), ErrorCode::InvalidParams,
              "B(y_i, 3 r_i) balls are not disjoint");
    }
}

namespace {

Point copy(PointView x) { return Point(x.begin(), x.end()); }

}  // namespace

Point RadialGadget::forward(PointView x) const {
  // Prepend the implicit (0, 0) knot.
  std::vector<double> from(1, 0.0), to(1, 0.0);
  from.insert(from.end(), rho_knots.begin(), rho_knots.end());
  to.insert(to.end(), sigma_knots.begin(), sigma_knots.end());
  const double rho = dist(x, center);
  if (rho == 0.0 || rho >= from.back()) return copy(x);
  std::size_t seg = 0;
  while (rho > from[seg + 1]) ++seg;
  const double slope = (to[seg + 1] - to[seg]) / (from[seg + 1] - from[seg]);
  if (slope == 1.0 && to[seg] == from[seg]) return copy(x);
  const double sigma = to[seg] + (rho - from[seg]) * slope;
  const double factor = sigma / rho;
  Point out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = center[k] + factor * (x[k] - center[k]);
  return out;
}

Point RadialGadget::inverse(PointView y) const {
  std::vector<double> from(1, 0.0), to(1, 0.0);
  from.insert(from.end(), sigma_knots.begin(), sigma_knots.end());
  to.insert(to.end(), rho_knots.begin(), rho_knots.end());
  const double sigma = dist(y, center);
  if (sigma == 0.0 || sigma >= from.back()) return copy(y);
  std::size_t seg = 0;
  while (sigma > from[seg + 1]) ++seg;
  const double slope = (to[seg + 1] - to[seg]) / (from[seg + 1] - from[seg]);
  if (slope == 1.0 && to[seg] == from[seg]) return copy(y);
  const double rho = to[seg] + (sigma - from[seg]) * slope;
  const double factor = rho / sigma;
  Point out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = center[k] + factor * (y[k] - center[k]);
  return out;
}

Point choose_direction(const std::vector<Point>& xs, const std::vector<Point>& ys, double eps,
                       std::uint64_t seed, std::size_t draw_budget) {
  require(xs.size() == ys.size(), ErrorCode::InvalidParams, "xs/ys must pair up");
  require(eps > 0.0, ErrorCode::InvalidParams, "need eps > 0");
  const int n = xs.empty() ? 1 : static_cast<int>(xs[0].size());
  Rng rng(seed);
  for (std::size_t draw = 0; draw < draw_budget; ++draw) {
    Point theta = rng.unit_vector(n);
    bool ok = true;
    for (std::size_t i = 0; i < xs.size() && ok; ++i)
      for (std::size_t j = i + 1; j < xs.size() && ok; ++j) {
        if (std::fabs(dot(theta, sub(xs[i], xs[j]))) <= 5.0 * eps) ok = false;
        if (ok && std::fabs(dot(theta, sub(ys[i], ys[j]))) <= 5.0 * eps) ok = false;
      }
    if (ok) return theta;
  }
  fail(ErrorCode::DirectionNotFound, "rejection budget exhausted; eps too large for this configuration");
}

namespace {

// Internal sampler: separates the pairs of a single list, optionally
// constrained to the orthogonal complement of a previous direction.
Point find_direction(const std::vector<Point>& pts, double eps, int n, std::uint64_t seed,
                     const Point* orthogonal_to, std::size_t draw_budget) {
  Rng rng(seed);
  for (std::size_t draw = 0; draw < draw_budget; ++draw) {
    Point theta = rng.unit_vector(n);
    if (orthogonal_to) {
      const double proj = dot(theta, *orthogonal_to);
      for (int k = 0; k < n; ++k) theta[static_cast<std::size_t>(k)] -= proj * (*orthogonal_to)[static_cast<std::size_t>(k)];
      const double nn = norm(theta);
      if (nn < 1e-9) continue;
      for (auto& c : theta) c /= nn;
    }
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i)
      for (std::size_t j = i + 1; j < pts.size() && ok; ++j)
        if (std::fabs(dot(theta, sub(pts[i], pts[j]))) <= 5.0 * eps) ok = false;
    if (ok) return theta;
  }
  fail(ErrorCode::DirectionNotFound, "rejection budget exhausted for a single-list direction");
}

}  // namespace

Point eval_radial(PointView a, PointView b, double eps, PointView x) {
  require(a.size() == b.size() && a.size() == x.size(), ErrorCode::InvalidDimension,
          "gadget dimension mismatch");
  require(norm(a) < 1.0 && norm(b) < 1.0, ErrorCode::InvalidParams,
          "gadget parameters must lie in the open unit ball");
  require(eps > 0.0 && eps < 0.5, ErrorCode::InvalidParams, "need 0 < eps < 1/2");
  require(norm_inf(x) <= 2.0 + 1e-12, ErrorCode::OutsideCell, "x outside Q = [-2, 2]^{n-1}");

  const double d = dist(x, a);
  if (d <= eps) return translate(x, a, b);

  // Ray from a through x; v on the eps-sphere, v' on the box boundary.
  Point omega = sub(x, a);
  for (auto& c : omega) c /= d;
  double ray_box = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (omega[k] > 0.0) ray_box = std::min(ray_box, (2.0 - a[k]) / omega[k]);
    else if (omega[k] < 0.0) ray_box = std::min(ray_box, (-2.0 - a[k]) / omega[k]);
  }
  // x = a + d * omega sits between v (param eps) and v' (param ray_box).
  const double frac = (d - eps) / (ray_box - eps);
  Point out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v_img = b[k] + eps * omega[k];           // v - a + b
    const double v_box = a[k] + ray_box * omega[k];       // v'
    out[k] = v_img + frac * (v_box - v_img);
  }
  return out;
}

Point SlabPass::rotate(PointView x) const {
  // Householder reflection swapping theta and e_n (identity when aligned).
  const std::size_t nn = x.size();
  Point v = copy(theta);
  v[nn - 1] -= 1.0;
  const double vv = dot(v, v);
  if (vv < 1e-30) return copy(x);
  const double f = 2.0 * dot(v, x) / vv;
  Point out = copy(x);
  for (std::size_t k = 0; k < nn; ++k) out[k] -= f * v[k];
  return out;
}

Point SlabPass::unrotate(PointView w) const { return rotate(w); }  // involution

double SlabPass::profile(double wn) const {
  const std::size_t m = t.size();
  if (std::fabs(wn) >= 2.0) return wn;
  if (wn <= -2.0 + 2.0 * eps || wn >= 2.0 - 2.0 * eps) return wn;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::fabs(wn - t[i]) <= 2.0 * eps) return wn - t[i] + u[i];
  }
  // Between slabs: stabilized affine through the collar edges.
  double t_lo = -2.0, u_lo = -2.0, t_hi = 2.0, u_hi = 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t[i] < wn) {
      t_lo = t[i];
      u_lo = u[i];
    } else {
      t_hi = t[i];
      u_hi = u[i];
      break;
    }
  }
  const double slope = (u_hi - u_lo - 4.0 * eps) / (t_hi - t_lo - 4.0 * eps);
  return (u_lo + 2.0 * eps) + (wn - t_lo - 2.0 * eps) * slope;
}

SlabPass::Region SlabPass::classify(PointView w) const {
  const std::size_t nn = w.size();
  const double wn = w[nn - 1];
  PointView w_tilde(w.data(), nn - 1);
  const double sup = norm_inf(w_tilde);
  if (sup > 3.0 || std::fabs(wn) > 2.0) return Region::Outside;
  if (sup >= 2.0) return Region::SideCollar;
  if (wn <= -2.0 + 2.0 * eps || wn >= 2.0 - 2.0 * eps) return Region::Band;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double off = std::fabs(wn - t[i]);
    if (off <= eps) return Region::Slab;
    if (off <= 2.0 * eps) return Region::Collar;
  }
  return Region::Between;
}

Point SlabPass::apply_region(PointView w, Region region) const {
  const std::size_t nn = w.size();
  const double wn = w[nn - 1];
  PointView w_tilde(w.data(), nn - 1);
  switch (region) {
    case Region::Outside:
    case Region::Band:
      return copy(w);
    case Region::SideCollar: {
      const double sup = norm_inf(w_tilde);
      Point out = copy(w);
      out[nn - 1] = (3.0 - sup) * profile(wn) + (sup - 2.0) * wn;
      return out;
    }
    case Region::Slab:
    case Region::Collar: {
      // Locate the governing slab.
      std::size_t i = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double off = std::fabs(wn - t[k]);
        if (off < best) {
          best = off;
          i = k;
        }
      }
      Point a = a_tilde[i];
      Point b = b_tilde[i];
      if (region == Region::Collar) {
        // Interpolation parameter is exact: wn - t_i is a subtraction of
        // nearby doubles, 2 eps - off likewise.
        const double off = std::fabs(wn - t[i]);
        const double sfrac = (2.0 * eps - off) / eps;
        for (auto& c : a) c *= sfrac;
        for (auto& c : b) c *= sfrac;
      }
      Point tilde_image = eval_radial(a, b, eps, w_tilde);
      Point out(nn);
      for (std::size_t k = 0; k + 1 < nn; ++k) out[k] = tilde_image[k];
      out[nn - 1] = wn - t[i] + u[i];
      return out;
    }
    case Region::Between: {
      Point out = copy(w);
      out[nn - 1] = profile(wn);
      return out;
    }
  }
  fail(ErrorCode::InvalidParams, "unreachable region");
}

Point SlabPass::apply_rotated(PointView w) const { return apply_region(w, classify(w)); }

Point SlabPass::apply(PointView x) const {
  Point w = rotate(x);
  const Region region = classify(w);
  if (region == Region::Outside || region == Region::Band) return copy(x);  // exact identity
  return unrotate(apply_region(w, region));
}

namespace {

struct NormalizedBalls {
  std::vector<Point> xh, yh;
  std::vector<double> rh;
};

NormalizedBalls normalize(const BallTranslationTask& task) {
  NormalizedBalls nb;
  for (std::size_t i = 0; i < task.xs.size(); ++i) {
    Point xh = sub(task.xs[i], task.p);
    Point yh = sub(task.ys[i], task.q);
    for (auto& c : xh) c /= task.R;
    for (auto& c : yh) c /= task.R;
    nb.xh.push_back(std::move(xh));
    nb.yh.push_back(std::move(yh));
    nb.rh.push_back(task.radii[i] / task.R);
  }
  return nb;
}

SlabPass make_pass(int n, double eps, Point theta, const std::vector<Point>& src,
                   const std::vector<Point>& dst) {
  SlabPass pass;
  pass.n = n;
  pass.eps = eps;
  pass.theta = std::move(theta);

  const std::size_t m = src.size();
  std::vector<Point> rs(m), rd(m);
  for (std::size_t i = 0; i < m; ++i) {
    rs[i] = pass.rotate(src[i]);
    rd[i] = pass.rotate(dst[i]);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rs[a].back() < rs[b].back(); });

  for (std::size_t k = 0; k < m; ++k) {
    const auto& s = rs[order[k]];
    const auto& d = rd[order[k]];
    pass.t.push_back(s.back());
    pass.u.push_back(d.back());
    pass.a_tilde.emplace_back(s.begin(), s.end() - 1);
    pass.b_tilde.emplace_back(d.begin(), d.end() - 1);
  }
  // Both breakpoint lists must be strictly increasing with > 5 eps gaps,
  // including against the +-2 sentinels.
  auto check = [&](const std::vector<double>& v) {
    double prev = -2.0;
    for (double c : v) {
      require(c - prev > 5.0 * eps, ErrorCode::SlabOverlap, "breakpoint separation below 5 eps");
      prev = c;
    }
    require(2.0 - prev > 5.0 * eps, ErrorCode::SlabOverlap, "breakpoint separation below 5 eps");
  };
  check(pass.t);
  check(pass.u);
  return pass;
}

bool orders_match(const Point& theta, const std::vector<Point>& xs, const std::vector<Point>& ys) {
  const std::size_t m = xs.size();
  std::vector<std::size_t> ox(m), oy(m);
  std::iota(ox.begin(), ox.end(), 0);
  oy = ox;
  std::sort(ox.begin(), ox.end(),
            [&](std::size_t a, std::size_t b) { return dot(theta, xs[a]) < dot(theta, xs[b]); });
  std::sort(oy.begin(), oy.end(),
            [&](std::size_t a, std::size_t b) { return dot(theta, ys[a]) < dot(theta, ys[b]); });
  return ox == oy;
}

}  // namespace

PiecewiseAmbientMap build_slab_map(const BallTranslationTask& task, std::uint64_t seed,
                                   std::size_t draw_budget) {
  task.validate();
  PiecewiseAmbientMap map;
  map.task = task;
  const int n = task.dim();
  const std::size_t m = task.xs.size();

  if (n == 1) {
    map.one_dimensional = true;
    // Monotone piecewise-linear rearrangement; requires compatible ordering.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return task.xs[a][0] < task.xs[b][0]; });
    map.knots_x.push_back(task.p[0] - 2.0 * task.R);
    map.knots_y.push_back(task.q[0] - 2.0 * task.R);
    for (auto i : order) {
      map.knots_x.push_back(task.xs[i][0] - task.radii[i]);
      map.knots_x.push_back(task.xs[i][0] + task.radii[i]);
      map.knots_y.push_back(task.ys[i][0] - task.radii[i]);
      map.knots_y.push_back(task.ys[i][0] + task.radii[i]);
    }
    map.knots_x.push_back(task.p[0] + 2.0 * task.R);
    map.knots_y.push_back(task.q[0] + 2.0 * task.R);
    for (std::size_t k = 0; k + 1 < map.knots_y.size(); ++k)
      require(map.knots_y[k] < map.knots_y[k + 1], ErrorCode::InvalidParams,
              "no monotone line map sends the x-balls to the y-balls in this order");
    return map;
  }

  // Largest legal delta keeps eps as large as possible.
  double delta_eff = task.delta;
  for (double r : task.radii) delta_eff = std::min(delta_eff, r / task.R);
  if (m == 0) delta_eff = task.delta;
  map.eps = std::pow(delta_eff, 2 * n + 3);
  require(map.eps >= 1e-12, ErrorCode::PrecisionLoss,
          "eps = delta^{2n+3} below the supported floating-point window");

  const auto nb = normalize(task);
  for (std::size_t i = 0; i < m; ++i) {
    RadialGadget g;
    g.center = nb.xh[i];
    g.rho_knots = {nb.rh[i], 2.0 * nb.rh[i]};
    g.sigma_knots = {map.eps, 2.0 * nb.rh[i]};
    map.gx.push_back(std::move(g));
    RadialGadget h;
    h.center = nb.yh[i];
    h.rho_knots = {nb.rh[i], 2.0 * nb.rh[i]};
    h.sigma_knots = {map.eps, 2.0 * nb.rh[i]};
    map.gy.push_back(std::move(h));
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  RadialGadget stretch;
  stretch.center.assign(static_cast<std::size_t>(n), 0.0);
  stretch.rho_knots = {1.5, 2.0, 6.0 * root_n};
  stretch.sigma_knots = {1.5, 3.0 * root_n, 6.0 * root_n};
  map.stretch = std::move(stretch);

  if (m == 0) return map;

  // Single pass when some direction orders sources and targets alike;
  // otherwise route through rank-aligned staging positions with two
  // orthogonal passes.
  Point theta;
  bool single = false;
  try {
    theta = choose_direction(nb.xh, nb.yh, map.eps, seed, draw_budget);
    single = orders_match(theta, nb.xh, nb.yh);
    for (std::uint64_t retry = 1; !single && retry <= 32; ++retry) {
      theta = choose_direction(nb.xh, nb.yh, map.eps, seed + retry * 7919, draw_budget);
      single = orders_match(theta, nb.xh, nb.yh);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DirectionNotFound) throw;
    single = false;
  }

  if (single) {
    map.passes.push_back(make_pass(n, map.eps, theta, nb.xh, nb.yh));
    return map;
  }

  const Point alpha = find_direction(nb.xh, map.eps, n, seed + 101, nullptr, draw_budget);
  const Point beta = find_direction(nb.yh, map.eps, n, seed + 211, &alpha, draw_budget);
  std::vector<std::size_t> rank_x(m), rank_y(m), ox(m), oy(m);
  std::iota(ox.begin(), ox.end(), 0);
  oy = ox;
  std::sort(ox.begin(), ox.end(),
            [&](std::size_t a, std::size_t b) { return dot(alpha, nb.xh[a]) < dot(alpha, nb.xh[b]); });
  std::sort(oy.begin(), oy.end(),
            [&](std::size_t a, std::size_t b) { return dot(beta, nb.yh[a]) < dot(beta, nb.yh[b]); });
  for (std::size_t k = 0; k < m; ++k) {
    rank_x[ox[k]] = k;
    rank_y[oy[k]] = k;
  }
  const double span = m > 1 ? 1.2 / static_cast<double>(m - 1) : 0.0;
  require(m == 1 || span > 5.0 * map.eps, ErrorCode::PrecisionLoss,
          "staging separation collapses below 5 eps for this many balls");
  map.staging.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Point w(static_cast<std::size_t>(n), 0.0);
    const double ac = m > 1 ? -0.6 + span * static_cast<double>(rank_x[i]) : 0.0;
    const double bc = m > 1 ? -0.6 + span * static_cast<double>(rank_y[i]) : 0.0;
    for (int k = 0; k < n; ++k)
      w[static_cast<std::size_t>(k)] = ac * alpha[static_cast<std::size_t>(k)] + bc * beta[static_cast<std::size_t>(k)];
    map.staging[i] = std::move(w);
  }
  map.passes.push_back(make_pass(n, map.eps, alpha, nb.xh, map.staging));
  map.passes.push_back(make_pass(n, map.eps, beta, map.staging, nb.yh));
  return map;
}

namespace {

Point eval_one_dimensional(const PiecewiseAmbientMap& map, PointView x) {
  const double v = x[0];
  const auto& task = map.task;
  // Exact translation regions first.
  if (std::fabs(v - task.p[0]) > 2.0 * task.R) return {v - task.p[0] + task.q[0]};
  for (std::size_t i = 0; i < task.xs.size(); ++i)
    if (std::fabs(v - task.xs[i][0]) <= task.radii[i]) return {v - task.xs[i][0] + task.ys[i][0]};
  const auto& kx = map.knots_x;
  const auto& ky = map.knots_y;
  if (v <= kx.front()) return {v - task.p[0] + task.q[0]};
  if (v >= kx.back()) return {v - task.p[0] + task.q[0]};
  std::size_t seg = 0;
  while (seg + 2 < kx.size() && v > kx[seg + 1]) ++seg;
  const double slope = (ky[seg + 1] - ky[seg]) / (kx[seg + 1] - kx[seg]);
  return {ky[seg] + (v - kx[seg]) * slope};
}

}  // namespace

Point PiecewiseAmbientMap::eval(PointView x) const {
  const auto& t = task;
  if (one_dimensional) return eval_one_dimensional(*this, x);

  // Exact contracts: pure translation outside B(p, 2R) and on the inner balls.
  if (dist(x, t.p) > 2.0 * t.R) return translate(x, t.p, t.q);
  Point xh = sub(x, t.p);
  for (auto& c : xh) c /= t.R;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    if (dist(xh, gx[i].center) <= t.radii[i] / t.R) {
      Point zh = translate(xh, gx[i].center, gy[i].center);
      Point out(zh.size());
      for (std::size_t k = 0; k < zh.size(); ++k) out[k] = t.q[k] + t.R * zh[k];
      return out;
    }
  }
  return eval_no_shortcut(x);
}

Point PiecewiseAmbientMap::eval_no_shortcut(PointView x) const {
  const auto& t = task;
  if (one_dimensional) return eval_one_dimensional(*this, x);
  Point z = sub(x, t.p);
  for (auto& c : z) c /= t.R;
  for (const auto& g : gx) {
    if (dist(z, g.center) < g.rho_knots.back()) {
      z = g.forward(z);
      break;
    }
  }
  z = stretch.forward(z);
  for (const auto& pass : passes) z = pass.apply(z);
  z = stretch.inverse(z);
  for (const auto& h : gy) {
    if (dist(z, h.center) < h.rho_knots.back()) {
      z = h.inverse(z);
      break;
    }
  }
  Point out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = t.q[k] + t.R * z[k];
  return out;
}

WeightedNet normalize_to_half_ball(const WeightedNet& net, double s_mass) {
  require(net.euclidean(), ErrorCode::InvalidParams, "normalization needs coordinates");
  const double diam = diameter(net);
  require(diam > 0.0, ErrorCode::CannotRescale, "zero-diameter net");
  const int n = net.dim();
  std::vector<double> lo(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net.point(i);
    for (int k = 0; k < n; ++k) {
      lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)]);
      hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)]);
    }
  }
  const double scale = 0.5 / diam;
  std::vector<double> coords(net.coords().size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net.point(i);
    for (int k = 0; k < n; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      coords[i * static_cast<std::size_t>(n) + kk] = (p[kk] - 0.5 * (lo[kk] + hi[kk])) * scale;
    }
  }
  std::vector<double> weights(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) weights[i] = net.weight(i) * std::pow(scale, s_mass);
  return WeightedNet(n, std::move(coords), std::move(weights), net.resolution() * scale);
}

Point AmbientEmbedding::eval(PointView x, std::size_t upto) const {
  require(upto <= stages.size(), ErrorCode::InvalidParams, "stage index out of range");
  Point z = copy(x);
  for (std::size_t k = upto; k >= 1; --k) {
    for (const auto& map : stages[k - 1]) {
      if (dist(z, map.task.p) <= 2.0 * map.task.R) {
        z = map.eval(z);
        break;  // stage supports are pairwise disjoint
      }
    }
  }
  return z;
}

AmbientEmbedding build_ambient_embedding(const WeightedNet& E, const WeightedNet& F, double s,
                                         double t, double C, int depth, const AmbientOptions& opts) {
  require(E.euclidean() && F.euclidean() && E.dim() == F.dim(), ErrorCode::InvalidDimension,
          "E and F must be Euclidean nets of equal dimension");
  const int n = E.dim();
  require(n >= 1, ErrorCode::InvalidDimension, "need dimension >= 1");
  require(s > 0.0 && s < t, ErrorCode::InvalidParams, "need 0 < s < t");
  require(depth >= 1, ErrorCode::InvalidParams, "need depth >= 1");
  require(E.size() == 1 || std::fabs(diameter(E) - 0.5) <= 1e-9, ErrorCode::InvalidParams,
          "E must be normalized to diameter 1/2");
  require(F.size() == 1 || std::fabs(diameter(F) - 0.5) <= 1e-9, ErrorCode::InvalidParams,
          "F must be normalized to diameter 1/2");
  for (std::size_t i = 0; i < E.size(); ++i)
    require(norm(E.point(i)) <= 1.0 + 1e-9, ErrorCode::InvalidParams, "E must sit inside B(0, 1)");
  for (std::size_t i = 0; i < F.size(); ++i)
    require(norm(F.point(i)) <= 1.0 + 1e-9, ErrorCode::InvalidParams, "F must sit inside B(0, 1)");

  const double lambda = opts.lambda;

  struct Failure {
    std::string message;
  };

  auto attempt = [&](double d, double D_cap) -> AmbientEmbedding {
    AmbientEmbedding emb;
    emb.d = d;
    emb.D = D_cap;
    emb.e_hierarchy.d = d;
    emb.e_hierarchy.scale = 1.0;
    emb.e_hierarchy.multiplier_cap = D_cap;
    emb.f_hierarchy.d = d;
    emb.f_hierarchy.scale = 1.0;
    emb.f_hierarchy.multiplier_cap = 6.0 * D_cap;

    // Roots cover everything; the real structure starts at level 1.
    BallNode e_root;
    e_root.point = E.candidate_order()[0];
    e_root.rho = 1.0;
    BallNode f_root;
    f_root.point = F.candidate_order()[0];
    f_root.rho = 1.0;
    emb.e_hierarchy.levels.push_back({e_root});
    emb.f_hierarchy.levels.push_back({f_root});

    // Per-level cells as index lists into E; level 0 = everything.
    std::vector<std::vector<std::uint32_t>> cells(1);
    cells[0].resize(E.size());
    for (std::uint32_t i = 0; i < E.size(); ++i) cells[0][i] = i;
    std::vector<std::vector<std::vector<std::uint32_t>>> cells_by_level{cells};

    double level_r = 1.0;
    for (int k = 0; k < depth; ++k) {
      const double child_r = level_r * d;
      auto& e_parents = emb.e_hierarchy.levels.back();
      auto& f_parents = emb.f_hierarchy.levels.back();
      const auto parent_cells = cells_by_level.back();
      std::vector<BallNode> e_next, f_next;
      std::vector<std::vector<std::uint32_t>> next_cells;
      std::vector<PiecewiseAmbientMap> stage;

      for (std::uint32_t slot = 0; slot < e_parents.size(); ++slot) {
        const auto& cell = parent_cells[slot];
        if (cell.empty()) throw Failure{"empty cell"};
        WeightedNet cell_net = subnet(E, cell);
        GapCover cover;
        try {
          LambdaGapOptions gopts;
          gopts.mode = CoverMode::Adaptive;
          gopts.D_cap = D_cap;
          cover = lambda_gap_cover(cell_net, child_r, s, C, lambda, gopts);
        } catch (const Error& e) {
          throw Failure{std::string("gap cover failed at level ") + std::to_string(k + 1) + ": " +
                        e.what()};
        }
        const std::size_t m = cover.items.size();

        Packing packing;
        try {
          PackOptions popts;
          popts.restrict_to_ball = true;
          popts.max_centers = m;
          packing = greedy_packing(F, static_cast<std::size_t>(f_parents[slot].point),
                                   6.0 * D_cap * child_r, k == 0 ? 0.5 : level_r, popts);
        } catch (const Error& e) {
          throw Failure{std::string("target packing failed at level ") + std::to_string(k + 1) +
                        ": " + e.what()};
        }
        if (packing.centers.size() < m)
          throw Failure{"level " + std::to_string(k + 1) + ": F-side packing yields " +
                        std::to_string(packing.centers.size()) + " of " + std::to_string(m)};

        // Assign cell points to items in selection order.
        std::vector<char> taken(cell.size(), 0);
        e_parents[slot].first_child = static_cast<std::uint32_t>(e_next.size());
        e_parents[slot].child_count = static_cast<std::uint32_t>(m);
        f_parents[slot].first_child = static_cast<std::uint32_t>(f_next.size());
        f_parents[slot].child_count = static_cast<std::uint32_t>(m);

        BallTranslationTask stage_task;
        const Point parent_x = E.point_copy(e_parents[slot].point);
        const Point parent_y = F.point_copy(f_parents[slot].point);
        stage_task.p = k == 0 ? Point(static_cast<std::size_t>(n), 0.0) : parent_x;
        stage_task.q = stage_task.p;
        stage_task.R = k == 0 ? 1.0 : e_parents[slot].rho;

        double min_r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
          const auto& item = cover.items[i];
          std::vector<std::uint32_t> child_cell;
          for (std::size_t j = 0; j < cell.size(); ++j) {
            if (taken[j]) continue;
            if (cell_net.distance(item.center, j) <= item.rho) {
              taken[j] = 1;
              child_cell.push_back(cell[j]);
            }
          }
          BallNode e_child;
          e_child.point = cell[item.center];
          e_child.rho = item.rho;
          e_child.parent = slot;
          e_next.push_back(e_child);
          BallNode f_child;
          f_child.point = packing.centers[i];
          f_child.rho = 6.0 * D_cap * child_r;
          f_child.parent = slot;
          f_next.push_back(f_child);
          next_cells.push_back(std::move(child_cell));

          const Point x_child = E.point_copy(e_child.point);
          const Point y_child = F.point_copy(f_child.point);
          Point y_staged(static_cast<std::size_t>(n));
          if (k == 0) {
            y_staged = y_child;
          } else {
            // Pull the target back through the parent translation.
            y_staged = translate(y_child, parent_y, parent_x);
          }
          stage_task.xs.push_back(x_child);
          stage_task.ys.push_back(y_staged);
          stage_task.radii.push_back(2.0 * item.rho);
          min_r = std::min(min_r, 2.0 * item.rho);
        }
        for (char tk : taken)
          if (!tk) throw Failure{"gap cover left a cell point unassigned"};

        stage_task.delta = std::min(0.4999, min_r / stage_task.R);
        try {
          stage.push_back(
              build_slab_map(stage_task, opts.seed + 1000 * (k + 1) + slot, opts.draw_budget));
        } catch (const Error& e) {
          throw Failure{std::string("slab map failed at level ") + std::to_string(k + 1) + ": " +
                        e.what()};
        }
      }
      emb.e_hierarchy.levels.push_back(std::move(e_next));
      emb.f_hierarchy.levels.push_back(std::move(f_next));
      cells_by_level.push_back(std::move(next_cells));
      emb.stages.push_back(std::move(stage));
      level_r = child_r;
    }
    return emb;
  };

  if (opts.mode == BuildMode::Strict) {
    const GapConstants gc = geometric_gap_constants(C, lambda, 0.0);
    require(s < gc.s0, ErrorCode::InvalidParams,
            "strict mode needs s < s0(C, lambda); measured s0 = " + std::to_string(gc.s0));
    const double bound = std::pow(
        std::pow(2.0, s) * std::pow(60.0, t) * C * C * std::pow(gc.D, t), -1.0 / (t - s));
    double d = 0.5;
    while (d >= bound || 12.0 * gc.D * d >= 1.0) d /= 2.0;
    try {
      return attempt(d, gc.D);
    } catch (const Failure& f) {
      fail(ErrorCode::InsufficientTargets, f.message);
    }
  }

  std::string last = "no attempt";
  double d = opts.d_initial;
  for (int tries = 0; tries < opts.d_tries; ++tries, d /= 2.0) {
    // Multiplier cap: largest power of lambda keeping 12 D d < 1.
    double D_cap = 1.0;
    while (12.0 * D_cap * lambda * d < 1.0) D_cap *= lambda;
    if (12.0 * D_cap * d >= 1.0) {
      last = "12 D d < 1 cannot hold at d = " + std::to_string(d);
      continue;
    }
    if (std::pow(d, depth) < std::max(E.resolution(), F.resolution())) {
      last = "leaf scale below net resolution at d = " + std::to_string(d);
      break;
    }
    try {
      return attempt(d, D_cap);
    } catch (const Failure& f) {
      last = f.message;
      continue;
    }
  }
  fail(ErrorCode::InsufficientTargets, "no grid ratio d produced a full embedding: " + last);
}

}  // namespace regsets
