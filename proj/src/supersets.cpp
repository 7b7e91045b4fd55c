#include "regsets/supersets.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace regsets {

namespace {

// Map E's points onto X indices (exact coordinate match).
std::vector<std::uint32_t> embed_indices(const WeightedNet& E, const WeightedNet& X) {
  std::vector<std::uint32_t> out(E.size());
  for (std::uint32_t i = 0; i < E.size(); ++i) {
    bool found = false;
    for (std::uint32_t j = 0; j < X.size(); ++j) {
      if (dist(E.point(i), X.point(j)) == 0.0) {
        out[i] = j;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::InvalidParams, "E point missing from X (E must be a subset)");
  }
  return out;
}

struct Failure {
  std::string message;
};

}  // namespace

SupersetBuild build_superset(const WeightedNet& E, const WeightedNet& X, double s, double t,
                             double u, double C_E, double C_X, int depth,
                             const SupersetOptions& opts) {
  require(0.0 < s && s < t && t < u, ErrorCode::InvalidParams, "need 0 < s < t < u");
  require(E.euclidean() && X.euclidean() && E.dim() == X.dim(), ErrorCode::InvalidDimension,
          "E and X must be Euclidean nets of equal dimension");
  require(std::fabs(diameter(E) - 1.0) <= 1e-9, ErrorCode::InvalidParams,
          "E must be normalized to diameter 1");
  require(depth >= 0, ErrorCode::InvalidParams, "depth must be >= 0");
  const auto e_in_x = embed_indices(E, X);

  auto attempt = [&](double d) -> SupersetBuild {
    SupersetBuild build;
    build.d = d;
    build.depth = depth;

    // Per level k = 1..depth+1: E-part packing, then the X extension.
    std::vector<std::vector<std::uint32_t>> e_packs(static_cast<std::size_t>(depth) + 2);
    std::vector<std::vector<std::uint32_t>> x_packs(static_cast<std::size_t>(depth) + 2);
    for (int k = 1; k <= depth + 1; ++k) {
      const double r = 6.0 * std::pow(d, k);
      // Greedy over E candidates, recorded as X indices.
      std::vector<std::uint32_t> centers;
      {
        Packing pe = greedy_packing(E, E.candidate_order()[0], r, 2.0, {false, 0});
        for (auto c : pe.centers) centers.push_back(e_in_x[c]);
      }
      e_packs[static_cast<std::size_t>(k)] = centers;
      // Extend over X \ union B(center, 30 d^k).
      const double guard = 30.0 * std::pow(d, k);
      std::vector<char> excluded(X.size(), 0);
      for (auto c : centers) {
        auto ball = ball_query(X, static_cast<std::size_t>(c), guard);
        for (auto i : ball.indices) excluded[i] = 1;
      }
      x_packs[static_cast<std::size_t>(k)] = greedy_extend(X, centers, excluded, r).centers;
    }
    build.e_packings = e_packs;
    build.x_packings = x_packs;

    // Vacant-ball selection per (k, i <= m_k).
    for (int k = 1; k <= depth; ++k) {
      const double dk = std::pow(d, k);
      const double dk1 = std::pow(d, k + 1);
      const auto& next_centers = x_packs[static_cast<std::size_t>(k + 1)];
      for (std::uint32_t i = 0; i < e_packs[static_cast<std::size_t>(k)].size(); ++i) {
        const std::uint32_t xki = e_packs[static_cast<std::size_t>(k)][i];
        PlantSite site;
        site.level = k;
        site.e_center = xki;
        site.ball_radius = dk1;

        std::vector<std::uint32_t> J, Jp, I;
        for (auto cand : next_centers) {
          const double dd = X.distance(xki, cand);
          if (dd <= 3.0 * dk - dk1) J.push_back(cand);
          if (dd <= dk + 30.0 * dk1) Jp.push_back(cand);
        }
        site.Jp_subset_J = std::includes(J.begin(), J.end(), Jp.begin(), Jp.end());
        for (auto j : J) {
          // Touches E within 6 d^{k+1}?
          bool touches = false;
          for (std::uint32_t e = 0; e < E.size(); ++e) {
            if (X.distance(j, e_in_x[e]) <= 6.0 * dk1) {
              touches = true;
              break;
            }
          }
          if (touches) I.push_back(j);
        }
        site.J = J.size();
        site.Jp = Jp.size();
        site.I = I.size();

        std::uint32_t chosen = 0;
        bool found = false;
        for (auto j : J) {
          if (std::find(I.begin(), I.end(), j) == I.end()) {
            chosen = j;
            found = true;
            break;
          }
        }
        if (!found)
          throw Failure{"no vacant ball at level " + std::to_string(k) + ", node " +
                        std::to_string(i)};
        site.y_center = chosen;

        // Plant a t-regular set inside B(y, d^{k+1}).
        int plant_depth = opts.plant_depth;
        bool planted = false;
        while (plant_depth >= 1 && !planted) {
          try {
            SubsetOptions sopts;
            sopts.node_budget = opts.node_budget;
            // Smallest legal target dimension keeps the branching minimal.
            const int n_target = static_cast<int>(std::floor(t)) + 1;
            auto sub = subset_in_ball(X, chosen, dk1, t, n_target, plant_depth, sopts);
            const auto& leaves = sub.build.hierarchy.levels.back();
            for (const auto& leaf : leaves) {
              site.plant_points.push_back(sub.indices[leaf.point]);
              site.plant_weights.push_back(sub.build.leaf_net->weight(0));
            }
            site.plant_diameter = diameter(*sub.build.leaf_net);
            planted = true;
          } catch (const Error&) {
            --plant_depth;
          }
        }
        if (!planted) {
          // Degenerate site: the vacant center alone carries the local mass.
          site.plant_points.push_back(chosen);
          site.plant_weights.push_back(std::pow(dk1, t));
          site.plant_diameter = 0.0;
        }
        build.sites.push_back(std::move(site));
      }
    }

    // Combined net: E (zero nu-mass) plus the plants. With no sites (depth 0)
    // the artifact keeps E's own weights so it stays a valid net.
    std::vector<double> coords, weights;
    std::vector<char> marks;
    const int n = X.dim();
    for (std::uint32_t e = 0; e < E.size(); ++e) {
      const auto p = E.point(e);
      coords.insert(coords.end(), p.begin(), p.end());
      weights.push_back(build.sites.empty() ? E.weight(e) : 0.0);
      marks.push_back(1);
    }
    double min_scale = 1.0;
    for (const auto& site : build.sites) {
      for (std::size_t q = 0; q < site.plant_points.size(); ++q) {
        const auto p = X.point(site.plant_points[q]);
        coords.insert(coords.end(), p.begin(), p.end());
        weights.push_back(site.plant_weights[q]);
        marks.push_back(0);
      }
      min_scale = std::min(min_scale, site.ball_radius);
    }
    build.result.emplace(n, std::move(coords), std::move(weights),
                         std::min(E.resolution(), min_scale / 4.0));
    build.is_e_point = std::move(marks);
    return build;
  };

  if (opts.mode == BuildMode::Strict) {
    // d < 1/30 with d^{u-s} < 4^{-s} 30^{-u} / (C_E C_X).
    const double bound = std::pow(std::pow(4.0, -s) * std::pow(30.0, -u) / (C_E * C_X), 1.0 / (u - s));
    double d = 1.0 / 32.0;
    while (d >= bound || d >= 1.0 / 30.0) d /= 2.0;
    require(std::pow(d, depth + 1) >= X.resolution(), ErrorCode::ScaleBelowResolution,
            "strict-mode d drops below the net resolution at this depth");
    try {
      return attempt(d);
    } catch (const Failure& f) {
      fail(ErrorCode::NoVacantBall, f.message);
    }
  }

  std::string last = "no attempt";
  double d = opts.d_initial;
  for (int tries = 0; tries < opts.d_tries; ++tries, d /= 2.0) {
    if (d > 2.0 / 31.0) continue;  // J' subset J needs d <= 2/31
    if (std::pow(d, depth + 1) < X.resolution()) {
      last = "leaf scale below X resolution at d = " + std::to_string(d);
      break;
    }
    try {
      return attempt(d);
    } catch (const Failure& f) {
      last = f.message;
    }
  }
  fail(ErrorCode::NoVacantBall, "no grid ratio d produced a full superset: " + last);
}

bool superset_disjointness_audit(const WeightedNet& X, const SupersetBuild& build) {
  for (std::size_t a = 0; a < build.sites.size(); ++a) {
    for (std::size_t b = a + 1; b < build.sites.size(); ++b) {
      const auto& sa = build.sites[a];
      const auto& sb = build.sites[b];
      const bool must_be_disjoint =
          sa.level == sb.level || std::abs(sa.level - sb.level) >= 2;
      if (!must_be_disjoint) continue;
      const double lim = 2.0 * sa.ball_radius + 2.0 * sb.ball_radius;
      if (X.distance(sa.y_center, sb.y_center) <= lim) return false;
    }
  }
  return true;
}

}  // namespace regsets
