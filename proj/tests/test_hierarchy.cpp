#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regsets/cantor.hpp"
#include "regsets/hierarchy.hpp"

using namespace regsets;

TEST_CASE("subset_strict_params reproduces the worked inequality") {
  // s = 1, C_E = 2, t = 0.5, n = 1: need d = 4^-N < 1/3 and sqrt(d) < 1/30.
  auto sp = subset_strict_params(1.0, 2.0, 0.5, 1);
  CHECK(sp.N == 5);
  CHECK(sp.d == doctest::Approx(1.0 / 1024.0).epsilon(1e-15));
}

TEST_CASE("build_subset_hierarchy depth 0") {
  auto net = cantor_net(1, 0.9, 1.0, 6);
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, 0);
  CHECK(build.hierarchy.depth() == 0);
  CHECK(build.leaf_net->size() == 1);
}

TEST_CASE("adaptive subset hierarchy on a 0.9-dimensional net, target 0.3") {
  auto net = cantor_net(1, 0.9, 1.0, 12);
  const int depth = 3;
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, depth);
  const auto& h = build.hierarchy;
  REQUIRE(h.depth() == depth);
  const std::uint32_t branching = h.levels[1].size();
  CHECK(branching == (std::uint32_t(1) << build.digits_per_level));

  // Child-in-parent and exact sibling ball disjointness at every level.
  double radius = h.scale;
  for (int k = 1; k <= depth; ++k) {
    const double child_radius = radius * h.d;
    const auto& parents = h.levels[k - 1];
    const auto& level = h.levels[k];
    for (std::uint32_t slot = 0; slot < level.size(); ++slot) {
      const auto& node = level[slot];
      CHECK(net.distance(node.point, parents[node.parent].point) <= radius * (1 + 1e-12));
    }
    for (const auto& parent : parents) {
      for (std::uint32_t i = 0; i < parent.child_count; ++i)
        for (std::uint32_t j = i + 1; j < parent.child_count; ++j) {
          const double d = net.distance(level[parent.first_child + i].point,
                                        level[parent.first_child + j].point);
          CHECK(d > 6.0 * child_radius);  // disjoint closed 3 d^{k+1} balls
        }
    }
    radius = child_radius;
  }

  // Distance bracketing d^{l+1} <= d(x, x') <= 4 d^l for leaves diverging at l+1.
  const auto& leaves = h.levels[depth];
  for (std::uint32_t a = 0; a < leaves.size(); ++a) {
    for (std::uint32_t b = a + 1; b < leaves.size(); ++b) {
      Word wa = h.word_of(depth, a), wb = h.word_of(depth, b);
      int l = 0;
      while (l < depth && wa[l] == wb[l]) ++l;  // first difference at position l
      const double ds = net.distance(leaves[a].point, leaves[b].point);
      CHECK(ds >= std::pow(h.d, l + 1) * h.scale * (1 - 1e-12));
      CHECK(ds <= 4.0 * std::pow(h.d, l) * h.scale * (1 + 1e-12));
    }
  }

  // Leaf net passes its own regularity estimate at the target exponent.
  auto est = estimate_regularity(*build.leaf_net, 0.3, std::pow(build.d, depth), 1.0);
  CHECK(est.c_lower > 0.0);
  CHECK(est.C_upper / est.c_lower < 1e3);
}

TEST_CASE("subset_map bound and measured distortion") {
  auto net = cantor_net(1, 0.9, 1.0, 12);
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, 3);
  auto corr = subset_map(net, build);
  const double d = build.d;
  CHECK(corr.L_bound ==
        doctest::Approx(std::max(std::sqrt(1.0) / d, 4.0 / (1.0 - 2.0 * d))).epsilon(1e-12));
  CHECK(corr.L_measured <= corr.L_bound * (1 + 1e-9));
  CHECK(corr.L_measured >= 1.0);
}

TEST_CASE("subset_map L_bound formula example") {
  // n = 1, d = 1/4 -> max{4, 8} = 8; checked through a synthetic spec.
  const double d = 0.25;
  CHECK(std::max(std::sqrt(1.0) / d, 4.0 / (1.0 - 2.0 * d)) == doctest::Approx(8.0));
}

TEST_CASE("subset_map single-node hierarchy has L = 1 by convention") {
  auto net = cantor_net(1, 0.9, 1.0, 6);
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, 0);
  auto corr = subset_map(net, build);
  CHECK(corr.L_measured == 1.0);
}

TEST_CASE("evaluate_correspondence truncation consistency") {
  auto net = cantor_net(1, 0.9, 1.0, 12);
  const int depth = 3;
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, depth);
  auto corr = subset_map(net, build);
  const auto& leaves = build.hierarchy.levels[depth];
  for (std::uint32_t slot = 0; slot < leaves.size(); ++slot) {
    const Point x = net.point_copy(leaves[slot].point);
    const Point deep = evaluate_correspondence(corr, x, depth);
    const Point shallow = evaluate_correspondence(corr, x, depth - 1);
    CHECK(dist(deep, shallow) <= 2.0 * std::pow(build.d, depth - 1) * build.hierarchy.scale);
  }
  CHECK_THROWS_AS(evaluate_correspondence(corr, Point{123.0}), Error);
}

TEST_CASE("build_embedding from an s=0.4 net into a t=0.8 net") {
  auto E = rescale_to_unit(cantor_net(1, 0.4, 1.0, 7), 0.4);
  auto F = rescale_to_unit(cantor_net(1, 0.8, 1.0, 11), 0.8);
  const int depth = 2;
  auto est_E = estimate_regularity(E, 0.4, std::pow(0.4, 10), 1.0, {256, 8});
  const double C_E = est_E.C_upper / est_E.c_lower;
  auto build = build_embedding(E, F, 0.4, 0.8, C_E, 2.0, depth);

  // Partition exactness at every level.
  for (int k = 0; k <= depth; ++k) {
    std::vector<char> seen(E.size(), 0);
    for (const auto& cell : build.cells.cells[k]) {
      for (auto idx : cell) {
        CHECK(!seen[idx]);
        seen[idx] = 1;
      }
    }
    for (char s : seen) CHECK(s == 1);
  }

  // Sibling cell separation >= d^k, exact.
  for (int k = 1; k <= depth; ++k) {
    const double dk = std::pow(build.d, k);
    const auto& level = build.e_hierarchy.levels[k];
    const auto& cells = build.cells.cells[k];
    for (std::uint32_t a = 0; a < level.size(); ++a)
      for (std::uint32_t b = a + 1; b < level.size(); ++b) {
        if (level[a].parent != level[b].parent) continue;
        for (auto ia : cells[a])
          for (auto ib : cells[b]) CHECK(E.distance(ia, ib) >= dk);
      }
  }

  // Measured distortion within the proof bound 4D/d.
  CHECK(build.corr.L_measured <= build.corr.L_bound * (1 + 1e-9));
  CHECK(build.corr.L_bound == doctest::Approx(4.0 * build.D / build.d).epsilon(1e-12));

  // Two points in different depth-1 cells map at target distance >= d.
  const auto& l1 = build.f_hierarchy.levels[1];
  for (std::uint32_t a = 0; a < l1.size(); ++a)
    for (std::uint32_t b = a + 1; b < l1.size(); ++b)
      CHECK(F.distance(l1[a].point, l1[b].point) >= build.d);
}

TEST_CASE("two-point net embeds into a dense grid at depth 1") {
  WeightedNet E(1, {0.0, 1.0}, {1.0, 1.0}, 1e-9);
  std::vector<double> xs(1025);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / 1024.0;
  WeightedNet F(1, std::move(xs), std::vector<double>(1025, 1.0 / 1024.0), 1.0 / 1024.0);
  auto build = build_embedding(E, F, 0.2, 0.9, 1.5, 2.0, 1);

  // Two cells, each a single E point, mapped to two separated F points.
  REQUIRE(build.cells.cells[1].size() == 2);
  CHECK(build.cells.cells[1][0].size() == 1);
  CHECK(build.cells.cells[1][1].size() == 1);
  const auto& f1 = build.f_hierarchy.levels[1];
  CHECK(F.distance(f1[0].point, f1[1].point) >= build.d);
  CHECK(build.corr.L_measured <= build.corr.L_bound);
}

TEST_CASE("distortion operator") {
  std::vector<std::pair<Point, Point>> pairs{{{0.0, 0.0}, {1.0, 0.0}}, {{0.5, 0.5}, {0.0, 1.0}}};
  auto identity = [](PointView x) { return Point(x.begin(), x.end()); };
  CHECK(distortion(identity, pairs) == 1.0);
  auto doubled = [](PointView x) {
    Point out(x.begin(), x.end());
    for (auto& c : out) c *= 2.0;
    return out;
  };
  CHECK(distortion(doubled, pairs) == doctest::Approx(2.0).epsilon(1e-15));
  std::vector<std::pair<Point, Point>> bad{{{1.0, 1.0}, {1.0, 1.0}}};
  CHECK_THROWS_AS(distortion(identity, bad), Error);
}

TEST_CASE("strict-mode subset hierarchy honors the proof inequalities") {
  // s = 0.9, C_E = 2, t = 0.3, n = 1: the inequalities force N = 3,
  // d = 2^{-10}; a depth-1 build then needs 8 children 6d apart.
  auto sp = subset_strict_params(0.9, 2.0, 0.3, 1);
  CHECK(sp.N == 3);
  CHECK(sp.d == doctest::Approx(std::pow(2.0, -10.0)).epsilon(1e-15));

  auto net = cantor_net(1, 0.9, 1.0, 12);
  SubsetOptions opts;
  opts.mode = BuildMode::Strict;
  auto build = build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, 1, opts);
  CHECK(build.hierarchy.levels[1].size() == 8);
  CHECK(build.d == doctest::Approx(std::pow(2.0, -10.0)).epsilon(1e-15));

  // Depth 2 would need structure below the net resolution.
  CHECK_THROWS_AS(build_subset_hierarchy(net, 0.9, 2.0, 0.3, 1, 2, opts), Error);
}

TEST_CASE("subset_in_ball yields a regular piece inside a ball") {
  auto net = cantor_net(1, 0.9, 1.0, 12);
  auto got = subset_in_ball(net, net.size() / 2, 0.1, 0.3, 1, 2);
  CHECK(got.build.hierarchy.depth() == 2);
  const auto& leaf = *got.build.leaf_net;
  auto est = estimate_regularity(leaf, 0.3, leaf.resolution(), diameter(leaf));
  CHECK(est.c_lower > 0.0);
  CHECK(std::isfinite(est.C_upper));
}
