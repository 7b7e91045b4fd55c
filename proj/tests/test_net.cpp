#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regsets/cantor.hpp"
#include "regsets/net.hpp"
#include "regsets/rng.hpp"

using namespace regsets;

namespace {

WeightedNet line_net(std::vector<double> xs, double resolution = 1e-6) {
  std::vector<double> w(xs.size(), 1.0);
  return WeightedNet(1, std::move(xs), std::move(w), resolution);
}

WeightedNet grid_net(std::size_t points_count, double weight_each, double resolution) {
  std::vector<double> xs(points_count), w(points_count, weight_each);
  for (std::size_t i = 0; i < points_count; ++i)
    xs[i] = static_cast<double>(i) / static_cast<double>(points_count - 1);
  return WeightedNet(1, std::move(xs), std::move(w), resolution);
}

WeightedNet random_net(Rng& rng, int dim, std::size_t count) {
  std::vector<double> coords(count * static_cast<std::size_t>(dim));
  std::vector<double> w(count);
  for (auto& c : coords) c = rng.uniform(-1.0, 1.0);
  for (auto& x : w) x = rng.uniform(0.0, 2.0);
  w[0] += 0.5;  // keep total positive
  return WeightedNet(dim, std::move(coords), std::move(w), 1e-9);
}

}  // namespace

TEST_CASE("diameter on simple nets") {
  CHECK(diameter(line_net({0.0, 1.0})) == 1.0);
  WeightedNet single(2, {3.0, 4.0}, {1.0}, 1.0);
  CHECK(diameter(single) == 0.0);
  WeightedNet square(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}, 0.1);
  CHECK(diameter(square) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("diameter matches brute force on random nets") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    auto net = random_net(rng, dim, 3 + rng.below(60));
    double brute = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i)
      for (std::size_t j = i + 1; j < net.size(); ++j) brute = std::max(brute, net.distance(i, j));
    CHECK(diameter(net) == brute);
  }
}

TEST_CASE("ball_query closed-ball semantics") {
  auto net = line_net({0.0, 0.5, 1.0});
  auto res = ball_query(net, Point{0.0}, 0.5);
  REQUIRE(res.indices.size() == 2);
  CHECK(res.indices[0] == 0);
  CHECK(res.indices[1] == 1);
  CHECK(res.mass == 2.0);

  auto self_only = ball_query(net, std::size_t(1), 0.0);
  REQUIRE(self_only.indices.size() == 1);
  CHECK(self_only.indices[0] == 1);

  CHECK_THROWS_AS(ball_query(net, Point{0.0}, -1.0), Error);
}

TEST_CASE("ball_query 101-point grid") {
  auto net = grid_net(101, 1.0 / 101.0, 1e-4);
  auto res = ball_query(net, Point{0.5}, 0.25);
  CHECK(res.indices.size() == 51);
  CHECK(res.mass == doctest::Approx(51.0 / 101.0).epsilon(1e-12));
}

TEST_CASE("ball_query fast path equals brute force exactly") {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    auto net = random_net(rng, dim, 5 + rng.below(150));
    for (int q = 0; q < 10; ++q) {
      Point x(static_cast<std::size_t>(dim));
      for (auto& c : x) c = rng.uniform(-1.2, 1.2);
      const double r = rng.uniform(0.0, 1.5);
      auto fast = ball_query(net, x, r);
      auto brute = ball_query_brute(net, x, r);
      CHECK(fast.indices == brute.indices);
      CHECK(fast.mass == brute.mass);  // bit-exact: same summation order
    }
  }
}

TEST_CASE("ball monotonicity in the radius") {
  Rng rng(13);
  auto net = random_net(rng, 2, 80);
  for (int q = 0; q < 20; ++q) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    double r1 = rng.uniform(0.0, 1.0);
    double r2 = rng.uniform(0.0, 1.0);
    if (r1 > r2) std::swap(r1, r2);
    auto small = ball_query(net, x, r1);
    auto large = ball_query(net, x, r2);
    CHECK(std::includes(large.indices.begin(), large.indices.end(), small.indices.begin(),
                        small.indices.end()));
  }
}

TEST_CASE("estimate_regularity on the uniform 1001-point grid") {
  auto net = grid_net(1001, 1.0 / 1000.0, 1e-3);
  auto est = estimate_regularity(net, 1.0, 0.02, 0.5);
  CHECK(est.c_lower >= 0.9);
  CHECK(est.C_upper <= 2.2);
  CHECK(est.c_lower <= est.C_upper);
  // Witnesses reproduce the reported extremes.
  const double wit_min = ball_query(net, est.min_center, est.min_radius).mass /
                         std::pow(est.min_radius, 1.0);
  CHECK(wit_min == doctest::Approx(est.c_lower).epsilon(1e-15));
  const double wit_max = ball_query(net, est.max_center, est.max_radius).mass /
                         std::pow(est.max_radius, 1.0);
  CHECK(wit_max == doctest::Approx(est.C_upper).epsilon(1e-15));
}

TEST_CASE("estimate_regularity detects the exponent of a Cantor net") {
  const double t = std::log(2.0) / std::log(3.0);
  auto net = cantor_net(1, t, 1.0, 8);
  auto est = estimate_regularity(net, t, std::pow(3.0, -6.0), 1.0);
  CHECK(est.c_lower > 0.0);
  CHECK(std::isfinite(est.C_upper));
  CHECK(est.C_upper / est.c_lower < 50.0);

  // Testing the wrong exponent s = 1: the constant spread C_upper / c_lower
  // keeps growing as the scan reaches finer scales, unlike at the true t.
  auto coarse = estimate_regularity(net, 1.0, std::pow(3.0, -3.0), 1.0);
  auto fine = estimate_regularity(net, 1.0, std::pow(3.0, -6.0), 1.0);
  CHECK(fine.C_upper / fine.c_lower > 2.0 * coarse.C_upper / coarse.c_lower);
  CHECK(fine.C_upper / fine.c_lower > 3.0 * est.C_upper / est.c_lower);
}

TEST_CASE("estimate_regularity scale guard") {
  auto net = grid_net(101, 0.01, 1e-2);
  CHECK_THROWS_AS(estimate_regularity(net, 1.0, 1e-3, 0.5), Error);
}

TEST_CASE("rescale_to_unit") {
  auto net = line_net({0.0, 2.0});
  auto scaled = rescale_to_unit(net, 1.0);
  CHECK(diameter(scaled) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(scaled.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(scaled.weight(1) == doctest::Approx(0.5).epsilon(1e-15));

  auto unit = line_net({0.0, 0.25, 1.0});
  auto same = rescale_to_unit(unit, 1.0);
  for (std::size_t i = 0; i < unit.size(); ++i) {
    CHECK(same.point(i)[0] == doctest::Approx(unit.point(i)[0]).epsilon(1e-15));
    CHECK(same.weight(i) == doctest::Approx(unit.weight(i)).epsilon(1e-15));
  }

  WeightedNet singleton(1, {3.0}, {1.0}, 1.0);
  CHECK_THROWS_AS(rescale_to_unit(singleton, 1.0), Error);
}

TEST_CASE("regularity estimate is invariant under rescaling") {
  auto net = grid_net(257, 1.0 / 256.0, 1.0 / 256.0);
  // Stretch to [0, 4].
  std::vector<double> xs(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) xs[i] = net.point(i)[0] * 4.0;
  WeightedNet stretched(1, std::move(xs), net.weights(), net.resolution() * 4.0);
  auto unit = rescale_to_unit(stretched, 1.0);
  auto est_a = estimate_regularity(stretched, 1.0, 0.08, 4.0);
  auto est_b = estimate_regularity(unit, 1.0, 0.02, 1.0);
  CHECK(est_a.c_lower == doctest::Approx(est_b.c_lower).epsilon(1e-9));
  CHECK(est_a.C_upper == doctest::Approx(est_b.C_upper).epsilon(1e-9));
}

TEST_CASE("oracle-mode nets") {
  // Three points on a line via a distance callback.
  std::vector<double> pos{0.0, 0.4, 1.0};
  WeightedNet net(3, [&](std::size_t i, std::size_t j) { return std::fabs(pos[i] - pos[j]); },
                  {1.0, 1.0, 1.0}, 1e-3);
  net.validate();
  CHECK(diameter(net) == 1.0);
  auto res = ball_query(net, std::size_t(0), 0.4);
  CHECK(res.indices.size() == 2);

  // A triangle-inequality violation must surface in validate().
  WeightedNet bad(3,
                  [](std::size_t i, std::size_t j) {
                    if ((i == 0 && j == 2) || (i == 2 && j == 0)) return 10.0;
                    return 1.0;
                  },
                  {1.0, 1.0, 1.0}, 1e-3);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("scale gap witness fires on a planted gap and not on a Cantor net") {
  // Two tight clusters: mass stays constant across a huge annulus.
  auto net = line_net({0.0, 0.001, 0.5, 0.501});
  auto wit = scale_gap_witness(net, 0.5, 2.0, 1e-4, 1.0);
  REQUIRE(wit.has_value());
  CHECK(wit->ratio_power > 2.0);

  const double t = std::log(2.0) / std::log(3.0);
  auto cnet = cantor_net(1, t, 1.0, 7);
  auto est = estimate_regularity(cnet, t, std::pow(3.0, -5.0), 1.0, {0, 48});
  const double C_own = est.C_upper / est.c_lower;
  auto none = scale_gap_witness(cnet, t, C_own * 1.05, std::pow(3.0, -5.0), 1.0);
  CHECK_FALSE(none.has_value());
}
