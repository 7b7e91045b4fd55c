#include "regsets/cantor.hpp"

#include <algorithm>
#include <cmath>

namespace regsets {

void CantorSpec::validate() const {
  require(n >= 1, ErrorCode::InvalidDimension, "ambient dimension must be >= 1");
  require(t > 0.0 && t < static_cast<double>(n), ErrorCode::InvalidDimension, "need 0 < t < n");
  require(a > 0.0, ErrorCode::InvalidParams, "root side length must be positive");
  require(d > 0.0 && d < 0.5, ErrorCode::InvalidParams, "contraction ratio must lie in (0, 1/2)");
  require(branching == (std::uint32_t(1) << n), ErrorCode::InvalidParams, "branching must equal 2^n");
  const double residue = std::fabs(static_cast<double>(branching) * std::pow(d, t) - 1.0);
  require(residue <= 1e-12, ErrorCode::SpecMismatch, "2^n d^t = 1 violated");
}

double contraction_ratio(int n, double t) {
  require(n >= 1, ErrorCode::InvalidDimension, "ambient dimension must be >= 1");
  require(t > 0.0 && t < static_cast<double>(n), ErrorCode::InvalidDimension,
          "need 0 < t < n for a contraction ratio below 1/2");
  return std::pow(2.0, -static_cast<double>(n) / t);
}

CantorSpec make_cantor_spec(int n, double t, double a) {
  CantorSpec spec;
  spec.n = n;
  spec.t = t;
  spec.a = a;
  spec.d = contraction_ratio(n, t);
  spec.branching = std::uint32_t(1) << n;
  spec.validate();
  return spec;
}

namespace {

void check_word(const CantorSpec& spec, const CubeAddress& word) {
  for (auto sym : word)
    require(sym < spec.branching, ErrorCode::BadAddress, "symbol out of range for 2^n branching");
}

std::size_t level_count(const CantorSpec& spec, int depth) {
  double total = 1.0;
  for (int k = 0; k < depth; ++k) total *= static_cast<double>(spec.branching);
  require(total <= 1e18, ErrorCode::TooDeep, "cube count overflows the budget");
  return static_cast<std::size_t>(total);
}

}  // namespace

std::vector<CantorCube> cantor_cubes(const CantorSpec& spec, int depth, std::size_t node_budget) {
  spec.validate();
  require(depth >= 0, ErrorCode::InvalidParams, "depth must be >= 0");
  const std::size_t count = level_count(spec, depth);
  require(count <= node_budget, ErrorCode::TooDeep, "cube count exceeds the node budget");

  std::vector<CantorCube> cubes;
  cubes.reserve(count);
  CantorCube root;
  root.corner.assign(static_cast<std::size_t>(spec.n), 0.0);
  root.side = spec.a;
  cubes.push_back(std::move(root));

  for (int k = 0; k < depth; ++k) {
    std::vector<CantorCube> next;
    next.reserve(cubes.size() * spec.branching);
    for (const auto& cube : cubes) {
      const double child_side = cube.side * spec.d;
      const double offset = cube.side - child_side;
      for (std::uint32_t i = 0; i < spec.branching; ++i) {
        CantorCube child;
        child.word = cube.word;
        child.word.push_back(i);
        child.side = child_side;
        child.corner = cube.corner;
        for (int axis = 0; axis < spec.n; ++axis) {
          if ((i >> axis) & 1u) child.corner[static_cast<std::size_t>(axis)] += offset;
        }
        next.push_back(std::move(child));
      }
    }
    cubes.swap(next);
  }
  return cubes;
}

Point cantor_point(const CantorSpec& spec, const CubeAddress& word) {
  spec.validate();
  check_word(spec, word);
  Point corner(static_cast<std::size_t>(spec.n), 0.0);
  double side = spec.a;
  for (auto sym : word) {
    const double child_side = side * spec.d;
    const double offset = side - child_side;
    for (int axis = 0; axis < spec.n; ++axis) {
      if ((sym >> axis) & 1u) corner[static_cast<std::size_t>(axis)] += offset;
    }
    side = child_side;
  }
  for (auto& c : corner) c += side / 2.0;
  return corner;
}

WeightedNet cantor_net(const CantorSpec& spec, int depth, std::size_t node_budget) {
  spec.validate();
  require(depth >= 0, ErrorCode::InvalidParams, "depth must be >= 0");
  const std::size_t count = level_count(spec, depth);
  require(count <= node_budget, ErrorCode::TooDeep, "cube count exceeds the node budget");

  // Flat corner expansion; addresses are never materialized.
  const std::size_t dim = static_cast<std::size_t>(spec.n);
  std::vector<double> corners(dim, 0.0);
  double side = spec.a;
  for (int k = 0; k < depth; ++k) {
    const double child_side = side * spec.d;
    const double offset = side - child_side;
    std::vector<double> next;
    next.reserve(corners.size() * spec.branching);
    for (std::size_t c = 0; c < corners.size(); c += dim) {
      for (std::uint32_t i = 0; i < spec.branching; ++i) {
        for (std::size_t axis = 0; axis < dim; ++axis)
          next.push_back(corners[c + axis] + (((i >> axis) & 1u) ? offset : 0.0));
      }
    }
    corners.swap(next);
    side = child_side;
  }
  for (auto& c : corners) c += side / 2.0;

  // Per-cube weight a^t / 2^{n depth}; the divisor is a power of two, so the
  // level total reproduces a^t exactly at every depth.
  const double w = std::pow(spec.a, spec.t) / static_cast<double>(count);
  const double resolution = std::pow(spec.d, depth) * spec.a;
  return WeightedNet(spec.n, std::move(corners), std::vector<double>(count, w), resolution);
}

WeightedNet cantor_net(int n, double t, double a, int depth, std::size_t node_budget) {
  return cantor_net(make_cantor_spec(n, t, a), depth, node_budget);
}

WeightedNet lift_to_dim(const WeightedNet& net, int target_dim) {
  require(net.euclidean(), ErrorCode::InvalidParams, "lift requires a Euclidean net");
  require(target_dim >= net.dim(), ErrorCode::InvalidDimension, "target dimension too small");
  std::vector<double> coords;
  coords.reserve(net.size() * static_cast<std::size_t>(target_dim));
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
    for (int k = net.dim(); k < target_dim; ++k) coords.push_back(0.0);
  }
  return WeightedNet(target_dim, std::move(coords), net.weights(), net.resolution());
}

}  // namespace regsets
