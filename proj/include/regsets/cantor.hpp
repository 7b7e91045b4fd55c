#pragma once

#include <cstdint>
#include <vector>

#include "regsets/net.hpp"

namespace regsets {

// Standard Cantor set C(t, a) in R^n: 2^n corner cubes with contraction d
// solving 2^n d^t = 1.
struct CantorSpec {
  int n = 1;
  double t = 0.0;
  double a = 1.0;   // root side length
  double d = 0.0;   // contraction ratio, in (0, 1/2)
  std::uint32_t branching = 2;  // 2^n

  void validate() const;
};

// Word over symbols 0..2^n-1; symbol bits pick the low/high corner per axis.
using CubeAddress = std::vector<std::uint32_t>;

struct CantorCube {
  CubeAddress word;
  Point corner;  // lexicographically smallest corner
  double side = 0.0;
};

double contraction_ratio(int n, double t);

CantorSpec make_cantor_spec(int n, double t, double a);

constexpr std::size_t kDefaultNodeBudget = std::size_t(1) << 20;

std::vector<CantorCube> cantor_cubes(const CantorSpec& spec, int depth,
                                     std::size_t node_budget = kDefaultNodeBudget);

// Center of the addressed cube (root centered when the word is empty).
Point cantor_point(const CantorSpec& spec, const CubeAddress& word);

// Net of depth-level cube centers, weight a^t / 2^{n depth} each (total a^t
// exactly), resolution d^depth * a.
WeightedNet cantor_net(const CantorSpec& spec, int depth,
                       std::size_t node_budget = kDefaultNodeBudget);
WeightedNet cantor_net(int n, double t, double a, int depth,
                       std::size_t node_budget = kDefaultNodeBudget);

// Append zero coordinates so a net in R^n lives in R^m, m > n.
WeightedNet lift_to_dim(const WeightedNet& net, int target_dim);

}  // namespace regsets
