#include "regsets/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "regsets/rng.hpp"

namespace regsets {

Word BallHierarchy::word_of(int level, std::uint32_t slot) const {
  Word word(static_cast<std::size_t>(level));
  std::uint32_t cur = slot;
  for (int k = level; k >= 1; --k) {
    const auto& parent_level = levels[static_cast<std::size_t>(k - 1)];
    const std::uint32_t parent = levels[static_cast<std::size_t>(k)][cur].parent;
    word[static_cast<std::size_t>(k - 1)] = cur - parent_level[parent].first_child;
    cur = parent;
  }
  return word;
}

std::uint32_t BallHierarchy::slot_of(const Word& word) const {
  std::uint32_t slot = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const auto& node = levels[k][slot];
    require(word[k] < node.child_count, ErrorCode::BadAddress, "word symbol exceeds child count");
    slot = node.first_child + word[k];
  }
  return slot;
}

SubsetStrictParams subset_strict_params(double s, double C_E, double t, int n) {
  require(t > 0.0 && t < s, ErrorCode::InvalidParams, "need 0 < t < s");
  require(C_E >= 1.0, ErrorCode::InvalidParams, "need C_E >= 1");
  require(n >= 1 && t < static_cast<double>(n), ErrorCode::InvalidDimension, "need t < n");
  const double c = 1.0 / (std::pow(15.0, s) * C_E);
  for (int N = 1; N <= 64; ++N) {
    const double d = std::pow(2.0, -static_cast<double>(N) * n / t);
    if (d < 1.0 / 3.0 && std::pow(d, s - t) < c) return {N, d};
  }
  fail(ErrorCode::InvalidParams, "no strict N <= 64 satisfies the inequalities");
}

namespace {

struct TryBuildResult {
  BallHierarchy hierarchy;
  bool ok = false;
  std::string why;
};

// One construction pass at fixed branching/ratio. Children of every node are
// the first `branching` centers of a greedy packing at radius 3 d^{k+1}
// inside B(center, d^k); fewer centers than branching falsifies regularity at
// that node and fails the pass.
TryBuildResult try_build(const WeightedNet& net, double d, std::uint32_t branching, int depth,
                         double scale, std::size_t node_budget) {
  TryBuildResult res;
  res.hierarchy.d = d;
  res.hierarchy.scale = scale;
  res.hierarchy.multiplier_cap = 1.0;
  auto& levels = res.hierarchy.levels;
  levels.clear();

  BallNode root;
  root.point = net.candidate_order()[0];
  root.rho = scale;
  levels.push_back({root});

  double radius = scale;  // d^k * scale at level k
  std::size_t total_nodes = 1;
  for (int k = 0; k < depth; ++k) {
    const double child_radius = radius * d;
    std::vector<BallNode> next;
    next.reserve(levels.back().size() * branching);
    for (std::uint32_t slot = 0; slot < levels.back().size(); ++slot) {
      BallNode& node = levels.back()[slot];
      Packing packing;
      try {
        PackOptions popts;
        popts.restrict_to_ball = true;
        popts.max_centers = branching;
        packing = greedy_packing(net, static_cast<std::size_t>(node.point), 3.0 * child_radius,
                                 radius, popts);
      } catch (const Error&) {
        res.why = "packing failed at level " + std::to_string(k + 1);
        return res;
      }
      if (packing.centers.size() < branching) {
        res.why = "level " + std::to_string(k + 1) + " node produced " +
                  std::to_string(packing.centers.size()) + " of " + std::to_string(branching) +
                  " children";
        return res;
      }
      node.first_child = static_cast<std::uint32_t>(next.size());
      node.child_count = branching;
      for (std::uint32_t i = 0; i < branching; ++i) {
        BallNode child;
        child.point = packing.centers[i];
        child.rho = child_radius;
        child.parent = slot;
        next.push_back(child);
      }
    }
    total_nodes += next.size();
    if (total_nodes > node_budget) {
      res.why = "node budget exceeded";
      return res;
    }
    levels.push_back(std::move(next));
    radius = child_radius;
  }
  res.ok = true;
  return res;
}

WeightedNet leaf_net_of(const WeightedNet& net, const BallHierarchy& h, double t) {
  const auto& leaves = h.levels.back();
  const double total_mass = std::pow(h.scale, t);
  const double w = total_mass / static_cast<double>(leaves.size());
  std::vector<double> weights(leaves.size(), w);
  const double resolution = std::pow(h.d, h.depth()) * h.scale;
  if (net.euclidean()) {
    std::vector<double> coords;
    coords.reserve(leaves.size() * static_cast<std::size_t>(net.dim()));
    for (const auto& leaf : leaves) {
      const auto p = net.point(leaf.point);
      coords.insert(coords.end(), p.begin(), p.end());
    }
    return WeightedNet(net.dim(), std::move(coords), std::move(weights), resolution);
  }
  std::vector<std::uint32_t> idx;
  idx.reserve(leaves.size());
  for (const auto& leaf : leaves) idx.push_back(leaf.point);
  return WeightedNet(
      leaves.size(), [&](std::size_t a, std::size_t b) { return net.distance(idx[a], idx[b]); },
      std::move(weights), resolution);
}

}  // namespace

SubsetBuild build_subset_hierarchy(const WeightedNet& net, double s, double C_E, double t, int n,
                                   int depth, const SubsetOptions& opts) {
  require(depth >= 0, ErrorCode::InvalidParams, "depth must be >= 0");
  require(n >= 1 && t > 0.0 && t < static_cast<double>(n), ErrorCode::InvalidDimension,
          "need 0 < t < n");
  const double scale = diameter(net);
  require(scale > 0.0 || depth == 0, ErrorCode::CannotRescale, "singleton net supports depth 0 only");

  const double d0 = contraction_ratio(n, t);

  auto attempt = [&](int N) -> TryBuildResult {
    const double d = std::pow(d0, N);
    const std::uint32_t branching = std::uint32_t(1) << (static_cast<unsigned>(N) * static_cast<unsigned>(n));
    // Reject upfront when the finest required separation sinks below what the
    // net can resolve at all.
    if (depth > 0 && 6.0 * std::pow(d, depth) * scale < net.resolution()) {
      TryBuildResult r;
      r.why = "leaf separation below net resolution";
      return r;
    }
    return try_build(net, d, branching, depth, scale <= 0.0 ? 1.0 : scale, opts.node_budget);
  };

  TryBuildResult result;
  int used_N = 0;
  if (opts.mode == BuildMode::Strict) {
    require(s > t, ErrorCode::InvalidParams, "strict mode needs t < s");
    const auto sp = subset_strict_params(s, C_E, t, n);
    used_N = sp.N;
    result = attempt(sp.N);
    if (!result.ok) fail(ErrorCode::InsufficientChildren, "strict-mode build failed: " + result.why);
  } else {
    std::string last = "no attempt made";
    bool ok = false;
    for (int N = 1; N <= opts.max_N; ++N) {
      const double branch_nodes = std::pow(2.0, static_cast<double>(N) * n * depth);
      if (branch_nodes > static_cast<double>(opts.node_budget)) break;
      result = attempt(N);
      if (result.ok) {
        used_N = N;
        ok = true;
        break;
      }
      last = result.why;
    }
    if (!ok) fail(ErrorCode::InsufficientChildren, "adaptive build failed for every N: " + last);
  }

  SubsetBuild build;
  build.hierarchy = std::move(result.hierarchy);
  build.spec = make_cantor_spec(n, t, scale <= 0.0 ? 1.0 : scale);
  build.digits_per_level = used_N;
  build.d = std::pow(d0, used_N);
  build.leaf_net = leaf_net_of(net, build.hierarchy, t);
  return build;
}

namespace {

CubeAddress to_cantor_word(const Word& word, int digits, std::uint32_t cantor_branching) {
  CubeAddress out;
  out.reserve(word.size() * static_cast<std::size_t>(digits));
  for (auto sym : word) {
    // Most significant base-2^n digit first.
    for (int j = digits - 1; j >= 0; --j) {
      std::uint32_t div = 1;
      for (int k = 0; k < j; ++k) div *= cantor_branching;
      out.push_back((sym / div) % cantor_branching);
    }
  }
  return out;
}

double measure_correspondence(const Correspondence& corr, std::size_t pair_budget, std::uint64_t seed);

}  // namespace

Correspondence subset_map(const WeightedNet& net, const SubsetBuild& build,
                          std::size_t pair_budget, std::uint64_t seed) {
  Correspondence corr;
  corr.target = Correspondence::Target::Cantor;
  corr.source_net = &net;
  corr.source = build.hierarchy;
  corr.cell_based = false;
  corr.cantor_spec = build.spec;
  corr.cantor_digits = build.digits_per_level;
  const double d = build.d;
  require(std::fabs(std::pow(build.spec.d, build.digits_per_level) - d) <= 1e-12 * (1.0 + d),
          ErrorCode::SpecMismatch, "hierarchy ratio does not match the Cantor spec");
  corr.L_bound = std::max(std::sqrt(static_cast<double>(build.spec.n)) / d, 4.0 / (1.0 - 2.0 * d));
  corr.L_measured = measure_correspondence(corr, pair_budget, seed);
  return corr;
}

namespace {

// Distances on the source side of a correspondence.
struct SourceAccess {
  const WeightedNet* net = nullptr;  // optional; leaf points can be netless
  const BallHierarchy* h = nullptr;

  double leaf_dist(const Correspondence& corr, std::uint32_t a, std::uint32_t b) const {
    const auto& leaves = corr.source.levels.back();
    if (corr.source_net) return corr.source_net->distance(leaves[a].point, leaves[b].point);
    fail(ErrorCode::InvalidParams, "correspondence lacks a source net");
  }
};

Point cantor_leaf_point(const Correspondence& corr, int level, std::uint32_t slot) {
  const Word word = corr.source.word_of(level, slot);
  return cantor_point(corr.cantor_spec, to_cantor_word(word, corr.cantor_digits, corr.cantor_spec.branching));
}

Point target_leaf_point(const Correspondence& corr, int level, std::uint32_t slot) {
  if (corr.target == Correspondence::Target::Cantor) return cantor_leaf_point(corr, level, slot);
  const auto& node = corr.target_hierarchy.levels[static_cast<std::size_t>(level)][slot];
  return corr.target_net->point_copy(node.point);
}

// REGSET_THREADS caps worker threads for the pair scans; the reduction is a
// max, so the result is identical at any thread count.
int thread_cap() {
  const char* env = std::getenv("REGSET_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return std::max(1, std::min(v, 64));
}

double measure_correspondence(const Correspondence& corr, std::size_t pair_budget, std::uint64_t seed) {
  const int K = corr.source.depth();
  const auto& leaves = corr.source.levels.back();
  const std::size_t n = leaves.size();
  if (n < 2) return 1.0;  // empty supremum

  std::vector<Point> images(n);
  for (std::uint32_t i = 0; i < n; ++i) images[i] = target_leaf_point(corr, K, i);

  auto pair_ratio = [&](std::uint32_t a, std::uint32_t b) {
    const double ds =
        corr.source_net ? corr.source_net->distance(leaves[a].point, leaves[b].point) : 0.0;
    const double dt = dist(images[a], images[b]);
    if (ds <= 0.0 || dt <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(dt / ds, ds / dt);
  };

  const std::size_t total_pairs = n * (n - 1) / 2;
  double L = 1.0;
  if (total_pairs <= pair_budget) {
    const int workers = std::min<int>(thread_cap(), static_cast<int>(n));
    if (workers <= 1) {
      for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) L = std::max(L, pair_ratio(a, b));
    } else {
      std::vector<double> partial(static_cast<std::size_t>(workers), 1.0);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          double local = 1.0;
          for (std::uint32_t a = static_cast<std::uint32_t>(w); a < n;
               a += static_cast<std::uint32_t>(workers))
            for (std::uint32_t b = a + 1; b < n; ++b) local = std::max(local, pair_ratio(a, b));
          partial[static_cast<std::size_t>(w)] = local;
        });
      }
      for (auto& th : pool) th.join();
      for (double v : partial) L = std::max(L, v);
    }
  } else {
    Rng rng(seed);
    const std::size_t samples = std::max<std::size_t>(pair_budget, 10000);
    for (std::size_t k = 0; k < samples; ++k) {
      const auto a = static_cast<std::uint32_t>(rng.below(n));
      auto b = static_cast<std::uint32_t>(rng.below(n));
      while (b == a) b = static_cast<std::uint32_t>(rng.below(n));
      L = std::max(L, pair_ratio(a, b));
    }
  }
  return L;
}

}  // namespace

EmbeddingBuild build_embedding(const WeightedNet& E, const WeightedNet& F, double s, double t,
                               double C_E, double C_F, int depth, const EmbeddingOptions& opts) {
  require(s > 0.0 && s < 1.0 && s < t, ErrorCode::InvalidParams, "need 0 < s < 1 and s < t");
  require(C_E >= 1.0 && C_F >= 1.0, ErrorCode::InvalidParams, "need C_E, C_F >= 1");
  require(std::fabs(diameter(E) - 1.0) <= 1e-9, ErrorCode::InvalidParams,
          "E must be rescaled to diameter 1");
  require(std::fabs(diameter(F) - 1.0) <= 1e-9, ErrorCode::InvalidParams,
          "F must be rescaled to diameter 1");
  require(depth >= 1, ErrorCode::InvalidParams, "depth must be >= 1");

  const double D = ring_cover_D(C_E, s);

  struct Failure {
    ErrorCode code;
    std::string message;
  };

  auto attempt = [&](double d) -> std::optional<EmbeddingBuild> {
    EmbeddingBuild b;
    b.d = d;
    b.D = D;
    b.e_hierarchy.d = d;
    b.e_hierarchy.scale = 1.0;
    b.e_hierarchy.multiplier_cap = D;
    b.f_hierarchy.d = d;
    b.f_hierarchy.scale = 1.0;
    b.f_hierarchy.multiplier_cap = 3.0;

    // Roots: whole E as a single cell; first F candidate as root center.
    std::vector<std::uint32_t> all(E.size());
    for (std::uint32_t i = 0; i < E.size(); ++i) all[i] = i;
    BallNode e_root;
    e_root.point = E.candidate_order()[0];
    e_root.rho = 1.0;
    BallNode f_root;
    f_root.point = F.candidate_order()[0];
    f_root.rho = 1.0;
    b.e_hierarchy.levels.push_back({e_root});
    b.f_hierarchy.levels.push_back({f_root});
    b.cells.cells.push_back({all});

    double level_r = 1.0;  // d^k at level k
    for (int k = 0; k < depth; ++k) {
      const double child_r = level_r * d;
      auto& e_parents = b.e_hierarchy.levels.back();
      auto& f_parents = b.f_hierarchy.levels.back();
      auto& parent_cells = b.cells.cells.back();
      std::vector<BallNode> e_next, f_next;
      std::vector<std::vector<std::uint32_t>> next_cells;

      for (std::uint32_t slot = 0; slot < e_parents.size(); ++slot) {
        // E side: ring cover of the cell at radius d^{k+1}.
        const auto& cell = parent_cells[slot];
        WeightedNet cell_net = subnet(E, cell);
        GapCover cover;
        try {
          RingOptions ropts;
          ropts.mode = CoverMode::Adaptive;
          ropts.D_override = D;
          cover = ring_cover(cell_net, child_r, s, C_E, ropts);
        } catch (const Error& e) {
          throw Failure{e.code(), std::string("level ") + std::to_string(k + 1) + ": " + e.what()};
        }

        // F side: packing inside B(y_parent, d^k) at radius 3 d^{k+1}.
        Packing packing;
        try {
          PackOptions popts;
          popts.restrict_to_ball = true;
          popts.max_centers = cover.items.size();
          packing = greedy_packing(F, static_cast<std::size_t>(f_parents[slot].point),
                                   3.0 * child_r, level_r, popts);
        } catch (const Error& e) {
          throw Failure{ErrorCode::InsufficientTargets,
                        std::string("level ") + std::to_string(k + 1) + ": " + e.what()};
        }
        if (packing.centers.size() < cover.items.size())
          throw Failure{ErrorCode::InsufficientTargets,
                        "level " + std::to_string(k + 1) + ": F-side packing yields " +
                            std::to_string(packing.centers.size()) + " of " +
                            std::to_string(cover.items.size()) + " targets"};

        // Cells: residual intersections in selection order.
        std::vector<char> taken(cell.size(), 0);
        e_parents[slot].first_child = static_cast<std::uint32_t>(e_next.size());
        e_parents[slot].child_count = static_cast<std::uint32_t>(cover.items.size());
        f_parents[slot].first_child = static_cast<std::uint32_t>(f_next.size());
        f_parents[slot].child_count = static_cast<std::uint32_t>(cover.items.size());
        for (std::size_t i = 0; i < cover.items.size(); ++i) {
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
          f_child.rho = 3.0 * child_r;
          f_child.parent = slot;
          f_next.push_back(f_child);
          next_cells.push_back(std::move(child_cell));
        }
        for (char tk : taken)
          if (!tk) throw Failure{ErrorCode::InvalidParams, "ring cover left a cell point uncovered"};
      }
      b.e_hierarchy.levels.push_back(std::move(e_next));
      b.f_hierarchy.levels.push_back(std::move(f_next));
      b.cells.cells.push_back(std::move(next_cells));
      level_r = child_r;
    }
    return b;
  };

  std::string last_error = "no attempt";
  if (opts.mode == BuildMode::Strict) {
    double d = opts.d_strict;
    if (d <= 0.0) {
      const double bound = std::pow(std::pow(2.0, s) * std::pow(15.0, t) * std::pow(D, s) * C_E * C_F,
                                    -1.0 / (t - s));
      d = 0.5;
      while (d >= bound || 2.0 * D * d >= 1.0) d /= 2.0;
    }
    require(std::pow(d, t - s) <
                    1.0 / (std::pow(2.0, s) * std::pow(15.0, t) * std::pow(D, s) * C_E * C_F) &&
                2.0 * D * d < 1.0,
            ErrorCode::InvalidParams, "strict-mode d violates the proof inequalities");
    try {
      auto b = attempt(d);
      b->corr = Correspondence{};
      b->corr.target = Correspondence::Target::Net;
      b->corr.source_net = &E;
      b->corr.source = b->e_hierarchy;
      b->corr.source_cells = b->cells;
      b->corr.cell_based = true;
      b->corr.target_net = &F;
      b->corr.target_hierarchy = b->f_hierarchy;
      b->corr.L_bound = 4.0 * D / d;
      b->corr.L_measured = measure_correspondence(b->corr, opts.pair_budget, opts.seed);
      return std::move(*b);
    } catch (const Failure& f) {
      fail(f.code, f.message);
    }
  }

  double d = opts.d_initial;
  for (int attempt_i = 0; attempt_i < opts.d_tries; ++attempt_i, d /= 2.0) {
    if (std::pow(d, depth) < std::max(E.resolution(), F.resolution()) * 0.5) break;
    try {
      auto b = attempt(d);
      b->corr = Correspondence{};
      b->corr.target = Correspondence::Target::Net;
      b->corr.source_net = &E;
      b->corr.source = b->e_hierarchy;
      b->corr.source_cells = b->cells;
      b->corr.cell_based = true;
      b->corr.target_net = &F;
      b->corr.target_hierarchy = b->f_hierarchy;
      b->corr.L_bound = 4.0 * D / d;
      b->corr.L_measured = measure_correspondence(b->corr, opts.pair_budget, opts.seed);
      return std::move(*b);
    } catch (const Failure& f) {
      last_error = f.message;
      continue;
    }
  }
  fail(ErrorCode::InsufficientTargets, "no grid ratio d produced a full build: " + last_error);
}

Point evaluate_correspondence(const Correspondence& corr, PointView x, int truncate_level) {
  const int K = corr.source.depth();
  const int level = truncate_level < 0 ? K : truncate_level;
  require(level >= 0 && level <= K, ErrorCode::InvalidParams, "truncation level out of range");
  require(corr.source_net != nullptr, ErrorCode::InvalidParams, "correspondence lacks a source net");

  // Locate x among the deepest-level structures.
  std::uint32_t leaf_slot = 0;
  bool found = false;
  if (corr.cell_based) {
    // x must be a net point; find its index, then its deepest cell.
    std::uint32_t idx = 0;
    for (std::uint32_t i = 0; i < corr.source_net->size(); ++i) {
      if (dist(corr.source_net->point(i), x) <= 1e-12) {
        idx = i;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::OutsideDomain, "x is not a source net point");
    found = false;
    const auto& leaf_cells = corr.source_cells.cells.back();
    for (std::uint32_t slot = 0; slot < leaf_cells.size(); ++slot) {
      if (std::find(leaf_cells[slot].begin(), leaf_cells[slot].end(), idx) != leaf_cells[slot].end()) {
        leaf_slot = slot;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::OutsideDomain, "x belongs to no deepest-level cell");
  } else {
    const auto& leaves = corr.source.levels.back();
    const double leaf_r = 3.0 * std::pow(corr.source.d, K) * corr.source.scale;
    for (std::uint32_t slot = 0; slot < leaves.size(); ++slot) {
      if (dist(corr.source_net->point(leaves[slot].point), x) <= leaf_r) {
        leaf_slot = slot;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::OutsideDomain, "x lies outside every deepest-level ball");
  }

  // Walk up to the requested level.
  std::uint32_t slot = leaf_slot;
  for (int k = K; k > level; --k) slot = corr.source.levels[static_cast<std::size_t>(k)][slot].parent;
  return target_leaf_point(corr, level, slot);
}

double distortion(const PointMap& map, const std::vector<std::pair<Point, Point>>& pairs) {
  require(!pairs.empty(), ErrorCode::InvalidParams, "need at least one pair");
  double L = 1.0;
  for (const auto& [a, b] : pairs) {
    const double ds = dist(a, b);
    require(ds > 0.0, ErrorCode::DegeneratePair, "pair endpoints coincide");
    const Point fa = map(a);
    const Point fb = map(b);
    const double dt = dist(fa, fb);
    if (dt <= 0.0) return std::numeric_limits<double>::infinity();
    L = std::max(L, std::max(dt / ds, ds / dt));
  }
  return L;
}

SubsetInBall subset_in_ball(const WeightedNet& net, std::size_t center_index, double r, double t,
                            int n, int depth, const SubsetOptions& opts) {
  require(opts.mode == BuildMode::Adaptive, ErrorCode::InvalidParams,
          "subset_in_ball fixes ratios empirically; use adaptive mode");
  const auto ball = ball_query(net, center_index, r);
  require(!ball.indices.empty(), ErrorCode::EmptyRegion, "no net point in the ball");
  SubsetInBall out;
  out.indices = ball.indices;
  WeightedNet sub = subnet(net, ball.indices);
  // The construction is scale-free: radii inside carry the subnet diameter,
  // and adaptive mode ignores the ambient (s, C) pair.
  out.build = build_subset_hierarchy(sub, /*s=*/1.0, /*C_E=*/1.0, t, n, depth, opts);
  return out;
}

}  // namespace regsets
