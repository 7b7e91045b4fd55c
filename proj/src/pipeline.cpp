#include "regsets/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "regsets/cantor.hpp"
#include "regsets/rng.hpp"

namespace regsets {

namespace {

struct Verdicts {
  Json list = Json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, const std::string& reason = "",
           Json witness = Json()) {
    Json v;
    v["name"] = name;
    v["status"] = pass ? "pass" : "fail";
    if (!reason.empty()) v["reason"] = reason;
    if (!witness.is_null()) v["witness"] = std::move(witness);
    list.push_back(std::move(v));
    if (!pass) all_pass = false;
  }

  void skip(const std::string& name, const std::string& reason) {
    Json v;
    v["name"] = name;
    v["status"] = "skipped";
    v["reason"] = reason;
    list.push_back(std::move(v));
  }
};

struct Ctx {
  Json config;
  std::string out_dir;
  Json artifacts = Json::array();
  Json measured;
  Verdicts verdicts;
  std::uint64_t seed = 1;
  BuildMode mode = BuildMode::Adaptive;
  std::size_t node_budget = kDefaultNodeBudget;
  std::size_t pair_budget = 200000;
  std::size_t draw_budget = 1000000;

  Json param(const std::string& key) const {
    if (!config.contains("params") || !config["params"].contains(key))
      fail(ErrorCode::InvalidParams, "missing required parameter: " + key);
    return config["params"][key];
  }
  Json param_or(const std::string& key, Json fallback) const {
    if (!config.contains("params") || !config["params"].contains(key)) return fallback;
    return config["params"][key];
  }
  bool has_param(const std::string& key) const {
    return config.contains("params") && config["params"].contains(key);
  }
  std::string input(const std::string& key) const {
    if (!config.contains("inputs") || !config["inputs"].contains(key))
      fail(ErrorCode::InvalidParams, "missing required input: " + key);
    return config["inputs"][key].get<std::string>();
  }

  void emit(const std::string& name, const std::string& content) {
    if (out_dir.empty()) return;
    const std::string path = out_dir + "/" + name;
    write_text_file(path, content);
    artifacts.push_back(path);
  }
  void emit_json(const std::string& name, const Json& j) { emit(name, j.dump(2) + "\n"); }
};

WeightedNet load_net(const Ctx& ctx, const std::string& key) {
  return net_from_json(read_json_file(ctx.input(key)));
}

// Normalized two-sided constant: C_upper / c_lower with the lower constant
// scaled to one, over a window clear of the resolution floor.
struct MeasuredRegularity {
  double c_lower = 0.0, C_upper = 0.0, C_normalized = 0.0;
  double r_min = 0.0, r_max = 0.0;
};

MeasuredRegularity measure_regularity(const WeightedNet& net, double s) {
  MeasuredRegularity m;
  const double diam = diameter(net);
  m.r_min = std::max(net.resolution(), diam * 1e-9);
  m.r_max = std::max(diam, m.r_min * 2.0);
  EstimateOptions opts;
  opts.centers_sample = net.size() > 512 ? 512 : 0;
  opts.radii_per_decade = 12;
  const auto est = estimate_regularity(net, s, m.r_min, m.r_max, opts);
  m.c_lower = est.c_lower;
  m.C_upper = est.C_upper;
  m.C_normalized = est.C_upper / est.c_lower;
  return m;
}

// ---------------------------------------------------------------------------

void run_gen_cantor(Ctx& ctx) {
  const int n = ctx.param("n").get<int>();
  const double t = ctx.param("t").get<double>();
  const double a = ctx.param_or("a", 1.0).get<double>();
  const int depth = ctx.param("depth").get<int>();
  const auto spec = make_cantor_spec(n, t, a);
  auto net = cantor_net(spec, depth, ctx.node_budget);

  const double residue =
      std::fabs(static_cast<double>(spec.branching) * std::pow(spec.d, spec.t) - 1.0);
  ctx.verdicts.add("spec_invariant_2n_dt", residue <= 1e-12,
                   residue <= 1e-12 ? "" : "2^n d^t deviates by " + std::to_string(residue));

  double total = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) total += net.weight(i);
  ctx.verdicts.add("mass_conservation_exact", total == std::pow(a, t));

  if (depth >= 2) {
    const auto est = estimate_regularity(net, t, net.resolution(), diameter(net));
    ctx.measured["c_lower"] = est.c_lower;
    ctx.measured["C_upper"] = est.C_upper;
    ctx.verdicts.add("regularity_finite", est.c_lower > 0.0 && std::isfinite(est.C_upper));
  } else {
    ctx.verdicts.skip("regularity_finite", "depth too shallow for a scale window");
  }

  ctx.measured["points"] = net.size();
  ctx.measured["d"] = spec.d;
  ctx.emit_json("net.json", net_to_json(net));
  ctx.emit("net.csv", net_to_csv(net));
  if (n <= 2) ctx.emit("net.svg", net_to_svg(net));
}

void run_pack(Ctx& ctx) {
  auto net = load_net(ctx, "net");
  const double r = ctx.param("r").get<double>();
  const double R = ctx.param("R").get<double>();
  Point p = ctx.param_or("p", Json::array()).get<Point>();
  if (p.empty()) p = net.point_copy(0);
  PackOptions popts;
  popts.restrict_to_ball = ctx.param_or("restrict", true).get<bool>();
  auto packing = greedy_packing(net, p, r, R, popts);

  bool disjoint = true;
  Json disjoint_witness;
  for (std::size_t a = 0; a < packing.centers.size() && disjoint; ++a)
    for (std::size_t b = a + 1; b < packing.centers.size() && disjoint; ++b)
      if (net.distance(packing.centers[a], packing.centers[b]) <= 2.0 * r) {
        disjoint = false;
        disjoint_witness["pair"] = {packing.centers[a], packing.centers[b]};
      }
  ctx.verdicts.add("packing_disjoint_exact", disjoint, "", disjoint_witness);
  const bool valid = packing_valid(net, p, R, popts.restrict_to_ball, packing);
  ctx.verdicts.add("five_r_cover_exact", valid);

  if (ctx.has_param("s") && ctx.has_param("C")) {
    const double s = ctx.param("s").get<double>();
    const double C = ctx.param("C").get<double>();
    const double m = static_cast<double>(packing.count());
    const double ratio = std::pow(R / r, s);
    const bool ok = m >= ratio / (std::pow(5.0, s) * C) - 1e-9 &&
                    m <= std::pow(2.0, s) * C * ratio + 1e-9;
    ctx.verdicts.add("count_bounds", ok,
                     ok ? "" : "m = " + std::to_string(packing.count()) + " outside the bracket");
  } else {
    ctx.verdicts.skip("count_bounds", "supply s and C to check the packing count bracket");
  }

  ctx.measured["count"] = packing.count();
  ctx.emit_json("packing.json", packing_to_json(net, packing, ctx.verdicts.all_pass));
}

void run_gap(Ctx& ctx) {
  auto net = load_net(ctx, "net");
  const std::string kind = ctx.param_or("kind", "ring").get<std::string>();
  const double r = ctx.param("r").get<double>();
  const double s = ctx.param("s").get<double>();
  const double C = ctx.param("C").get<double>();

  GapCover cover;
  if (kind == "ring") {
    RingOptions ropts;
    ropts.mode = ctx.mode == BuildMode::Strict ? CoverMode::Strict : CoverMode::Adaptive;
    if (ctx.has_param("D_cap")) ropts.D_override = ctx.param("D_cap").get<double>();
    cover = ring_cover(net, r, s, C, ropts);
  } else if (kind == "lambda") {
    const double lambda = ctx.param_or("lambda", 9.0).get<double>();
    LambdaGapOptions gopts;
    gopts.mode = ctx.mode == BuildMode::Strict ? CoverMode::Strict : CoverMode::Adaptive;
    if (ctx.has_param("D_cap")) gopts.D_cap = ctx.param("D_cap").get<double>();
    cover = lambda_gap_cover(net, r, s, C, lambda, gopts);
  } else {
    fail(ErrorCode::InvalidParams, "kind must be ring or lambda");
  }

  const auto audit = gap_cover_audit(net, cover);
  ctx.verdicts.add("gap_cover_valid_exact", !audit.has_value(), audit.value_or(""));
  const double diam = diameter(net);
  const double bound = C * std::pow(diam, s) / std::pow(r, s);
  ctx.verdicts.add("count_bound", static_cast<double>(cover.items.size()) <= bound + 1e-9,
                   "m = " + std::to_string(cover.items.size()) + " vs C d(E)^s r^-s = " +
                       std::to_string(bound));
  ctx.measured["count"] = cover.items.size();
  ctx.measured["D"] = cover.D;
  ctx.emit_json("cover.json", gap_cover_to_json(net, cover, ctx.verdicts.all_pass));
}

void run_embed(Ctx& ctx) {
  auto E = load_net(ctx, "E");
  auto F = load_net(ctx, "F");
  const double s = ctx.param("s").get<double>();
  const double t = ctx.param("t").get<double>();
  const int depth = ctx.param("depth").get<int>();
  double C_E = ctx.has_param("C_E") ? ctx.param("C_E").get<double>() : 0.0;
  double C_F = ctx.has_param("C_F") ? ctx.param("C_F").get<double>() : 0.0;
  if (C_E <= 0.0) C_E = measure_regularity(E, s).C_normalized;
  if (C_F <= 0.0) C_F = measure_regularity(F, t).C_normalized;

  EmbeddingOptions eopts;
  eopts.mode = ctx.mode;
  eopts.pair_budget = ctx.pair_budget;
  eopts.seed = ctx.seed;
  auto build = build_embedding(E, F, s, t, C_E, C_F, depth, eopts);

  bool partition_ok = true;
  for (int k = 0; k <= depth && partition_ok; ++k) {
    std::vector<char> seen(E.size(), 0);
    for (const auto& cell : build.cells.cells[static_cast<std::size_t>(k)])
      for (auto idx : cell) {
        if (seen[idx]) partition_ok = false;
        seen[idx] = 1;
      }
    for (char c : seen)
      if (!c) partition_ok = false;
  }
  ctx.verdicts.add("partition_exact", partition_ok);

  bool separation_ok = true;
  for (int k = 1; k <= depth && separation_ok; ++k) {
    const double dk = std::pow(build.d, k);
    const auto& level = build.e_hierarchy.levels[static_cast<std::size_t>(k)];
    const auto& cells = build.cells.cells[static_cast<std::size_t>(k)];
    for (std::uint32_t a = 0; a < level.size() && separation_ok; ++a)
      for (std::uint32_t b = a + 1; b < level.size() && separation_ok; ++b) {
        if (level[a].parent != level[b].parent) continue;
        for (auto ia : cells[a])
          for (auto ib : cells[b])
            if (E.distance(ia, ib) < dk) separation_ok = false;
      }
  }
  ctx.verdicts.add("sibling_separation_exact", separation_ok);

  ctx.verdicts.add("distortion_within_bound", build.corr.L_measured <= build.corr.L_bound * (1 + 1e-9),
                   "L = " + std::to_string(build.corr.L_measured) + " vs bound " +
                       std::to_string(build.corr.L_bound));
  ctx.verdicts.add("zero_insufficient_targets", true, "build completed at d = " + std::to_string(build.d));

  ctx.measured["d"] = build.d;
  ctx.measured["D"] = build.D;
  ctx.measured["L_bound"] = build.corr.L_bound;
  ctx.measured["L_measured"] = build.corr.L_measured;
  ctx.measured["C_E"] = C_E;
  ctx.measured["C_F"] = C_F;
  ctx.emit_json("correspondence.json", correspondence_to_json(build.corr));
  ctx.emit_json("hierarchy_E.json", hierarchy_to_json(build.e_hierarchy, E));
  ctx.emit_json("hierarchy_F.json", hierarchy_to_json(build.f_hierarchy, F));
}

void run_ambient_map(Ctx& ctx) {
  auto task = task_from_json(read_json_file(ctx.input("task")));
  auto map = build_slab_map(task, ctx.seed, ctx.draw_budget);
  const int n = task.dim();
  Rng rng(ctx.seed + 17);

  double worst_inner = 0.0;
  for (std::size_t i = 0; i < task.xs.size(); ++i) {
    for (int probe = 0; probe < 16; ++probe) {
      Point x = task.xs[i];
      Point dir = rng.unit_vector(n);
      const double rad = task.radii[i] * rng.uniform(0.0, 1.0);
      for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += rad * dir[static_cast<std::size_t>(k)];
      worst_inner = std::max(worst_inner, dist(map.eval(x), translate(x, task.xs[i], task.ys[i])));
    }
  }
  ctx.verdicts.add("inner_ball_translation_exact", worst_inner <= 1e-12,
                   "max deviation " + std::to_string(worst_inner));

  double worst_outer = 0.0;
  for (int probe = 0; probe < 64; ++probe) {
    Point x = task.p;
    Point dir = rng.unit_vector(n);
    const double rad = 2.0 * task.R * (1.0 + rng.uniform(0.01, 2.0));
    for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += rad * dir[static_cast<std::size_t>(k)];
    worst_outer = std::max(worst_outer, dist(map.eval(x), translate(x, task.p, task.q)));
  }
  ctx.verdicts.add("outer_translation_exact", worst_outer <= 1e-12,
                   "max deviation " + std::to_string(worst_outer));

  // Probe cloud distortion and collisions: an explicit probe file wins over
  // the default grid around B(p, 2R).
  std::vector<Point> before, after;
  if (ctx.config.contains("inputs") && ctx.config["inputs"].contains("probe")) {
    const Json pj = read_json_file(ctx.config["inputs"]["probe"].get<std::string>());
    const auto& pts = pj.contains("points") ? pj.at("points") : pj;
    for (const auto& row : pts) {
      Point x = row.get<Point>();
      require(static_cast<int>(x.size()) == n, ErrorCode::ParseError, "probe dimension mismatch");
      before.push_back(std::move(x));
    }
    require(!before.empty(), ErrorCode::ParseError, "probe file holds no points");
    for (const auto& x : before) after.push_back(map.eval(x));
  } else {
    const int per_axis = n == 1 ? 400 : (n == 2 ? 24 : 8);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      Point x(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k)
        x[static_cast<std::size_t>(k)] =
            task.p[static_cast<std::size_t>(k)] - 2.4 * task.R +
            4.8 * task.R * idx[static_cast<std::size_t>(k)] / (per_axis - 1);
      before.push_back(x);
      after.push_back(map.eval(x));
      int axis = n - 1;
      while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] >= per_axis) {
        idx[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  double L = 1.0, min_out = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < before.size(); ++a)
    for (std::size_t b = a + 1; b < before.size(); ++b) {
      const double din = dist(before[a], before[b]);
      const double dout = dist(after[a], after[b]);
      min_out = std::min(min_out, dout);
      if (din > 0.0 && dout > 0.0) L = std::max(L, std::max(dout / din, din / dout));
    }
  ctx.verdicts.add("no_probe_collisions", min_out > 0.0);
  ctx.verdicts.add("finite_distortion", std::isfinite(L), "L = " + std::to_string(L));
  ctx.measured["L_probe"] = L;
  ctx.measured["passes"] = map.passes.size();

  Json images = Json::array();
  for (std::size_t i = 0; i < before.size(); ++i) {
    Json row = Json::array();
    for (double c : before[i]) row.push_back(c);
    for (double c : after[i]) row.push_back(c);
    images.push_back(std::move(row));
  }
  Json report;
  report["schema"] = "regsets/ambient-map-v1";
  report["task"] = task_to_json(task);
  report["L_probe"] = L;
  ctx.emit_json("ambient_map.json", report);
  {
    std::ostringstream csv;
    for (int k = 0; k < n; ++k) csv << "x" << k << ",";
    for (int k = 0; k < n; ++k) csv << "fx" << k << (k + 1 < n ? "," : "\n");
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (double c : before[i]) csv << Json(c).dump() << ",";
      for (int k = 0; k < n; ++k)
        csv << Json(after[i][static_cast<std::size_t>(k)]).dump() << (k + 1 < n ? "," : "\n");
    }
    ctx.emit("images.csv", csv.str());
  }
  if (n == 2) ctx.emit("ambient_map.svg", probes_to_svg(before, after));
}

void run_ambient_embed(Ctx& ctx) {
  auto E = load_net(ctx, "E");
  auto F = load_net(ctx, "F");
  const double s = ctx.param("s").get<double>();
  const double t = ctx.param("t").get<double>();
  const double C = ctx.param_or("C", 2.0).get<double>();
  const int depth = ctx.param("depth").get<int>();

  AmbientOptions aopts;
  aopts.mode = ctx.mode;
  aopts.seed = ctx.seed;
  aopts.draw_budget = ctx.draw_budget;
  if (ctx.has_param("d_initial")) aopts.d_initial = ctx.param("d_initial").get<double>();
  auto emb = build_ambient_embedding(E, F, s, t, C, depth, aopts);

  Rng rng(ctx.seed + 29);
  bool exterior_ok = true;
  for (int probe = 0; probe < 200 && exterior_ok; ++probe) {
    Point x{0.0, 0.0};
    x.resize(static_cast<std::size_t>(E.dim()));
    for (auto& c : x) c = rng.uniform(-1.5, 1.5);
    for (std::size_t l = 1; l <= emb.stages.size(); ++l) {
      bool outside = true;
      for (const auto& node : emb.e_hierarchy.levels[l])
        if (dist(x, E.point(node.point)) <= 2.0 * node.rho) outside = false;
      if (outside && emb.eval(x, l) != emb.eval(x, emb.stages.size())) exterior_ok = false;
    }
  }
  ctx.verdicts.add("exterior_stability_exact", exterior_ok);

  const double reach = 2.0 * emb.D * std::pow(emb.d, emb.stages.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < E.size(); ++i) {
    const Point img = emb.eval(E.point_copy(i));
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < F.size(); ++j) nearest = std::min(nearest, dist(img, F.point(j)));
    worst = std::max(worst, nearest);
  }
  ctx.verdicts.add("images_within_2Ddk", worst <= reach * (1 + 1e-9),
                   "max gap " + std::to_string(worst) + " vs 2 D d^K = " + std::to_string(reach));

  // Stage-wise distortion on a probe cloud.
  std::vector<Point> probes;
  for (int i = 0; i < 300; ++i) {
    Point x(static_cast<std::size_t>(E.dim()));
    for (auto& c : x) c = rng.uniform(-1.2, 1.2);
    probes.push_back(x);
  }
  for (std::size_t i = 0; i < E.size(); ++i) probes.push_back(E.point_copy(i));
  auto measure = [&](auto&& fn) {
    double L = 1.0;
    for (std::size_t a = 0; a < probes.size(); ++a)
      for (std::size_t b = a + 1; b < probes.size(); ++b) {
        const double din = dist(probes[a], probes[b]);
        if (din <= 0.0) continue;
        const double dout = dist(fn(probes[a]), fn(probes[b]));
        if (dout <= 0.0) return std::numeric_limits<double>::infinity();
        L = std::max(L, std::max(dout / din, din / dout));
      }
    return L;
  };
  double max_stage = 1.0;
  for (std::size_t k = 0; k < emb.stages.size(); ++k) {
    const double Lk = measure([&](const Point& x) {
      Point z = x;
      for (const auto& map : emb.stages[k]) {
        if (dist(z, map.task.p) <= 2.0 * map.task.R) {
          z = map.eval(z);
          break;
        }
      }
      return z;
    });
    ctx.measured["stage_L_" + std::to_string(k + 1)] = Lk;
    max_stage = std::max(max_stage, Lk);
  }
  const double L_total = measure([&](const Point& x) { return emb.eval(x); });
  ctx.verdicts.add("distortion_stable", std::isfinite(L_total) && L_total <= 2.0 * max_stage,
                   "L_total = " + std::to_string(L_total) + " vs 2 max stage = " +
                       std::to_string(2.0 * max_stage));
  ctx.measured["L_total"] = L_total;
  ctx.measured["d"] = emb.d;
  ctx.measured["D"] = emb.D;

  Json stages = Json::array();
  for (const auto& stage : emb.stages) {
    Json sj = Json::array();
    for (const auto& map : stage) sj.push_back(task_to_json(map.task));
    stages.push_back(std::move(sj));
  }
  Json out;
  out["schema"] = "regsets/ambient-embed-v1";
  out["d"] = emb.d;
  out["D"] = emb.D;
  out["stages"] = std::move(stages);
  ctx.emit_json("stages.json", out);
  if (E.dim() == 2) {
    std::vector<Point> before, after;
    for (std::size_t i = 0; i < E.size(); ++i) {
      before.push_back(E.point_copy(i));
      after.push_back(emb.eval(E.point(i)));
    }
    ctx.emit("ambient_embed.svg", probes_to_svg(before, after));
  }
}

void run_superset(Ctx& ctx) {
  auto E = load_net(ctx, "E");
  auto X = load_net(ctx, "X");
  const double s = ctx.param("s").get<double>();
  const double t = ctx.param("t").get<double>();
  const double u = ctx.param("u").get<double>();
  const double C_E = ctx.param_or("C_E", 2.0).get<double>();
  const double C_X = ctx.param_or("C_X", 2.0).get<double>();
  const int depth = ctx.param("depth").get<int>();

  SupersetOptions sopts;
  sopts.mode = ctx.mode;
  sopts.node_budget = ctx.node_budget;
  if (ctx.has_param("d_initial")) sopts.d_initial = ctx.param("d_initial").get<double>();
  if (ctx.has_param("plant_depth")) sopts.plant_depth = ctx.param("plant_depth").get<int>();
  auto build = build_superset(E, X, s, t, u, C_E, C_X, depth, sopts);
  const auto& result = *build.result;

  bool contains = true;
  for (std::size_t e = 0; e < E.size(); ++e)
    if (dist(E.point(e), result.point(e)) != 0.0) contains = false;
  ctx.verdicts.add("contains_E_exact", contains);

  bool jp_ok = true;
  for (const auto& site : build.sites)
    if (!site.Jp_subset_J) jp_ok = false;
  ctx.verdicts.add("Jprime_subset_J", jp_ok);

  ctx.verdicts.add("doubled_ball_disjointness_exact", superset_disjointness_audit(X, build));

  if (depth >= 1) {
    const auto est = estimate_regularity(result, t, std::pow(build.d, depth), 1.0);
    ctx.measured["c_lower"] = est.c_lower;
    ctx.measured["C_upper"] = est.C_upper;
    ctx.verdicts.add("regular_at_t_finite", est.c_lower > 0.0 && std::isfinite(est.C_upper));
  } else {
    ctx.verdicts.skip("regular_at_t_finite", "no plants at depth 0");
  }

  ctx.measured["d"] = build.d;
  ctx.measured["sites"] = build.sites.size();
  ctx.measured["points"] = result.size();

  Json sites = Json::array();
  for (const auto& site : build.sites) {
    Json sj;
    sj["level"] = site.level;
    sj["y_center"] = site.y_center;
    sj["ball_radius"] = site.ball_radius;
    sj["J"] = site.J;
    sj["Jprime"] = site.Jp;
    sj["I"] = site.I;
    sj["plant_points"] = site.plant_points.size();
    sites.push_back(std::move(sj));
  }
  Json out;
  out["schema"] = "regsets/superset-v1";
  out["d"] = build.d;
  out["sites"] = std::move(sites);
  ctx.emit_json("superset.json", out);
  ctx.emit_json("superset_net.json", net_to_json(result));
}

void run_counterexample(Ctx& ctx) {
  const int depth = ctx.param("depth").get<int>();
  std::vector<double> lambdas = ctx.has_param("lambda_seq")
                                    ? ctx.param("lambda_seq").get<std::vector<double>>()
                                    : default_lambda_schedule(depth);
  std::vector<double> ts = ctx.has_param("t_seq") ? ctx.param("t_seq").get<std::vector<double>>()
                                                  : default_t_schedule(depth);
  auto family = build_counterexample(lambdas, ts, depth);

  double product = 1.0;
  for (int k = 0; k < depth; ++k) product *= ts[static_cast<std::size_t>(k)];
  const double total = family.total_fraction(depth).to_double();
  ctx.verdicts.add("total_length_exceeds_product", total > product - 1e-12,
                   "total " + std::to_string(total) + " vs product " + std::to_string(product));

  bool nesting_ok = true;
  if (family.explicit_complete && depth >= 2) {
    auto shallow = build_counterexample(lambdas, ts, depth - 1);
    if (shallow.explicit_complete) {
      for (const auto& iv : family.explicit_intervals) {
        bool inside = false;
        for (const auto& parent : shallow.explicit_intervals)
          if (iv.a >= parent.a - 1e-15 && iv.b <= parent.b + 1e-15) inside = true;
        if (!inside) nesting_ok = false;
      }
      ctx.verdicts.add("nesting_exact", nesting_ok);
    } else {
      ctx.verdicts.skip("nesting_exact", "explicit interval budget exceeded");
    }
  } else if (depth < 2) {
    ctx.verdicts.skip("nesting_exact", "needs depth >= 2");
  } else {
    ctx.verdicts.skip("nesting_exact", "explicit interval budget exceeded");
  }

  ctx.measured["total_length"] = total;
  ctx.measured["levels"] = depth;

  if (ctx.has_param("s") && ctx.has_param("C")) {
    const double s = ctx.param("s").get<double>();
    const double C = ctx.param("C").get<double>();
    const auto report = nonregularity_witness(family, s, C);
    ctx.measured["witness_status"] =
        report.status == WitnessStatus::EmptyRegularSubset ? "EmptyRegularSubset" : "Inconclusive";
    // The verdict checks internal consistency: the status must match the
    // schedule arithmetic.
    bool reachable = false;
    const double threshold = std::pow(C, -1.0 / s) / 4.0;
    for (int m = 0; m < depth; ++m)
      if (lambdas[static_cast<std::size_t>(m)] < threshold) reachable = true;
    const bool consistent = (report.status == WitnessStatus::EmptyRegularSubset) == reachable;
    ctx.verdicts.add("witness_consistent", consistent);
    ctx.emit_json("witness.json", witness_to_json(report));
  }

  ctx.emit_json("family.json", family_to_json(family));
  if (family.explicit_complete) ctx.emit("family.svg", family_to_svg(family));
}

void run_verify_regularity(Ctx& ctx) {
  auto net = load_net(ctx, "net");
  const double s = ctx.param("s").get<double>();
  const double diam = diameter(net);
  const double r_min = ctx.param_or("r_min", net.resolution()).get<double>();
  const double r_max = ctx.param_or("r_max", diam).get<double>();
  EstimateOptions opts;
  opts.centers_sample = ctx.param_or("centers_sample", 0).get<std::size_t>();
  opts.radii_per_decade = ctx.param_or("radii_per_decade", 16).get<int>();
  opts.positive_weight_centers_only = ctx.param_or("positive_weight_centers_only", true).get<bool>();

  const auto est = estimate_regularity(net, s, r_min, r_max, opts);
  ctx.measured["c_lower"] = est.c_lower;
  ctx.measured["C_upper"] = est.C_upper;
  ctx.measured["ratio"] = est.C_upper / est.c_lower;
  Json wit;
  wit["min_center"] = est.min_center;
  wit["min_radius"] = est.min_radius;
  wit["max_center"] = est.max_center;
  wit["max_radius"] = est.max_radius;
  ctx.verdicts.add("constants_finite_positive", est.c_lower > 0.0 && std::isfinite(est.C_upper), "",
                   wit);
  if (ctx.has_param("max_ratio")) {
    const double cap = ctx.param("max_ratio").get<double>();
    ctx.verdicts.add("ratio_within_cap", est.C_upper / est.c_lower <= cap,
                     "ratio " + std::to_string(est.C_upper / est.c_lower));
  }
  // Witness reproducibility: recomputing at the reported extremes matches.
  const double again_min =
      ball_query(net, est.min_center, est.min_radius).mass / std::pow(est.min_radius, s);
  const double again_max =
      ball_query(net, est.max_center, est.max_radius).mass / std::pow(est.max_radius, s);
  ctx.verdicts.add("witnesses_reproducible", again_min == est.c_lower && again_max == est.C_upper);
}

void run_distortion(Ctx& ctx) {
  const std::string map_kind = ctx.param_or("map", "identity").get<std::string>();
  std::vector<std::pair<Point, Point>> pairs;
  PointMap fn;
  if (map_kind == "identity" || map_kind == "scale") {
    auto net = load_net(ctx, "net");
    const double factor =
        map_kind == "scale" ? ctx.param_or("factor", 2.0).get<double>() : 1.0;
    fn = [factor](PointView x) {
      Point out(x.begin(), x.end());
      for (auto& c : out) c *= factor;
      return out;
    };
    for (std::size_t a = 0; a < net.size() && pairs.size() < ctx.pair_budget; ++a)
      for (std::size_t b = a + 1; b < net.size() && pairs.size() < ctx.pair_budget; ++b)
        if (net.distance(a, b) > 0.0) pairs.push_back({net.point_copy(a), net.point_copy(b)});
  } else if (map_kind == "correspondence") {
    const Json cj = read_json_file(ctx.input("corr"));
    require(cj.at("schema").get<std::string>() == "regsets/correspondence-v1", ErrorCode::ParseError,
            "unexpected correspondence schema");
    std::vector<Point> xs, fxs;
    for (const auto& entry : cj.at("graph")) {
      xs.push_back(entry.at("x").get<Point>());
      fxs.push_back(entry.at("fx").get<Point>());
    }
    fn = [xs, fxs](PointView x) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (dist(xs[i], x) <= 1e-12) return fxs[i];
      fail(ErrorCode::OutsideDomain, "point not in the correspondence graph");
    };
    for (std::size_t a = 0; a < xs.size() && pairs.size() < ctx.pair_budget; ++a)
      for (std::size_t b = a + 1; b < xs.size() && pairs.size() < ctx.pair_budget; ++b)
        if (dist(xs[a], xs[b]) > 0.0) pairs.push_back({xs[a], xs[b]});
  } else {
    fail(ErrorCode::InvalidParams, "map must be identity, scale or correspondence");
  }
  const double L = distortion(fn, pairs);
  ctx.measured["L"] = L;
  ctx.measured["pairs"] = pairs.size();
  ctx.verdicts.add("distortion_finite", std::isfinite(L), "L = " + std::to_string(L));
}

}  // namespace

RunResult run_pipeline(const Json& config) {
  Ctx ctx;
  ctx.config = config;
  Json report;
  report["schema"] = "regsets/report-v1";

  try {
    const std::string command = config.at("command").get<std::string>();
    report["command"] = command;
    report["config"] = config;
    ctx.seed = config.contains("seed") ? config["seed"].get<std::uint64_t>() : 1;
    const std::string mode_name =
        config.contains("mode") ? config["mode"].get<std::string>() : "adaptive";
    require(mode_name == "adaptive" || mode_name == "strict", ErrorCode::InvalidParams,
            "mode must be adaptive or strict");
    ctx.mode = mode_name == "strict" ? BuildMode::Strict : BuildMode::Adaptive;
    if (config.contains("budgets")) {
      const auto& b = config["budgets"];
      if (b.contains("nodes")) ctx.node_budget = b["nodes"].get<std::size_t>();
      if (b.contains("pairs")) ctx.pair_budget = b["pairs"].get<std::size_t>();
      if (b.contains("draws")) ctx.draw_budget = b["draws"].get<std::size_t>();
    }
    if (config.contains("out")) {
      ctx.out_dir = config["out"].get<std::string>();
      std::filesystem::create_directories(ctx.out_dir);
    }

    if (command == "gen-cantor") run_gen_cantor(ctx);
    else if (command == "pack") run_pack(ctx);
    else if (command == "gap") run_gap(ctx);
    else if (command == "embed") run_embed(ctx);
    else if (command == "ambient-map") run_ambient_map(ctx);
    else if (command == "ambient-embed") run_ambient_embed(ctx);
    else if (command == "superset") run_superset(ctx);
    else if (command == "counterexample") run_counterexample(ctx);
    else if (command == "verify-regularity") run_verify_regularity(ctx);
    else if (command == "distortion") run_distortion(ctx);
    else fail(ErrorCode::InvalidParams, "unknown command: " + command);
  } catch (const Error& e) {
    Json err;
    err["code"] = error_code_name(e.code());
    err["message"] = e.what();
    report["error"] = std::move(err);
    report["verdicts"] = ctx.verdicts.list;
    report["pass"] = false;
    return {std::move(report), false};
  } catch (const Json::exception& e) {
    Json err;
    err["code"] = error_code_name(ErrorCode::ParseError);
    err["message"] = e.what();
    report["error"] = std::move(err);
    report["pass"] = false;
    return {std::move(report), false};
  }

  report["measured"] = ctx.measured.is_null() ? Json::object() : ctx.measured;
  report["verdicts"] = ctx.verdicts.list;
  report["artifacts"] = ctx.artifacts;
  report["pass"] = ctx.verdicts.all_pass;

  if (!ctx.out_dir.empty()) write_text_file(ctx.out_dir + "/report.json", report.dump(2) + "\n");
  return {report, ctx.verdicts.all_pass};
}

}  // namespace regsets
