// regset: command-line front end over the regsets C API. Subcommand flags
// assemble a JSON config, rs_run executes it, and the report's verdicts
// decide the exit status.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regsets.h"

namespace {

using Json = nlohmann::ordered_json;

struct CommonArgs {
  std::string mode = "adaptive";
  std::uint64_t seed = 1;
  std::string out;
  std::size_t budget_nodes = 0;
  std::size_t budget_pairs = 0;
  std::size_t budget_draws = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--mode", args.mode, "adaptive or strict")->check(CLI::IsMember({"adaptive", "strict"}));
  cmd->add_option("--seed", args.seed, "deterministic seed");
  cmd->add_option("--out", args.out, "artifact output directory");
  cmd->add_option("--budget-nodes", args.budget_nodes, "node budget for tree constructions");
  cmd->add_option("--budget-pairs", args.budget_pairs, "pair budget for distortion scans");
  cmd->add_option("--budget-draws", args.budget_draws, "rejection-sampling draw budget");
}

Json base_config(const std::string& command, const CommonArgs& args) {
  Json config;
  config["schema"] = "regsets/config-v1";
  config["command"] = command;
  config["mode"] = args.mode;
  config["seed"] = args.seed;
  Json budgets;
  if (args.budget_nodes > 0) budgets["nodes"] = args.budget_nodes;
  if (args.budget_pairs > 0) budgets["pairs"] = args.budget_pairs;
  if (args.budget_draws > 0) budgets["draws"] = args.budget_draws;
  if (!budgets.is_null()) config["budgets"] = budgets;
  if (!args.out.empty()) config["out"] = args.out;
  config["params"] = Json::object();
  config["inputs"] = Json::object();
  return config;
}

int execute(const Json& config) {
  char* report_cstr = nullptr;
  int all_passed = 0;
  const rs_status status = rs_run(config.dump().c_str(), &report_cstr, &all_passed);
  if (status != RS_OK) {
    std::fprintf(stderr, "error [%s]: %s\n", rs_status_name(status), rs_last_error());
    return 2;
  }
  Json report = Json::parse(report_cstr);
  rs_string_free(report_cstr);

  if (report.contains("error")) {
    std::fprintf(stderr, "error [%s]: %s\n",
                 report["error"]["code"].get<std::string>().c_str(),
                 report["error"]["message"].get<std::string>().c_str());
    return 2;
  }
  for (const auto& v : report["verdicts"]) {
    const std::string status_name = v["status"].get<std::string>();
    std::printf("%-7s %s", status_name.c_str(), v["name"].get<std::string>().c_str());
    if (v.contains("reason")) std::printf("  (%s)", v["reason"].get<std::string>().c_str());
    std::printf("\n");
  }
  if (report.contains("measured")) {
    for (const auto& [key, value] : report["measured"].items())
      std::printf("measured %s = %s\n", key.c_str(), value.dump().c_str());
  }
  if (report.contains("artifacts")) {
    for (const auto& a : report["artifacts"])
      std::printf("wrote %s\n", a.get<std::string>().c_str());
  }
  std::printf("%s\n", all_passed ? "PASS" : "FAIL");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regsets: constructive toolkit for Ahlfors-David regular sets"};
  app.require_subcommand(1);

  // gen-cantor
  CommonArgs gc_args;
  int gc_n = 1, gc_depth = 4;
  double gc_t = 0.5, gc_a = 1.0;
  auto* gc = app.add_subcommand("gen-cantor", "generate a Cantor net C(t, a) in R^n");
  gc->add_option("--n", gc_n, "ambient dimension")->required();
  gc->add_option("--t", gc_t, "target dimension t in (0, n)")->required();
  gc->add_option("--a", gc_a, "root side length");
  gc->add_option("--depth", gc_depth, "construction depth")->required();
  add_common(gc, gc_args);

  // pack
  CommonArgs pk_args;
  std::string pk_net;
  double pk_r = 0.0, pk_R = 0.0, pk_s = 0.0, pk_C = 0.0;
  std::vector<double> pk_p;
  bool pk_unrestricted = false;
  auto* pk = app.add_subcommand("pack", "greedy 5r-covering packing");
  pk->add_option("--net", pk_net, "net descriptor JSON")->required();
  pk->add_option("--r", pk_r, "packing radius")->required();
  pk->add_option("--R", pk_R, "query ball radius")->required();
  pk->add_option("--p", pk_p, "query center coordinates (default: first net point)");
  pk->add_flag("--unrestricted", pk_unrestricted, "pack the whole net, not E cap B(p, R)");
  pk->add_option("--s", pk_s, "exponent for the count-bound check");
  pk->add_option("--C", pk_C, "regularity constant for the count-bound check");
  add_common(pk, pk_args);

  // gap
  CommonArgs gp_args;
  std::string gp_net, gp_kind = "ring";
  double gp_r = 0.0, gp_s = 0.5, gp_C = 1.0, gp_lambda = 9.0, gp_dcap = 0.0;
  auto* gp = app.add_subcommand("gap", "annulus gap covers (ring or lambda mode)");
  gp->add_option("--net", gp_net, "net descriptor JSON")->required();
  gp->add_option("--kind", gp_kind, "ring or lambda")->check(CLI::IsMember({"ring", "lambda"}));
  gp->add_option("--r", gp_r, "base radius")->required();
  gp->add_option("--s", gp_s, "exponent")->required();
  gp->add_option("--C", gp_C, "regularity constant")->required();
  gp->add_option("--lambda", gp_lambda, "geometric ratio (lambda mode)");
  gp->add_option("--D-cap", gp_dcap, "multiplier cap override");
  add_common(gp, gp_args);

  // embed
  CommonArgs em_args;
  std::string em_E, em_F;
  double em_s = 0.0, em_t = 0.0, em_CE = 0.0, em_CF = 0.0;
  int em_depth = 2;
  auto* em = app.add_subcommand("embed", "bilipschitz embedding of E into F");
  em->add_option("--source", em_E, "source net E (diameter 1)")->required();
  em->add_option("--target", em_F, "target net F (diameter 1)")->required();
  em->add_option("--s", em_s, "source exponent, 0 < s < 1")->required();
  em->add_option("--t", em_t, "target exponent, s < t")->required();
  em->add_option("--C-E", em_CE, "source regularity constant (default: measured)");
  em->add_option("--C-F", em_CF, "target regularity constant (default: measured)");
  em->add_option("--depth", em_depth, "levels to build")->required();
  add_common(em, em_args);

  // ambient-map
  CommonArgs am_args;
  std::string am_task, am_probe;
  auto* am = app.add_subcommand("ambient-map", "global ball-translation map from a task file");
  am->add_option("--task", am_task, "ball translation task JSON")->required();
  am->add_option("--probe", am_probe, "probe point cloud JSON (default: grid around B(p, 2R))");
  add_common(am, am_args);

  // ambient-embed
  CommonArgs ae_args;
  std::string ae_E, ae_F;
  double ae_s = 0.0, ae_t = 0.0, ae_C = 2.0, ae_d0 = 0.0;
  int ae_depth = 2;
  auto* ae = app.add_subcommand("ambient-embed", "global bilipschitz map with f(E) near F");
  ae->add_option("--E", ae_E, "net E (in B(0,1), diameter 1/2)")->required();
  ae->add_option("--F", ae_F, "net F (in B(0,1), diameter 1/2)")->required();
  ae->add_option("--s", ae_s, "source exponent")->required();
  ae->add_option("--t", ae_t, "target exponent")->required();
  ae->add_option("--C", ae_C, "regularity constant bound");
  ae->add_option("--depth", ae_depth, "stages to compose")->required();
  ae->add_option("--d-initial", ae_d0, "adaptive grid start for the level ratio");
  add_common(ae, ae_args);

  // superset
  CommonArgs su_args;
  std::string su_E, su_X;
  double su_s = 0.0, su_t = 0.0, su_u = 0.0, su_d0 = 0.0;
  int su_depth = 2, su_plant = 0;
  auto* su = app.add_subcommand("superset", "t-regular superset of E inside X");
  su->add_option("--E", su_E, "net E (subset of X, diameter 1)")->required();
  su->add_option("--X", su_X, "ambient net X")->required();
  su->add_option("--s", su_s, "exponent of E")->required();
  su->add_option("--t", su_t, "target exponent, s < t < u")->required();
  su->add_option("--u", su_u, "exponent of X")->required();
  su->add_option("--depth", su_depth, "levels to build")->required();
  su->add_option("--d-initial", su_d0, "adaptive grid start for the level ratio");
  su->add_option("--plant-depth", su_plant, "depth of each planted regular piece");
  add_common(su, su_args);

  // counterexample
  CommonArgs ce_args;
  int ce_depth = 4;
  double ce_s = 0.0, ce_C = 0.0;
  auto* ce = app.add_subcommand("counterexample",
                                "positive-measure set with no regular subsets");
  ce->add_option("--depth", ce_depth, "family depth")->required();
  ce->add_option("--s", ce_s, "witness exponent");
  ce->add_option("--C", ce_C, "witness constant");
  add_common(ce, ce_args);

  // verify-regularity
  CommonArgs vr_args;
  std::string vr_net;
  double vr_s = 0.0, vr_rmin = 0.0, vr_rmax = 0.0, vr_ratio = 0.0;
  auto* vr = app.add_subcommand("verify-regularity", "empirical regularity constants of a net");
  vr->add_option("--net", vr_net, "net descriptor JSON")->required();
  vr->add_option("--s", vr_s, "exponent")->required();
  vr->add_option("--r-min", vr_rmin, "window lower end (default: resolution)");
  vr->add_option("--r-max", vr_rmax, "window upper end (default: diameter)");
  vr->add_option("--max-ratio", vr_ratio, "fail when C_upper/c_lower exceeds this");
  add_common(vr, vr_args);

  // distortion
  CommonArgs di_args;
  std::string di_net, di_corr, di_map = "identity";
  double di_factor = 2.0;
  auto* di = app.add_subcommand("distortion", "two-sided distortion of a point map");
  di->add_option("--net", di_net, "net supplying the pairs (identity/scale maps)");
  di->add_option("--map", di_map, "identity, scale or correspondence")
      ->check(CLI::IsMember({"identity", "scale", "correspondence"}));
  di->add_option("--factor", di_factor, "scale factor for map=scale");
  di->add_option("--corr", di_corr, "correspondence JSON for map=correspondence");
  add_common(di, di_args);

  CLI11_PARSE(app, argc, argv);

  if (gc->parsed()) {
    Json config = base_config("gen-cantor", gc_args);
    config["params"]["n"] = gc_n;
    config["params"]["t"] = gc_t;
    config["params"]["a"] = gc_a;
    config["params"]["depth"] = gc_depth;
    return execute(config);
  }
  if (pk->parsed()) {
    Json config = base_config("pack", pk_args);
    config["inputs"]["net"] = pk_net;
    config["params"]["r"] = pk_r;
    config["params"]["R"] = pk_R;
    if (!pk_p.empty()) config["params"]["p"] = pk_p;
    config["params"]["restrict"] = !pk_unrestricted;
    if (pk_s > 0.0) config["params"]["s"] = pk_s;
    if (pk_C > 0.0) config["params"]["C"] = pk_C;
    return execute(config);
  }
  if (gp->parsed()) {
    Json config = base_config("gap", gp_args);
    config["inputs"]["net"] = gp_net;
    config["params"]["kind"] = gp_kind;
    config["params"]["r"] = gp_r;
    config["params"]["s"] = gp_s;
    config["params"]["C"] = gp_C;
    config["params"]["lambda"] = gp_lambda;
    if (gp_dcap > 0.0) config["params"]["D_cap"] = gp_dcap;
    return execute(config);
  }
  if (em->parsed()) {
    Json config = base_config("embed", em_args);
    config["inputs"]["E"] = em_E;
    config["inputs"]["F"] = em_F;
    config["params"]["s"] = em_s;
    config["params"]["t"] = em_t;
    if (em_CE > 0.0) config["params"]["C_E"] = em_CE;
    if (em_CF > 0.0) config["params"]["C_F"] = em_CF;
    config["params"]["depth"] = em_depth;
    return execute(config);
  }
  if (am->parsed()) {
    Json config = base_config("ambient-map", am_args);
    config["inputs"]["task"] = am_task;
    if (!am_probe.empty()) config["inputs"]["probe"] = am_probe;
    return execute(config);
  }
  if (ae->parsed()) {
    Json config = base_config("ambient-embed", ae_args);
    config["inputs"]["E"] = ae_E;
    config["inputs"]["F"] = ae_F;
    config["params"]["s"] = ae_s;
    config["params"]["t"] = ae_t;
    config["params"]["C"] = ae_C;
    config["params"]["depth"] = ae_depth;
    if (ae_d0 > 0.0) config["params"]["d_initial"] = ae_d0;
    return execute(config);
  }
  if (su->parsed()) {
    Json config = base_config("superset", su_args);
    config["inputs"]["E"] = su_E;
    config["inputs"]["X"] = su_X;
    config["params"]["s"] = su_s;
    config["params"]["t"] = su_t;
    config["params"]["u"] = su_u;
    config["params"]["depth"] = su_depth;
    if (su_d0 > 0.0) config["params"]["d_initial"] = su_d0;
    if (su_plant > 0) config["params"]["plant_depth"] = su_plant;
    return execute(config);
  }
  if (ce->parsed()) {
    Json config = base_config("counterexample", ce_args);
    config["params"]["depth"] = ce_depth;
    if (ce_s > 0.0) config["params"]["s"] = ce_s;
    if (ce_C > 0.0) config["params"]["C"] = ce_C;
    return execute(config);
  }
  if (vr->parsed()) {
    Json config = base_config("verify-regularity", vr_args);
    config["inputs"]["net"] = vr_net;
    config["params"]["s"] = vr_s;
    if (vr_rmin > 0.0) config["params"]["r_min"] = vr_rmin;
    if (vr_rmax > 0.0) config["params"]["r_max"] = vr_rmax;
    if (vr_ratio > 0.0) config["params"]["max_ratio"] = vr_ratio;
    return execute(config);
  }
  if (di->parsed()) {
    Json config = base_config("distortion", di_args);
    if (!di_net.empty()) config["inputs"]["net"] = di_net;
    if (!di_corr.empty()) config["inputs"]["corr"] = di_corr;
    config["params"]["map"] = di_map;
    config["params"]["factor"] = di_factor;
    return execute(config);
  }
  return 2;
}
