#include "regsets.h"

#include <cstring>
#include <new>
#include <string>

#include "regsets/cantor.hpp"
#include "regsets/net.hpp"
#include "regsets/pipeline.hpp"
#include "regsets/serialize.hpp"

struct rs_net {
  regsets::WeightedNet net;
};

namespace {

thread_local std::string g_last_error;

rs_status code_of(regsets::ErrorCode code) {
  using EC = regsets::ErrorCode;
  switch (code) {
    case EC::Ok: return RS_OK;
    case EC::EmptyNet: return RS_ERR_EMPTY_NET;
    case EC::InvalidRadius: return RS_ERR_INVALID_RADIUS;
    case EC::ScaleBelowResolution: return RS_ERR_SCALE_BELOW_RESOLUTION;
    case EC::CannotRescale: return RS_ERR_CANNOT_RESCALE;
    case EC::EmptyRegion: return RS_ERR_EMPTY_REGION;
    case EC::GapNotFound: return RS_ERR_GAP_NOT_FOUND;
    case EC::InvalidLambda: return RS_ERR_INVALID_LAMBDA;
    case EC::InvalidDimension: return RS_ERR_INVALID_DIMENSION;
    case EC::TooDeep: return RS_ERR_TOO_DEEP;
    case EC::BadAddress: return RS_ERR_BAD_ADDRESS;
    case EC::SpecMismatch: return RS_ERR_SPEC_MISMATCH;
    case EC::InsufficientChildren: return RS_ERR_INSUFFICIENT_CHILDREN;
    case EC::InsufficientTargets: return RS_ERR_INSUFFICIENT_TARGETS;
    case EC::OutsideDomain: return RS_ERR_OUTSIDE_DOMAIN;
    case EC::OutsideCell: return RS_ERR_OUTSIDE_CELL;
    case EC::DegeneratePair: return RS_ERR_DEGENERATE_PAIR;
    case EC::DirectionNotFound: return RS_ERR_DIRECTION_NOT_FOUND;
    case EC::SlabOverlap: return RS_ERR_SLAB_OVERLAP;
    case EC::PrecisionLoss: return RS_ERR_PRECISION_LOSS;
    case EC::NoVacantBall: return RS_ERR_NO_VACANT_BALL;
    case EC::InvalidParams: return RS_ERR_INVALID_PARAMS;
    case EC::InvalidSchedule: return RS_ERR_INVALID_SCHEDULE;
    case EC::BudgetExceeded: return RS_ERR_BUDGET_EXCEEDED;
    case EC::ParseError: return RS_ERR_PARSE;
    case EC::IoError: return RS_ERR_IO;
  }
  return RS_ERR_UNKNOWN;
}

template <typename Fn>
rs_status guarded(Fn&& fn) {
  try {
    fn();
    return RS_OK;
  } catch (const regsets::Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RS_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RS_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rs_version(void) { return "1.0.0"; }

const char* rs_status_name(rs_status status) {
  switch (status) {
    case RS_OK: return "Ok";
    case RS_ERR_EMPTY_NET: return "EmptyNet";
    case RS_ERR_INVALID_RADIUS: return "InvalidRadius";
    case RS_ERR_SCALE_BELOW_RESOLUTION: return "ScaleBelowResolution";
    case RS_ERR_CANNOT_RESCALE: return "CannotRescale";
    case RS_ERR_EMPTY_REGION: return "EmptyRegion";
    case RS_ERR_GAP_NOT_FOUND: return "GapNotFound";
    case RS_ERR_INVALID_LAMBDA: return "InvalidLambda";
    case RS_ERR_INVALID_DIMENSION: return "InvalidDimension";
    case RS_ERR_TOO_DEEP: return "TooDeep";
    case RS_ERR_BAD_ADDRESS: return "BadAddress";
    case RS_ERR_SPEC_MISMATCH: return "SpecMismatch";
    case RS_ERR_INSUFFICIENT_CHILDREN: return "InsufficientChildren";
    case RS_ERR_INSUFFICIENT_TARGETS: return "InsufficientTargets";
    case RS_ERR_OUTSIDE_DOMAIN: return "OutsideDomain";
    case RS_ERR_OUTSIDE_CELL: return "OutsideCell";
    case RS_ERR_DEGENERATE_PAIR: return "DegeneratePair";
    case RS_ERR_DIRECTION_NOT_FOUND: return "DirectionNotFound";
    case RS_ERR_SLAB_OVERLAP: return "SlabOverlap";
    case RS_ERR_PRECISION_LOSS: return "PrecisionLoss";
    case RS_ERR_NO_VACANT_BALL: return "NoVacantBall";
    case RS_ERR_INVALID_PARAMS: return "InvalidParams";
    case RS_ERR_INVALID_SCHEDULE: return "InvalidSchedule";
    case RS_ERR_BUDGET_EXCEEDED: return "BudgetExceeded";
    case RS_ERR_PARSE: return "ParseError";
    case RS_ERR_IO: return "IoError";
    case RS_ERR_UNKNOWN: return "Unknown";
  }
  return "Unknown";
}

const char* rs_last_error(void) { return g_last_error.c_str(); }

rs_status rs_net_create(int dim, const double* coords, const double* weights, size_t count,
                        double resolution, rs_net** out) {
  if (!coords || !weights || !out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    std::vector<double> c(coords, coords + count * static_cast<size_t>(dim));
    std::vector<double> w(weights, weights + count);
    *out = new rs_net{regsets::WeightedNet(dim, std::move(c), std::move(w), resolution)};
  });
}

rs_status rs_net_cantor(int n, double t, double a, int depth, rs_net** out) {
  if (!out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] { *out = new rs_net{regsets::cantor_net(n, t, a, depth)}; });
}

rs_status rs_net_load(const char* path, rs_net** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    *out = new rs_net{regsets::net_from_json(regsets::read_json_file(path))};
  });
}

rs_status rs_net_save(const rs_net* net, const char* path) {
  if (!net || !path) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    regsets::write_text_file(path, regsets::net_to_json(net->net).dump(2) + "\n");
  });
}

void rs_net_free(rs_net* net) { delete net; }

size_t rs_net_size(const rs_net* net) { return net ? net->net.size() : 0; }

int rs_net_dim(const rs_net* net) { return net ? net->net.dim() : 0; }

double rs_net_resolution(const rs_net* net) { return net ? net->net.resolution() : 0.0; }

rs_status rs_net_diameter(const rs_net* net, double* out) {
  if (!net || !out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] { *out = regsets::diameter(net->net); });
}

rs_status rs_net_ball_query(const rs_net* net, const double* center, double r,
                            size_t* index_buffer, size_t capacity, size_t* count_out,
                            double* mass_out) {
  if (!net || !center || !count_out || !mass_out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    regsets::PointView x(center, static_cast<size_t>(net->net.dim()));
    const auto res = regsets::ball_query(net->net, x, r);
    *count_out = res.indices.size();
    *mass_out = res.mass;
    if (index_buffer) {
      const size_t n = std::min(capacity, res.indices.size());
      for (size_t i = 0; i < n; ++i) index_buffer[i] = res.indices[i];
    }
  });
}

rs_status rs_net_estimate_regularity(const rs_net* net, double s, double r_min, double r_max,
                                     size_t centers_sample, int radii_per_decade, double* c_lower,
                                     double* C_upper) {
  if (!net || !c_lower || !C_upper) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    regsets::EstimateOptions opts;
    opts.centers_sample = centers_sample;
    if (radii_per_decade > 0) opts.radii_per_decade = radii_per_decade;
    const auto est = regsets::estimate_regularity(net->net, s, r_min, r_max, opts);
    *c_lower = est.c_lower;
    *C_upper = est.C_upper;
  });
}

rs_status rs_net_rescale_unit(const rs_net* net, double s, rs_net** out) {
  if (!net || !out) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] { *out = new rs_net{regsets::rescale_to_unit(net->net, s)}; });
}

rs_status rs_run(const char* config_json, char** report_json, int* all_passed) {
  if (!config_json || !report_json || !all_passed) {
    g_last_error = "null argument";
    return RS_ERR_INVALID_PARAMS;
  }
  return guarded([&] {
    regsets::Json config;
    try {
      config = regsets::Json::parse(config_json);
    } catch (const regsets::Json::exception& e) {
      regsets::fail(regsets::ErrorCode::ParseError, e.what());
    }
    const auto result = regsets::run_pipeline(config);
    *report_json = dup_string(result.report.dump(2) + "\n");
    *all_passed = result.pass ? 1 : 0;
  });
}

void rs_string_free(char* s) { delete[] s; }

}  // extern "C"
