#include "regsets/serialize.hpp"

#include <fstream>
#include <sstream>

namespace regsets {

Json net_to_json(const WeightedNet& net) {
  require(net.euclidean(), ErrorCode::InvalidParams, "oracle nets have no file form");
  Json j;
  j["schema"] = "regsets/net-v1";
  j["dim"] = net.dim();
  Json points = Json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    Json p = Json::array();
    for (double c : net.point(i)) p.push_back(c);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  j["weights"] = net.weights();
  j["resolution"] = net.resolution();
  j["metric"] = "euclidean";
  return j;
}

WeightedNet net_from_json(const Json& j) {
  try {
    require(j.at("schema").get<std::string>() == "regsets/net-v1", ErrorCode::ParseError,
            "unexpected net schema");
    require(j.at("metric").get<std::string>() == "euclidean", ErrorCode::ParseError,
            "only euclidean nets have a file form");
    const int dim = j.at("dim").get<int>();
    const auto& points = j.at("points");
    std::vector<double> coords;
    coords.reserve(points.size() * static_cast<std::size_t>(dim));
    for (const auto& p : points) {
      require(static_cast<int>(p.size()) == dim, ErrorCode::ParseError, "point dimension mismatch");
      for (const auto& c : p) coords.push_back(c.get<double>());
    }
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    const double resolution = j.at("resolution").get<double>();
    return WeightedNet(dim, std::move(coords), std::move(weights), resolution);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("net descriptor: ") + e.what());
  }
}

std::string net_to_csv(const WeightedNet& net) {
  require(net.euclidean(), ErrorCode::InvalidParams, "oracle nets have no file form");
  std::ostringstream out;
  for (int k = 0; k < net.dim(); ++k) out << "x" << k << ",";
  out << "weight\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (double c : net.point(i)) {
      out << Json(c).dump() << ",";
    }
    out << Json(net.weight(i)).dump() << "\n";
  }
  return out.str();
}

namespace {

Json node_to_json(const BallHierarchy& h, const WeightedNet& net, int level, std::uint32_t slot) {
  const auto& node = h.levels[static_cast<std::size_t>(level)][slot];
  Json j;
  Json word = Json::array();
  for (auto sym : h.word_of(level, slot)) word.push_back(sym);
  j["word"] = std::move(word);
  Json center = Json::array();
  for (double c : net.point(node.point)) center.push_back(c);
  j["center"] = std::move(center);
  j["rho"] = node.rho;
  Json children = Json::array();
  for (std::uint32_t i = 0; i < node.child_count; ++i)
    children.push_back(node_to_json(h, net, level + 1, node.first_child + i));
  j["children"] = std::move(children);
  return j;
}

Json point_to_json(PointView p) {
  Json out = Json::array();
  for (double c : p) out.push_back(c);
  return out;
}

}  // namespace

Json hierarchy_to_json(const BallHierarchy& h, const WeightedNet& net) {
  Json j;
  j["schema"] = "regsets/hierarchy-v1";
  j["d"] = h.d;
  j["scale"] = h.scale;
  j["depth"] = h.depth();
  j["tree"] = node_to_json(h, net, 0, 0);
  return j;
}

Json correspondence_to_json(const Correspondence& corr) {
  Json j;
  j["schema"] = "regsets/correspondence-v1";
  j["L_bound"] = corr.L_bound;
  j["L_measured"] = corr.L_measured;
  j["cell_based"] = corr.cell_based;
  const int K = corr.source.depth();
  Json graph = Json::array();
  const auto& leaves = corr.source.levels.back();
  for (std::uint32_t slot = 0; slot < leaves.size(); ++slot) {
    Json entry;
    entry["x"] = point_to_json(corr.source_net->point(leaves[slot].point));
    const Point image = evaluate_correspondence(
        corr, corr.source_net->point(leaves[slot].point), K);
    entry["fx"] = point_to_json(image);
    graph.push_back(std::move(entry));
  }
  j["graph"] = std::move(graph);
  return j;
}

Json packing_to_json(const WeightedNet& net, const Packing& packing, bool verified) {
  Json j;
  j["schema"] = "regsets/packing-v1";
  j["r"] = packing.r;
  j["cover_radius"] = packing.cover_radius;
  Json centers = Json::array();
  Json coords = Json::array();
  for (auto c : packing.centers) {
    centers.push_back(c);
    coords.push_back(point_to_json(net.point(c)));
  }
  j["centers"] = std::move(centers);
  j["center_points"] = std::move(coords);
  j["count"] = packing.centers.size();
  j["verified"] = verified;
  return j;
}

Json gap_cover_to_json(const WeightedNet& net, const GapCover& cover, bool verified) {
  Json j;
  j["schema"] = "regsets/gap-cover-v1";
  j["r"] = cover.r;
  j["D"] = cover.D;
  j["mode"] = cover.mode == GapMode::Linear ? "linear" : "geometric";
  if (cover.mode == GapMode::Geometric) j["lambda"] = cover.lambda;
  Json centers = Json::array(), radii = Json::array(), coords = Json::array();
  for (const auto& item : cover.items) {
    centers.push_back(item.center);
    radii.push_back(item.rho);
    coords.push_back(point_to_json(net.point(item.center)));
  }
  j["centers"] = std::move(centers);
  j["radii"] = std::move(radii);
  j["center_points"] = std::move(coords);
  j["verified"] = verified;
  return j;
}

Json task_to_json(const BallTranslationTask& task) {
  Json j;
  j["schema"] = "regsets/ball-task-v1";
  j["p"] = point_to_json(task.p);
  j["q"] = point_to_json(task.q);
  j["R"] = task.R;
  j["delta"] = task.delta;
  Json balls = Json::array();
  for (std::size_t i = 0; i < task.xs.size(); ++i) {
    Json b;
    b["x"] = point_to_json(task.xs[i]);
    b["y"] = point_to_json(task.ys[i]);
    b["r"] = task.radii[i];
    balls.push_back(std::move(b));
  }
  j["balls"] = std::move(balls);
  return j;
}

BallTranslationTask task_from_json(const Json& j) {
  try {
    require(j.at("schema").get<std::string>() == "regsets/ball-task-v1", ErrorCode::ParseError,
            "unexpected task schema");
    BallTranslationTask task;
    task.p = j.at("p").get<Point>();
    task.q = j.at("q").get<Point>();
    task.R = j.at("R").get<double>();
    task.delta = j.at("delta").get<double>();
    for (const auto& b : j.at("balls")) {
      task.xs.push_back(b.at("x").get<Point>());
      task.ys.push_back(b.at("y").get<Point>());
      task.radii.push_back(b.at("r").get<double>());
    }
    task.validate();
    return task;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("ball task: ") + e.what());
  }
}

Json family_to_json(const IntervalFamily& family) {
  Json j;
  j["schema"] = "regsets/interval-family-v1";
  j["a"] = family.a;
  j["b"] = family.b;
  Json levels = Json::array();
  for (const auto& level : family.levels) {
    Json l;
    l["lambda"] = level.lambda;
    l["t"] = level.t_target;
    l["sublevels"] = level.sublevels;
    l["total_num"] = level.total.num.to_string();
    l["total_den"] = level.total.den.to_string();
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["explicit_complete"] = family.explicit_complete;
  Json intervals = Json::array();
  for (const auto& iv : family.explicit_intervals) {
    Json e = Json::array();
    e.push_back(iv.a);
    e.push_back(iv.b);
    intervals.push_back(std::move(e));
  }
  j["intervals"] = std::move(intervals);
  if (!family.levels.empty()) {
    const auto total = family.total_fraction(family.depth());
    j["total_length_num"] = total.num.to_string();
    j["total_length_den"] = total.den.to_string();
    j["total_length"] = total.to_double();
  }
  return j;
}

Json witness_to_json(const WitnessReport& report) {
  Json j;
  j["schema"] = "regsets/witness-v1";
  j["status"] = report.status == WitnessStatus::EmptyRegularSubset ? "EmptyRegularSubset"
                                                                   : "Inconclusive";
  j["level"] = report.level;
  j["lambda_m"] = report.lambda_m;
  j["threshold"] = report.threshold;
  j["classes"] = report.classes;
  j["grading_verified"] = report.grading_verified;
  j["message"] = report.message;
  return j;
}

namespace {

struct SvgFrame {
  double min_x = 0.0, min_y = 0.0, span = 1.0;
  double sx(double x) const { return (x - min_x) / span * 940.0 + 30.0; }
  double sy(double y) const { return 970.0 - (y - min_y) / span * 940.0; }
};

}  // namespace

std::string net_to_svg(const WeightedNet& net) {
  require(net.euclidean() && net.dim() <= 2, ErrorCode::InvalidDimension,
          "SVG rendering supports dim <= 2");
  SvgFrame fr;
  fr.min_x = fr.min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity(), max_y = max_x;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net.point(i);
    fr.min_x = std::min(fr.min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    const double y = net.dim() == 2 ? p[1] : 0.0;
    fr.min_y = std::min(fr.min_y, y);
    max_y = std::max(max_y, y);
  }
  fr.span = std::max({max_x - fr.min_x, max_y - fr.min_y, 1e-12});
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
         "viewBox=\"0 0 1000 1000\">\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net.point(i);
    const double y = net.dim() == 2 ? p[1] : 0.0;
    out << "<circle cx=\"" << fr.sx(p[0]) << "\" cy=\"" << fr.sy(y)
        << "\" r=\"1.5\" fill=\"#1f3b70\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string family_to_svg(const IntervalFamily& family) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"160\" "
         "viewBox=\"0 0 1000 160\">\n";
  out << "<rect x=\"30\" y=\"60\" width=\"940\" height=\"40\" fill=\"#eeeeee\"/>\n";
  for (const auto& iv : family.explicit_intervals) {
    const double x = 30.0 + (iv.a - family.a) / (family.b - family.a) * 940.0;
    const double w = (iv.b - iv.a) / (family.b - family.a) * 940.0;
    out << "<rect x=\"" << x << "\" y=\"60\" width=\"" << std::max(w, 0.25)
        << "\" height=\"40\" fill=\"#1f3b70\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string probes_to_svg(const std::vector<Point>& before, const std::vector<Point>& after) {
  require(before.size() == after.size(), ErrorCode::InvalidParams, "probe lists must pair up");
  SvgFrame fr;
  fr.min_x = fr.min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity(), max_y = max_x;
  auto feed = [&](const Point& p) {
    fr.min_x = std::min(fr.min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    const double y = p.size() > 1 ? p[1] : 0.0;
    fr.min_y = std::min(fr.min_y, y);
    max_y = std::max(max_y, y);
  };
  for (const auto& p : before) feed(p);
  for (const auto& p : after) feed(p);
  fr.span = std::max({max_x - fr.min_x, max_y - fr.min_y, 1e-12});
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
         "viewBox=\"0 0 1000 1000\">\n";
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double by = before[i].size() > 1 ? before[i][1] : 0.0;
    const double ay = after[i].size() > 1 ? after[i][1] : 0.0;
    out << "<circle cx=\"" << fr.sx(before[i][0]) << "\" cy=\"" << fr.sy(by)
        << "\" r=\"1.2\" fill=\"#888888\"/>\n";
    out << "<circle cx=\"" << fr.sx(after[i][0]) << "\" cy=\"" << fr.sy(ay)
        << "\" r=\"1.2\" fill=\"#b03030\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open for writing: " + path);
  out << content;
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace regsets
