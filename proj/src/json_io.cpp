#include "fovsplit/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fovsplit::io {

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const json& j, const std::string& where, int expected = -1) {
  if (!j.is_array()) throw std::invalid_argument(where + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(where + ": expected numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  if (expected >= 0 && v.size() != expected)
    throw std::invalid_argument(where + ": expected " + std::to_string(expected) + " entries");
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Eigen::MatrixXd mat_from_json(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n * n)
    throw std::invalid_argument(where + ": expected " + std::to_string(n * n) +
                                " row-major entries");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = j[r * n + c].get<double>();
  return m;
}

double num_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(where + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

}  // namespace

json to_json(const GaussianMixture& gm) {
  json j;
  j["dim"] = gm.dim;
  j["position_dim"] = gm.position_dim;
  j["components"] = json::array();
  for (const auto& c : gm.components) {
    json jc;
    jc["w"] = c.weight;
    jc["m"] = vec_to_json(c.mean);
    jc["P"] = mat_to_json(c.cov);
    j["components"].push_back(std::move(jc));
  }
  return j;
}

GaussianMixture gm_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("gm: expected an object");
  GaussianMixture gm;
  gm.dim = static_cast<int>(num_field(j, "dim", "gm"));
  gm.position_dim = static_cast<int>(num_field(j, "position_dim", "gm"));
  if (!j.contains("components") || !j["components"].is_array())
    throw std::invalid_argument("gm: missing 'components' array");
  for (const auto& jc : j["components"]) {
    GaussianComponent c;
    c.weight = num_field(jc, "w", "gm.components");
    c.mean = vec_from_json(jc.contains("m") ? jc["m"] : json(), "gm.components.m", gm.dim);
    c.cov = mat_from_json(jc.contains("P") ? jc["P"] : json(), gm.dim, "gm.components.P");
    gm.components.push_back(std::move(c));
  }
  gm.normalized = std::abs(gm.total_weight() - 1.0) <= 1e-9;
  validate(gm);
  return gm;
}

json to_json(const Region& r) {
  return std::visit(
      [](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        json j;
        if constexpr (std::is_same_v<T, Box>) {
          j["type"] = "box";
          j["lo"] = vec_to_json(node.lo);
          j["hi"] = vec_to_json(node.hi);
        } else if constexpr (std::is_same_v<T, Disc>) {
          j["type"] = "disc";
          j["center"] = vec_to_json(node.center);
          j["radius"] = node.radius;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          j["type"] = "polygon";
          j["vertices"] = json::array();
          for (const auto& v : node.vertices) j["vertices"].push_back({v.x(), v.y()});
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          j["type"] = "halfspace";
          j["normal"] = vec_to_json(node.normal);
          j["offset"] = node.offset;
        } else if constexpr (std::is_same_v<T, RegionUnion>) {
          j["type"] = "union";
          j["regions"] = json::array();
          for (const auto& child : node.regions) j["regions"].push_back(to_json(child));
        } else if constexpr (std::is_same_v<T, RegionIntersection>) {
          j["type"] = "intersection";
          j["regions"] = json::array();
          for (const auto& child : node.regions) j["regions"].push_back(to_json(child));
        } else {
          j["type"] = "complement";
          j["region"] = to_json(node.region.front());
        }
        return j;
      },
      r.node);
}

Region region_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw std::invalid_argument("region: missing 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "box") {
    return make_box(vec_from_json(j.contains("lo") ? j["lo"] : json(), "region.lo"),
                    vec_from_json(j.contains("hi") ? j["hi"] : json(), "region.hi"));
  }
  if (type == "disc") {
    return make_disc(vec_from_json(j.contains("center") ? j["center"] : json(), "region.center"),
                     num_field(j, "radius", "region"));
  }
  if (type == "polygon") {
    if (!j.contains("vertices") || !j["vertices"].is_array())
      throw std::invalid_argument("region.vertices: expected an array");
    std::vector<Eigen::Vector2d> verts;
    for (const auto& jv : j["vertices"]) {
      Eigen::VectorXd v = vec_from_json(jv, "region.vertices", 2);
      verts.emplace_back(v(0), v(1));
    }
    return make_polygon(std::move(verts));
  }
  if (type == "halfspace") {
    return make_halfspace(
        vec_from_json(j.contains("normal") ? j["normal"] : json(), "region.normal"),
        num_field(j, "offset", "region"));
  }
  if (type == "union" || type == "intersection") {
    if (!j.contains("regions") || !j["regions"].is_array())
      throw std::invalid_argument("region.regions: expected an array");
    std::vector<Region> children;
    for (const auto& jc : j["regions"]) children.push_back(region_from_json(jc));
    return type == "union" ? make_union(std::move(children))
                           : make_intersection(std::move(children));
  }
  if (type == "complement") {
    if (!j.contains("region")) throw std::invalid_argument("region.region: missing child");
    return make_complement(region_from_json(j["region"]));
  }
  throw std::invalid_argument("region: unknown type '" + type + "'");
}

json to_json(const SplitParams& p) {
  json j;
  j["weights"] = vec_to_json(p.weights);
  j["means"] = vec_to_json(p.means);
  j["sigma"] = p.sigma;
  return j;
}

SplitParams split_params_from_json(const json& j) {
  SplitParams p;
  p.weights = vec_from_json(j.contains("weights") ? j["weights"] : json(), "split.weights");
  p.means = vec_from_json(j.contains("means") ? j["means"] : json(), "split.means");
  p.sigma = num_field(j, "sigma", "split");
  validate(p);
  return p;
}

json library_to_json(const SplitLibrary& lib) {
  json entries = json::object();
  for (const auto& [key, entry] : lib.entries()) {
    json je = to_json(entry.params);
    je["cost"] = entry.cost;
    entries[key] = std::move(je);
  }
  json j;
  j["entries"] = std::move(entries);
  return j;
}

void library_merge_from_json(SplitLibrary& lib, const json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_object())
    throw std::invalid_argument("library: missing 'entries' object");
  for (const auto& [key, je] : j["entries"].items()) {
    const auto colon = key.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("library: malformed key '" + key + "'");
    int R = std::stoi(key.substr(0, colon));
    double lambda = std::stod(key.substr(colon + 1));
    SplitLibrary::Entry entry;
    entry.params = split_params_from_json(je);
    entry.cost = num_field(je, "cost", "library.entry");
    lib.insert(R, lambda, std::move(entry));
  }
}

json to_json(const SplitConfig& cfg) {
  json j;
  j["w_min"] = cfg.w_min;
  j["R"] = cfg.R;
  j["lambda"] = cfg.lambda;
  j["zeta"] = cfg.grid.zeta;
  j["n_g"] = cfg.grid.n_g;
  j["max_depth"] = cfg.max_depth;
  return j;
}

SplitConfig split_config_from_json(const json& j, SplitConfig base) {
  if (!j.is_object()) throw std::invalid_argument("split config: expected an object");
  if (j.contains("w_min")) base.w_min = num_field(j, "w_min", "split config");
  if (j.contains("R")) base.R = static_cast<int>(num_field(j, "R", "split config"));
  if (j.contains("lambda")) base.lambda = num_field(j, "lambda", "split config");
  if (j.contains("zeta")) base.grid.zeta = num_field(j, "zeta", "split config");
  if (j.contains("n_g")) base.grid.n_g = static_cast<int>(num_field(j, "n_g", "split config"));
  if (j.contains("max_depth"))
    base.max_depth = static_cast<int>(num_field(j, "max_depth", "split config"));
  validate(base);
  return base;
}

json to_json(const PoissonIntensity& d) {
  json j;
  j["phd"] = to_json(d.phd);
  return j;
}

PoissonIntensity poisson_from_json(const json& j) {
  if (!j.is_object() || !j.contains("phd"))
    throw std::invalid_argument("poisson: missing 'phd'");
  PoissonIntensity d;
  d.phd = gm_from_json(j["phd"]);
  validate(d);
  return d;
}

json to_json(const MbComponents& mb) {
  json arr = json::array();
  for (int i = 0; i < mb.size(); ++i) {
    json jc;
    jc["r"] = mb.r[i];
    jc["density"] = to_json(mb.densities[i]);
    arr.push_back(std::move(jc));
  }
  json j;
  j["components"] = std::move(arr);
  return j;
}

MbComponents mb_from_json(const json& j) {
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
    throw std::invalid_argument("mb: missing 'components' array");
  MbComponents mb;
  for (const auto& jc : j["components"]) {
    double r = num_field(jc, "r", "mb.components");
    if (r >= 1.0) {
      // Existence of exactly 1 is rejected at construction; clamp with notice.
      std::fprintf(stderr, "mb: clamping existence probability %.17g to 1 - 1e-12\n", r);
      r = 1.0 - 1e-12;
    }
    mb.r.push_back(r);
    if (!jc.contains("density")) throw std::invalid_argument("mb.components: missing 'density'");
    mb.densities.push_back(gm_from_json(jc["density"]));
  }
  validate(mb);
  return mb;
}

json to_json(const GlmbParams& glmb) {
  json arr = json::array();
  for (const auto& h : glmb.hypotheses) {
    json jh;
    jh["weight"] = h.weight;
    jh["labels"] = h.labels;
    jh["densities"] = json::array();
    for (const auto& d : h.densities) jh["densities"].push_back(to_json(d));
    arr.push_back(std::move(jh));
  }
  json j;
  j["hypotheses"] = std::move(arr);
  return j;
}

GlmbParams glmb_from_json(const json& j) {
  if (!j.is_object() || !j.contains("hypotheses") || !j["hypotheses"].is_array())
    throw std::invalid_argument("glmb: missing 'hypotheses' array");
  GlmbParams glmb;
  for (const auto& jh : j["hypotheses"]) {
    GlmbHypothesis h;
    h.weight = num_field(jh, "weight", "glmb.hypotheses");
    if (jh.contains("labels")) {
      if (!jh["labels"].is_array()) throw std::invalid_argument("glmb.labels: expected an array");
      for (const auto& l : jh["labels"]) h.labels.push_back(l.get<int>());
    }
    if (jh.contains("densities")) {
      if (!jh["densities"].is_array())
        throw std::invalid_argument("glmb.densities: expected an array");
      for (const auto& jd : jh["densities"]) h.densities.push_back(gm_from_json(jd));
    }
    glmb.hypotheses.push_back(std::move(h));
  }
  validate(glmb);
  return glmb;
}

json to_json(const AnchorMap& a) {
  json arr = json::array();
  for (const auto& anchor : a.anchors) {
    json ja;
    ja["id"] = anchor.id;
    ja["position"] = {anchor.position.x(), anchor.position.y()};
    arr.push_back(std::move(ja));
  }
  return arr;
}

AnchorMap anchor_map_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("anchors: expected an array");
  AnchorMap a;
  for (const auto& ja : j) {
    Anchor anchor;
    anchor.id = static_cast<int>(num_field(ja, "id", "anchors"));
    Eigen::VectorXd pos =
        vec_from_json(ja.contains("position") ? ja["position"] : json(), "anchors.position", 2);
    anchor.position = Eigen::Vector2d(pos(0), pos(1));
    a.anchors.push_back(std::move(anchor));
  }
  validate(a);
  return a;
}

AirportConfig airport_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("airport config: expected an object");
  AirportConfig cfg = default_airport_config();
  if (j.contains("anchors")) cfg.anchors = anchor_map_from_json(j["anchors"]);
  if (j.contains("exclusion")) {
    if (!j["exclusion"].is_array())
      throw std::invalid_argument("airport config.exclusion: expected an array");
    cfg.exclusion.clear();
    for (const auto& jr : j["exclusion"]) cfg.exclusion.push_back(region_from_json(jr));
  }
  if (j.contains("dt")) cfg.dt = num_field(j, "dt", "airport config");
  if (j.contains("pd")) cfg.pd = num_field(j, "pd", "airport config");
  if (j.contains("clutter_rate")) cfg.clutter_rate = num_field(j, "clutter_rate", "airport config");
  if (j.contains("process_intensity"))
    cfg.process_intensity = num_field(j, "process_intensity", "airport config");
  if (j.contains("truth_process_intensity"))
    cfg.truth_process_intensity = num_field(j, "truth_process_intensity", "airport config");
  if (j.contains("sim_pd")) cfg.sim_pd = num_field(j, "sim_pd", "airport config");
  if (j.contains("steps")) cfg.steps = static_cast<int>(num_field(j, "steps", "airport config"));
  if (j.contains("p_s")) cfg.p_s = num_field(j, "p_s", "airport config");
  if (j.contains("p_b")) cfg.p_b = num_field(j, "p_b", "airport config");
  if (j.contains("birth")) cfg.birth = gm_from_json(j["birth"]);
  if (j.contains("initial")) {
    const json& ji = j["initial"];
    cfg.initial.r = num_field(ji, "r", "airport config.initial");
    if (!ji.contains("spatial"))
      throw std::invalid_argument("airport config.initial: missing 'spatial'");
    cfg.initial.spatial = gm_from_json(ji["spatial"]);
  }
  if (j.contains("truth0")) cfg.truth0 = vec_from_json(j["truth0"], "airport config.truth0", 4);
  if (j.contains("roi_lo")) {
    Eigen::VectorXd v = vec_from_json(j["roi_lo"], "airport config.roi_lo", 2);
    cfg.roi_lo = Eigen::Vector2d(v(0), v(1));
  }
  if (j.contains("roi_hi")) {
    Eigen::VectorXd v = vec_from_json(j["roi_hi"], "airport config.roi_hi", 2);
    cfg.roi_hi = Eigen::Vector2d(v(0), v(1));
  }
  if (j.contains("split")) cfg.split = split_config_from_json(j["split"], cfg.split);
  if (j.contains("max_components"))
    cfg.max_components = static_cast<int>(num_field(j, "max_components", "airport config"));
  if (j.contains("prune_exclusion")) {
    if (!j["prune_exclusion"].is_boolean())
      throw std::invalid_argument("airport config.prune_exclusion: expected a boolean");
    cfg.prune_exclusion = j["prune_exclusion"].get<bool>();
  }
  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(num_field(j, "seed", "airport config"));
  validate(cfg);
  return cfg;
}

PlacementConfig placement_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("placement config: expected an object");
  PlacementConfig cfg = default_placement_config();
  if (j.contains("n_components"))
    cfg.n_components = static_cast<int>(num_field(j, "n_components", "placement config"));
  if (j.contains("roi_lo")) {
    Eigen::VectorXd v = vec_from_json(j["roi_lo"], "placement config.roi_lo", 2);
    cfg.roi_lo = Eigen::Vector2d(v(0), v(1));
  }
  if (j.contains("roi_hi")) {
    Eigen::VectorXd v = vec_from_json(j["roi_hi"], "placement config.roi_hi", 2);
    cfg.roi_hi = Eigen::Vector2d(v(0), v(1));
  }
  if (j.contains("spacing")) cfg.spacing = num_field(j, "spacing", "placement config");
  if (j.contains("fov_size")) {
    Eigen::VectorXd v = vec_from_json(j["fov_size"], "placement config.fov_size", 2);
    cfg.fov_size = Eigen::Vector2d(v(0), v(1));
  }
  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(num_field(j, "seed", "placement config"));
  if (j.contains("split")) cfg.split = split_config_from_json(j["split"], cfg.split);
  if (j.contains("mb")) cfg.mb = mb_from_json(j["mb"]);
  return cfg;
}

json step_to_json(const TrackStep& s) {
  json j;
  j["k"] = s.k;
  j["r"] = s.r;
  j["delta"] = s.delta;
  j["n_components"] = s.n_components;
  j["gm"] = to_json(s.posterior);
  j["estimate"] = vec_to_json(s.estimate);
  j["rss_pos"] = s.rss_pos;
  j["rss_vel"] = s.rss_vel;
  j["truth"] = vec_to_json(s.truth);
  j["statements"] = s.statements;
  j["detected"] = s.detected;
  return j;
}

TrackStep step_from_json(const json& j) {
  TrackStep s;
  s.k = static_cast<int>(num_field(j, "k", "step"));
  s.r = num_field(j, "r", "step");
  s.delta = num_field(j, "delta", "step");
  s.n_components = static_cast<int>(num_field(j, "n_components", "step"));
  if (!j.contains("gm")) throw std::invalid_argument("step: missing 'gm'");
  s.posterior = gm_from_json(j["gm"]);
  s.estimate = vec_from_json(j.contains("estimate") ? j["estimate"] : json(), "step.estimate");
  s.rss_pos = num_field(j, "rss_pos", "step");
  s.rss_vel = num_field(j, "rss_vel", "step");
  s.truth = vec_from_json(j.contains("truth") ? j["truth"] : json(), "step.truth");
  if (j.contains("statements"))
    for (const auto& a : j["statements"]) s.statements.push_back(a.get<int>());
  if (j.contains("detected")) s.detected = j["detected"].get<bool>();
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fovsplit::io

namespace fovsplit {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void export_tracklog(const TrackLog& log, const std::string& format, const std::string& path) {
  if (format == "json") {
    std::ostringstream out;
    for (const auto& s : log.steps) out << io::step_to_json(s).dump() << "\n";
    if (log.truncated) out << R"({"meta":{"truncated":true}})" << "\n";
    io::write_file(path, out.str());
    return;
  }
  if (format == "csv") {
    std::ostringstream out;
    out << "k,r,delta,n_components,est_x,est_y,est_vx,est_vy,rss_pos,rss_vel,"
           "truth_x,truth_y,truth_vx,truth_vy,detected,n_statements\n";
    for (const auto& s : log.steps) {
      out << s.k << ',' << fmt17(s.r) << ',' << fmt17(s.delta) << ',' << s.n_components;
      for (int i = 0; i < 4; ++i) out << ',' << fmt17(s.estimate(i));
      out << ',' << fmt17(s.rss_pos) << ',' << fmt17(s.rss_vel);
      for (int i = 0; i < 4; ++i) out << ',' << fmt17(s.truth(i));
      out << ',' << (s.detected ? 1 : 0) << ',' << s.statements.size() << "\n";
    }
    io::write_file(path, out.str());
    return;
  }
  throw std::invalid_argument("export_tracklog: unknown format '" + format + "'");
}

TrackLog import_tracklog_json(const std::string& path) {
  TrackLog log;
  std::istringstream in(io::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    io::json j = io::json::parse(line);
    if (j.contains("meta")) {
      if (j["meta"].contains("truncated")) log.truncated = j["meta"]["truncated"].get<bool>();
      continue;
    }
    log.steps.push_back(io::step_from_json(j));
  }
  return log;
}

void export_surface(const PlacementSurface& surface, const std::string& format,
                    const std::string& path) {
  if (format == "csv") {
    std::ostringstream out;
    out << "cx,cy,variance\n";
    for (int i = 0; i < surface.xs.size(); ++i)
      for (int j = 0; j < surface.ys.size(); ++j)
        out << fmt17(surface.xs(i)) << ',' << fmt17(surface.ys(j)) << ','
            << fmt17(surface.variance(i, j)) << "\n";
    io::write_file(path, out.str());
    return;
  }
  if (format == "json") {
    io::json j;
    io::json xs = io::json::array(), ys = io::json::array();
    for (int i = 0; i < surface.xs.size(); ++i) xs.push_back(surface.xs(i));
    for (int i = 0; i < surface.ys.size(); ++i) ys.push_back(surface.ys(i));
    j["xs"] = std::move(xs);
    j["ys"] = std::move(ys);
    io::json var = io::json::array(), mass = io::json::array();
    for (int i = 0; i < surface.xs.size(); ++i) {
      io::json vrow = io::json::array(), mrow = io::json::array();
      for (int k = 0; k < surface.ys.size(); ++k) {
        vrow.push_back(surface.variance(i, k));
        mrow.push_back(surface.mass(i, k));
      }
      var.push_back(std::move(vrow));
      mass.push_back(std::move(mrow));
    }
    j["variance"] = std::move(var);
    j["mass"] = std::move(mass);
    j["argmax"] = {surface.argmax.x(), surface.argmax.y()};
    j["max_variance"] = surface.max_variance;
    j["mass_argmax"] = {surface.mass_argmax.x(), surface.mass_argmax.y()};
    j["mb"] = io::to_json(surface.mb);
    io::write_file(path, j.dump(2) + "\n");
    return;
  }
  throw std::invalid_argument("export_surface: unknown format '" + format + "'");
}

}  // namespace fovsplit
