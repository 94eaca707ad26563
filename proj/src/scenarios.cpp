#include "fovsplit/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace fovsplit {

CvMatrices cv_model(double dt, double process_intensity) {
  if (!(dt > 0.0)) throw std::invalid_argument("cv_model: dt must be positive");
  if (!(process_intensity >= 0.0))
    throw std::invalid_argument("cv_model: process_intensity must be >= 0");

  CvMatrices m;
  m.F = Eigen::MatrixXd::Identity(4, 4);
  m.F(0, 2) = dt;
  m.F(1, 3) = dt;

  const double q3 = process_intensity * dt * dt * dt / 3.0;
  const double q2 = process_intensity * dt * dt / 2.0;
  const double q1 = process_intensity * dt;
  m.Q = Eigen::MatrixXd::Zero(4, 4);
  m.Q(0, 0) = q3;
  m.Q(1, 1) = q3;
  m.Q(0, 2) = q2;
  m.Q(2, 0) = q2;
  m.Q(1, 3) = q2;
  m.Q(3, 1) = q2;
  m.Q(2, 2) = q1;
  m.Q(3, 3) = q1;
  m.Q += 1e-12 * Eigen::MatrixXd::Identity(4, 4);
  return m;
}

AirportConfig default_airport_config() {
  AirportConfig cfg;
  cfg.anchors.anchors = {
      {1, {60.0, 80.0}},   {2, {165.0, 85.0}},  {3, {270.0, 75.0}},  {4, {375.0, 85.0}},
      {5, {480.0, 80.0}},  {6, {585.0, 78.0}},  {7, {70.0, 215.0}},  {8, {175.0, 225.0}},
      {9, {280.0, 218.0}}, {10, {385.0, 222.0}}, {11, {490.0, 215.0}}, {12, {590.0, 225.0}},
  };
  cfg.exclusion.push_back(make_box(Eigen::Vector2d(140.0, 130.0).eval(),
                                   Eigen::Vector2d(190.0, 170.0).eval()));
  cfg.exclusion.push_back(make_box(Eigen::Vector2d(360.0, 130.0).eval(),
                                   Eigen::Vector2d(410.0, 170.0).eval()));

  cfg.roi_lo = Eigen::Vector2d(-150.0, -150.0);
  cfg.roi_hi = Eigen::Vector2d(750.0, 450.0);

  cfg.truth0 = Eigen::VectorXd(4);
  cfg.truth0 << 70.0, 110.0, 0.5, 0.08;

  cfg.birth.dim = 4;
  cfg.birth.position_dim = 2;
  cfg.birth.normalized = true;
  {
    GaussianComponent b;
    b.weight = 1.0;
    b.mean = Eigen::VectorXd(4);
    b.mean << 300.0, 150.0, 0.0, 0.0;
    b.cov = Eigen::Vector4d(4.0e4, 1.6e4, 2.0, 2.0).asDiagonal();
    cfg.birth.components.push_back(std::move(b));
  }

  cfg.initial.r = 0.5;
  cfg.initial.spatial.dim = 4;
  cfg.initial.spatial.position_dim = 2;
  cfg.initial.spatial.normalized = true;
  {
    GaussianComponent p;
    p.weight = 1.0;
    p.mean = Eigen::VectorXd(4);
    p.mean << 75.0, 105.0, 0.3, 0.0;
    p.cov = Eigen::Vector4d(400.0, 400.0, 1.0, 1.0).asDiagonal();
    cfg.initial.spatial.components.push_back(std::move(p));
  }

  cfg.seed = 20;
  return cfg;
}

void validate(const AirportConfig& cfg) {
  validate(cfg.anchors);
  for (const auto& r : cfg.exclusion) validate(r);
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("AirportConfig: dt must be positive");
  if (!(cfg.pd >= 0.0 && cfg.pd <= 1.0))
    throw std::invalid_argument("AirportConfig: pd must lie in [0, 1]");
  if (cfg.sim_pd && !(*cfg.sim_pd >= 0.0 && *cfg.sim_pd <= 1.0))
    throw std::invalid_argument("AirportConfig: sim_pd must lie in [0, 1]");
  if (!(cfg.clutter_rate >= 0.0))
    throw std::invalid_argument("AirportConfig: clutter_rate must be >= 0");
  if (!(cfg.process_intensity >= 0.0) || !(cfg.truth_process_intensity >= 0.0))
    throw std::invalid_argument("AirportConfig: process intensities must be >= 0");
  if (cfg.steps < 1) throw std::invalid_argument("AirportConfig: steps must be >= 1");
  if (!(cfg.p_s >= 0.0 && cfg.p_s <= 1.0) || !(cfg.p_b >= 0.0 && cfg.p_b <= 1.0))
    throw std::invalid_argument("AirportConfig: probabilities must lie in [0, 1]");
  if (cfg.truth0.size() != 4) throw std::invalid_argument("AirportConfig: truth0 must be 4-D");
  if ((cfg.roi_lo.array() >= cfg.roi_hi.array()).any())
    throw std::invalid_argument("AirportConfig: ROI bounds inverted");
  if (cfg.max_components < 1)
    throw std::invalid_argument("AirportConfig: max_components must be >= 1");
  validate(cfg.initial);
  validate(cfg.birth);
  if (cfg.birth.dim != 4 || cfg.initial.spatial.dim != 4)
    throw std::invalid_argument("AirportConfig: state dimension must be 4");
  validate(cfg.split);
}

namespace {

// Specular reflection of an offending position/velocity at the nearest face
// of an axis-aligned exclusion box.
void reflect_at_exclusions(const std::vector<Region>& exclusion, Eigen::VectorXd& state) {
  for (int pass = 0; pass < 8; ++pass) {
    bool moved = false;
    for (const auto& region : exclusion) {
      const Box* box = std::get_if<Box>(&region.node);
      if (!box) continue;  // reflection is defined for box barriers only
      Eigen::Vector2d pos(state(0), state(1));
      if ((pos.array() < box->lo.head(2).array()).any() ||
          (pos.array() > box->hi.head(2).array()).any())
        continue;
      int axis = 0;
      double face = 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 2; ++a) {
        double d_lo = pos(a) - box->lo(a);
        double d_hi = box->hi(a) - pos(a);
        if (d_lo < best) {
          best = d_lo;
          axis = a;
          face = box->lo(a);
        }
        if (d_hi < best) {
          best = d_hi;
          axis = a;
          face = box->hi(a);
        }
      }
      state(axis) = 2.0 * face - state(axis);
      state(axis + 2) = -state(axis + 2);
      moved = true;
    }
    if (!moved) return;
  }
}

int nearest_containing_anchor(const AnchorMap& anchors, const Eigen::Vector2d& pos) {
  int best_id = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& a : anchors.anchors) {
    double radius = 2.0 * anchors.nearest_distance(a.id) / 3.0;
    double dist = (pos - a.position).norm();
    if (dist <= radius && dist < best_dist) {
      best_dist = dist;
      best_id = a.id;
    }
  }
  return best_id;
}

}  // namespace

Simulation simulate_truth_and_measurements(const AirportConfig& cfg, std::mt19937_64& rng) {
  validate(cfg);
  const CvMatrices truth_model = cv_model(cfg.dt, cfg.truth_process_intensity);
  Eigen::LLT<Eigen::MatrixXd> llt(truth_model.Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("simulate: truth process noise not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  std::normal_distribution<double> nrm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::poisson_distribution<int> clutter_count(cfg.clutter_rate);
  std::uniform_int_distribution<int> anchor_pick(0, static_cast<int>(cfg.anchors.anchors.size()) - 1);
  const double sim_pd = cfg.sim_pd.value_or(cfg.pd);

  Simulation sim;
  Eigen::VectorXd x = cfg.truth0;
  for (int k = 0; k < cfg.steps; ++k) {
    Eigen::VectorXd noise(4);
    for (int i = 0; i < 4; ++i) noise(i) = nrm(rng);
    x = truth_model.F * x + chol * noise;
    reflect_at_exclusions(cfg.exclusion, x);

    Eigen::Vector2d pos(x(0), x(1));
    if ((pos.array() < cfg.roi_lo.array()).any() || (pos.array() > cfg.roi_hi.array()).any()) {
      sim.truncated = true;
      break;
    }

    SimStep step;
    step.truth = x;
    const int containing = nearest_containing_anchor(cfg.anchors, pos);
    const double u_det = unif(rng);
    if (containing >= 0 && u_det < sim_pd) {
      step.detected = true;
      ImpreciseMeasurement m;
      m.anchor = containing;
      step.meas.items.push_back(std::move(m));
    }
    const int n_clutter = cfg.clutter_rate > 0.0 ? clutter_count(rng) : 0;
    for (int c = 0; c < n_clutter; ++c) {
      ImpreciseMeasurement m;
      m.anchor = cfg.anchors.anchors[anchor_pick(rng)].id;
      step.meas.items.push_back(std::move(m));
    }
    sim.steps.push_back(std::move(step));
  }
  return sim;
}

TrackLog run_airport(const AirportConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  Simulation sim = simulate_truth_and_measurements(cfg, rng);

  const CvMatrices cv = cv_model(cfg.dt, cfg.process_intensity);
  MotionModel motion;
  motion.F = cv.F;
  motion.Q = cv.Q;
  motion.p_s = cfg.p_s;
  motion.p_b = cfg.p_b;
  motion.birth = cfg.birth;

  DetectionModel det;
  det.fov = cfg.anchors.composite_fov();
  det.pd_inside = cfg.pd;
  det.clutter_rate = cfg.clutter_rate;
  det.clutter_density = 1.0 / static_cast<double>(cfg.anchors.anchors.size());

  std::optional<Region> exclusion_union;
  if (!cfg.exclusion.empty()) exclusion_union = make_union(cfg.exclusion);

  TrackLog log;
  log.truncated = sim.truncated;
  BernoulliState state = cfg.initial;
  for (size_t k = 0; k < sim.steps.size(); ++k) {
    state = predict(state, motion);

    MeasurementSet resolved;
    for (const auto& item : sim.steps[k].meas.items) {
      ImpreciseMeasurement m = item;
      m.region = map_measurement_region(item, cfg.anchors);
      resolved.items.push_back(std::move(m));
    }

    UpdateResult upd = update(state, resolved, det, cfg.split, cfg.max_components);
    state = std::move(upd.state);

    if (cfg.prune_exclusion && exclusion_union) {
      Partition parts = partition(state.spatial, *exclusion_union);
      double outside_mass = parts.outside.total_weight();
      if (!parts.outside.empty() && outside_mass > 1e-12) {
        for (auto& c : parts.outside.components) c.weight /= outside_mass;
        parts.outside.normalized = true;
        state.spatial = std::move(parts.outside);
      }
    }

    MixtureMoments mm = mixture_moments(state.spatial);
    TrackStep step;
    step.k = static_cast<int>(k);
    step.r = state.r;
    step.delta = upd.delta;
    step.truth = sim.steps[k].truth;
    step.estimate = mm.mean;
    step.rss_pos = std::sqrt(mm.cov(0, 0) + mm.cov(1, 1));
    step.rss_vel = std::sqrt(mm.cov(2, 2) + mm.cov(3, 3));
    step.n_components = state.spatial.size();
    for (const auto& item : sim.steps[k].meas.items)
      if (item.anchor) step.statements.push_back(*item.anchor);
    step.detected = sim.steps[k].detected;
    step.posterior = state.spatial;
    log.steps.push_back(std::move(step));
  }
  return log;
}

PlacementConfig default_placement_config() { return PlacementConfig{}; }

namespace {

MbComponents random_placement_instance(const PlacementConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> r_draw(0.35, 1.0 - 1e-12);
  std::uniform_real_distribution<double> x_draw(cfg.roi_lo.x(), cfg.roi_hi.x());
  std::uniform_real_distribution<double> y_draw(cfg.roi_lo.y(), cfg.roi_hi.y());
  std::uniform_real_distribution<double> sig_draw(0.05, 0.25);
  std::uniform_real_distribution<double> angle_draw(0.0, 3.14159265358979323846);

  MbComponents mb;
  for (int i = 0; i < cfg.n_components; ++i) {
    mb.r.push_back(r_draw(rng));
    GaussianMixture p;
    p.dim = 2;
    p.position_dim = 2;
    p.normalized = true;
    GaussianComponent c;
    c.weight = 1.0;
    c.mean = Eigen::VectorXd(2);
    c.mean << x_draw(rng), y_draw(rng);
    double s1 = sig_draw(rng), s2 = sig_draw(rng), th = angle_draw(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Eigen::Matrix2d diag = Eigen::Vector2d(s1 * s1, s2 * s2).asDiagonal();
    Eigen::Matrix2d cov = rot * diag * rot.transpose();
    c.cov = 0.5 * (cov + cov.transpose());
    p.components.push_back(std::move(c));
    mb.densities.push_back(std::move(p));
  }
  return mb;
}

}  // namespace

PlacementSurface run_sensor_placement(const PlacementConfig& cfg) {
  if (!(cfg.spacing > 0.0)) throw std::invalid_argument("PlacementConfig: spacing must be positive");
  if (!(cfg.fov_size.x() > 0.0 && cfg.fov_size.y() > 0.0))
    throw std::invalid_argument("PlacementConfig: fov sides must be positive");
  if ((cfg.roi_lo.array() >= cfg.roi_hi.array()).any())
    throw std::invalid_argument("PlacementConfig: ROI bounds inverted");
  if (cfg.n_components < 1 && !cfg.mb)
    throw std::invalid_argument("PlacementConfig: n_components must be >= 1");

  PlacementSurface out;
  out.mb = cfg.mb ? *cfg.mb : random_placement_instance(cfg);
  validate(out.mb);

  const int nx = static_cast<int>(std::llround((cfg.roi_hi.x() - cfg.roi_lo.x()) / cfg.spacing)) + 1;
  const int ny = static_cast<int>(std::llround((cfg.roi_hi.y() - cfg.roi_lo.y()) / cfg.spacing)) + 1;
  out.xs.resize(nx);
  out.ys.resize(ny);
  for (int i = 0; i < nx; ++i) out.xs(i) = cfg.roi_lo.x() + i * cfg.spacing;
  for (int j = 0; j < ny; ++j) out.ys(j) = cfg.roi_lo.y() + j * cfg.spacing;
  out.variance.resize(nx, ny);
  out.mass.resize(nx, ny);

  InclusionConfig incl;
  incl.method = InclusionMethod::kSplit;
  incl.split = cfg.split;

  const Eigen::Vector2d half = 0.5 * cfg.fov_size;

  // Candidates are independent; evaluate them on a thread pool and gather
  // into the preallocated surface so the result is order-independent.
  const int n_threads =
      std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), nx));
  std::atomic<int> next_row{0};
  auto worker = [&]() {
    for (int i = next_row.fetch_add(1); i < nx; i = next_row.fetch_add(1)) {
      for (int j = 0; j < ny; ++j) {
        Eigen::Vector2d center(out.xs(i), out.ys(j));
        Region box = make_box((center - half).eval(), (center + half).eval());
        CardinalityPmf pmf = mb_fov_pmf_dft(out.mb, box, incl);
        out.variance(i, j) = pmf.variance();
        out.mass(i, j) = pmf.mean();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Argmax scans run after the gather, in lexicographic center order, so ties
  // resolve identically no matter how rows were scheduled.
  double best_var = -1.0, best_mass = -1.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (out.variance(i, j) > best_var) {
        best_var = out.variance(i, j);
        out.argmax = Eigen::Vector2d(out.xs(i), out.ys(j));
      }
      if (out.mass(i, j) > best_mass) {
        best_mass = out.mass(i, j);
        out.mass_argmax = Eigen::Vector2d(out.xs(i), out.ys(j));
      }
    }
  }
  out.max_variance = best_var;
  return out;
}

}  // namespace fovsplit
