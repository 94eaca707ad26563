#include "fovsplit/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fovsplit {

void validate(const BernoulliState& s) {
  if (!(s.r >= 0.0 && s.r <= 1.0))
    throw std::invalid_argument("BernoulliState: r must lie in [0, 1]");
  validate(s.spatial);
  if (s.spatial.empty()) throw std::invalid_argument("BernoulliState: empty spatial density");
  if (std::abs(s.spatial.total_weight() - 1.0) > 1e-9)
    throw std::invalid_argument("BernoulliState: spatial weights must sum to 1");
}

void validate(const MotionModel& m) {
  if (m.F.rows() != m.F.cols() || m.Q.rows() != m.Q.cols() || m.F.rows() != m.Q.rows())
    throw std::invalid_argument("MotionModel: F/Q shape mismatch");
  if (!m.F.allFinite() || !m.Q.allFinite())
    throw std::invalid_argument("MotionModel: non-finite entries");
  if ((m.Q - m.Q.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, m.Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("MotionModel: Q not symmetric");
  if (!(m.p_s >= 0.0 && m.p_s <= 1.0) || !(m.p_b >= 0.0 && m.p_b <= 1.0))
    throw std::invalid_argument("MotionModel: probabilities must lie in [0, 1]");
  validate(m.birth);
  if (m.birth.empty()) throw std::invalid_argument("MotionModel: empty birth density");
  if (std::abs(m.birth.total_weight() - 1.0) > 1e-9)
    throw std::invalid_argument("MotionModel: birth weights must sum to 1");
  if (m.birth.dim != m.F.rows())
    throw std::invalid_argument("MotionModel: birth dimension mismatch");
}

void validate(const DetectionModel& d) {
  validate(d.fov);
  if (!(d.pd_inside >= 0.0 && d.pd_inside <= 1.0))
    throw std::invalid_argument("DetectionModel: pd_inside must lie in [0, 1]");
  if (!(d.clutter_rate >= 0.0))
    throw std::invalid_argument("DetectionModel: clutter_rate must be >= 0");
  if (!(d.clutter_density > 0.0))
    throw std::invalid_argument("DetectionModel: clutter_density must be positive");
}

void validate(const AnchorMap& a) {
  if (a.anchors.size() < 2) throw std::invalid_argument("AnchorMap: needs at least 2 anchors");
  for (size_t i = 0; i < a.anchors.size(); ++i) {
    if (!a.anchors[i].position.allFinite())
      throw std::invalid_argument("AnchorMap: non-finite anchor position");
    for (size_t j = i + 1; j < a.anchors.size(); ++j)
      if (a.anchors[i].id == a.anchors[j].id)
        throw std::invalid_argument("AnchorMap: duplicate anchor id");
  }
}

const Anchor& AnchorMap::find(int id) const {
  for (const auto& a : anchors)
    if (a.id == id) return a;
  throw std::invalid_argument("AnchorMap: unknown anchor id " + std::to_string(id));
}

double AnchorMap::nearest_distance(int id) const {
  const Anchor& self = find(id);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : anchors) {
    if (a.id == id) continue;
    best = std::min(best, (a.position - self.position).norm());
  }
  if (!std::isfinite(best))
    throw std::invalid_argument("AnchorMap: nearest distance undefined with one anchor");
  return best;
}

Region AnchorMap::region_for(int id) const {
  const Anchor& a = find(id);
  return make_disc(a.position, 2.0 * nearest_distance(id) / 3.0);
}

Region AnchorMap::composite_fov() const {
  std::vector<Region> discs;
  discs.reserve(anchors.size());
  for (const auto& a : anchors) discs.push_back(region_for(a.id));
  return make_union(std::move(discs));
}

BernoulliState predict(const BernoulliState& state, const MotionModel& model) {
  validate(state);
  validate(model);
  if (state.spatial.dim != model.F.rows())
    throw std::invalid_argument("predict: state/model dimension mismatch");

  const double r_surv = model.p_s * state.r;
  const double r_birth = model.p_b * (1.0 - state.r);
  const double r_plus = r_surv + r_birth;

  BernoulliState out;
  out.spatial.dim = state.spatial.dim;
  out.spatial.position_dim = state.spatial.position_dim;
  out.spatial.normalized = true;
  if (r_plus <= 0.0) {
    out.r = 0.0;
    out.spatial.components = model.birth.components;
    out.spatial.position_dim = model.birth.position_dim;
    out.degenerate_prediction = true;
    return out;
  }
  out.r = r_plus;

  for (const auto& c : state.spatial.components) {
    GaussianComponent p;
    p.weight = c.weight * r_surv / r_plus;
    p.mean = model.F * c.mean;
    p.cov = model.F * c.cov * model.F.transpose() + model.Q;
    p.cov = 0.5 * (p.cov + p.cov.transpose());
    out.spatial.components.push_back(std::move(p));
  }
  for (const auto& c : model.birth.components) {
    GaussianComponent p = c;
    p.weight = c.weight * r_birth / r_plus;
    out.spatial.components.push_back(std::move(p));
  }
  return out;
}

UpdateResult update(const BernoulliState& state, const MeasurementSet& meas,
                    const DetectionModel& det, const SplitConfig& config, int max_components) {
  validate(state);
  validate(det);
  if (max_components < 1) throw std::invalid_argument("update: max_components must be >= 1");

  std::vector<Region> regions;
  regions.push_back(det.fov);
  for (const auto& m : meas.items) {
    if (!m.region) throw std::invalid_argument("update: measurement region unresolved");
    regions.push_back(*m.region);
  }
  const double clutter = det.clutter_rate * det.clutter_density;
  if (!meas.items.empty() && !(clutter > 0.0))
    throw std::invalid_argument("update: clutter normalizer must be positive with measurements");

  SplitResult refined = split_for_multifov(state.spatial, config, regions);
  const int n_s = refined.gm.position_dim;

  // Detection-evidence term and per-component likelihood factors, both from
  // component-mean indicator evaluations on the refined mixture.
  double delta = 0.0;
  std::vector<double> factor(refined.gm.components.size());
  for (size_t i = 0; i < refined.gm.components.size(); ++i) {
    const auto& c = refined.gm.components[i];
    Eigen::VectorXd pos = c.mean.head(n_s);
    double pd = contains(det.fov, pos) ? det.pd_inside : 0.0;
    double meas_sum = 0.0;
    for (size_t z = 1; z < regions.size(); ++z)
      if (contains(regions[z], pos)) meas_sum += 1.0 / clutter;
    delta += c.weight * pd * (1.0 - meas_sum);
    factor[i] = 1.0 - pd + pd * meas_sum;
  }
  if (delta > 1.0 + 1e-9)
    throw std::invalid_argument("update: delta above 1, malformed clutter normalizer");
  const double denom = 1.0 - state.r * delta;
  if (denom <= 0.0) throw std::logic_error("update: 1 - r*delta not positive");

  UpdateResult out;
  out.delta = delta;
  out.state.r = std::clamp((1.0 - delta) * state.r / denom, 0.0, 1.0);

  double mass = 0.0;
  for (size_t i = 0; i < factor.size(); ++i)
    mass += refined.gm.components[i].weight * factor[i];
  if (mass <= 1e-12) {
    // Every component fully explained away (delta -> 1): existence dies and
    // the spatial density is left at the refined prediction.
    out.state.r = 0.0;
    out.state.spatial = std::move(refined.gm);
    out.state.spatial.normalized = true;
    return out;
  }

  out.state.spatial.dim = refined.gm.dim;
  out.state.spatial.position_dim = refined.gm.position_dim;
  out.state.spatial.normalized = true;
  out.state.spatial.components.reserve(refined.gm.components.size());
  for (size_t i = 0; i < factor.size(); ++i) {
    GaussianComponent c = std::move(refined.gm.components[i]);
    c.weight = c.weight * factor[i] / mass;
    out.state.spatial.components.push_back(std::move(c));
  }
  out.state.spatial = reduce(out.state.spatial, max_components);
  return out;
}

Region map_measurement_region(const ImpreciseMeasurement& meas, const AnchorMap& anchors) {
  if (meas.anchor) {
    validate(anchors);
    return anchors.region_for(*meas.anchor);
  }
  if (meas.region) return *meas.region;
  throw std::invalid_argument("map_measurement_region: empty measurement");
}

}  // namespace fovsplit
