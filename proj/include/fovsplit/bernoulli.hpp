#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "fovsplit/gaussmix.hpp"
#include "fovsplit/regions.hpp"
#include "fovsplit/splitter.hpp"

namespace fovsplit {

// Bernoulli RFS posterior: at most one object, existing with probability r
// and distributed by the normalized spatial mixture.
struct BernoulliState {
  double r = 0.0;
  GaussianMixture spatial;
  // Set by predict when r+ = 0 and the birth density is only a placeholder.
  bool degenerate_prediction = false;
};

struct MotionModel {
  Eigen::MatrixXd F;
  Eigen::MatrixXd Q;
  double p_s = 1.0;
  double p_b = 0.0;
  GaussianMixture birth;  // normalized
};

// Constant detection probability inside the FoV, zero outside; clutter is
// Poisson with a uniform density c~ over the statement alphabet (1/|A|) or
// region.
struct DetectionModel {
  Region fov;
  double pd_inside = 0.9;
  double clutter_rate = 0.25;
  double clutter_density = 1.0;
};

// Named anchor with a position; the association region is the disc of radius
// 2 d_a / 3 around it, d_a the nearest-neighbor anchor distance.
struct Anchor {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};
};

struct AnchorMap {
  std::vector<Anchor> anchors;

  const Anchor& find(int id) const;
  double nearest_distance(int id) const;
  Region region_for(int id) const;
  Region composite_fov() const;  // union of all anchor discs
};

// Either a geometric region statement or an alphabet statement naming an
// anchor (resolved to its disc by map_measurement_region).
struct ImpreciseMeasurement {
  std::optional<int> anchor;
  std::optional<Region> region;
};

struct MeasurementSet {
  std::vector<ImpreciseMeasurement> items;
};

void validate(const BernoulliState& s);
void validate(const MotionModel& m);
void validate(const DetectionModel& d);
void validate(const AnchorMap& a);

// r+ = p_b (1 - r) + p_s r; survivor components propagate through (F, Q) with
// mass p_s r / r+, birth components carry mass p_b (1 - r) / r+.
BernoulliState predict(const BernoulliState& state, const MotionModel& model);

struct UpdateResult {
  BernoulliState state;
  double delta = 0.0;  // detection-evidence term of the existence update
};

// Split-refined update with indicator likelihoods: the predicted mixture is
// refined against {fov} plus every measurement region, then component means
// decide detection and region membership. Weights are renormalized and the
// mixture reduced to max_components.
UpdateResult update(const BernoulliState& state, const MeasurementSet& meas,
                    const DetectionModel& det, const SplitConfig& config,
                    int max_components = 100);

// Anchor statements become discs of radius 2 d_a / 3; geometric statements
// pass through unchanged.
Region map_measurement_region(const ImpreciseMeasurement& meas, const AnchorMap& anchors);

}  // namespace fovsplit
