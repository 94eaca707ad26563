#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fovsplit/bernoulli.hpp"
#include "fovsplit/cardinality.hpp"

namespace fovsplit {

struct CvMatrices {
  Eigen::MatrixXd F;
  Eigen::MatrixXd Q;
};

// Planar constant-velocity model, state (x, y, vx, vy). Q is regularized by
// +1e-12 I so Cholesky-based sampling stays valid.
CvMatrices cv_model(double dt, double process_intensity);

struct AirportConfig {
  AnchorMap anchors;
  std::vector<Region> exclusion;

  double dt = 15.0;
  double pd = 0.9;
  double clutter_rate = 0.25;
  double process_intensity = 0.04;  // filter CV noise intensity
  int steps = 60;

  // The filter's CV intensity makes a sampled truth wander kilometers over a
  // 60-step run, so the simulated walker uses its own, much smaller
  // intensity; the filter stays deliberately mismatched (robust).
  double truth_process_intensity = 2e-4;
  // Detection probability used only when generating measurements; defaults
  // to pd.
  std::optional<double> sim_pd;

  double p_s = 0.99;
  double p_b = 0.01;
  GaussianMixture birth;
  BernoulliState initial;
  Eigen::VectorXd truth0;

  Eigen::Vector2d roi_lo{0.0, 0.0};
  Eigen::Vector2d roi_hi{1.0, 1.0};

  SplitConfig split;
  int max_components = 100;
  bool prune_exclusion = true;
  std::uint64_t seed = 1;
};

// Illustrative 12-anchor layout with two exclusion zones; all reference
// checks are seed-pinned properties of this config.
AirportConfig default_airport_config();

void validate(const AirportConfig& cfg);

struct SimStep {
  Eigen::VectorXd truth;
  MeasurementSet meas;
  bool detected = false;
};

struct Simulation {
  std::vector<SimStep> steps;
  bool truncated = false;  // truth left the ROI before the configured horizon
};

Simulation simulate_truth_and_measurements(const AirportConfig& cfg, std::mt19937_64& rng);

struct TrackStep {
  int k = 0;
  double r = 0.0;
  double delta = 0.0;
  Eigen::VectorXd truth;
  Eigen::VectorXd estimate;
  double rss_pos = 0.0;
  double rss_vel = 0.0;
  int n_components = 0;
  std::vector<int> statements;  // anchor ids in the measurement set
  bool detected = false;
  GaussianMixture posterior;
};

struct TrackLog {
  std::vector<TrackStep> steps;
  bool truncated = false;
};

TrackLog run_airport(const AirportConfig& cfg);

struct PlacementConfig {
  int n_components = 100;
  Eigen::Vector2d roi_lo{-2.0, -2.0};
  Eigen::Vector2d roi_hi{2.0, 2.0};
  double spacing = 0.05;
  Eigen::Vector2d fov_size{1.0, 1.0};
  std::uint64_t seed = 7;
  SplitConfig split;
  // Explicit components override the seeded random instance.
  std::optional<MbComponents> mb;
};

PlacementConfig default_placement_config();

struct PlacementSurface {
  Eigen::VectorXd xs;        // candidate center abscissae, ascending
  Eigen::VectorXd ys;        // candidate center ordinates, ascending
  Eigen::MatrixXd variance;  // variance(i, j) at center (xs(i), ys(j))
  Eigen::MatrixXd mass;      // expected count inside the FoV, same layout
  Eigen::Vector2d argmax{0.0, 0.0};
  double max_variance = 0.0;
  Eigen::Vector2d mass_argmax{0.0, 0.0};
  MbComponents mb;  // the instance the surface was computed from
};

// Translates the FoV box over the candidate lattice and maximizes cardinality
// variance via the DFT path; ties resolve to the lexicographically smallest
// center.
PlacementSurface run_sensor_placement(const PlacementConfig& cfg);

// format: "json" (JSON-lines for logs, JSON object for surfaces) or "csv".
// Floats are written with 17 significant digits; I/O errors carry the path.
void export_tracklog(const TrackLog& log, const std::string& format, const std::string& path);
void export_surface(const PlacementSurface& surface, const std::string& format,
                    const std::string& path);

TrackLog import_tracklog_json(const std::string& path);

}  // namespace fovsplit
