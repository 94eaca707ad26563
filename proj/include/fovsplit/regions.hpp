#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "fovsplit/gaussmix.hpp"

namespace fovsplit {

struct Region;

// Primitive regions are closed sets: boundary points count as inside.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct Disc {
  Eigen::VectorXd center;
  double radius = 0.0;
};

// Simple polygon (2-D), even-odd membership.
struct Polygon {
  std::vector<Eigen::Vector2d> vertices;
};

// { s : normal . s >= offset }
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

struct RegionUnion {
  std::vector<Region> regions;
};

struct RegionIntersection {
  std::vector<Region> regions;
};

// Logical complement: contains(Complement(S), s) == !contains(S, s). The
// shared boundary stays with S, which keeps grid tests consistent.
struct RegionComplement {
  std::vector<Region> region;  // exactly one element
};

struct Region {
  std::variant<Box, Disc, Polygon, HalfSpace, RegionUnion, RegionIntersection, RegionComplement>
      node;

  int dim() const;
};

Region make_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
Region make_disc(Eigen::VectorXd center, double radius);
Region make_polygon(std::vector<Eigen::Vector2d> vertices);
Region make_halfspace(Eigen::VectorXd normal, double offset);
Region make_union(std::vector<Region> regions);
Region make_intersection(std::vector<Region> regions);
Region make_complement(Region region);

// Throws std::invalid_argument on malformed regions (lo > hi, radius <= 0,
// non-simple polygon, zero normal, dimension mismatch between children).
void validate(const Region& r);

// Collocation lattice parameters: per-axis points at
//   y_j(l) = -zeta + 2 zeta l / (n_g - 1),  l = 0..n_g-1,
// restricted to the ball ||y|| <= zeta.
struct GridSpec {
  double zeta = 3.0;
  int n_g = 7;
};

// Lattice points with their per-axis indices (column-aligned).
struct CollocationGrid {
  Eigen::MatrixXd points;   // n_s x L
  Eigen::MatrixXi indices;  // n_s x L, entries in [0, n_g)
  int n_g = 0;
};

// Whitened frame of a position-marginal component: y = Lambda^{-1/2} V^T (s - m).
struct ComponentFrame {
  Eigen::VectorXd mean;
  EigenBasis basis;
  Eigen::VectorXd sqrt_values;

  Eigen::VectorXd to_local(const Eigen::VectorXd& s) const;
  Eigen::VectorXd to_state(const Eigen::VectorXd& y) const;
};

bool contains(const Region& r, const Eigen::VectorXd& s);

// Frame of the position marginal of c (first n_s coordinates).
ComponentFrame to_frame(const GaussianComponent& c, int n_s);

// Membership of the frame point y, evaluated in state coordinates.
bool transformed_contains(const Region& r, const ComponentFrame& frame, const Eigen::VectorXd& y);

CollocationGrid collocation_points(const GridSpec& grid, int n_s);

}  // namespace fovsplit
