#include "fovsplit/regions.hpp"

#include <cmath>
#include <stdexcept>

namespace fovsplit {

namespace {

// Orientation of the triple (a, b, c): >0 counterclockwise, <0 clockwise.
double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment_collinear(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          const Eigen::Vector2d& p) {
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  double o1 = orient(p1, p2, q1);
  double o2 = orient(p1, p2, q2);
  double o3 = orient(q1, q2, p1);
  double o4 = orient(q1, q2, p2);
  if (((o1 > 0) != (o2 > 0)) && o1 != 0 && o2 != 0 && ((o3 > 0) != (o4 > 0)) && o3 != 0 && o4 != 0)
    return true;
  if (o1 == 0 && on_segment_collinear(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment_collinear(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment_collinear(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment_collinear(q1, q2, p2)) return true;
  return false;
}

bool polygon_is_simple(const std::vector<Eigen::Vector2d>& v) {
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i)
    if ((v[i] - v[(i + 1) % n]).norm() == 0.0) return false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_on_polygon_boundary(const std::vector<Eigen::Vector2d>& v, const Eigen::Vector2d& p) {
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = v[i];
    const Eigen::Vector2d& b = v[(i + 1) % n];
    Eigen::Vector2d ab = b - a;
    double len2 = ab.squaredNorm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    Eigen::Vector2d proj = a + t * ab;
    double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    if ((p - proj).norm() <= 1e-12 * scale) return true;
  }
  return false;
}

bool polygon_contains(const std::vector<Eigen::Vector2d>& v, const Eigen::Vector2d& p) {
  if (point_on_polygon_boundary(v, p)) return true;
  // Even-odd crossing count with a +x ray. A ray grazing a vertex is nudged
  // off the tie before counting.
  double py = p.y();
  const int n = static_cast<int>(v.size());
  bool tie = false;
  for (const auto& q : v)
    if (q.y() == py) tie = true;
  if (tie) py += 1e-12 * std::max(1.0, std::abs(py));
  bool inside = false;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = v[i];
    const Eigen::Vector2d& b = v[(i + 1) % n];
    if ((a.y() > py) != (b.y() > py)) {
      double x_cross = a.x() + (py - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

int Region::dim() const {
  return std::visit(
      [](const auto& node) -> int {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(node.lo.size());
        else if constexpr (std::is_same_v<T, Disc>) return static_cast<int>(node.center.size());
        else if constexpr (std::is_same_v<T, Polygon>) return 2;
        else if constexpr (std::is_same_v<T, HalfSpace>) return static_cast<int>(node.normal.size());
        else if constexpr (std::is_same_v<T, RegionComplement>) return node.region.front().dim();
        else return node.regions.empty() ? 0 : node.regions.front().dim();
      },
      node);
}

Region make_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  Region r{Box{std::move(lo), std::move(hi)}};
  validate(r);
  return r;
}

Region make_disc(Eigen::VectorXd center, double radius) {
  Region r{Disc{std::move(center), radius}};
  validate(r);
  return r;
}

Region make_polygon(std::vector<Eigen::Vector2d> vertices) {
  Region r{Polygon{std::move(vertices)}};
  validate(r);
  return r;
}

Region make_halfspace(Eigen::VectorXd normal, double offset) {
  Region r{HalfSpace{std::move(normal), offset}};
  validate(r);
  return r;
}

Region make_union(std::vector<Region> regions) {
  RegionUnion u{std::move(regions)};
  Region r{std::move(u)};
  validate(r);
  return r;
}

Region make_intersection(std::vector<Region> regions) {
  RegionIntersection s{std::move(regions)};
  Region r{std::move(s)};
  validate(r);
  return r;
}

Region make_complement(Region region) {
  RegionComplement c;
  c.region.push_back(std::move(region));
  Region r{std::move(c)};
  validate(r);
  return r;
}

void validate(const Region& r) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (node.lo.size() == 0 || node.lo.size() != node.hi.size())
            throw std::invalid_argument("Box: lo/hi size mismatch");
          if (!node.lo.allFinite() || !node.hi.allFinite())
            throw std::invalid_argument("Box: non-finite bounds");
          if ((node.lo.array() > node.hi.array()).any())
            throw std::invalid_argument("Box: lo exceeds hi");
        } else if constexpr (std::is_same_v<T, Disc>) {
          if (node.center.size() == 0 || !node.center.allFinite())
            throw std::invalid_argument("Disc: malformed center");
          if (!(node.radius > 0.0) || !std::isfinite(node.radius))
            throw std::invalid_argument("Disc: radius must be positive");
        } else if constexpr (std::is_same_v<T, Polygon>) {
          if (node.vertices.size() < 3)
            throw std::invalid_argument("Polygon: needs at least 3 vertices");
          for (const auto& v : node.vertices)
            if (!v.allFinite()) throw std::invalid_argument("Polygon: non-finite vertex");
          if (!polygon_is_simple(node.vertices))
            throw std::invalid_argument("Polygon: not simple");
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          if (node.normal.size() == 0 || !node.normal.allFinite() || !std::isfinite(node.offset))
            throw std::invalid_argument("HalfSpace: malformed");
          if (node.normal.norm() == 0.0) throw std::invalid_argument("HalfSpace: zero normal");
        } else if constexpr (std::is_same_v<T, RegionComplement>) {
          if (node.region.size() != 1)
            throw std::invalid_argument("Complement: exactly one child required");
          validate(node.region.front());
        } else {
          if (node.regions.empty())
            throw std::invalid_argument("Union/Intersection: needs at least one child");
          int d = node.regions.front().dim();
          for (const auto& child : node.regions) {
            validate(child);
            if (child.dim() != d)
              throw std::invalid_argument("Union/Intersection: child dimension mismatch");
          }
        }
      },
      r.node);
}

bool contains(const Region& r, const Eigen::VectorXd& s) {
  if (!s.allFinite()) throw std::invalid_argument("contains: non-finite point");
  if (s.size() != r.dim()) throw std::invalid_argument("contains: dimension mismatch");
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Box>) {
          return (s.array() >= node.lo.array()).all() && (s.array() <= node.hi.array()).all();
        } else if constexpr (std::is_same_v<T, Disc>) {
          return (s - node.center).norm() <= node.radius;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return polygon_contains(node.vertices, Eigen::Vector2d(s(0), s(1)));
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return node.normal.dot(s) >= node.offset;
        } else if constexpr (std::is_same_v<T, RegionUnion>) {
          for (const auto& child : node.regions)
            if (contains(child, s)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, RegionIntersection>) {
          for (const auto& child : node.regions)
            if (!contains(child, s)) return false;
          return true;
        } else {
          return !contains(node.region.front(), s);
        }
      },
      r.node);
}

Eigen::VectorXd ComponentFrame::to_local(const Eigen::VectorXd& s) const {
  return sqrt_values.cwiseInverse().asDiagonal() * (basis.vectors.transpose() * (s - mean));
}

Eigen::VectorXd ComponentFrame::to_state(const Eigen::VectorXd& y) const {
  return mean + basis.vectors * (sqrt_values.asDiagonal() * y);
}

ComponentFrame to_frame(const GaussianComponent& c, int n_s) {
  GaussianComponent marg = position_marginal(c, n_s);
  ComponentFrame f;
  f.mean = marg.mean;
  f.basis = eig_decompose(marg.cov);
  f.sqrt_values = f.basis.values.cwiseSqrt();
  return f;
}

bool transformed_contains(const Region& r, const ComponentFrame& frame, const Eigen::VectorXd& y) {
  return contains(r, frame.to_state(y));
}

CollocationGrid collocation_points(const GridSpec& grid, int n_s) {
  if (grid.n_g < 2) throw std::invalid_argument("GridSpec: n_g must be >= 2");
  if (!(grid.zeta > 0.0)) throw std::invalid_argument("GridSpec: zeta must be positive");
  if (n_s < 1) throw std::invalid_argument("collocation_points: n_s must be >= 1");

  Eigen::VectorXd axis(grid.n_g);
  for (int l = 0; l < grid.n_g; ++l)
    axis(l) = -grid.zeta + 2.0 * grid.zeta * l / (grid.n_g - 1);

  std::vector<Eigen::VectorXd> pts;
  std::vector<Eigen::VectorXi> idx;
  Eigen::VectorXi counter = Eigen::VectorXi::Zero(n_s);
  const double r2 = grid.zeta * grid.zeta * (1.0 + 1e-12);
  while (true) {
    Eigen::VectorXd p(n_s);
    for (int j = 0; j < n_s; ++j) p(j) = axis(counter(j));
    if (p.squaredNorm() <= r2) {
      pts.push_back(p);
      idx.push_back(counter);
    }
    int j = 0;
    while (j < n_s) {
      if (++counter(j) < grid.n_g) break;
      counter(j) = 0;
      ++j;
    }
    if (j == n_s) break;
  }

  CollocationGrid out;
  out.n_g = grid.n_g;
  out.points.resize(n_s, static_cast<int>(pts.size()));
  out.indices.resize(n_s, static_cast<int>(pts.size()));
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    out.points.col(i) = pts[i];
    out.indices.col(i) = idx[i];
  }
  return out;
}

}  // namespace fovsplit
