#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace randpolar
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// The closed half-space {x : <normal, x> <= offset}.
struct Halfspace
{
    Eigen::VectorXd normal;
    double offset = 0.0;
};

// Absolute area of a simple polygon (shoelace).
double polygon_area(std::span<const Vec2> poly);

// Sutherland-Hodgman clip of a convex polygon against <a, x> <= b.
std::vector<Vec2> clip_polygon(std::span<const Vec2> poly, const Vec2& a, double b);

// Convex polygon [-L, L]^2 cut by every half-space.
std::vector<Vec2> clip_square(std::span<const Halfspace> hs, double half_width);

// Area of (convex polygon) ∩ (disk of `radius` centred at the origin).
double polygon_disk_area(std::span<const Vec2> poly, double radius);

// Area of the slab {|<a, x>| <= 1} inside the disk of given radius.
double slab_disk_area(double a_norm, double radius);

/*!
 * Convex polyhedron stored as a list of planar faces (vertex loops).
 * Supports clipping by half-spaces and exact volume.
 */
class Polyhedron
{
  public:
    static Polyhedron cube(double half_width);

    void clip(const Vec3& a, double b);
    double volume() const;
    bool empty() const noexcept { return faces_.empty(); }
    const std::vector<std::vector<Vec3>>& faces() const noexcept { return faces_; }

  private:
    std::vector<std::vector<Vec3>> faces_;
    double scale_ = 1.0;
};

// Volume of [-L, L]^n ∩ (every half-space), n in {1, 2, 3}.
double box_intersection_volume(std::span<const Halfspace> hs, std::size_t n,
                               double half_width);

// Vertices of {x : <a_i, x> <= b_i} by exhaustive n-subset intersection,
// n in {1, 2, 3}; points within `tol` (scaled) are identified.
std::vector<Eigen::VectorXd> enumerate_vertices(std::span<const Halfspace> hs,
                                                std::size_t n, double tol = 1e-9);

// Volume of a bounded H-polytope from its enumerated vertices: facets are
// assembled by bucketing vertices per (deduplicated) plane, then the body is
// split into pyramids over an interior point. n in {2, 3}.
double volume_from_vertices(std::span<const Halfspace> hs,
                            std::span<const Eigen::VectorXd> vertices, std::size_t n,
                            double tol = 1e-9);

// Convex hull (counter-clockwise) of planar points; collinear points dropped.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts);

}  // namespace randpolar
