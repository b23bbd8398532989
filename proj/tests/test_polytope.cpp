#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "randpolar/polytope.hpp"
#include "support.hpp"

using namespace randpolar;
using doctest::Approx;

namespace
{
Halfspace hs(std::initializer_list<double> a, double b)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (double x : a)
        v(i++) = x;
    return {v, b};
}

// Circular segment area of a disk of radius R cut at distance w from the centre.
double segment_area(double R, double w)
{
    if (w >= R)
        return 0.0;
    return R * R * std::acos(w / R) - w * std::sqrt(R * R - w * w);
}
}  // namespace

TEST_CASE("polygon areas and clipping")
{
    const std::vector<Vec2> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    CHECK(polygon_area(square) == Approx(4.0));
    const auto half = clip_polygon(square, Vec2(1, 0), 0.0);
    CHECK(polygon_area(half) == Approx(2.0));
    const auto corner = clip_polygon(square, Vec2(1, 1), -1.0);
    CHECK(polygon_area(corner) == Approx(0.5));
    CHECK(clip_polygon(square, Vec2(1, 0), -2.0).empty());

    const std::vector<Halfspace> diamond{hs({1, 1}, 1), hs({-1, -1}, 1), hs({1, -1}, 1), hs({-1, 1}, 1)};
    CHECK(polygon_area(clip_square(diamond, 5.0)) == Approx(2.0));
    CHECK(polygon_area(clip_square({}, 1.5)) == Approx(9.0));
}

TEST_CASE("polygon-disk intersection areas")
{
    const std::vector<Vec2> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    CHECK(polygon_disk_area(square, 0.5) == Approx(std::numbers::pi / 4.0));
    CHECK(polygon_disk_area(square, std::sqrt(2.0)) == Approx(4.0));
    // Disk of radius 1.2 minus four circular segments beyond |x_i| = 1.
    const double R = 1.2;
    CHECK(polygon_disk_area(square, R) == Approx(std::numbers::pi * R * R - 4.0 * segment_area(R, 1.0)));
    // Edges tangent to the circle.
    CHECK(polygon_disk_area(square, 1.0) == Approx(std::numbers::pi));

    // Off-centre triangle against a grid-count oracle.
    const std::vector<Vec2> tri{{0.2, -0.9}, {1.7, 0.3}, {-0.4, 1.1}};
    auto inside = [&](double x, double y) {
        if (x * x + y * y > 1.0)
            return false;
        for (std::size_t i = 0; i < 3; ++i)
        {
            const Vec2 p = tri[i], q = tri[(i + 1) % 3];
            if ((q.x() - p.x()) * (y - p.y()) - (q.y() - p.y()) * (x - p.x()) < 0.0)
                return false;
        }
        return true;
    };
    CHECK(polygon_disk_area(tri, 1.0) == Approx(testing::grid_area_2d(inside, 1.0, 4000)).epsilon(2e-3));
}

TEST_CASE("slab-disk areas match the segment formula")
{
    for (double a : {0.1, 0.5, 1.0, 2.0, 7.0})
        for (double R : {0.3, 1.0, 4.0})
        {
            const double w = 1.0 / a;
            const double expected = std::numbers::pi * R * R - 2.0 * segment_area(R, w);
            CHECK(slab_disk_area(a, R) == Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("polyhedron clipping")
{
    Polyhedron cube = Polyhedron::cube(1.0);
    CHECK(cube.volume() == Approx(8.0));
    cube.clip(Vec3(1, 0, 0), 0.5);
    CHECK(cube.volume() == Approx(6.0));
    Polyhedron half = Polyhedron::cube(1.0);
    half.clip(Vec3(1, 1, 1), 0.0);
    CHECK(half.volume() == Approx(4.0));
    Polyhedron gone = Polyhedron::cube(1.0);
    gone.clip(Vec3(1, 0, 0), -2.0);
    CHECK(gone.empty());
    CHECK(gone.volume() == 0.0);
}

TEST_CASE("clipping order does not change the volume")
{
    // {0 <= s1+s2+s3 <= 1, |s3| <= 1/2} in [-3, 3]^3 has volume 131/24.
    const std::vector<Halfspace> cuts{hs({1, 1, 1}, 1), hs({-1, -1, -1}, 0), hs({0, 0, 1}, 0.5),
                                      hs({0, 0, -1}, 0.5)};
    std::vector<int> order{0, 1, 2, 3};
    do
    {
        std::vector<Halfspace> permuted;
        for (int i : order)
            permuted.push_back(cuts[static_cast<std::size_t>(i)]);
        CHECK(box_intersection_volume(permuted, 3, 3.0) == Approx(131.0 / 24.0).epsilon(1e-12));
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("convex hull with near-duplicate points keeps every vertex")
{
    std::vector<Vec2> pts{{0.0, 0.5},  {0.0, 0.0},  {0.5, 0.0}, {6.0, 5.5},
                          {6.0, 6.0},  {5.5, 6.0},  {0.0, 0.0}, {-8.8817841970012523e-16, 0.49999999999999911}};
    const auto hull = convex_hull_2d(pts);
    CHECK(hull.size() == 6);
    double area = 0.0;
    // Independent shoelace on the expected hexagon.
    const std::vector<Vec2> hex{{0, 0}, {0.5, 0}, {6, 5.5}, {6, 6}, {5.5, 6}, {0, 0.5}};
    for (std::size_t i = 0; i < hex.size(); ++i)
        area += hex[i].x() * hex[(i + 1) % hex.size()].y() - hex[(i + 1) % hex.size()].x() * hex[i].y();
    CHECK(polygon_area(hull) == Approx(0.5 * std::abs(area)).epsilon(1e-12));
}

TEST_CASE("property: the two exact 3-D routes agree and match Monte Carlo")
{
    testing::Gen g(77);
    for (int trial = 0; trial < 40; ++trial)
    {
        std::vector<Halfspace> cuts;
        const int m = 3 + trial % 6;
        for (int i = 0; i < m; ++i)
        {
            const Eigen::VectorXd a = testing::unit_vector(g, 3);
            cuts.push_back({a, testing::uniform(g, 0.2, 1.5)});
        }
        // Bound the region by a box through explicit half-spaces for the
        // vertex route.
        std::vector<Halfspace> boxed = cuts;
        for (int i = 0; i < 3; ++i)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
            e(i) = 1.0;
            boxed.push_back({e, 2.0});
            boxed.push_back({-e, 2.0});
        }
        const double clip = box_intersection_volume(cuts, 3, 2.0);
        const auto verts = enumerate_vertices(boxed, 3);
        const double enumerated = volume_from_vertices(boxed, verts, 3);
        CHECK(clip == Approx(enumerated).epsilon(1e-9));

        if (trial % 8 == 0)
        {
            const int samples = 200000;
            int hits = 0;
            for (int s = 0; s < samples; ++s)
            {
                Eigen::VectorXd x(3);
                for (int i = 0; i < 3; ++i)
                    x(i) = testing::uniform(g, -2.0, 2.0);
                bool in = true;
                for (const Halfspace& h : cuts)
                    in = in && h.normal.dot(x) <= h.offset;
                hits += in;
            }
            const double p = static_cast<double>(hits) / samples;
            const double se = 64.0 * std::sqrt(p * (1.0 - p) / samples);
            CHECK(std::abs(64.0 * p - clip) <= 4.0 * se + 1e-12);
        }
    }
}

TEST_CASE("property: 2-D clipping matches vertex enumeration")
{
    testing::Gen g(78);
    for (int trial = 0; trial < 60; ++trial)
    {
        std::vector<Halfspace> cuts;
        for (int i = 0; i < 2 + trial % 7; ++i)
            cuts.push_back({testing::unit_vector(g, 2), testing::uniform(g, 0.1, 2.0)});
        std::vector<Halfspace> boxed = cuts;
        for (int i = 0; i < 2; ++i)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
            e(i) = 1.0;
            boxed.push_back({e, 3.0});
            boxed.push_back({-e, 3.0});
        }
        const double clip = box_intersection_volume(cuts, 2, 3.0);
        CHECK(clip == Approx(volume_from_vertices(boxed, enumerate_vertices(boxed, 2), 2)).epsilon(1e-9));
    }
}

TEST_CASE("one-dimensional box intersections")
{
    CHECK(box_intersection_volume(std::vector<Halfspace>{hs({2}, 1), hs({-1}, 0.25)}, 1, 3.0) == Approx(0.75));
    CHECK(box_intersection_volume(std::vector<Halfspace>{hs({0}, -1)}, 1, 3.0) == 0.0);
    CHECK(box_intersection_volume(std::vector<Halfspace>{}, 1, 3.0) == Approx(6.0));
}
