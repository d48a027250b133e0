#include <catch_amalgamated.hpp>

#include <cmath>

#include "stit/constants.hpp"
#include "stit/measure.hpp"
#include "stit/polytope.hpp"
#include "stit/rng.hpp"

using namespace stit;

namespace {

// Distance from a point to an axis-aligned box [0,a]^3 (for the Steiner oracle).
double dist_to_box(const Vec3& p, double a) {
    auto clampd = [&](double x) { return std::min(std::max(x, 0.0), a); };
    Vec3 q{clampd(p.x), clampd(p.y), clampd(p.z)};
    return dist(p, q);
}

Mat3 random_rotation(Rng& rng) {
    // Shoemake's uniform random quaternion.
    double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    double a = std::sqrt(1 - u1), b = std::sqrt(u1);
    double qx = a * std::sin(2 * kPi * u2), qy = a * std::cos(2 * kPi * u2);
    double qz = b * std::sin(2 * kPi * u3), qw = b * std::cos(2 * kPi * u3);
    Mat3 R;
    R.m = {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw),
           2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
           2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy)};
    return R;
}

Hyperplane random_cutting_plane(const Polytope& P, Rng& rng) {
    return sample_hitting_hyperplane(P, 3, rng);
}

}  // namespace

TEST_CASE("unit cube combinatorics and volumes") {
    auto cube = Polytope::box({1.0}, 3);
    CHECK(cube.vertex_count() == 8);
    CHECK(cube.edge_count() == 12);
    CHECK(cube.facet_count() == 6);
    CHECK(cube.euler_ok());
    CHECK(cube.convexity_ok(1e-12));
    CHECK_THAT(cube.volume(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(cube.intrinsic_volume(3), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(cube.intrinsic_volume(2), Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK_THAT(cube.intrinsic_volume(1), Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK_THAT(cube.intrinsic_volume(0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("simplex combinatorics") {
    auto s = Polytope::simplex(3);
    CHECK(s.vertex_count() == 4);
    CHECK(s.edge_count() == 6);
    CHECK(s.facet_count() == 4);
    CHECK(s.euler_ok());
    CHECK_THAT(s.volume(), Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-12));
}

TEST_CASE("box input validation") {
    CHECK_THROWS(Polytope::box({1.0}, 4));
    CHECK_THROWS(Polytope::box({-1.0}, 3));
    CHECK_THROWS(Polytope::box({1.0, 2.0}, 3));
}

TEST_CASE("square polygon intrinsic volumes") {
    auto sq = Polytope::box({1.0}, 2);
    CHECK_THAT(sq.intrinsic_volume(2), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(sq.intrinsic_volume(1), Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(sq.intrinsic_volume(0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("V1 of the cube against a Steiner-formula Monte Carlo oracle") {
    // Vol(K + B) = V3 + kappa_1 V2 + kappa_2 V1 + kappa_3, so V1 can be read
    // off an estimate of the parallel-body volume that never touches the
    // dihedral-angle code path.
    Rng rng(2024);
    const int n = 400000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        Vec3 p{rng.uniform(-1, 2), rng.uniform(-1, 2), rng.uniform(-1, 2)};
        if (dist_to_box(p, 1.0) <= 1.0) ++hits;
    }
    double phat = double(hits) / n;
    double vol = 27.0 * phat;
    double se = 27.0 * std::sqrt(phat * (1 - phat) / n);
    double v1_mc = (vol - 1.0 - unit_ball_volume(1) * 3.0 - unit_ball_volume(3)) / unit_ball_volume(2);
    double v1_se = 4.0 * se / unit_ball_volume(2);
    auto cube = Polytope::box({1.0}, 3);
    CHECK(std::abs(cube.intrinsic_volume(1) - v1_mc) < v1_se);
}

TEST_CASE("axis-aligned clip of the unit cube") {
    auto cube = Polytope::box({1.0}, 3);
    auto r = clip(cube, Hyperplane{{1, 0, 0}, 0.5});
    REQUIRE(r.is_split());
    CHECK_THAT(r.above.volume(), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(r.below.volume(), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(r.facet.volume(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(r.above.euler_ok());
    CHECK(r.below.euler_ok());

    auto miss = clip(cube, Hyperplane{{1, 0, 0}, 2.0});
    CHECK(!miss.is_split());
}

TEST_CASE("valuation identity at random clips") {
    Rng rng(7);
    auto W = Polytope::box({1.0}, 3);
    Tolerances tol = W.default_tolerances();
    for (int rep = 0; rep < 200; ++rep) {
        // random sub-cell of the cube, then a random split of it
        Polytope P = W;
        for (int cut = 0; cut < 2; ++cut) {
            auto r = clip(P, random_cutting_plane(P, rng), tol);
            if (r.is_split()) P = (rng.uniform() < 0.5) ? r.above : r.below;
        }
        auto r = clip(P, random_cutting_plane(P, rng), tol);
        if (!r.is_split()) continue;
        CHECK(r.above.euler_ok());
        CHECK(r.below.euler_ok());
        for (int j = 0; j <= 3; ++j) {
            double lhs = r.above.intrinsic_volume(j) + r.below.intrinsic_volume(j) -
                         P.intrinsic_volume(j);
            double rhs = j <= 2 ? r.facet.intrinsic_volume(j) : 0.0;
            CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-9 * std::max(1.0, P.intrinsic_volume(j))));
        }
    }
}

TEST_CASE("partition of volume under repeated clipping") {
    Rng rng(11);
    auto W = Polytope::box({2.0, 1.0, 1.5}, 3);
    Tolerances tol = W.default_tolerances();
    std::vector<Polytope> cells{W};
    for (int cut = 0; cut < 40; ++cut) {
        std::size_t pick = std::size_t(rng.uniform() * double(cells.size()));
        auto r = clip(cells[pick], random_cutting_plane(cells[pick], rng), tol);
        if (!r.is_split()) continue;
        cells[pick] = r.above;
        cells.push_back(r.below);
    }
    double total = 0.0;
    for (const auto& c : cells) {
        total += c.volume();
        CHECK(c.euler_ok());
        CHECK(c.convexity_ok(1e-9 * W.diameter()));
    }
    CHECK_THAT(total, Catch::Matchers::WithinRel(W.volume(), 1e-9));
}

TEST_CASE("face enumeration") {
    auto cube = Polytope::box({1.0}, 3);
    auto edges = cube.faces(1);
    REQUIRE(edges.size() == 12);
    for (const auto& e : edges) CHECK_THAT(e.volume(), Catch::Matchers::WithinAbs(1.0, 1e-12));

    auto facets = cube.faces(2);
    REQUIRE(facets.size() == 6);
    CHECK(facets[0].faces(0).size() == 4);

    auto tri = Polytope::simplex(2);
    auto sides = tri.faces(1);
    REQUIRE(sides.size() == 3);
    double perim = 0.0;
    for (const auto& s : sides) perim += s.volume();
    CHECK_THAT(perim, Catch::Matchers::WithinRel(tri.perimeter(), 1e-12));

    CHECK(cube.faces(3).size() == 1);
    CHECK_THROWS(cube.faces(4));
}

TEST_CASE("support width and diameter") {
    auto cube = Polytope::box({1.0}, 3);
    CHECK_THAT(cube.width({1, 0, 0}), Catch::Matchers::WithinAbs(1.0, 1e-12));
    double s = 1.0 / std::sqrt(3.0);
    CHECK_THAT(cube.width({s, s, s}), Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-12));
    CHECK_THAT(cube.diameter(), Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-12));
    CHECK_THROWS(cube.width({0, 0, 0}));
}

TEST_CASE("homogeneity and motion invariance of intrinsic volumes") {
    Rng rng(42);
    auto P = Polytope::simplex(3);
    for (int rep = 0; rep < 25; ++rep) {
        double scale = rng.uniform(0.1, 3.0);
        auto Q = P.scaled(scale);
        for (int j = 0; j <= 3; ++j)
            CHECK_THAT(Q.intrinsic_volume(j),
                       Catch::Matchers::WithinRel(std::pow(scale, j) * P.intrinsic_volume(j), 1e-9));
        auto Rt = P.rotated(random_rotation(rng)).translated({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
        for (int j = 0; j <= 3; ++j)
            CHECK_THAT(Rt.intrinsic_volume(j), Catch::Matchers::WithinRel(P.intrinsic_volume(j), 1e-9));
    }
}

TEST_CASE("ball approximation") {
    auto B = Polytope::ball_approx(3, 500);
    CHECK(B.facet_count() >= 500);
    CHECK(B.euler_ok());
    CHECK(B.convexity_ok(1e-9));
    // inscribed approximation: slightly below ball values, converging from below
    CHECK(B.volume() < unit_ball_volume(3));
    CHECK(B.volume() > 0.97 * unit_ball_volume(3));
    auto fine = Polytope::ball_approx(3, 3000);
    CHECK(fine.volume() < unit_ball_volume(3));
    CHECK(fine.volume() > 0.995 * unit_ball_volume(3));
    CHECK_THAT(B.intrinsic_volume(1), Catch::Matchers::WithinRel(4.0, 5e-3));
    CHECK(B.contains({0.2, 0.1, -0.3}, 1e-12));
    CHECK(!B.contains({1.01, 0, 0}, 1e-12));
}

TEST_CASE("cross_section equals the clip facet") {
    Rng rng(5);
    auto cube = Polytope::box({1.0}, 3);
    for (int rep = 0; rep < 50; ++rep) {
        auto H = random_cutting_plane(cube, rng);
        auto r = clip(cube, H);
        auto cap = cross_section(cube, H);
        REQUIRE(r.is_split() == cap.has_value());
        if (cap)
            CHECK_THAT(cap->volume(), Catch::Matchers::WithinRel(r.facet.volume(), 1e-9));
    }
}

TEST_CASE("polygon clip") {
    auto sq = Polytope::box({1.0}, 2);
    auto r = clip(sq, Hyperplane{{0, 1, 0}, 0.25});
    REQUIRE(r.is_split());
    CHECK_THAT(r.above.volume(), Catch::Matchers::WithinAbs(0.75, 1e-12));
    CHECK_THAT(r.below.volume(), Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_THAT(r.facet.volume(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(!clip(sq, Hyperplane{{0, 1, 0}, 1.5}).is_split());

    // valuation identity for polygons
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        auto H = sample_hitting_hyperplane(sq, 2, rng);
        auto c = clip(sq, H);
        if (!c.is_split()) continue;
        for (int j = 0; j <= 2; ++j) {
            double lhs = c.above.intrinsic_volume(j) + c.below.intrinsic_volume(j) -
                         sq.intrinsic_volume(j);
            double rhs = j <= 1 ? c.facet.intrinsic_volume(j) : 0.0;
            CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-9));
        }
    }
}

TEST_CASE("embedded polygon metrics") {
    // a triangle in the plane z = x, checked against its intrinsic geometry
    std::vector<Vec3> ring{{0, 0, 0}, {1, 0, 1}, {0, 1, 0}};
    auto t = Polytope::polygon(ring, 3);
    double a = std::sqrt(2.0), b = 1.0, c = std::sqrt(3.0);
    double sp = (a + b + c) / 2;
    double heron = std::sqrt(sp * (sp - a) * (sp - b) * (sp - c));
    CHECK_THAT(t.intrinsic_volume(2), Catch::Matchers::WithinRel(heron, 1e-12));
    CHECK_THAT(t.perimeter(), Catch::Matchers::WithinRel(a + b + c, 1e-12));
}

TEST_CASE("hyperplane canonical form") {
    auto h = canonicalize({{0, 0, -1}, -0.3});
    CHECK(h.normal.z == 1.0);
    CHECK_THAT(h.offset, Catch::Matchers::WithinAbs(0.3, 1e-15));
    auto e = canonicalize({{-1, 0, 0}, 0.5});
    CHECK(e.normal.x == 1.0);
    CHECK_THAT(e.offset, Catch::Matchers::WithinAbs(-0.5, 1e-15));
}
