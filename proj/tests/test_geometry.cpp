#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "capillary/errors.hpp"
#include "capillary/geometry.hpp"
#include "oracles.hpp"

using namespace capillary;
using oracle::figure_eight;
using oracle::regular_polygon;
using oracle::unit_square;

TEST_CASE("curve construction is validated") {
    CHECK_THROWS_AS(DiscreteCurve({{0, 0}, {1, 0}}), InvalidCurve);
    CHECK_THROWS_AS(DiscreteCurve({{0, 0}, {0, 0}, {1, 1}}), InvalidCurve);
    CHECK_THROWS_AS(DiscreteCurve({{0, 0}, {1, 0}, {1, 1}}, {3}), InvalidCurve);
    CHECK_THROWS_AS(DiscreteCurve({{0, 0}, {1, 0}, {1, 1}}, {1, 1}), InvalidCurve);
    DiscreteCurve c({{0, 0}, {1, 0}, {1, 1}}, {2, 0});
    CHECK(c.pinned() == std::vector<std::size_t>{0, 2});
    CHECK(c.is_pinned(2));
    CHECK_FALSE(c.is_pinned(1));
}

TEST_CASE("length of squares and hexagons") {
    CHECK(curve_length(unit_square()) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(curve_length(regular_polygon(6)) == doctest::Approx(6.0).epsilon(1e-14));
    auto c = regular_polygon(17, 2.0);
    CHECK(curve_length(c) == doctest::Approx(2 * 17 * 2.0 * std::sin(std::numbers::pi / 17)).epsilon(1e-14));
}

TEST_CASE("length equals a refined partition sum") {
    auto c = oracle::random_star(64, 7);
    // refining every segment by collinear points cannot change the polygonal length
    double refined = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        Vec2 a = c[i], b = c[c.next(i)];
        Vec2 prev = a;
        for (int k = 1; k <= 5; ++k) {
            Vec2 q = a + (b - a) * (k / 5.0);
            refined += std::hypot(q.x - prev.x, q.y - prev.y);
            prev = q;
        }
    }
    CHECK(curve_length(c) == doctest::Approx(refined).epsilon(1e-13));
}

TEST_CASE("segment frames follow orientation") {
    auto f = segment_frames(unit_square());
    CHECK(f[0].tangent == Vec2{1, 0});
    CHECK(f[0].normal == Vec2{0, 1});
    CHECK(f[0].midpoint == Vec2{0.5, 0});
    auto r = segment_frames(DiscreteCurve({{1, 0}, {0, 0}, {0, 1}, {1, 1}}));
    CHECK(r[0].tangent == Vec2{-1, 0});
    CHECK(r[0].normal == Vec2{0, -1});

    auto c = oracle::random_star(40, 3);
    auto fr = segment_frames(c);
    double sum = 0.0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        sum += fr[i].length;
        CHECK(std::abs(norm(fr[i].tangent) - 1.0) < 1e-15);
        CHECK(std::abs(dot(fr[i].tangent, fr[i].normal)) < 1e-15);
        for (std::size_t j = 0; j < fr.size(); ++j)
            CHECK(std::abs(norm(fr[i].normal - fr[j].normal) - norm(fr[i].tangent - fr[j].tangent)) < 1e-15);
    }
    CHECK(sum == doctest::Approx(curve_length(c)).epsilon(1e-14));
}

TEST_CASE("winding numbers") {
    auto circle = regular_polygon(128);
    CHECK(winding_number(circle, {0, 0}) == 1);
    CHECK(winding_number(circle, {2, 0}) == 0);
    CHECK(winding_number(circle.reversed(), {0, 0}) == -1);
    CHECK_THROWS_AS(winding_number(unit_square(), {0.5, 0.0}), OnCurveError);

    // forward-then-backward tour: zero everywhere off the curve
    DiscreteCurve tour({{0, 0}, {1, 0}, {2, 1}, {1, 0}});
    CHECK(winding_number(tour, {0.5, 0.5}) == 0);
    CHECK(winding_number(tour, {1.5, 0.2}) == 0);

    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto c = oracle::random_star(48, seed);
        for (int k = 0; k < 200; ++k) {
            Vec2 x{u(g), u(g)};
            CHECK(winding_number(c, x) == oracle::ray_cast_winding(c, x));
        }
    }
}

TEST_CASE("winding is additive over loops sharing a base point") {
    // two CCW squares sharing the origin, traversed one after the other
    DiscreteCurve both({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}, {0, -1}, {-1, -1}, {-1, 0}});
    auto a = unit_square();
    DiscreteCurve b({{0, 0}, {0, -1}, {-1, -1}, {-1, 0}});
    for (Vec2 x : {Vec2{0.5, 0.5}, Vec2{-0.5, -0.5}, Vec2{2, 2}, Vec2{-0.5, 0.5}})
        CHECK(winding_number(both, x) == winding_number(a, x) + winding_number(b, x));
}

TEST_CASE("signed area") {
    CHECK(signed_area(unit_square()) == 1.0);
    CHECK(signed_area(unit_square().reversed()) == -1.0);
    for (std::size_t n : {3, 7, 64}) {
        double r = 0.7;
        CHECK(signed_area(regular_polygon(n, r)) ==
              doctest::Approx(0.5 * n * r * r * std::sin(2 * std::numbers::pi / n)).epsilon(1e-13));
    }
    auto c = oracle::random_star(30, 2);
    CHECK(signed_area(c) == doctest::Approx(oracle::shoelace(c.vertices())).epsilon(1e-13));
}

TEST_CASE("self intersections") {
    CHECK(self_intersections(regular_polygon(20)).empty());
    auto eight = figure_eight();
    auto hits = self_intersections(eight);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].transversal);
    CHECK(norm(hits[0].point) < 1e-12);
}

TEST_CASE("self intersections agree with an all-pairs proper-crossing count") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec2> v(32);
        for (auto& p : v) p = {u(g), u(g)};
        DiscreteCurve c(v);
        std::size_t expected = 0;
        const std::size_t n = v.size();
        auto side = [](Vec2 a, Vec2 b, Vec2 p) { return cross(b - a, p - a); };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                Vec2 a = v[i], b = v[(i + 1) % n], p = v[j], q = v[(j + 1) % n];
                if (side(a, b, p) * side(a, b, q) < 0 && side(p, q, a) * side(p, q, b) < 0) ++expected;
            }
        CHECK(self_intersections(c).size() == expected);
    }
}

TEST_CASE("winding class") {
    auto circle = regular_polygon(64);
    auto ok = check_winding_class(circle);
    CHECK(ok.ok);
    CHECK(ok.embedded);
    CHECK_FALSE(check_winding_class(circle.reversed()).ok);

    auto eight = figure_eight();
    auto bad = check_winding_class(eight);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness_winding == -1);
    CHECK(winding_number(eight, *bad.witness) == -1);

    DiscreteCurve tour({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 0}, {1, 0}});
    auto t = check_winding_class(tour);
    CHECK(t.ok);
    CHECK_FALSE(t.embedded);

    // twice around the circle: winding 2 inside
    std::vector<Vec2> twice;
    for (int k = 0; k < 64; ++k) {
        double a = 4 * std::numbers::pi * k / 64.0 + 0.01;
        twice.push_back({std::cos(a), std::sin(a) * (1 + 0.1 * (k >= 32))});
    }
    CHECK_FALSE(check_winding_class(DiscreteCurve(twice)).ok);
}

TEST_CASE("enclosed area") {
    CHECK(enclosed_area(unit_square()) == 1.0);
    DiscreteCurve tour({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 0}, {1, 0}});
    CHECK(enclosed_area(tour) == doctest::Approx(0.0));
    double r = std::sqrt(0.01 / std::numbers::pi);
    auto c = regular_polygon(256, r);
    CHECK(enclosed_area(c) == doctest::Approx(128 * r * r * std::sin(2 * std::numbers::pi / 256)).epsilon(1e-12));
    CHECK_THROWS_AS(enclosed_area(figure_eight()), WindingClassError);
    auto star = oracle::random_star(40, 9);
    CHECK(enclosed_area(star) == doctest::Approx(signed_area(star)).epsilon(1e-12));
}

TEST_CASE("non-adjacent separation") {
    CHECK(min_nonadjacent_separation(unit_square()) == doctest::Approx(1.0));
    CHECK(min_nonadjacent_separation(figure_eight()) == 0.0);
    DiscreteCurve rect({{0, 0}, {1, 0}, {1, 0.3}, {0, 0.3}});
    CHECK(min_nonadjacent_separation(rect) == doctest::Approx(0.3));
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto c = oracle::random_star(24, seed, 0.6);
        CHECK((min_nonadjacent_separation(c) > 0.0) == self_intersections(c).empty());
    }
}

TEST_CASE("bi-Lipschitz constant") {
    // unit-length circle: chord over circular parameter distance is smallest at antipodes
    auto circle = regular_polygon(256, 1.0 / (2 * std::numbers::pi));
    double m = bilipschitz_constant(circle);
    CHECK(m == doctest::Approx(2.0 / std::numbers::pi * curve_length(circle)).epsilon(0.01));
    CHECK(bilipschitz_constant(figure_eight()) < 1e-9);

    auto sq = unit_square();
    double brute = 1e300;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double d = std::min((j - i) / 4.0, 1.0 - (j - i) / 4.0);
            brute = std::min(brute, distance(sq[i], sq[j]) / d);
        }
    CHECK(bilipschitz_constant(sq) <= brute + 1e-15);
    CHECK(bilipschitz_constant(sq) == doctest::Approx(brute));
}

TEST_CASE("constant-speed resampling") {
    auto circle = regular_polygon(40);
    auto same = resample_constant_speed(circle, 40).curve;
    for (std::size_t k = 0; k < 40; ++k) CHECK(distance(same[k], circle[k]) < 1e-12);

    DiscreteCurve sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 1, 2, 3});
    auto r = resample_constant_speed(sq, 40);
    REQUIRE(r.curve.size() == 40);
    CHECK(r.curve.pinned().size() == 4);
    for (auto k : r.curve.pinned()) CHECK(k % 10 == 0);
    CHECK(r.curve[0] == Vec2{0, 0});
    CHECK(r.curve[10] == Vec2{1, 0});
    CHECK(r.curve[20] == Vec2{1, 1});
    CHECK(curve_length(r.curve) == doctest::Approx(4.0).epsilon(1e-14));

    auto star = oracle::random_star(50, 4).with_pins({3, 20, 41});
    auto rs = resample_constant_speed(star, 90);
    CHECK(curve_length(rs.curve) <= curve_length(star) + 1e-12);
    CHECK(rs.length_deficit >= -1e-12);
    for (std::size_t q = 0; q < 3; ++q) CHECK(rs.curve[rs.curve.pinned()[q]] == star[star.pinned()[q]]);
    // equal chords within each pinned arc of a smooth curve
    auto smooth = regular_polygon(64, 1.0, {}, 0.1).transformed(1.0).with_pins({3, 20, 41});
    auto rsm = resample_constant_speed(smooth, 90);
    const auto& pins = rsm.curve.pinned();
    for (std::size_t a = 0; a < pins.size(); ++a) {
        std::size_t from = pins[a], to = pins[(a + 1) % pins.size()];
        double lo = 1e300, hi = 0.0;
        for (std::size_t k = from; k != to; k = rsm.curve.next(k)) {
            double l = distance(rsm.curve[k], rsm.curve[rsm.curve.next(k)]);
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        CHECK(hi / lo <= 1.0 + 1e-9);
    }
    CHECK_THROWS_AS(resample_constant_speed(sq, 4), InvalidCurve);
}

TEST_CASE("Hausdorff distance") {
    auto a = unit_square();
    auto b = a.transformed(1.0, 0.0, {0.1, 0.0});
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("relabeling and reversal change no geometry") {
    auto c = oracle::random_star(33, 8);
    auto r = c.relabeled(11);
    CHECK(curve_length(r) == doctest::Approx(curve_length(c)).epsilon(1e-12));
    CHECK(signed_area(r) == doctest::Approx(signed_area(c)).epsilon(1e-12));
    CHECK(min_nonadjacent_separation(r) == doctest::Approx(min_nonadjacent_separation(c)).epsilon(1e-12));
    CHECK(winding_number(r, {0.1, 0.05}) == winding_number(c, {0.1, 0.05}));
    CHECK(signed_area(c.reversed()) == doctest::Approx(-signed_area(c)).epsilon(1e-12));
}

TEST_CASE("curve files round-trip bit-exactly") {
    auto c = oracle::random_star(20, 1).with_pins({2, 9});
    std::stringstream ss;
    write_curve(ss, c);
    auto back = read_curve(ss);
    REQUIRE(back.size() == c.size());
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(back[k] == c[k]);
    CHECK(back.pinned() == c.pinned());
    std::stringstream bad("0 0\n1 x\n");
    CHECK_THROWS(read_curve(bad));
}
