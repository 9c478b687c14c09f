#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "capillary/constraints.hpp"
#include "capillary/errors.hpp"
#include "oracles.hpp"

using namespace capillary;
using oracle::regular_polygon;

namespace {

ConstraintSpec make_spec(std::vector<Vec2> pins, double eps) {
    ConstraintSpec s;
    s.pins = std::move(pins);
    s.epsilon = eps;
    return s;
}

void check_admissible(const DiscreteCurve& c, const ConstraintSpec& spec) {
    CHECK(self_intersections(c).empty());
    CHECK(check_winding_class(c).ok);
    CHECK(std::abs(area_residual(c, spec)) <= spec.tol_area * spec.epsilon);
    CHECK(pin_residual(c, spec) == 0.0);
    CHECK(c.pinned().size() == spec.pins.size());
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(make_spec({{0, 0}, {1, 0}}, 0.1).validate());
    CHECK_THROWS_AS(make_spec({{0, 0}}, 0.1).validate(), ConfigError);
    CHECK_THROWS_AS(make_spec({{0, 0}, {0, 0}}, 0.1).validate(), ConfigError);
    CHECK_THROWS_AS(make_spec({{0, 0}, {1, 0}}, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(make_spec({{0, 0}, {1, 0}}, -1.0).validate(), ConfigError);
    auto s = make_spec({{0, 0}, {1, 0}}, 0.1);
    s.tol_area = 0.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.tol_area = 1e-8;
    s.tol_pin = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_NOTHROW(make_spec({}, 0.1).validate(0));
}

TEST_CASE("attach pins at existing vertices is a fixed point") {
    auto sq = oracle::unit_square();
    auto spec = make_spec({{1, 0}, {0, 1}}, 1.0);
    auto c = attach_pins(sq, spec);
    REQUIRE(c.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(c[k] == sq[k]);
    CHECK(c.pinned() == std::vector<std::size_t>{1, 3});
    CHECK(pin_residual(c, spec) == 0.0);
    CHECK(attach_pins(c, spec).vertices() == c.vertices());
}

TEST_CASE("attach pins splits the nearest segment") {
    auto circle = regular_polygon(16, 1.0, {}, 0.5 * 2 * std::numbers::pi / 16);
    auto spec = make_spec({{1, 0}}, 1.0);
    auto c = attach_pins(circle, spec);
    CHECK(c.size() == 17);
    CHECK(pin_residual(c, spec) == 0.0);
    CHECK(c[c.pinned()[0]] == Vec2{1, 0});
}

TEST_CASE("attach pins on a random curve") {
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto c = oracle::random_star(60, seed);
        auto spec = make_spec({{u(g), u(g) + 1.0}, {u(g) - 1.0, u(g)}, {u(g), u(g) - 1.0}}, 1.0);
        auto a = attach_pins(c, spec);
        CHECK(pin_residual(a, spec) == 0.0);
        CHECK(a.size() <= c.size() + 3);
        CHECK(a.pinned().size() == 3);
    }
}

TEST_CASE("two pins competing for one vertex") {
    auto sq = oracle::unit_square();
    auto spec = make_spec({{0.01, 0.0}, {0.0, 0.01}}, 1.0);
    CHECK_THROWS_AS(attach_pins(sq, spec), InvalidCurve);
}

TEST_CASE("pin residual") {
    auto circle = regular_polygon(400);
    auto spec = make_spec({{1.3, 0.0}}, 1.0);
    CHECK(pin_residual(circle, spec) == doctest::Approx(0.3).epsilon(1e-9));
    auto pinned = circle.with_pins({0});
    CHECK(pin_residual(pinned, make_spec({{1, 0}}, 1.0)) == 0.0);
    std::vector<Vec2> v = circle.vertices();
    v[0] += Vec2{0.003, -0.004};
    CHECK(pin_residual(pinned.with_vertices(v), make_spec({{1, 0}}, 1.0)) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("area residual") {
    auto c = regular_polygon(64, 0.2);
    CHECK(area_residual(c, make_spec({}, signed_area(c))) == 0.0);
    DiscreteCurve tour({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 0}, {1, 0}});
    CHECK(area_residual(tour, make_spec({}, 0.01)) == doctest::Approx(-0.01));
    CHECK(area_residual(oracle::unit_square(), make_spec({}, 1.0)) == 0.0);
    CHECK_THROWS_AS(area_residual(oracle::figure_eight(), make_spec({}, 0.1)), WindingClassError);
}

TEST_CASE("area gradient matches finite differences") {
    auto c = oracle::random_star(20, 6);
    auto fd = oracle::finite_difference([](const std::vector<Vec2>& v) { return oracle::shoelace(v); }, c.vertices(), 1e-6);
    auto g = area_gradient(c);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(norm(g[k] - fd[k]) < 1e-8);
}

TEST_CASE("vertex normals") {
    auto c = regular_polygon(12).with_pins({4});
    auto nrm = vertex_normals(c);
    for (std::size_t k = 0; k < 12; ++k) {
        if (k == 4) {
            CHECK(nrm[k] == Vec2{});
            continue;
        }
        // parallel to the radius
        CHECK(std::abs(std::abs(dot(nrm[k], c[k])) - 1.0) < 1e-12);
        CHECK(std::abs(norm(nrm[k]) - 1.0) < 1e-12);
    }
}

TEST_CASE("area projection") {
    auto c = regular_polygon(64);
    double a = signed_area(c);
    auto same = project_area_with_offset(c, make_spec({}, a));
    CHECK(same.offset == 0.0);
    CHECK(same.curve.vertices() == c.vertices());

    // halving the area needs an offset of 0.29 r, beyond the 0.1 diameter guard
    auto spec = make_spec({}, 0.5 * a);
    CHECK_THROWS_AS(project_area(c, spec), ProjectionOutOfRange);
    for (double f : {0.6, 0.8, 1.3}) {
        auto target = make_spec({}, f * a);
        auto r = project_area(c, target);
        CHECK(std::abs(signed_area(r) - target.epsilon) <= 1e-12 * target.epsilon);
    }

    auto pinned = c.with_pins({0, 17, 40});
    auto r = project_area(pinned, make_spec({}, 1.2 * a));
    for (auto k : pinned.pinned()) CHECK(r[k] == c[k]);
    CHECK(signed_area(r) == doctest::Approx(1.2 * a).epsilon(1e-8));

    std::vector<std::size_t> all(64);
    for (std::size_t k = 0; k < 64; ++k) all[k] = k;
    CHECK_THROWS_AS(project_area(c.with_pins(all), spec), ProjectionOutOfRange);
    CHECK_THROWS_AS(project_area(c, make_spec({}, 50.0 * a)), ProjectionOutOfRange);
}

TEST_CASE("projection moves length by a bounded amount on convex shapes") {
    for (double target : {0.9, 0.97, 1.05}) {
        for (std::size_t n : {16, 64, 200}) {
            auto c = regular_polygon(n, 0.7).transformed(1.0, 0.0, {0.3, -0.2});
            double a = signed_area(c), l = curve_length(c);
            auto spec = make_spec({}, target * a);
            auto r = project_area_with_offset(c, spec);
            CHECK(std::abs(curve_length(r.curve) - l) <= 2.0 * l * std::abs(r.offset));
            // first-order offset: area change over perimeter
            CHECK(std::abs(r.offset) <= 2.0 * std::abs(a - spec.epsilon) / l);
        }
    }
}

TEST_CASE("projection along a direction field") {
    auto c = regular_polygon(40);
    std::vector<Vec2> dirs(40);
    for (std::size_t k = 0; k < 40; ++k) dirs[k] = c[k] * (k % 2 == 0 ? 1.0 : 0.5);
    auto spec = make_spec({}, 0.8 * signed_area(c));
    auto r = project_area_along(c, spec, dirs);
    CHECK(signed_area(r.curve) == doctest::Approx(spec.epsilon).epsilon(1e-10));
    for (std::size_t k = 0; k < 40; ++k) CHECK(norm(r.curve[k] - (c[k] + dirs[k] * r.offset)) < 1e-12);
    CHECK_THROWS_AS(project_area_along(c, spec, std::vector<Vec2>(3)), InvalidCurve);
}

TEST_CASE("vertex room and room-weighted normals") {
    DiscreteCurve rect({{0, 0}, {1, 0}, {2, 0}, {2, 0.1}, {1, 0.1}, {0, 0.1}});
    auto room = vertex_room(rect);
    for (double r : room) CHECK(r == doctest::Approx(0.1));
    auto w = room_weighted_normals(rect);
    auto nrm = vertex_normals(rect);
    for (std::size_t k = 0; k < rect.size(); ++k) CHECK(norm(w[k] - nrm[k]) < 1e-12);

    auto c = oracle::random_star(30, 2);
    auto rc = vertex_room(c);
    auto wc = room_weighted_normals(c);
    double big = *std::max_element(rc.begin(), rc.end());
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(norm(wc[k]) <= rc[k] / big + 1e-12);
}

TEST_CASE("initial curve, two pins") {
    auto spec = make_spec({{0, 0}, {1, 0}}, 0.01);
    auto c = initial_curve(spec, 200);
    CHECK(c.size() == 200);
    check_admissible(c, spec);
    CHECK(curve_length(c) > 2.0);
    CHECK(curve_length(c) < 2.2);
}

TEST_CASE("initial curve, equilateral pins") {
    auto spec = make_spec({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}, 0.05);
    std::vector<std::string> warnings;
    auto c = initial_curve(spec, 240, &warnings);
    check_admissible(c, spec);
}

TEST_CASE("initial curve, four pins and collinear pins") {
    auto sq = make_spec({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 1e-3);
    check_admissible(initial_curve(sq, 256), sq);

    auto line = make_spec({{0, 0}, {1, 0}, {2.5, 0}}, 0.02);
    std::vector<std::string> warnings;
    auto c = initial_curve(line, 200, &warnings);
    check_admissible(c, line);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("initial curve with area too large for a thin tube") {
    auto spec = make_spec({{0, 0}, {1, 0}}, 0.8);
    std::vector<std::string> warnings;
    auto c = initial_curve(spec, 300, &warnings);
    check_admissible(c, spec);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("initial curve errors") {
    CHECK_THROWS_AS(initial_curve(make_spec({{0, 0}, {1, 0}}, 0.0), 100), ConfigError);
    CHECK_THROWS_AS(initial_curve(make_spec({{0, 0}, {1, 0}}, 0.01), 20), ConfigError);
}
