#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "capillary/energy.hpp"
#include "capillary/errors.hpp"
#include "capillary/experiments.hpp"
#include "oracles.hpp"

using namespace capillary;
using oracle::regular_polygon;

namespace {

EnergyParams params(double s, double p, double delta = 1e-2) {
    EnergyParams e;
    e.s = s;
    e.p = p;
    e.delta = delta;
    return e;
}

double max_norm(const std::vector<Vec2>& g) {
    double m = 0.0;
    for (const auto& v : g) m = std::max(m, norm(v));
    return m;
}

} // namespace

TEST_CASE("parameter validation and regimes") {
    CHECK_NOTHROW(params(0.6, 2).validate());
    CHECK_THROWS_AS(params(0.0, 2).validate(), ConfigError);
    CHECK_THROWS_AS(params(1.0, 2).validate(), ConfigError);
    CHECK_THROWS_AS(params(0.5, 0.5).validate(), ConfigError);
    CHECK_THROWS_AS(params(0.5, 2, -1).validate(), ConfigError);
    auto w0 = params(0.5, 2);
    w0.exclusion_width = 0;
    CHECK_THROWS_AS(w0.validate(), ConfigError);
    CHECK(params(0.6, 2).regime() == Regime::NonCollapsing);
    CHECK(params(0.5, 2).regime() == Regime::MobiusCritical);
    CHECK(params(0.4, 2).regime() == Regime::CollapsingPermissive);
    CHECK(to_string(Regime::NonCollapsing) == "non-collapsing");
}

TEST_CASE("nonlocal energy agrees with a from-scratch double loop") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto c = oracle::random_star(40, seed);
        for (auto [s, p] : {std::pair{0.6, 2.0}, {0.4, 2.0}, {0.5, 3.5}, {0.9, 1.0}}) {
            double expect = oracle::brute_nonlocal(c.vertices(), s, p);
            CHECK(nonlocal_energy(c, params(s, p)) == doctest::Approx(expect).epsilon(1e-12));
        }
        auto wide = params(0.6, 2);
        wide.exclusion_width = 3;
        CHECK(nonlocal_energy(c, wide) == doctest::Approx(oracle::brute_nonlocal(c.vertices(), 0.6, 2, 3)).epsilon(1e-12));
    }
}

TEST_CASE("pair symmetry and the normal-vector form") {
    auto c = oracle::random_star(30, 12);
    auto f = segment_frames(c);
    double ordered = 0.0, unordered = 0.0, with_normals = 0.0;
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t d = i > j ? i - j : j - i;
            if (std::min(d, n - d) <= 1) continue;
            double t = pair_term(f[i], f[j], 0.6, 2.0);
            CHECK(std::abs(t - pair_term(f[j], f[i], 0.6, 2.0)) <= 1e-15 * t);
            ordered += t;
            if (i < j) unordered += t;
            SegmentFrame a = f[i], b = f[j];
            a.tangent = a.normal;
            b.tangent = b.normal;
            with_normals += pair_term(a, b, 0.6, 2.0);
        }
    CHECK(2.0 * unordered == doctest::Approx(ordered).epsilon(1e-15));
    CHECK(ordered == doctest::Approx(nonlocal_energy(c, params(0.6, 2))).epsilon(1e-13));
    CHECK(std::abs(with_normals - ordered) <= 1e-15 * ordered * 10);
}

TEST_CASE("coincident midpoints are reported") {
    DiscreteCurve doubled({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {2, 0}, {1, 0}});
    CHECK_THROWS_AS(nonlocal_energy(doubled, params(0.6, 2)), CollapsedConfiguration);
    CHECK_THROWS_AS(energy_gradient(doubled, params(0.6, 2)), CollapsedConfiguration);
    CHECK_THROWS_AS(mobius_e1(doubled), CollapsedConfiguration);
}

TEST_CASE("total energy decomposition") {
    auto c = oracle::random_star(24, 3);
    auto zero = total_energy(c, params(0.6, 2, 0.0));
    CHECK(zero.total == curve_length(c));
    auto e = total_energy(c, params(0.6, 2, 0.25));
    CHECK(e.length_term == curve_length(c));
    CHECK(e.nonlocal_term == nonlocal_energy(c, params(0.6, 2)));
    CHECK(e.total == e.length_term + 0.25 * e.nonlocal_term);
    CHECK(total_energy(c.reversed(), params(0.6, 2, 0.25)).total == doctest::Approx(e.total).epsilon(1e-12));
}

TEST_CASE("exact discrete homogeneity and rigid motions") {
    for (auto [s, p] : {std::pair{0.6, 2.0}, {0.4, 2.0}, {0.5, 2.0}, {0.7, 3.0}}) {
        auto c = oracle::random_star(36, 21);
        auto ep = params(s, p);
        double g = nonlocal_energy(c, ep);
        for (double lambda : {0.5, 2.0, 10.0}) {
            double scaled = nonlocal_energy(c.transformed(lambda), ep);
            CHECK(std::abs(scaled / (std::pow(lambda, 1.0 - s * p) * g) - 1.0) <= 1e-10);
        }
        double moved = nonlocal_energy(c.transformed(1.0, 0.9, {3.0, -7.0}), ep);
        CHECK(std::abs(moved / g - 1.0) <= 1e-10);
        double total = total_energy(c, ep).total;
        CHECK(std::abs(total_energy(c.transformed(1.0, 0.9, {3.0, -7.0}), ep).total / total - 1.0) <= 1e-10);
    }
}

TEST_CASE("circle against the closed-form continuum value") {
    // Near the diagonal the integrand behaves like |t - t'|^(p - 1 - sp), so
    // the skipped band costs O(h^(p - sp)): 1.6% at n = 512 for these values.
    const double s = 0.6, p = 2.0;
    const double exact = oracle::circle_energy(1.0, s, p);
    double err256 = nonlocal_energy(regular_polygon(256), params(s, p)) / exact - 1.0;
    double err512 = nonlocal_energy(regular_polygon(512), params(s, p)) / exact - 1.0;
    double err1024 = nonlocal_energy(regular_polygon(1024), params(s, p)) / exact - 1.0;
    double rate1 = std::log(std::abs(err256 / err512)) / std::log(2.0);
    double rate2 = std::log(std::abs(err512 / err1024)) / std::log(2.0);
    CHECK(rate1 > 0.6);
    CHECK(rate2 > 0.6);
    CHECK(std::abs(err512) < 0.02);
    CHECK(std::abs(err1024) < 0.01);

    // radius enters only through r^(1 - sp)
    double r = 0.3;
    CHECK(nonlocal_energy(regular_polygon(512, r), params(s, p)) / oracle::circle_energy(r, s, p) - 1.0 ==
          doctest::Approx(err512).epsilon(1e-9));

    auto c256 = regular_polygon(256);
    auto e = total_energy(c256, params(s, p, 1.0));
    CHECK(e.total == doctest::Approx(curve_length(c256) + exact).epsilon(0.03));
}

TEST_CASE("circle refinement is Cauchy for sp > 1") {
    auto t = refinement_study([](std::size_t n) { return regular_polygon(n); }, params(0.6, 2), {256, 512, 1024});
    REQUIRE(t.rows.size() == 3);
    CHECK(std::abs(t.rows[2].value - t.rows[1].value) / t.rows[1].value <= 0.02);
    CHECK(t.fitted_exponent < 0.0);
    CHECK(std::isnan(t.rows[0].exponent));
    CHECK(t.rows[2].exponent < 0.0);
    std::ostringstream csv;
    write_refinement_csv(csv, t);
    CHECK(csv.str().rfind("n,value,exponent_estimate\n", 0) == 0);
}

TEST_CASE("refinement fit recovers a planted power law") {
    std::vector<std::size_t> levels{10, 20, 40, 80, 160};
    std::vector<double> v;
    for (auto n : levels) v.push_back(5.0 + 3.0 * std::pow(static_cast<double>(n), 0.7));
    auto t = fit_refinement(levels, v);
    CHECK(t.fitted_exponent == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(t.rows[4].exponent == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("Moebius first term") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto c = oracle::random_star(28 + seed, seed + 100);
        double g = nonlocal_energy(c, params(0.5, 2));
        CHECK(std::abs(mobius_e1(c) - 0.5 * g) <= 1e-12 * g);
        CHECK(std::abs(mobius_e1(c.transformed(7.0)) / mobius_e1(c) - 1.0) <= 1e-10);
    }
    double e1 = mobius_e1(regular_polygon(512));
    CHECK(std::abs(e1 / (0.5 * oracle::circle_energy(1.0, 0.5, 2.0)) - 1.0) <= 0.01);
}

TEST_CASE("gradient matches central differences across regimes") {
    int curves = 0;
    for (double sp : {0.8, 1.0, 1.2}) {
        for (std::uint64_t seed = 0; seed < 7; ++seed) {
            auto c = oracle::random_star(32, 1000 + seed + static_cast<std::uint64_t>(sp * 10), 0.2);
            auto ep = params(sp / 2.0, 2.0, 1e-2);
            auto f = [&](const std::vector<Vec2>& v) { return total_energy(DiscreteCurve(v), ep).total; };
            auto fd = oracle::finite_difference(f, c.vertices(), 1e-6 * diameter(c.vertices()));
            auto g = energy_gradient(c, ep);
            double err = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, norm(g[k] - fd[k]));
            CHECK(err / max_norm(fd) <= 1e-5);
            ++curves;
        }
    }
    CHECK(curves >= 20);
}

TEST_CASE("gradient structure") {
    auto ep = params(0.6, 2.0, 1e-2);
    auto c = regular_polygon(64);
    auto g = energy_gradient(c, ep);
    double m0 = norm(g[0]);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(norm(g[k]) - m0) <= 1e-9 * m0);
        CHECK(std::abs(cross(g[k], c[k])) <= 1e-9 * m0);
    }

    auto star = oracle::random_star(40, 77);
    auto gs = energy_gradient(star, ep);
    Vec2 sum{};
    double total = 0.0;
    for (auto& v : gs) {
        sum += v;
        total += norm2(v);
    }
    CHECK(norm(sum) <= 1e-10 * std::sqrt(total));

    std::vector<Vec2> combined;
    auto e = energy_and_gradient(star, ep, combined);
    CHECK(e.total == total_energy(star, ep).total);
    for (std::size_t k = 0; k < gs.size(); ++k) CHECK(combined[k] == gs[k]);
}

TEST_CASE("cross energy") {
    auto a = contact_polyline(ContactGeometry::Crossing, true, 40);
    auto b = contact_polyline(ContactGeometry::Crossing, false, 40);
    CHECK(cross_energy(a, b, 0.6, 2.0) == doctest::Approx(oracle::brute_cross(a, b, 0.6, 2.0)).epsilon(1e-12));
    // all distances are below one near the contact, so the value grows with sp
    double prev = 0.0;
    for (double sp : {0.8, 1.0, 1.2}) {
        double v = cross_energy(a, b, sp / 2.0, 2.0);
        CHECK(v >= prev);
        prev = v;
    }
}
