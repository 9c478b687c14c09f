#include "capillary/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "capillary/errors.hpp"

namespace capillary {

void ConstraintSpec::validate(std::size_t min_pins) const {
    if (pins.size() < min_pins)
        throw ConfigError(0, "need at least " + std::to_string(min_pins) + " pins, got " + std::to_string(pins.size()));
    for (std::size_t a = 0; a < pins.size(); ++a) {
        if (!std::isfinite(pins[a].x) || !std::isfinite(pins[a].y)) throw ConfigError(0, "non-finite pin");
        for (std::size_t b = a + 1; b < pins.size(); ++b)
            if (pins[a] == pins[b]) throw ConfigError(0, "pins must be distinct (pin " + std::to_string(a) + " repeats)");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ConfigError(0, "epsilon must be positive, got " + std::to_string(epsilon));
    if (!(tol_pin > 0.0 && tol_pin <= 1e-2)) throw ConfigError(0, "tol_pin must lie in (0, 1e-2]");
    if (!(tol_area > 0.0 && tol_area <= 1e-2)) throw ConfigError(0, "tol_area must lie in (0, 1e-2]");
}

DiscreteCurve attach_pins(const DiscreteCurve& curve, const ConstraintSpec& spec) {
    std::vector<Vec2> v = curve.vertices();
    std::vector<bool> pinned(v.size(), false);
    for (std::size_t k : curve.pinned()) pinned[k] = true;

    for (std::size_t k = 0; k < spec.pins.size(); ++k) {
        const Vec2 pin = spec.pins[k];
        const std::size_t n = v.size();
        std::size_t best_seg = 0;
        double best_t = 0.0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = v[i];
            const Vec2 e = v[(i + 1) % n] - a;
            const double t = std::clamp(dot(pin - a, e) / norm2(e), 0.0, 1.0);
            const double d = distance(pin, a + e * t);
            if (d < best_d) {
                best_d = d;
                best_seg = i;
                best_t = t;
            }
        }
        std::size_t target = n;
        if (best_t <= 0.25) target = best_seg;
        else if (best_t >= 0.75) target = (best_seg + 1) % n;

        if (target != n) {
            if (pinned[target]) {
                if (v[target] == pin) continue; // already anchored here
                throw InvalidCurve("two pins map to vertex " + std::to_string(target) + "; refine the curve");
            }
            v[target] = pin;
            pinned[target] = true;
        } else {
            v.insert(v.begin() + static_cast<std::ptrdiff_t>(best_seg + 1), pin);
            pinned.insert(pinned.begin() + static_cast<std::ptrdiff_t>(best_seg + 1), true);
        }
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (pinned[i]) idx.push_back(i);
    return DiscreteCurve(std::move(v), std::move(idx));
}

double pin_residual(const DiscreteCurve& curve, const ConstraintSpec& spec) {
    double worst = 0.0;
    for (const Vec2& pin : spec.pins) {
        double d = std::numeric_limits<double>::infinity();
        if (!curve.pinned().empty()) {
            for (std::size_t k : curve.pinned()) d = std::min(d, distance(pin, curve[k]));
        } else {
            for (std::size_t i = 0; i < curve.size(); ++i)
                d = std::min(d, point_segment_distance(pin, curve[i], curve[curve.next(i)]));
        }
        worst = std::max(worst, d);
    }
    return worst;
}

double area_residual(const DiscreteCurve& curve, const ConstraintSpec& spec) {
    return enclosed_area(curve) - spec.epsilon;
}

std::vector<Vec2> area_gradient(const DiscreteCurve& c) {
    std::vector<Vec2> g(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 d = c[c.next(i)] - c[c.prev(i)];
        g[i] = Vec2{d.y, -d.x} * 0.5;
    }
    return g;
}

std::vector<Vec2> vertex_normals(const DiscreteCurve& c) {
    const auto fr = segment_frames(c);
    std::vector<Vec2> u(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.is_pinned(i)) continue;
        const Vec2 s = fr[c.prev(i)].normal + fr[i].normal;
        const double l = norm(s);
        if (l > 1e-12) u[i] = s / l;
    }
    return u;
}

namespace {

// Shoelace coefficients of A(t) for v_i + t u_i, taken about vertex 0.
struct AreaQuadratic {
    double a0 = 0.0, b = 0.0, c = 0.0;
};

AreaQuadratic area_quadratic(const std::vector<Vec2>& v, const std::vector<Vec2>& u) {
    const std::size_t n = v.size();
    const Vec2 o = v[0];
    AreaQuadratic q;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const Vec2 vi = v[i] - o;
        const Vec2 vj = v[j] - o;
        q.a0 += cross(vi, vj);
        q.b += cross(vi, u[j]) + cross(u[i], vj);
        q.c += cross(u[i], u[j]);
    }
    q.a0 *= 0.5;
    q.b *= 0.5;
    q.c *= 0.5;
    return q;
}

// Smaller-magnitude root of c t^2 + b t + k = 0.
bool small_root(double c, double b, double k, double& t) {
    if (k == 0.0) {
        t = 0.0;
        return true;
    }
    if (std::abs(c) * std::abs(k) <= 1e-15 * b * b) {
        if (b == 0.0) return false;
        t = -k / b;
        return true;
    }
    const double disc = b * b - 4.0 * c * k;
    if (disc < 0.0) return false;
    const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    const double r1 = qq / c;
    const double r2 = qq != 0.0 ? k / qq : r1;
    t = std::abs(r1) < std::abs(r2) ? r1 : r2;
    return true;
}

double shoelace_about_first(const std::vector<Vec2>& v) {
    const Vec2 o = v[0];
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i] - o, v[(i + 1) % v.size()] - o);
    return 0.5 * s;
}

} // namespace

AreaProjection project_area_along(const DiscreteCurve& curve, const ConstraintSpec& spec,
                                  const std::vector<Vec2>& directions) {
    if (directions.size() != curve.size()) throw InvalidCurve("direction field size mismatch");
    std::vector<Vec2> u = directions;
    for (std::size_t i : curve.pinned()) u[i] = Vec2{};
    if (std::all_of(u.begin(), u.end(), [](const Vec2& x) { return x == Vec2{}; }))
        throw ProjectionOutOfRange("no movable vertices");

    const double target = spec.epsilon;
    const double diam = diameter(curve.vertices());
    const std::vector<Vec2>& base = curve.vertices();

    double t_total = 0.0;
    std::vector<Vec2> v = base;
    // The area is an exact quadratic in t; repeat only to absorb roundoff.
    for (int pass = 0; pass < 4; ++pass) {
        const AreaQuadratic q = area_quadratic(v, u);
        if (std::abs(q.a0 - target) <= 0.25 * spec.tol_area * target) break;
        double t = 0.0;
        if (!small_root(q.c, q.b, q.a0 - target, t))
            throw ProjectionOutOfRange("area equation has no real root");
        t_total += t;
        if (std::abs(t_total) > 0.1 * diam)
            throw ProjectionOutOfRange("offset " + std::to_string(t_total) + " exceeds a tenth of the diameter");
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = base[i] + u[i] * t_total;
    }
    AreaProjection out{curve.with_vertices(std::move(v)), t_total};
    if (std::abs(shoelace_about_first(out.curve.vertices()) - target) > spec.tol_area * target)
        throw ProjectionOutOfRange("area residual above tolerance after projection");
    return out;
}

AreaProjection project_area_with_offset(const DiscreteCurve& curve, const ConstraintSpec& spec) {
    return project_area_along(curve, spec, vertex_normals(curve));
}

std::vector<double> vertex_room(const DiscreteCurve& curve) {
    const std::size_t n = curve.size();
    std::vector<double> room(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || j == curve.prev(i)) continue;
            const double d = point_segment_distance(curve[i], curve[j], curve[curve.next(j)]);
            room[i] = std::min(room[i], d);
            room[j] = std::min(room[j], d);
            room[curve.next(j)] = std::min(room[curve.next(j)], d);
        }
    }
    return room;
}

std::vector<Vec2> room_weighted_normals(const DiscreteCurve& curve) {
    const auto room = vertex_room(curve);
    const double most = *std::max_element(room.begin(), room.end());
    auto u = vertex_normals(curve);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = room[i] < 1e-2 * most ? Vec2{} : u[i] * (room[i] / most);
    return u;
}

DiscreteCurve project_area(const DiscreteCurve& curve, const ConstraintSpec& spec) {
    return project_area_with_offset(curve, spec).curve;
}

// ---------------------------------------------------------------------------
// Initial curve

namespace {

std::vector<Vec2> order_pins(const std::vector<Vec2>& pins, bool& collinear) {
    const std::size_t m = pins.size();
    std::size_t fa = 0, fb = 1;
    double far = 0.0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (distance(pins[a], pins[b]) > far) {
                far = distance(pins[a], pins[b]);
                fa = a;
                fb = b;
            }
    const Vec2 axis = (pins[fb] - pins[fa]) / far;
    collinear = std::all_of(pins.begin(), pins.end(), [&](const Vec2& p) {
        return std::abs(cross(axis, p - pins[fa])) <= 1e-9 * far;
    });

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    if (collinear) {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return dot(pins[a] - pins[fa], axis) < dot(pins[b] - pins[fa], axis); });
        std::vector<Vec2> out;
        for (std::size_t k : idx) out.push_back(pins[k]);
        return out;
    }
    Vec2 c{};
    for (const Vec2& p : pins) c += p;
    c = c / static_cast<double>(m);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::atan2(pins[a].y - c.y, pins[a].x - c.x) < std::atan2(pins[b].y - c.y, pins[b].x - c.x);
    });
    // Open the cyclic order at its longest edge.
    std::size_t cut = 0;
    double longest = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double l = distance(pins[idx[k]], pins[idx[(k + 1) % m]]);
        if (l > longest) {
            longest = l;
            cut = k;
        }
    }
    std::vector<Vec2> out;
    for (std::size_t k = 1; k <= m; ++k) out.push_back(pins[idx[(cut + k) % m]]);
    return out;
}

// Closed polygon: the pin path forward, then back along its left offset at
// distance h. Pins occupy indices 0..N-1.
std::vector<Vec2> strip_polygon(const std::vector<Vec2>& path, double h) {
    const std::size_t m = path.size();
    std::vector<Vec2> dir(m - 1), nrm(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        dir[k] = (path[k + 1] - path[k]) / distance(path[k + 1], path[k]);
        nrm[k] = perp(dir[k]);
    }
    std::vector<Vec2> offset;
    offset.push_back(path[0] + nrm[0] * h);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double turn = cross(dir[k - 1], dir[k]);
        if (std::abs(turn) <= 1e-9 && dot(dir[k - 1], dir[k]) > 0.0) {
            offset.push_back(path[k] + nrm[k] * h);
        } else if (turn > 0.0) {
            // Inner side: intersection of the offset lines, bounded.
            const double f = std::min(1.0 / std::max(1e-3, 0.5 * (1.0 + dot(nrm[k - 1], nrm[k]))), 4.0);
            const Vec2 bis = nrm[k - 1] + nrm[k];
            offset.push_back(path[k] + bis / norm(bis) * (h * std::sqrt(f)));
        } else {
            const double a0 = std::atan2(nrm[k - 1].y, nrm[k - 1].x);
            double a1 = std::atan2(nrm[k].y, nrm[k].x);
            while (a1 > a0) a1 -= 2.0 * std::numbers::pi;
            const int steps = 8;
            for (int s = 0; s <= steps; ++s) {
                const double a = a0 + (a1 - a0) * s / steps;
                offset.push_back(path[k] + Vec2{std::cos(a), std::sin(a)} * h);
            }
        }
    }
    offset.push_back(path[m - 1] + nrm[m - 2] * h);
    std::vector<Vec2> poly = path;
    poly.insert(poly.end(), offset.rbegin(), offset.rend());
    return poly;
}

// Major circular arc from q to p bulging against `back`, enclosing `area`
// beyond the chord qp. Returns the interior arc points.
std::vector<Vec2> lobe_arc(const Vec2& q, const Vec2& p, const Vec2& back, double area) {
    const double half = 0.5 * distance(p, q);
    const Vec2 mid = (p + q) * 0.5;
    auto lobe_area = [&](double s) {
        const double r = std::hypot(s, half);
        const double theta = 2.0 * std::numbers::pi - 2.0 * std::atan2(half, s);
        return 0.5 * r * r * (theta - std::sin(theta));
    };
    double lo = 0.0, hi = 1.0;
    while (lobe_area(hi) < area) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double s = 0.5 * (lo + hi);
        (lobe_area(s) < area ? lo : hi) = s;
    }
    const double s = 0.5 * (lo + hi);
    const Vec2 center = mid + back * s;
    const double r = std::hypot(s, half);
    const double a0 = std::atan2(q.y - center.y, q.x - center.x);
    double a1 = std::atan2(p.y - center.y, p.x - center.x);
    while (a1 <= a0) a1 += 2.0 * std::numbers::pi;
    std::vector<Vec2> out;
    const int steps = 48;
    for (int k = 1; k < steps; ++k) {
        const double a = a0 + (a1 - a0) * k / steps;
        out.push_back(center + Vec2{std::cos(a), std::sin(a)} * r);
    }
    return out;
}

} // namespace

DiscreteCurve initial_curve(const ConstraintSpec& spec, std::size_t n, std::vector<std::string>* warnings) {
    spec.validate(2);
    const std::size_t m = spec.pins.size();
    if (n < 16 * m)
        throw ConfigError(0, "initial curve needs n >= 16 * pins = " + std::to_string(16 * m) + ", got " + std::to_string(n));

    bool collinear = false;
    const std::vector<Vec2> path = order_pins(spec.pins, collinear);
    if (collinear && m > 2 && warnings) warnings->push_back("pins collinear: strip follows the segment chain");

    double path_len = 0.0, spacing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double l = distance(path[k], path[k + 1]);
        path_len += l;
        spacing = std::min(spacing, l);
    }
    // Strip of width h = 2w, w the tube half-width.
    double h = spec.epsilon / path_len;
    const double h_max = 0.5 * spacing;
    std::vector<Vec2> poly;
    if (h <= h_max) {
        poly = strip_polygon(path, h);
    } else {
        h = h_max;
        poly = strip_polygon(path, h);
        const double missing = spec.epsilon - std::abs(shoelace_about_first(poly));
        if (warnings)
            warnings->push_back("tube half-width capped at a quarter of the pin spacing; remaining area from a disk "
                                "attached at the first pin");
        if (missing > 0.0) {
            const Vec2 back = (path[0] - path[1]) / distance(path[0], path[1]);
            const auto arc = lobe_arc(poly.back(), path[0], back, missing);
            poly.insert(poly.end(), arc.begin(), arc.end());
        }
    }
    std::vector<std::size_t> pin_idx(m);
    std::iota(pin_idx.begin(), pin_idx.end(), 0);
    DiscreteCurve coarse(std::move(poly), pin_idx);
    if (signed_area(coarse) < 0.0) coarse = coarse.reversed();

    DiscreteCurve c = resample_constant_speed(coarse, n).curve;
    c = attach_pins(c, spec);
    c = project_area(c, spec);

    if (!self_intersections(c).empty()) throw Error(ErrorKind::Infeasible, "initial curve is not embedded");
    if (!check_winding_class(c).ok) throw Error(ErrorKind::Infeasible, "initial curve violates the winding class");
    if (std::abs(area_residual(c, spec)) > spec.tol_area * spec.epsilon)
        throw Error(ErrorKind::Infeasible, "initial curve misses the area target");
    if (pin_residual(c, spec) != 0.0) throw Error(ErrorKind::Infeasible, "initial curve misses a pin");
    return c;
}

} // namespace capillary
