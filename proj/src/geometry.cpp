#include "capillary/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

constexpr double kCollinearEps = 1e-12;

bool cyclically_adjacent(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = i > j ? i - j : j - i;
    return d <= 1 || d == n - 1;
}

// Sign of orient(a, b, c) with a relative collinearity band.
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 u = b - a;
    const Vec2 v = c - a;
    const double o = cross(u, v);
    const double scale = norm(u) * std::max(norm(u), norm(v));
    if (std::abs(o) <= kCollinearEps * scale) return 0;
    return o > 0 ? 1 : -1;
}

bool on_segment_collinear(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

struct SegmentHit {
    bool hit = false;
    Vec2 point;
    double t = 0.0; // fraction along the first segment
    double u = 0.0; // fraction along the second segment
    bool proper = false; // interiors cross transversally
};

double project_fraction(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 e = b - a;
    const double l2 = norm2(e);
    if (l2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, e) / l2, 0.0, 1.0);
}

SegmentHit segment_intersection(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);

    SegmentHit h;
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
        const Vec2 r = p2 - p1;
        const Vec2 s = q2 - q1;
        const double den = cross(r, s);
        h.hit = true;
        h.proper = true;
        h.t = std::clamp(cross(q1 - p1, s) / den, 0.0, 1.0);
        h.u = std::clamp(cross(q1 - p1, r) / den, 0.0, 1.0);
        h.point = p1 + r * h.t;
        return h;
    }
    // Touching or collinear overlap: report the first endpoint lying on the other segment.
    auto touch = [&](int o, const Vec2& a, const Vec2& b, const Vec2& p) { return o == 0 && on_segment_collinear(a, b, p); };
    if (touch(o1, p1, p2, q1)) {
        h = {true, q1, project_fraction(p1, p2, q1), 0.0};
    } else if (touch(o2, p1, p2, q2)) {
        h = {true, q2, project_fraction(p1, p2, q2), 1.0};
    } else if (touch(o3, q1, q2, p1)) {
        h = {true, p1, 0.0, project_fraction(q1, q2, p1)};
    } else if (touch(o4, q1, q2, p2)) {
        h = {true, p2, 1.0, project_fraction(q1, q2, p2)};
    } else if (o1 != o2 && o3 != o4) {
        // One orientation is zero but the point is outside the box: a genuine
        // crossing that sits just off the collinearity band.
        const Vec2 r = p2 - p1;
        const Vec2 s = q2 - q1;
        const double den = cross(r, s);
        if (den != 0.0) {
            h.hit = true;
            h.proper = true;
            h.t = std::clamp(cross(q1 - p1, s) / den, 0.0, 1.0);
            h.u = std::clamp(cross(q1 - p1, r) / den, 0.0, 1.0);
            h.point = p1 + r * h.t;
        }
    }
    return h;
}

struct ClosestPair {
    double dist = 0.0;
    double t = 0.0;
    double u = 0.0;
};

ClosestPair segment_closest(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const SegmentHit h = segment_intersection(p1, p2, q1, q2);
    if (h.hit) return {0.0, h.t, h.u};
    ClosestPair best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    auto consider = [&](double d, double t, double u) {
        if (d < best.dist) best = {d, t, u};
    };
    double f = project_fraction(q1, q2, p1);
    consider(distance(p1, q1 + (q2 - q1) * f), 0.0, f);
    f = project_fraction(q1, q2, p2);
    consider(distance(p2, q1 + (q2 - q1) * f), 1.0, f);
    f = project_fraction(p1, p2, q1);
    consider(distance(q1, p1 + (p2 - p1) * f), f, 0.0);
    f = project_fraction(p1, p2, q2);
    consider(distance(q2, p1 + (p2 - p1) * f), f, 1.0);
    return best;
}

struct FaceSampling {
    bool ok = true;
    bool has_interior = false;
    std::optional<Vec2> witness;
    int witness_winding = 0;
};

// Winding at points offset to both sides of the midpoint of every
// subsegment, splitting segments at their intersection points.
FaceSampling sample_faces(const DiscreteCurve& c, const std::vector<Intersection>& hits, std::size_t budget) {
    const std::size_t n = c.size();
    std::vector<std::vector<double>> cuts(n);
    for (const auto& h : hits) {
        cuts[h.i].push_back(project_fraction(c[h.i], c[c.next(h.i)], h.point));
        cuts[h.j].push_back(project_fraction(c[h.j], c[c.next(h.j)], h.point));
    }
    struct Sample {
        Vec2 mid;
        Vec2 normal;
    };
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < n; ++i) {
        auto& cs = cuts[i];
        cs.push_back(0.0);
        cs.push_back(1.0);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        const Vec2 a = c[i];
        const Vec2 e = c[c.next(i)] - a;
        const Vec2 nrm = perp(e / norm(e));
        for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
            if (cs[k + 1] - cs[k] <= 0.0) continue;
            samples.push_back({a + e * (0.5 * (cs[k] + cs[k + 1])), nrm});
        }
    }
    const double offset = 10.0 * on_curve_tolerance(c);
    const std::size_t evaluations = 2 * samples.size();
    const std::size_t stride = evaluations <= budget ? 1 : (evaluations + budget - 1) / std::max<std::size_t>(budget, 1);

    FaceSampling out;
    for (std::size_t k = 0; k < samples.size(); k += stride) {
        for (double side : {1.0, -1.0}) {
            const Vec2 x = samples[k].mid + samples[k].normal * (side * offset);
            int w = 0;
            try {
                w = winding_number(c, x);
            } catch (const OnCurveError&) {
                continue;
            }
            if (w == 1) out.has_interior = true;
            if ((w != 0 && w != 1) && out.ok) {
                out.ok = false;
                out.witness = x;
                out.witness_winding = w;
            }
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// DiscreteCurve

DiscreteCurve::DiscreteCurve(std::vector<Vec2> vertices, std::vector<std::size_t> pinned)
    : vertices_(std::move(vertices)), pinned_(std::move(pinned)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw InvalidCurve("needs at least 3 vertices, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[i + 1 == n ? 0 : i + 1];
        if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw InvalidCurve("non-finite vertex " + std::to_string(i));
        if (a == b) throw InvalidCurve("zero-length segment at vertex " + std::to_string(i));
    }
    std::sort(pinned_.begin(), pinned_.end());
    pin_mask_.assign(n, false);
    for (std::size_t k = 0; k < pinned_.size(); ++k) {
        if (pinned_[k] >= n) throw InvalidCurve("pinned index out of range: " + std::to_string(pinned_[k]));
        if (k > 0 && pinned_[k] == pinned_[k - 1])
            throw InvalidCurve("duplicate pinned index " + std::to_string(pinned_[k]));
        pin_mask_[pinned_[k]] = true;
    }
}

DiscreteCurve DiscreteCurve::with_vertices(std::vector<Vec2> vertices) const {
    return DiscreteCurve(std::move(vertices), pinned_);
}

DiscreteCurve DiscreteCurve::with_pins(std::vector<std::size_t> pinned) const {
    return DiscreteCurve(vertices_, std::move(pinned));
}

DiscreteCurve DiscreteCurve::reversed() const {
    const std::size_t n = size();
    std::vector<Vec2> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = vertices_[(n - i) % n];
    std::vector<std::size_t> p;
    p.reserve(pinned_.size());
    for (std::size_t k : pinned_) p.push_back((n - k) % n);
    return DiscreteCurve(std::move(v), std::move(p));
}

DiscreteCurve DiscreteCurve::relabeled(std::size_t k) const {
    const std::size_t n = size();
    k %= n;
    std::vector<Vec2> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = vertices_[(i + k) % n];
    std::vector<std::size_t> p;
    p.reserve(pinned_.size());
    for (std::size_t q : pinned_) p.push_back((q + n - k) % n);
    return DiscreteCurve(std::move(v), std::move(p));
}

DiscreteCurve DiscreteCurve::transformed(double scale, double angle, Vec2 shift) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    std::vector<Vec2> v;
    v.reserve(size());
    for (const Vec2& p : vertices_) v.push_back(Vec2{c * p.x - s * p.y, s * p.x + c * p.y} * scale + shift);
    return DiscreteCurve(std::move(v), pinned_);
}

// ---------------------------------------------------------------------------
// Measurements

double curve_length(const DiscreteCurve& c) {
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) total += distance(c[i], c[c.next(i)]);
    return total;
}

std::vector<SegmentFrame> segment_frames(const DiscreteCurve& c) {
    std::vector<SegmentFrame> frames(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 e = c[c.next(i)] - c[i];
        const double l = norm(e);
        if (!(l > 0.0)) throw InvalidCurve("degenerate segment " + std::to_string(i));
        SegmentFrame& f = frames[i];
        f.midpoint = (c[i] + c[c.next(i)]) * 0.5;
        f.tangent = e / l;
        f.normal = perp(f.tangent);
        f.length = l;
    }
    return frames;
}

double on_curve_tolerance(const DiscreteCurve& c) { return 1e-9 * curve_length(c); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    return distance(p, a + (b - a) * project_fraction(a, b, p));
}

int winding_number(const DiscreteCurve& c, const Vec2& x) {
    const double tol = on_curve_tolerance(c);
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c[c.next(i)];
        if (point_segment_distance(x, a, b) <= tol) throw OnCurveError(x);
        const Vec2 u = a - x;
        const Vec2 v = b - x;
        total += std::atan2(cross(u, v), dot(u, v));
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double signed_area(const DiscreteCurve& c) {
    // About vertex 0 to limit cancellation for curves far from the origin.
    const Vec2 o = c[0];
    double twice = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) twice += cross(c[i] - o, c[c.next(i)] - o);
    return 0.5 * twice;
}

std::vector<Intersection> self_intersections(const DiscreteCurve& c) {
    const std::size_t n = c.size();
    std::vector<Intersection> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p1 = c[i];
        const Vec2& p2 = c[c.next(i)];
        const double minx = std::min(p1.x, p2.x), maxx = std::max(p1.x, p2.x);
        const double miny = std::min(p1.y, p2.y), maxy = std::max(p1.y, p2.y);
        for (std::size_t j = i + 2; j < n; ++j) {
            if (cyclically_adjacent(i, j, n)) continue;
            const Vec2& q1 = c[j];
            const Vec2& q2 = c[c.next(j)];
            if (std::max(q1.x, q2.x) < minx || std::min(q1.x, q2.x) > maxx || std::max(q1.y, q2.y) < miny ||
                std::min(q1.y, q2.y) > maxy)
                continue;
            const SegmentHit h = segment_intersection(p1, p2, q1, q2);
            if (!h.hit) continue;
            bool transversal = h.proper;
            // A vertex lying inside the other segment: the curve passes
            // through that sheet when its two neighbours sit strictly on
            // opposite sides of it.
            auto through = [&](std::size_t v, const Vec2& a, const Vec2& b, double frac) {
                if (frac <= 0.0 || frac >= 1.0) return false;
                const int s1 = orientation(a, b, c[c.prev(v)]);
                const int s2 = orientation(a, b, c[c.next(v)]);
                return s1 != 0 && s2 != 0 && s1 != s2;
            };
            if (!transversal) {
                if (h.point == q1) transversal = through(j, p1, p2, h.t);
                else if (h.point == q2) transversal = through(c.next(j), p1, p2, h.t);
                else if (h.point == p1) transversal = through(i, q1, q2, h.u);
                else if (h.point == p2) transversal = through(c.next(i), q1, q2, h.u);
            }
            out.push_back({i, j, h.point, transversal});
        }
    }
    return out;
}

WindingReport check_winding_class(const DiscreteCurve& c, std::size_t sample_budget) {
    WindingReport r;
    const auto hits = self_intersections(c);
    if (hits.empty()) {
        r.embedded = true;
        r.has_interior = true;
        if (signed_area(c) >= 0.0) return r;
        // Clockwise Jordan curve: the right-hand side of any edge has winding -1.
        const FaceSampling f = sample_faces(c, hits, 2);
        r.ok = false;
        if (f.witness) {
            r.witness = f.witness;
            r.witness_winding = f.witness_winding;
        } else {
            const auto fr = segment_frames(c);
            r.witness = fr[0].midpoint - fr[0].normal * (10.0 * on_curve_tolerance(c));
            r.witness_winding = -1;
        }
        return r;
    }
    r.embedded = false;
    // Around a transversal crossing the four sectors carry windings
    // w, w+a, w+a+b, w+b with a, b = +-1: three distinct values, so the class
    // {0,1} admits only touching and overlapping contacts.
    for (const Intersection& h : hits) {
        if (!h.transversal) continue;
        r.ok = false;
        const Vec2 d1 = c[c.next(h.i)] - c[h.i];
        const Vec2 d2 = c[c.next(h.j)] - c[h.j];
        const double rad = 1e-3 * std::min(norm(d1), norm(d2));
        const Vec2 u1 = d1 / norm(d1), u2 = d2 / norm(d2);
        int worst = 0;
        for (const Vec2& dir : {u1 + u2, u1 - u2, u2 - u1, Vec2{} - u1 - u2}) {
            const Vec2 x = h.point + dir / norm(dir) * rad;
            try {
                const int w = winding_number(c, x);
                if (!r.witness || std::abs(2 * w - 1) > std::abs(2 * worst - 1)) {
                    r.witness = x;
                    worst = w;
                }
            } catch (const OnCurveError&) {
            }
        }
        if (!r.witness) r.witness = h.point;
        r.witness_winding = worst;
        r.has_interior = true;
        return r;
    }
    const FaceSampling f = sample_faces(c, hits, sample_budget);
    r.ok = f.ok;
    r.has_interior = f.has_interior;
    r.witness = f.witness;
    r.witness_winding = f.witness_winding;
    return r;
}

double enclosed_area(const DiscreteCurve& c) {
    const WindingReport r = check_winding_class(c);
    if (!r.ok) throw WindingClassError(*r.witness, r.witness_winding);
    // With winding in {0,1}, the integral of the winding number (the signed
    // area) is exactly the measure of the winding-1 set.
    if (!r.has_interior) return 0.0;
    return std::max(0.0, signed_area(c));
}

double min_nonadjacent_separation(const DiscreteCurve& c) {
    const std::size_t n = c.size();
    std::vector<Vec2> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = c[i], b = c[c.next(i)];
        lo[i] = Vec2{std::min(a.x, b.x), std::min(a.y, b.y)};
        hi[i] = Vec2{std::max(a.x, b.x), std::max(a.y, b.y)};
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (cyclically_adjacent(i, j, n)) continue;
            // Boxes farther apart than the current best cannot improve it.
            const double gx = std::max({0.0, lo[j].x - hi[i].x, lo[i].x - hi[j].x});
            const double gy = std::max({0.0, lo[j].y - hi[i].y, lo[i].y - hi[j].y});
            if (gx * gx + gy * gy >= best * best) continue;
            const double d = segment_closest(c[i], c[c.next(i)], c[j], c[c.next(j)]).dist;
            best = std::min(best, d);
        }
    }
    // A triangle has no non-adjacent pair.
    return std::isfinite(best) ? best : 0.0;
}

double bilipschitz_constant(const DiscreteCurve& c) {
    const std::size_t n = c.size();
    const double len = curve_length(c);
    std::vector<double> s(n + 1, 0.0);
    std::vector<double> seg(n);
    for (std::size_t i = 0; i < n; ++i) {
        seg[i] = distance(c[i], c[c.next(i)]);
        s[i + 1] = s[i] + seg[i];
    }
    for (double& v : s) v /= len;
    auto circ = [](double a, double b) {
        const double d = std::abs(a - b);
        return std::min(d, 1.0 - d);
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = circ(s[i], s[j]);
            if (d > 0.0) best = std::min(best, distance(c[i], c[j]) / d);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (cyclically_adjacent(i, j, n)) continue;
            const ClosestPair cp = segment_closest(c[i], c[c.next(i)], c[j], c[c.next(j)]);
            const double d = circ(s[i] + cp.t * seg[i] / len, s[j] + cp.u * seg[j] / len);
            if (d > 0.0) best = std::min(best, cp.dist / d);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

struct Walk {
    std::vector<Vec2> points; // interior points placed (excluding the arc start)
    bool complete = false;
};

// From the arc start, repeatedly place the first point further along the
// polyline at chord distance `chord` from the previous one.
Walk walk_arc(const std::vector<Vec2>& arc, std::size_t count, double chord) {
    Walk w;
    w.points.reserve(count);
    Vec2 cur = arc.front();
    std::size_t seg = 0;
    double t0 = 0.0;
    const double c2 = chord * chord;
    while (w.points.size() < count) {
        bool found = false;
        for (; seg + 1 < arc.size(); ++seg, t0 = 0.0) {
            const Vec2 a = arc[seg];
            const Vec2 e = arc[seg + 1] - a;
            const double qa = norm2(e);
            const Vec2 r = a - cur;
            const double qb = 2.0 * dot(e, r);
            const double qc = norm2(r) - c2;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) continue;
            const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
            if (t >= t0 && t <= 1.0) {
                cur = t == 1.0 ? arc[seg + 1] : a + e * t;
                t0 = t;
                found = true;
                break;
            }
        }
        if (!found) return w;
        w.points.push_back(cur);
    }
    w.complete = true;
    return w;
}

std::vector<Vec2> equal_arclength_arc(const std::vector<Vec2>& arc, std::size_t segments, double arc_len) {
    std::vector<Vec2> out;
    std::size_t seg = 0;
    double walked = 0.0;
    for (std::size_t k = 1; k < segments; ++k) {
        const double target = arc_len * static_cast<double>(k) / static_cast<double>(segments);
        double l = distance(arc[seg], arc[seg + 1]);
        while (walked + l < target && seg + 2 < arc.size()) {
            walked += l;
            ++seg;
            l = distance(arc[seg], arc[seg + 1]);
        }
        const double t = l > 0.0 ? std::clamp((target - walked) / l, 0.0, 1.0) : 0.0;
        out.push_back(arc[seg] + (arc[seg + 1] - arc[seg]) * t);
    }
    return out;
}

std::vector<Vec2> equal_chord_arc(const std::vector<Vec2>& arc, std::size_t segments) {
    if (segments == 1) return {};
    double arc_len = 0.0;
    for (std::size_t k = 0; k + 1 < arc.size(); ++k) arc_len += distance(arc[k], arc[k + 1]);
    const std::size_t inner = segments - 1;
    // Residual: last chord minus target chord; negative while the target is too small.
    auto residual = [&](double chord, Walk& w) {
        w = walk_arc(arc, inner, chord);
        if (!w.complete) return std::numeric_limits<double>::infinity();
        return chord - distance(w.points.back(), arc.back());
    };
    double lo = 0.0;
    double hi = arc_len / static_cast<double>(segments);
    // Chords never exceed the arc pieces they span, so residual(hi) >= 0.
    Walk w_hi;
    const double r_hi = residual(hi, w_hi);
    if (w_hi.complete && r_hi <= 1e-15 * hi) return w_hi.points;
    Walk best;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        Walk w;
        const double r = residual(mid, w);
        if (r > 0.0) {
            hi = mid;
        } else {
            lo = mid;
            best = std::move(w);
        }
    }
    if (!best.complete) residual(lo, best);
    // On a jagged arc the first-exit walk can jump, leaving no equal-chord
    // solution for bisection to find.
    if (!best.complete || std::abs(distance(best.points.back(), arc.back()) - lo) > 1e-6 * lo)
        return equal_arclength_arc(arc, segments, arc_len);
    return best.points;
}

} // namespace

ResampleResult resample_constant_speed(const DiscreteCurve& c, std::size_t n_target) {
    const std::size_t pins = c.pinned().size();
    if (n_target < std::max<std::size_t>(3, pins + 1))
        throw InvalidCurve("resample target " + std::to_string(n_target) + " too small for " + std::to_string(pins) +
                           " pinned vertices");

    std::vector<std::size_t> anchors = c.pinned();
    if (anchors.empty()) anchors.push_back(0);
    const std::size_t m = anchors.size();

    // Polyline of each arc between consecutive anchors (cyclically).
    std::vector<std::vector<Vec2>> arcs(m);
    std::vector<double> lengths(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t start = anchors[a];
        const std::size_t end = anchors[(a + 1) % m];
        std::size_t k = start;
        arcs[a].push_back(c[k]);
        do {
            k = c.next(k);
            lengths[a] += distance(arcs[a].back(), c[k]);
            arcs[a].push_back(c[k]);
        } while (k != end);
    }

    // Segments per arc: proportional to length, at least one (three for a
    // lone closed arc), largest remainder.
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    std::vector<std::size_t> count(m);
    const std::size_t floor_min = m == 1 ? 3 : 1;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t a = 0; a < m; ++a) {
        const double share = static_cast<double>(n_target) * lengths[a] / total;
        count[a] = std::max<std::size_t>(floor_min, static_cast<std::size_t>(std::floor(share)));
        assigned += count[a];
        remainders.emplace_back(share - std::floor(share), a);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t r = 0; assigned < n_target; r = (r + 1) % m) {
        ++count[remainders[r].second];
        ++assigned;
    }
    while (assigned > n_target) {
        // Only possible when the per-arc minimum forced extra segments.
        auto it = std::max_element(count.begin(), count.end());
        --*it;
        --assigned;
    }

    std::vector<Vec2> verts;
    std::vector<std::size_t> new_pins;
    verts.reserve(n_target);
    for (std::size_t a = 0; a < m; ++a) {
        if (c.is_pinned(anchors[a])) new_pins.push_back(verts.size());
        verts.push_back(arcs[a].front());
        const auto inner = equal_chord_arc(arcs[a], count[a]);
        verts.insert(verts.end(), inner.begin(), inner.end());
    }

    ResampleResult out{DiscreteCurve(std::move(verts), std::move(new_pins)), 0.0, 0.0};
    out.length_deficit = curve_length(c) - curve_length(out.curve);
    const auto& nv = out.curve.vertices();
    for (const Vec2& p : c.vertices()) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nv.size(); ++i)
            d = std::min(d, point_segment_distance(p, nv[i], nv[(i + 1) % nv.size()]));
        out.max_corner_deviation = std::max(out.max_corner_deviation, d);
    }
    return out;
}

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b, std::size_t subdivisions) {
    auto directed = [subdivisions](const DiscreteCurve& from, const DiscreteCurve& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            const Vec2 p = from[i];
            const Vec2 e = from[from.next(i)] - p;
            for (std::size_t k = 0; k < subdivisions; ++k) {
                const Vec2 x = p + e * (static_cast<double>(k) / static_cast<double>(subdivisions));
                double d = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < to.size(); ++j) d = std::min(d, point_segment_distance(x, to[j], to[to.next(j)]));
                worst = std::max(worst, d);
            }
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double diameter(std::span<const Vec2> pts) {
    if (pts.empty()) return 0.0;
    Vec2 lo = pts.front(), hi = pts.front();
    for (const Vec2& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return distance(lo, hi);
}

// ---------------------------------------------------------------------------
// Curve files

DiscreteCurve read_curve(std::istream& in) {
    std::vector<Vec2> verts;
    std::vector<std::size_t> pins;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto key = line.find("pinned:", first);
            if (key != std::string::npos) {
                std::istringstream ps(line.substr(key + 7));
                std::string tok;
                while (ps >> tok) {
                    try {
                        std::size_t used = 0;
                        const unsigned long long v = std::stoull(tok, &used);
                        if (used != tok.size()) throw std::invalid_argument(tok);
                        pins.push_back(static_cast<std::size_t>(v));
                    } catch (const std::logic_error&) {
                        throw IoError("curve line " + std::to_string(line_no) + ": bad pinned index '" + tok + "'");
                    }
                }
            }
            continue;
        }
        std::istringstream ls(line);
        std::string xs, ys, extra;
        if (!(ls >> xs >> ys) || (ls >> extra))
            throw IoError("curve line " + std::to_string(line_no) + ": expected 'x y'");
        try {
            std::size_t ux = 0, uy = 0;
            const double x = std::stod(xs, &ux);
            const double y = std::stod(ys, &uy);
            if (ux != xs.size() || uy != ys.size()) throw std::invalid_argument(line);
            verts.push_back({x, y});
        } catch (const std::logic_error&) {
            throw IoError("curve line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return DiscreteCurve(std::move(verts), std::move(pins));
}

void write_curve(std::ostream& out, const DiscreteCurve& c) {
    if (!c.pinned().empty()) {
        out << "# pinned:";
        for (std::size_t k : c.pinned()) out << ' ' << k;
        out << '\n';
    }
    const auto old_flags = out.flags();
    const auto old_prec = out.precision();
    out << std::setprecision(17);
    for (const Vec2& p : c.vertices()) out << p.x << ' ' << p.y << '\n';
    out.flags(old_flags);
    out.precision(old_prec);
}

DiscreteCurve load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve file '" + path + "'");
    return read_curve(in);
}

void save_curve(const std::string& path, const DiscreteCurve& c) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write curve file '" + path + "'");
    write_curve(out, c);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace capillary
