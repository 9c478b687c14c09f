#include "capillary/steiner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "capillary/errors.hpp"
#include "capillary/random.hpp"

namespace capillary {

Vec2 SteinerTree::vertex(std::size_t k) const {
    return k < terminals.size() ? terminals[k] : steiner_points.at(k - terminals.size());
}

std::vector<std::vector<std::size_t>> SteinerTree::adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertex_count());
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

namespace {

constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;

double scale_of(std::span<const Vec2> pts) { return std::max(diameter(pts), 1e-300); }

void check_terminals(std::span<const Vec2> t) {
    if (t.size() < 2 || t.size() > 4) throw InvalidCurve("steiner_tree needs 2 to 4 terminals");
    for (const auto& p : t)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidCurve("non-finite terminal");
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) throw InvalidCurve("coincident terminals");
}

// cos of the interior angle at a in triangle abc
double cos_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 u = b - a, v = c - a;
    return dot(u, v) / (norm(u) * norm(v));
}

struct Candidate {
    std::vector<Vec2> steiner;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Merges Steiner points that landed on another vertex, drops the resulting
// zero-length edges and recomputes the length.
SteinerTree finalize(std::span<const Vec2> terminals, const Candidate& c) {
    const std::size_t T = terminals.size();
    const double tol = 1e-10 * scale_of(terminals);
    std::vector<Vec2> all(terminals.begin(), terminals.end());
    all.insert(all.end(), c.steiner.begin(), c.steiner.end());

    std::vector<std::size_t> target(all.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
        target[k] = k;
        if (k < T) continue;
        for (std::size_t m = 0; m < k; ++m)
            if (target[m] == m && distance(all[k], all[m]) <= tol) {
                target[k] = m;
                break;
            }
    }
    std::vector<std::size_t> renumber(all.size(), 0);
    SteinerTree tree;
    tree.terminals.assign(terminals.begin(), terminals.end());
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (k < T) {
            renumber[k] = k;
        } else if (target[k] == k) {
            renumber[k] = T + tree.steiner_points.size();
            tree.steiner_points.push_back(all[k]);
        }
    }
    for (auto [a, b] : c.edges) {
        std::size_t u = renumber[target[a]], v = renumber[target[b]];
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (std::find(tree.edges.begin(), tree.edges.end(), std::pair{u, v}) != tree.edges.end()) continue;
        tree.edges.emplace_back(u, v);
    }
    std::sort(tree.edges.begin(), tree.edges.end());
    for (auto [a, b] : tree.edges) tree.total_length += distance(tree.vertex(a), tree.vertex(b));
    return tree;
}

double candidate_length(std::span<const Vec2> terminals, const Candidate& c) {
    auto at = [&](std::size_t k) { return k < terminals.size() ? terminals[k] : c.steiner[k - terminals.size()]; };
    double len = 0.0;
    for (auto [a, b] : c.edges) len += distance(at(a), at(b));
    return len;
}

Candidate mst_candidate(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    Candidate c;
    std::vector<bool> in(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    best[0] = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
        std::size_t u = n;
        for (std::size_t k = 0; k < n; ++k)
            if (!in[k] && (u == n || best[k] < best[u])) u = k;
        in[u] = true;
        if (it > 0) c.edges.emplace_back(std::min(from[u], u), std::max(from[u], u));
        for (std::size_t k = 0; k < n; ++k) {
            double d = distance(pts[u], pts[k]);
            if (!in[k] && d < best[k]) {
                best[k] = d;
                from[k] = u;
            }
        }
    }
    return c;
}

// Star through the Fermat point of three terminals given by index; the
// Steiner point gets index `sidx`.
void add_fermat_star(std::span<const Vec2> t, std::array<std::size_t, 3> idx, std::size_t sidx, Candidate& c) {
    c.steiner.push_back(fermat_point(t[idx[0]], t[idx[1]], t[idx[2]]));
    for (auto k : idx) c.edges.emplace_back(std::min(k, sidx), std::max(k, sidx));
}

// Full topology {a,b | c,d}: two Steiner points, each refined in turn as the
// Fermat point of its three neighbours.
Candidate full_topology(std::span<const Vec2> t, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    const double tol = 1e-12 * scale_of(t);
    Vec2 mab = 0.5 * (t[a] + t[b]), mcd = 0.5 * (t[c] + t[d]);
    Vec2 s1 = (t[a] + t[b] + mcd) / 3.0;
    Vec2 s2 = (t[c] + t[d] + mab) / 3.0;
    for (int it = 0; it < 100000; ++it) {
        Vec2 n1 = fermat_point(t[a], t[b], s2);
        Vec2 n2 = fermat_point(t[c], t[d], n1);
        double move = std::max(distance(n1, s1), distance(n2, s2));
        s1 = n1;
        s2 = n2;
        if (move <= tol) break;
    }
    Candidate cand;
    cand.steiner = {s1, s2};
    cand.edges = {{a, 4}, {b, 4}, {c, 5}, {d, 5}, {4, 5}};
    return cand;
}

// Best tree on three terminals: the Fermat star (which collapses onto a
// vertex when some angle reaches 120 degrees).
Candidate three_terminal(std::span<const Vec2> t, std::array<std::size_t, 3> idx, std::size_t sidx) {
    Candidate c;
    add_fermat_star(t, idx, sidx, c);
    return c;
}

} // namespace

Vec2 fermat_point(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double half = -0.5;
    // a doubled point is its own minimizer
    if (a == b || a == c) return a;
    if (b == c) return b;
    if (cos_angle(a, b, c) <= half) return a;
    if (cos_angle(b, c, a) <= half) return b;
    if (cos_angle(c, a, b) <= half) return c;
    // barycentric weights |opposite side| / sin(angle + pi/3)
    double A = std::acos(std::clamp(cos_angle(a, b, c), -1.0, 1.0));
    double B = std::acos(std::clamp(cos_angle(b, c, a), -1.0, 1.0));
    double C = std::acos(std::clamp(cos_angle(c, a, b), -1.0, 1.0));
    const double third = std::numbers::pi / 3.0;
    double wa = distance(b, c) / std::sin(A + third);
    double wb = distance(c, a) / std::sin(B + third);
    double wc = distance(a, b) / std::sin(C + third);
    return (wa * a + wb * b + wc * c) / (wa + wb + wc);
}

Vec2 geometric_median(std::span<const Vec2> points, const Vec2& start, double tol) {
    if (points.empty()) throw InvalidCurve("geometric median of no points");
    const double scale = scale_of(points);
    const double tiny = 1e-14 * scale;
    Vec2 x = start;
    for (int it = 0; it < 200000; ++it) {
        std::size_t hit = points.size();
        Vec2 num{};
        double den = 0.0;
        for (std::size_t k = 0; k < points.size(); ++k) {
            double d = distance(x, points[k]);
            if (d <= tiny) {
                hit = k;
                continue;
            }
            num += points[k] / d;
            den += 1.0 / d;
        }
        Vec2 next;
        if (hit < points.size()) {
            // sitting on a data point: stay if it is optimal, otherwise step
            // off along the descent direction
            Vec2 pk = points[hit];
            Vec2 r{};
            for (std::size_t k = 0; k < points.size(); ++k) {
                if (k == hit) continue;
                double d = distance(pk, points[k]);
                if (d > tiny) r += (points[k] - pk) / d;
            }
            double rn = norm(r);
            if (rn <= 1.0 || den == 0.0) return pk;
            next = pk + r * ((rn - 1.0) / (rn * den));
        } else {
            next = num / den;
        }
        double move = distance(next, x);
        x = next;
        if (move <= tol * scale) break;
    }
    return x;
}

double minimum_spanning_tree_length(std::span<const Vec2> points) {
    if (points.size() < 2) return 0.0;
    Candidate c = mst_candidate(points);
    return candidate_length(points, c);
}

SteinerTree steiner_tree(std::span<const Vec2> terminals) {
    check_terminals(terminals);
    const std::size_t N = terminals.size();
    std::vector<Candidate> cands;
    cands.push_back(mst_candidate(terminals));
    if (N == 3) {
        cands.push_back(three_terminal(terminals, {0, 1, 2}, 3));
    } else if (N == 4) {
        cands.push_back(full_topology(terminals, 0, 1, 2, 3));
        cands.push_back(full_topology(terminals, 0, 2, 1, 3));
        cands.push_back(full_topology(terminals, 0, 3, 1, 2));
        // one Steiner point on three terminals, the fourth hung on one of them
        for (std::size_t out = 0; out < 4; ++out) {
            std::array<std::size_t, 3> idx{};
            std::size_t m = 0;
            for (std::size_t k = 0; k < 4; ++k)
                if (k != out) idx[m++] = k;
            for (auto at : idx) {
                Candidate c = three_terminal(terminals, idx, 4);
                c.edges.emplace_back(std::min(out, at), std::max(out, at));
                cands.push_back(std::move(c));
            }
        }
    }
    std::size_t best = 0;
    double best_len = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cands.size(); ++k) {
        double len = candidate_length(terminals, cands[k]);
        if (len < best_len) {
            best_len = len;
            best = k;
        }
    }
    return finalize(terminals, cands[best]);
}

double max_steiner_angle_error(const SteinerTree& tree) {
    auto adj = tree.adjacency();
    double worst = 0.0;
    for (std::size_t k = tree.terminals.size(); k < tree.vertex_count(); ++k) {
        Vec2 o = tree.vertex(k);
        std::vector<double> ang;
        for (auto m : adj[k]) {
            Vec2 d = tree.vertex(m) - o;
            ang.push_back(std::atan2(d.y, d.x));
        }
        if (ang.size() < 2) {
            worst = std::max(worst, kTwoThirdsPi);
            continue;
        }
        std::sort(ang.begin(), ang.end());
        for (std::size_t q = 0; q < ang.size(); ++q) {
            double gap = q + 1 < ang.size() ? ang[q + 1] - ang[q] : ang[0] + 2.0 * std::numbers::pi - ang[q];
            worst = std::max(worst, std::abs(gap - kTwoThirdsPi));
        }
    }
    return worst;
}

DiscreteCurve double_cover_curve(const SteinerTree& tree, std::size_t n) {
    const std::size_t V = tree.vertex_count();
    if (V < 2 || tree.edges.size() + 1 != V) throw InvalidCurve("double cover needs a tree");
    const std::size_t E = tree.edges.size();
    if (n < std::max<std::size_t>(3, 2 * E))
        throw InvalidCurve("double cover needs at least " + std::to_string(std::max<std::size_t>(3, 2 * E)) +
                           " vertices, got " + std::to_string(n));
    auto adj = tree.adjacency();

    // Euler tour: at each vertex the untried neighbours are taken in
    // counter-clockwise order starting from the edge we came in on.
    std::vector<std::size_t> tour{0};
    auto angle_of = [&](std::size_t from, std::size_t to) {
        Vec2 d = tree.vertex(to) - tree.vertex(from);
        return std::atan2(d.y, d.x);
    };
    struct Frame {
        std::size_t v, parent;
        std::vector<std::size_t> children;
        std::size_t next = 0;
    };
    auto make_frame = [&](std::size_t v, std::size_t parent) {
        Frame f{v, parent, {}, 0};
        double base = parent == V ? 0.0 : angle_of(v, parent);
        std::vector<std::pair<double, std::size_t>> order;
        for (auto m : adj[v]) {
            if (m == parent) continue;
            double rel = angle_of(v, m) - base;
            while (rel <= 0.0) rel += 2.0 * std::numbers::pi;
            while (rel > 2.0 * std::numbers::pi) rel -= 2.0 * std::numbers::pi;
            order.emplace_back(rel, m);
        }
        std::sort(order.begin(), order.end());
        for (auto& [a, m] : order) f.children.push_back(m);
        return f;
    };
    std::vector<Frame> stack{make_frame(0, V)};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < f.children.size()) {
            std::size_t m = f.children[f.next++];
            tour.push_back(m);
            std::size_t v = f.v;
            stack.push_back(make_frame(m, v));
        } else {
            std::size_t parent = f.parent;
            stack.pop_back();
            if (parent != V) tour.push_back(parent);
        }
    }
    // tour is closed: first == last, 2E directed edges
    const std::size_t legs = tour.size() - 1;
    std::vector<double> len(legs);
    double total = 0.0;
    for (std::size_t k = 0; k < legs; ++k) {
        len[k] = distance(tree.vertex(tour[k]), tree.vertex(tour[k + 1]));
        if (!(len[k] > 0.0)) throw InvalidCurve("tree has a zero-length edge");
        total += len[k];
    }
    // largest-remainder allocation with one piece reserved per leg
    std::vector<std::size_t> pieces(legs, 1);
    const std::size_t spare = n - legs;
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t used = 0;
    for (std::size_t k = 0; k < legs; ++k) {
        double share = static_cast<double>(spare) * len[k] / total;
        auto whole = static_cast<std::size_t>(std::floor(share));
        pieces[k] += whole;
        used += whole;
        rem.emplace_back(-(share - static_cast<double>(whole)), k);
    }
    std::sort(rem.begin(), rem.end());
    for (std::size_t q = 0; used < spare; ++q, ++used) ++pieces[rem[q % legs].second];

    std::vector<Vec2> pts;
    std::vector<std::size_t> pinned;
    pts.reserve(n);
    for (std::size_t k = 0; k < legs; ++k) {
        Vec2 a = tree.vertex(tour[k]), b = tree.vertex(tour[k + 1]);
        pinned.push_back(pts.size());
        pts.push_back(a);
        for (std::size_t q = 1; q < pieces[k]; ++q)
            pts.push_back(a + (b - a) * (static_cast<double>(q) / static_cast<double>(pieces[k])));
    }
    return DiscreteCurve(std::move(pts), std::move(pinned));
}

MultiplicityReport verify_even_multiplicity(const DiscreteCurve& curve, std::size_t samples, std::uint64_t seed) {
    MultiplicityReport rep;
    const std::size_t n = curve.size();
    const double L = curve_length(curve);
    const double tol = 1e-9 * L;
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + distance(curve[i], curve[curve.next(i)]);
    std::vector<Vec2> crossings;
    for (const auto& hit : self_intersections(curve))
        if (hit.transversal) crossings.push_back(hit.point);

    Rng rng(seed);
    std::size_t attempts = 0;
    while (rep.samples < samples && attempts < 100 * samples + 100) {
        ++attempts;
        double u = rng.uniform() * L;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()) - 1, n - 1);
        Vec2 a = curve[i], b = curve[curve.next(i)];
        double seg = cum[i + 1] - cum[i];
        Vec2 x = a + (b - a) * std::clamp((u - cum[i]) / seg, 0.0, 1.0);

        bool near = false;
        for (const auto& v : curve.vertices())
            if (distance(v, x) <= tol) {
                near = true;
                break;
            }
        for (const auto& c : crossings)
            if (!near && distance(c, x) <= tol) near = true;
        if (near) continue;

        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (point_segment_distance(x, curve[j], curve[curve.next(j)]) <= tol) ++count;
        if (rep.counts.size() <= count) rep.counts.resize(count + 1, 0);
        ++rep.counts[count];
        if (count % 2 == 1) ++rep.odd;
        ++rep.samples;
    }
    rep.ok = rep.odd == 0 && rep.samples > 0;
    return rep;
}

void write_tree(std::ostream& out, const SteinerTree& tree) {
    out << std::setprecision(17);
    for (const auto& p : tree.terminals) out << "T " << p.x << ' ' << p.y << '\n';
    for (const auto& p : tree.steiner_points) out << "S " << p.x << ' ' << p.y << '\n';
    for (auto [a, b] : tree.edges) out << "E " << a << ' ' << b << '\n';
    out << "L " << tree.total_length << '\n';
    if (!out) throw IoError("failed writing tree");
}

SteinerTree read_tree(std::istream& in) {
    SteinerTree tree;
    std::string line;
    std::size_t line_no = 0;
    bool have_len = false;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        auto bad = [&] { return IoError("tree line " + std::to_string(line_no) + ": malformed \"" + line + "\""); };
        if (tag == "T" || tag == "S") {
            Vec2 p;
            if (!(ss >> p.x >> p.y)) throw bad();
            (tag == "T" ? tree.terminals : tree.steiner_points).push_back(p);
        } else if (tag == "E") {
            long long a = -1, b = -1;
            if (!(ss >> a >> b) || a < 0 || b < 0) throw bad();
            edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        } else if (tag == "L") {
            if (!(ss >> tree.total_length)) throw bad();
            have_len = true;
        } else {
            throw bad();
        }
        std::string extra;
        if (ss >> extra) throw bad();
    }
    for (auto [a, b] : edges)
        if (a >= tree.vertex_count() || b >= tree.vertex_count() || a == b)
            throw IoError("tree edge " + std::to_string(a) + " " + std::to_string(b) + " out of range");
    tree.edges = std::move(edges);
    if (!have_len) {
        tree.total_length = 0.0;
        for (auto [a, b] : tree.edges) tree.total_length += distance(tree.vertex(a), tree.vertex(b));
    }
    return tree;
}

} // namespace capillary
