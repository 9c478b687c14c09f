#include "capillary/energy.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

// Structure-of-arrays view of the segment frames.
struct Frames {
    std::vector<Vec2> mid;
    std::vector<Vec2> tan;
    std::vector<double> len;
    double total_length = 0.0;

    explicit Frames(const DiscreteCurve& c) {
        const auto fr = segment_frames(c);
        mid.reserve(fr.size());
        tan.reserve(fr.size());
        len.reserve(fr.size());
        for (const auto& f : fr) {
            mid.push_back(f.midpoint);
            tan.push_back(f.tangent);
            len.push_back(f.length);
            total_length += f.length;
        }
    }
};

std::size_t cyclic_distance(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = i > j ? i - j : j - i;
    return std::min(d, n - d);
}

// |u|^p from |u|^2.
double pow_from_sq(double u2, double p) {
    if (p == 2.0) return u2;
    if (u2 == 0.0) return 0.0;
    return std::pow(u2, 0.5 * p);
}

// |d|^(-q) from |d|^2.
double inv_pow_from_sq(double d2, double q) {
    if (q == 2.0) return 1.0 / d2;
    return std::exp(-0.5 * q * std::log(d2));
}

double collapse_threshold_sq(double total_length) {
    const double t = 1e-14 * total_length;
    return t * t;
}

} // namespace

std::string to_string(Regime r) {
    switch (r) {
    case Regime::NonCollapsing: return "non-collapsing";
    case Regime::MobiusCritical: return "Mobius-critical";
    case Regime::CollapsingPermissive: return "collapsing-permissive";
    }
    return "unknown";
}

Regime EnergyParams::regime() const {
    const double v = sp();
    if (std::abs(v - 1.0) <= 1e-12) return Regime::MobiusCritical;
    return v > 1.0 ? Regime::NonCollapsing : Regime::CollapsingPermissive;
}

void EnergyParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError(0, "s must lie in (0,1), got " + std::to_string(s));
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError(0, "p must be >= 1, got " + std::to_string(p));
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw ConfigError(0, "delta must be >= 0, got " + std::to_string(delta));
    if (exclusion_width < 1) throw ConfigError(0, "exclusion_width must be >= 1");
}

double pair_term(const SegmentFrame& a, const SegmentFrame& b, double s, double p) {
    const double u2 = norm2(a.tangent - b.tangent);
    const double d2 = norm2(a.midpoint - b.midpoint);
    return pow_from_sq(u2, p) * inv_pow_from_sq(d2, 1.0 + s * p) * a.length * b.length;
}

double nonlocal_energy(const DiscreteCurve& curve, const EnergyParams& params) {
    const Frames f(curve);
    const std::size_t n = curve.size();
    const double q = 1.0 + params.sp();
    const double collapse2 = collapse_threshold_sq(f.total_length);
    const std::size_t w = params.exclusion_width;

    // Row sums over j > i, reduced in index order.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cyclic_distance(i, j, n) <= w) continue;
            const double d2 = norm2(f.mid[i] - f.mid[j]);
            if (d2 <= collapse2) throw CollapsedConfiguration(i, j);
            const double u2 = norm2(f.tan[i] - f.tan[j]);
            row += pow_from_sq(u2, params.p) * inv_pow_from_sq(d2, q) * f.len[i] * f.len[j];
        }
        total += row;
    }
    return 2.0 * total;
}

EnergyBreakdown total_energy(const DiscreteCurve& curve, const EnergyParams& params) {
    EnergyBreakdown b;
    b.length_term = curve_length(curve);
    b.total = b.length_term;
    if (params.delta == 0.0) {
        // Pure length: a collapsed curve is admissible, its G is infinite.
        try {
            b.nonlocal_term = nonlocal_energy(curve, params);
        } catch (const CollapsedConfiguration&) {
            b.nonlocal_term = std::numeric_limits<double>::infinity();
        }
        return b;
    }
    b.nonlocal_term = nonlocal_energy(curve, params);
    b.total = b.length_term + params.delta * b.nonlocal_term;
    return b;
}

EnergyBreakdown energy_and_gradient(const DiscreteCurve& curve, const EnergyParams& params,
                                    std::vector<Vec2>& grad) {
    const Frames f(curve);
    const std::size_t n = curve.size();
    const double p = params.p;
    const double q = 1.0 + params.sp();
    const double collapse2 = collapse_threshold_sq(f.total_length);
    const std::size_t w = params.exclusion_width;

    grad.assign(n, Vec2{});
    // Length: d l_i / d v_{i+1} = t_i, d l_i / d v_i = -t_i.
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] -= f.tan[i];
        grad[curve.next(i)] += f.tan[i];
    }

    if (params.delta == 0.0) return total_energy(curve, params);

    // Partials of G with respect to each segment's edge vector e_i and
    // midpoint m_i. The ordered pair terms are symmetric, so the partial in
    // slot i is twice the first-slot partial summed over j.
    std::vector<Vec2> d_edge(n), d_mid(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 d_tan{}, dm{};
        double by_len = 0.0;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (cyclic_distance(i, j, n) <= w) continue;
            const Vec2 d = f.mid[i] - f.mid[j];
            const double d2 = norm2(d);
            if (d2 <= collapse2) throw CollapsedConfiguration(i, j);
            const Vec2 u = f.tan[i] - f.tan[j];
            const double u2 = norm2(u);
            const double up = pow_from_sq(u2, p);
            const double inv = inv_pow_from_sq(d2, q);
            const double term = up * inv * f.len[i] * f.len[j];
            if (j > i) row += term;
            const double kernel = inv * f.len[i] * f.len[j];
            // d|u|^p / du = p |u|^(p-2) u; zero at u = 0 for p > 1.
            if (u2 > 0.0) d_tan += u * (p * (p == 2.0 ? 1.0 : up / u2) * kernel);
            dm -= d * (q * term / d2);
            by_len += term;
        }
        total += row;
        const Vec2 t = f.tan[i];
        // t = e / |e|: dt/de = (I - t t^T) / |e|; |e| enters through l_i.
        d_edge[i] = (d_tan - t * dot(t, d_tan)) / f.len[i] + t * (by_len / f.len[i]);
        d_mid[i] = dm;
    }

    EnergyBreakdown b;
    b.length_term = curve_length(curve);
    b.nonlocal_term = 2.0 * total;
    b.total = b.length_term + params.delta * b.nonlocal_term;

    const double scale = 2.0 * params.delta;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 ge = d_edge[i] * scale;
        const Vec2 gm = d_mid[i] * (0.5 * scale);
        grad[i] += gm - ge;
        grad[curve.next(i)] += gm + ge;
    }
    return b;
}

std::vector<Vec2> energy_gradient(const DiscreteCurve& curve, const EnergyParams& params) {
    std::vector<Vec2> g;
    energy_and_gradient(curve, params, g);
    return g;
}

double mobius_e1(const DiscreteCurve& curve, std::size_t exclusion_width) {
    const Frames f(curve);
    const std::size_t n = curve.size();
    const double collapse2 = collapse_threshold_sq(f.total_length);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (cyclic_distance(i, j, n) <= exclusion_width) continue;
            const double d2 = norm2(f.mid[i] - f.mid[j]);
            if (d2 <= collapse2) throw CollapsedConfiguration(i, j);
            total += norm2(f.tan[i] - f.tan[j]) / (2.0 * d2) * f.len[i] * f.len[j];
        }
    }
    return total;
}

double cross_energy(std::span<const Vec2> first, std::span<const Vec2> second, double s, double p) {
    const double q = 1.0 + s * p;
    auto frames = [](std::span<const Vec2> pts) {
        std::vector<SegmentFrame> out;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const Vec2 e = pts[k + 1] - pts[k];
            const double l = norm(e);
            if (!(l > 0.0)) throw InvalidCurve("degenerate segment in open chain");
            out.push_back({(pts[k] + pts[k + 1]) * 0.5, e / l, perp(e / l), l});
        }
        return out;
    };
    const auto a = frames(first);
    const auto b = frames(second);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d2 = norm2(a[i].midpoint - b[j].midpoint);
            if (d2 == 0.0) throw CollapsedConfiguration(i, j);
            row += pow_from_sq(norm2(a[i].tangent - b[j].tangent), p) * inv_pow_from_sq(d2, q) * a[i].length *
                   b[j].length;
        }
        total += row;
    }
    return total;
}

RefinementTable fit_refinement(const std::vector<std::size_t>& levels, const std::vector<double>& values) {
    RefinementTable t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        RefinementRow r{levels[k], values[k], nan};
        if (k >= 2) {
            const double d1 = std::abs(values[k - 1] - values[k - 2]);
            const double d2 = std::abs(values[k] - values[k - 1]);
            r.exponent = std::log(d2 / d1) / std::log(static_cast<double>(levels[k]) / static_cast<double>(levels[k - 1]));
        }
        t.rows.push_back(r);
    }
    // Least squares of log|diff| on log n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = 1; k < levels.size(); ++k) {
        const double diff = std::abs(values[k] - values[k - 1]);
        if (!(diff > 0.0)) continue;
        const double x = std::log(static_cast<double>(levels[k]));
        const double y = std::log(diff);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double den = static_cast<double>(m) * sxx - sx * sx;
    t.fitted_exponent = m >= 2 && den != 0.0 ? (static_cast<double>(m) * sxy - sx * sy) / den : nan;
    return t;
}

RefinementTable refinement_study(const std::function<DiscreteCurve(std::size_t)>& generator,
                                 const EnergyParams& params, const std::vector<std::size_t>& levels) {
    std::vector<double> values;
    values.reserve(levels.size());
    for (std::size_t n : levels) values.push_back(nonlocal_energy(generator(n), params));
    return fit_refinement(levels, values);
}

void write_refinement_csv(std::ostream& out, const RefinementTable& table) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << "n,value,exponent_estimate\n" << std::setprecision(17);
    for (const auto& r : table.rows) out << r.n << ',' << r.value << ',' << r.exponent << '\n';
    out.flags(flags);
    out.precision(prec);
}

} // namespace capillary
