#include "capillary/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "capillary/errors.hpp"
#include "capillary/steiner.hpp"
#include "capillary/svg.hpp"

namespace capillary {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_decreasing(const std::vector<double>& values, const char* what) {
    if (values.empty()) throw ConfigError(0, std::string(what) + " list is empty");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] > 0.0) || !std::isfinite(values[k]))
            throw ConfigError(0, std::string(what) + " values must be positive");
        if (k > 0 && !(values[k] < values[k - 1]))
            throw ConfigError(0, std::string(what) + " values must be strictly decreasing");
    }
}

SweepRecord make_record(double control, const DiscreteCurve& c, const ConstraintSpec& spec,
                        const EnergyParams& params) {
    SweepRecord r;
    r.control = control;
    r.length = curve_length(c);
    try {
        r.nonlocal = nonlocal_energy(c, params);
    } catch (const Error&) {
        r.nonlocal = std::numeric_limits<double>::infinity();
    }
    r.min_separation = min_nonadjacent_separation(c);
    r.area_residual = signed_area(c) - spec.epsilon;
    r.curve = c;
    return r;
}

} // namespace

std::vector<double> decade_chain(double target) {
    if (!(target >= 0.0)) throw ConfigError(0, "delta must be nonnegative");
    std::vector<double> chain;
    for (int k = 1; target > 0.0 && std::pow(10.0, -k) > target * (1.0 + 1e-9); ++k) chain.push_back(std::pow(10.0, -k));
    chain.push_back(target);
    return chain;
}

std::vector<SweepRecord> sweep_delta(const ConstraintSpec& spec, const EnergyParams& params0,
                                     const std::vector<double>& deltas, const OptimizerConfig& cfg, std::size_t n,
                                     const DiscreteCurve* start) {
    check_decreasing(deltas, "delta");
    params0.validate();
    if (!(params0.sp() > 1.0)) throw ConfigError(0, "the delta sweep needs s*p > 1");
    spec.validate();
    DiscreteCurve c = start ? *start : initial_curve(spec, n);
    EnergyParams params = params0;
    std::vector<SweepRecord> records;
    for (double d : deltas) {
        params.delta = d;
        try {
            OptimizeResult res = minimize(c, params, spec, cfg);
            c = res.final;
            SweepRecord r = make_record(d, c, spec, params);
            r.iterations = res.iterations;
            r.status = to_string(res.status);
            records.push_back(std::move(r));
        } catch (const Error& e) {
            SweepRecord r = make_record(d, c, spec, params);
            r.status = std::string("error: ") + e.what();
            records.push_back(std::move(r));
        }
    }
    // the delta = 0 endpoint of the same chain stands in for the capillary length
    double reference = std::numeric_limits<double>::infinity();
    params.delta = 0.0;
    try {
        reference = curve_length(minimize(c, params, spec, cfg).final);
    } catch (const Error&) {
    }
    for (const auto& r : records) reference = std::min(reference, r.length);
    for (auto& r : records) r.reference = reference;
    return records;
}

DiscreteCurve shrink_area(const DiscreteCurve& curve, const ConstraintSpec& spec, const EnergyParams& params,
                          const OptimizerConfig& cfg) {
    spec.validate(0);
    const double eps = spec.epsilon;
    DiscreteCurve c = curve;
    double a = signed_area(c);
    if (a <= eps * (1.0 + spec.tol_area)) return c;

    EnergyParams relax = params;
    relax.delta = 1e-3;
    OptimizerConfig stage_cfg = cfg;
    stage_cfg.max_inner = 50;
    stage_cfg.max_outer = 1;

    while (a > eps * (1.0 + spec.tol_area)) {
        std::vector<Vec2> dir = room_weighted_normals(c);
        double dec = std::min(a - eps, 0.5 * a);
        ConstraintSpec stage = spec;
        std::optional<DiscreteCurve> next;
        for (int halving = 0; halving < 30 && !next; ++halving, dec *= 0.5) {
            stage.epsilon = dec == a - eps ? eps : a - dec;
            try {
                DiscreteCurve moved = project_area_along(c, stage, dir).curve;
                if (check_winding_class(moved).ok) next = std::move(moved);
            } catch (const Error&) {
            }
        }
        if (!next) throw ProjectionOutOfRange("area continuation stalled at area " + num(a));
        try {
            c = minimize(*next, relax, stage, stage_cfg).final;
        } catch (const Error&) {
            c = *next;
        }
        a = stage.epsilon;
    }
    return c;
}

std::vector<SweepRecord> sweep_epsilon(const ConstraintSpec& spec, const std::vector<double>& epsilons,
                                       const EnergyParams& params, const OptimizerConfig& cfg, std::size_t n) {
    check_decreasing(epsilons, "epsilon");
    params.validate();
    ConstraintSpec current = spec;
    current.epsilon = epsilons.front();
    current.validate();
    const double reference = 2.0 * steiner_tree(spec.pins).total_length;
    const std::vector<double> chain = decade_chain(params.delta);

    std::optional<DiscreteCurve> c;
    std::vector<SweepRecord> records;
    for (double eps : epsilons) {
        current.epsilon = eps;
        EnergyParams run = params;
        std::size_t iterations = 0;
        std::string status;
        try {
            c = c ? shrink_area(*c, current, params, cfg) : initial_curve(current, n);
            for (double d : chain) {
                run.delta = d;
                OptimizeResult res = minimize(*c, run, current, cfg);
                c = res.final;
                iterations += res.iterations;
                status = to_string(res.status);
            }
        } catch (const Error& e) {
            status = std::string("error: ") + e.what();
        }
        if (!c) throw ProjectionOutOfRange("no feasible start for epsilon " + num(eps));
        SweepRecord r = make_record(eps, *c, current, run);
        r.iterations = iterations;
        r.reference = reference;
        r.status = status;
        records.push_back(std::move(r));
    }
    return records;
}

RecoveryResult recovery_sequence(const DiscreteCurve& curve, double epsilon, std::size_t n) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw ConfigError(0, "recovery needs 0 < epsilon < 1");
    const double area = enclosed_area(curve);
    if (std::abs(area) > 1e-9 * std::max(1.0, curve_length(curve) * curve_length(curve)))
        throw Error(ErrorKind::Infeasible, "recovery needs a zero-area curve, got area " + num(area));

    RecoveryResult out{curve, std::pow(epsilon, 0.25), {}, 0.0, 0};
    const std::size_t m =
        std::max<std::size_t>(static_cast<std::size_t>(std::llround(out.lambda * static_cast<double>(n))),
                              kMinCircleVertices);
    if (n < m + 3) throw ConfigError(0, "recovery needs n >= " + std::to_string(m + 3));
    out.circle_vertices = m;

    // circle on the side facing away from the two curve directions at the base
    const Vec2 base = curve[0];
    Vec2 d1 = curve[1] - base, d2 = curve[curve.size() - 1] - base;
    Vec2 away = -(d1 / norm(d1) + d2 / norm(d2));
    if (norm(away) < 1e-12) away = perp(d1);
    away = away / norm(away);

    const double r = std::sqrt(epsilon / std::numbers::pi);
    const Vec2 side = perp(away);
    out.radius = r;
    out.center = base + r * away;
    auto polygon = [&](double k) {
        std::vector<Vec2> ring(m);
        for (std::size_t q = 0; q < m; ++q) {
            double phi = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(m);
            ring[q] = base + (r * (1.0 - std::cos(phi))) * away - (k * r * std::sin(phi)) * side;
        }
        return ring;
    };
    auto perimeter = [&](double k) {
        auto ring = polygon(k);
        double len = 0.0;
        for (std::size_t q = 0; q < m; ++q) len += distance(ring[q], ring[(q + 1) % m]);
        return len;
    };
    const double target = 2.0 * std::sqrt(std::numbers::pi * epsilon);
    double lo = 1.0, hi = 1.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        (perimeter(mid) < target ? lo : hi) = mid;
    }
    out.stretch = 0.5 * (lo + hi);
    std::vector<Vec2> pts = polygon(out.stretch);
    pts.reserve(n);
    // pinning the base makes the resampled curve start there
    std::vector<std::size_t> anchors = curve.pinned();
    if (!curve.is_pinned(0)) anchors.push_back(0);
    DiscreteCurve rest = resample_constant_speed(curve.with_pins(anchors), n - m).curve;
    std::vector<std::size_t> pinned;
    pts.insert(pts.end(), rest.vertices().begin(), rest.vertices().end());
    for (auto k : rest.pinned()) pinned.push_back(k + m);
    out.curve = DiscreteCurve(std::move(pts), std::move(pinned));
    return out;
}

std::vector<Vec2> contact_polyline(ContactGeometry geometry, bool first, std::size_t level) {
    if (level == 0) throw ConfigError(0, "contact level must be positive");
    std::vector<Vec2> pts(level + 1);
    for (std::size_t k = 0; k <= level; ++k) {
        double u = -0.1 + 0.2 * static_cast<double>(k) / static_cast<double>(level);
        if (geometry == ContactGeometry::Tangential) {
            double x = std::numbers::pi + u;
            pts[k] = first ? Vec2{u, -1.0} : Vec2{std::sin(x), std::cos(x)};
        } else {
            pts[k] = first ? Vec2{u, 0.0} : Vec2{0.5 * u, std::sqrt(3.0) / 2.0 * u};
        }
    }
    return pts;
}

CounterexampleTable counterexample_study(const std::vector<double>& s_values, double p,
                                         const std::vector<std::size_t>& levels, ContactGeometry geometry) {
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] <= levels[k - 1]) throw ConfigError(0, "levels must be increasing");
    CounterexampleTable table;
    for (double s : s_values) {
        EnergyParams check{s, p, 0.0, 1};
        check.validate();
        std::vector<double> values;
        for (auto level : levels) {
            auto a = contact_polyline(geometry, true, level);
            auto b = contact_polyline(geometry, false, level);
            values.push_back(cross_energy(a, b, s, p));
        }
        RefinementTable fit = fit_refinement(levels, values);
        for (const auto& row : fit.rows) table.rows.push_back({s, p, row.n, row.value, row.exponent});
        table.fitted.push_back(fit.fitted_exponent);
    }
    return table;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "control,length,nonlocal,min_sep,area_res,iters,reference\n";
    for (const auto& r : records)
        out << num(r.control) << ',' << num(r.length) << ',' << num(r.nonlocal) << ',' << num(r.min_separation) << ','
            << num(r.area_residual) << ',' << r.iterations << ',' << num(r.reference) << '\n';
}

void write_counterexample_csv(std::ostream& out, const CounterexampleTable& table) {
    out << "s,p,level,value,exponent\n";
    for (const auto& r : table.rows)
        out << num(r.s) << ',' << num(r.p) << ',' << r.level << ',' << num(r.value) << ',' << num(r.exponent) << '\n';
}

void emit_report(const std::vector<SweepRecord>& records, const std::filesystem::path& out_dir,
                 const std::vector<Vec2>& pins) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    auto open = [&](const std::filesystem::path& p) {
        std::ofstream f(p);
        if (!f) throw IoError("cannot write " + p.string());
        return f;
    };
    {
        auto f = open(out_dir / "sweep.csv");
        write_sweep_csv(f, records);
        if (!f) throw IoError("failed writing sweep.csv");
    }
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (!records[k].curve) continue;
        char stem[32];
        std::snprintf(stem, sizeof stem, "curve_%03zu", k);
        auto svg = open(out_dir / (std::string(stem) + ".svg"));
        write_svg(svg, *records[k].curve, pins, "control " + num(records[k].control));
        auto txt = open(out_dir / (std::string(stem) + ".txt"));
        write_curve(txt, *records[k].curve);
        if (!svg || !txt) throw IoError(std::string("failed writing ") + stem);
    }
}

} // namespace capillary
