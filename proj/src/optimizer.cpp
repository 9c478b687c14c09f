#include "capillary/optimizer.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "capillary/errors.hpp"

namespace capillary {

void OptimizerConfig::validate() const {
    if (max_outer < 1 || max_inner < 1) throw ConfigError(0, "max_outer and max_inner must be positive");
    if (!(step0 > 0.0)) throw ConfigError(0, "step0 must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 0.5)) throw ConfigError(0, "armijo_c must lie in (0, 0.5)");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError(0, "shrink must lie in (0,1)");
    if (!(grad_tol > 0.0)) throw ConfigError(0, "grad_tol must be positive");
    if (resample_every < 1) throw ConfigError(0, "resample_every must be positive");
    if (!(penalty0 > 0.0)) throw ConfigError(0, "penalty0 must be positive");
    if (!(penalty_growth > 1.0)) throw ConfigError(0, "penalty_growth must exceed 1");
    if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw ConfigError(0, "smoothing must be >= 0");
    if (!(room_fraction >= 0.0 && room_fraction <= 1.0)) throw ConfigError(0, "room_fraction must lie in [0,1]");
}

std::string to_string(OptimizeStatus s) {
    switch (s) {
    case OptimizeStatus::Converged: return "converged";
    case OptimizeStatus::MaxIterations: return "max-iterations";
    case OptimizeStatus::InfeasibleStep: return "infeasible-step";
    }
    return "unknown";
}

namespace {

double area_res(const DiscreteCurve& c, const ConstraintSpec& spec) { return signed_area(c) - spec.epsilon; }

// Objective value, skipping the O(n^2) pair sum when delta = 0.
double objective_energy(const DiscreteCurve& c, const EnergyParams& params) {
    if (params.delta == 0.0) return curve_length(c);
    return total_energy(c, params).total;
}

double sq_norm(const std::vector<Vec2>& g) {
    double s = 0.0;
    for (const Vec2& v : g) s += norm2(v);
    return s;
}

// Tridiagonal solve a_k x_{k-1} + b_k x_k + c_k x_{k+1} = r_k (open chain).
std::vector<Vec2> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<Vec2> r) {
    const std::size_t m = b.size();
    for (std::size_t k = 1; k < m; ++k) {
        const double w = a[k] / b[k - 1];
        b[k] -= w * c[k - 1];
        r[k] -= r[k - 1] * w;
    }
    std::vector<Vec2> x(m);
    x[m - 1] = r[m - 1] / b[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) x[k] = (r[k] - x[k + 1] * c[k]) / b[k];
    return x;
}

struct Direction {
    std::vector<Vec2> g;
    std::vector<Vec2> d;
    std::vector<double> room;
    double objective = 0.0;
    double total = 0.0;
    double norm = 0.0;
    double slope = 0.0;
};

// Keeps only the component along each vertex normal.
void to_normals(std::vector<Vec2>& v, const std::vector<Vec2>& normals) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = normals[i] * dot(v[i], normals[i]);
}

Direction direction(const DiscreteCurve& c, const EnergyParams& params, const ConstraintSpec& spec, double lambda,
                    double mu, double sigma, double room_fraction = 0.0, bool normal_flow = false) {
    Direction d;
    if (room_fraction > 0.0) {
        d.room = vertex_room(c);
        for (double& r : d.room) r *= room_fraction;
    }
    std::vector<Vec2> g;
    if (params.delta == 0.0) {
        g.assign(c.size(), Vec2{});
        for (std::size_t i = 0; i < c.size(); ++i) {
            const Vec2 t = (c[c.next(i)] - c[i]) / distance(c[c.next(i)], c[i]);
            g[i] -= t;
            g[c.next(i)] += t;
        }
        d.total = curve_length(c);
    } else {
        d.total = energy_and_gradient(c, params, g).total;
    }
    const double r = area_res(c, spec);
    const double coef = lambda + mu * r;
    auto a = area_gradient(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.is_pinned(i)) {
            g[i] = Vec2{};
            a[i] = Vec2{};
        } else {
            g[i] += a[i] * coef;
        }
    }
    // Tangential motion only reparametrizes; left in, it bunches vertices in
    // ways the periodic resample then undoes.
    std::vector<Vec2> normals;
    if (normal_flow) {
        normals = vertex_normals(c);
        to_normals(g, normals);
        to_normals(a, normals);
    }
    const double aa = sq_norm(a);
    if (aa > 0.0) {
        double ga = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) ga += dot(g[i], a[i]);
        const double f = ga / aa;
        for (std::size_t i = 0; i < c.size(); ++i) g[i] -= a[i] * f;
    }
    d.g = std::move(g);
    d.norm = std::sqrt(sq_norm(d.g));
    if (sigma > 0.0) {
        d.d = smooth_direction(c, d.g, sigma);
        if (normal_flow) to_normals(d.d, normals);
        // Smoothing reintroduces an area component; g has none, so removing
        // it keeps g.d unchanged.
        if (aa > 0.0) {
            double da = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) da += dot(d.d[i], a[i]);
            for (std::size_t i = 0; i < c.size(); ++i) d.d[i] -= a[i] * (da / aa);
        }
        d.slope = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) d.slope += dot(d.g[i], d.d[i]);
    } else {
        d.d = d.g;
        d.slope = d.norm * d.norm;
    }
    d.objective = d.total + lambda * r + 0.5 * mu * r * r;
    return d;
}

// Trial acceptance beyond the winding class. With floor > 0 the curve must
// stay embedded with non-adjacent separation at least floor. The midpoint
// quadrature does not see sheets that approach between staggered midpoints,
// so on an under-resolved curve the discrete energy stays finite through a
// contact; for sp > 1 the continuum energy does not, and `embedded` rejects
// such trials.
struct Guard {
    double floor = 0.0;
    bool embedded = false;
};

bool admissible(const DiscreteCurve& c, const Guard& guard, double sep_before = 0.0) {
    if (guard.floor > 0.0) return min_nonadjacent_separation(c) >= guard.floor && signed_area(c) >= 0.0;
    // Sheets closer than the vertex spacing are invisible to the discrete
    // energy, so one step can shut a gap outright. Let them close gradually.
    if (guard.embedded)
        return signed_area(c) > 0.0 && self_intersections(c).empty() &&
               min_nonadjacent_separation(c) >= 0.5 * sep_before;
    return check_winding_class(c).ok;
}

Guard make_guard(const DiscreteCurve& c, const EnergyParams& params, const OptimizerConfig& cfg) {
    Guard g;
    if (params.delta > 0.0 && self_intersections(c).empty()) {
        if (cfg.keep_embedded) g.floor = 0.5 * min_nonadjacent_separation(c);
        g.embedded = params.sp() > 1.0;
    }
    return g;
}

StepOutcome try_step(const DiscreteCurve& c, const Direction& dir, const EnergyParams& params,
                     const ConstraintSpec& spec, double lambda, double mu, double step, const OptimizerConfig& cfg,
                     const Guard& guard) {
    StepOutcome out{c, false, step * cfg.shrink, dir.objective, std::sqrt(std::max(dir.slope, 0.0))};
    try {
        std::vector<Vec2> v = c.vertices();
        double slope = dir.slope;
        if (dir.room.empty()) {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dir.d[i] * step;
        } else {
            slope = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double move = step * norm(dir.d[i]);
                const double f = move > dir.room[i] ? dir.room[i] / move : 1.0;
                v[i] -= dir.d[i] * (step * f);
                slope += f * dot(dir.g[i], dir.d[i]);
            }
            if (!(slope > 0.0)) return out;
        }
        const DiscreteCurve moved = c.with_vertices(std::move(v));
        DiscreteCurve trial = moved;
        const double sep_before = guard.embedded ? min_nonadjacent_separation(c) : 0.0;
        bool ok = false;
        try {
            trial = project_area(moved, spec);
            ok = admissible(trial, guard, sep_before);
        } catch (const Error&) {
        }
        if (!ok) {
            // A common normal offset pushes touching sheets through each
            // other; retry with the offset concentrated where there is room.
            trial = project_area_along(moved, spec, room_weighted_normals(moved)).curve;
            if (!admissible(trial, guard, sep_before)) return out;
        }
        const double r = area_res(trial, spec);
        const double f = objective_energy(trial, params) + lambda * r + 0.5 * mu * r * r;
        if (!(f <= dir.objective - cfg.armijo_c * step * slope)) return out;
        out.curve = std::move(trial);
        out.accepted = true;
        out.step = step;
        out.objective = f;
    } catch (const Error&) {
        // Degenerate, collapsed, or unprojectable trial: shrink.
    }
    return out;
}

HistoryEntry snapshot(std::size_t iter, const DiscreteCurve& c, const EnergyParams& params,
                      const ConstraintSpec& spec, std::size_t phase, double augmented) {
    HistoryEntry h;
    h.iteration = iter;
    const EnergyBreakdown b = total_energy(c, params);
    h.total = b.total;
    h.length = b.length_term;
    h.nonlocal = b.nonlocal_term;
    h.area_residual = area_res(c, spec);
    h.pin_residual = pin_residual(c, spec);
    h.min_separation = min_nonadjacent_separation(c);
    h.phase = phase;
    h.augmented = augmented;
    return h;
}

} // namespace

double augmented_objective(const DiscreteCurve& curve, const EnergyParams& params, const ConstraintSpec& spec,
                           double multiplier, double penalty) {
    const double r = area_res(curve, spec);
    return objective_energy(curve, params) + multiplier * r + 0.5 * penalty * r * r;
}

std::vector<Vec2> projected_gradient(const DiscreteCurve& curve, const EnergyParams& params,
                                     const ConstraintSpec& spec, double multiplier, double penalty) {
    return direction(curve, params, spec, multiplier, penalty, 0.0).g;
}

std::vector<Vec2> smooth_direction(const DiscreteCurve& curve, const std::vector<Vec2>& g, double sigma) {
    const std::size_t n = curve.size();
    std::vector<double> len(n);
    for (std::size_t i = 0; i < n; ++i) len[i] = distance(curve[i], curve[curve.next(i)]);
    const double h = curve_length(curve) / static_cast<double>(n);
    const double alpha = sigma * sigma / h;
    // Row i: d_i + alpha ((d_i - d_{i-1}) / l_{i-1} + (d_i - d_{i+1}) / l_i) = g_i,
    // symmetric positive definite.
    auto lower = [&](std::size_t i) { return -alpha / len[curve.prev(i)]; };
    auto upper = [&](std::size_t i) { return -alpha / len[i]; };
    auto diag = [&](std::size_t i) { return 1.0 + alpha / len[curve.prev(i)] + alpha / len[i]; };

    std::vector<Vec2> d(n);
    const auto& pins = curve.pinned();
    if (pins.empty()) {
        // Cyclic system via Sherman-Morrison on the open chain 0..n-1.
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = lower(i);
            b[i] = diag(i);
            c[i] = upper(i);
        }
        const double corner_lo = a[0], corner_hi = c[n - 1];
        const double gamma = -b[0];
        b[0] -= gamma;
        b[n - 1] -= corner_hi * corner_lo / gamma;
        a[0] = 0.0;
        c[n - 1] = 0.0;
        const auto y = thomas(a, b, c, g);
        // A = T + u v^T with u = (gamma, 0, ..., corner_hi), v = (1, 0, ..., corner_lo / gamma);
        // z solves T z = u (scalar, carried in x).
        std::vector<Vec2> u(n);
        u[0] = Vec2{gamma, 0.0};
        u[n - 1] = Vec2{corner_hi, 0.0};
        const auto z = thomas(a, b, c, u);
        const double vz = z[0].x + corner_lo / gamma * z[n - 1].x;
        const Vec2 vy = y[0] + y[n - 1] * (corner_lo / gamma);
        for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - vy * (z[i].x / (1.0 + vz));
        return d;
    }
    // Free chains between consecutive pins, zero Dirichlet data.
    for (std::size_t k = 0; k < pins.size(); ++k) {
        const std::size_t from = pins[k];
        const std::size_t to = pins[(k + 1) % pins.size()];
        std::vector<std::size_t> idx;
        for (std::size_t i = curve.next(from); i != to; i = curve.next(i)) idx.push_back(i);
        if (idx.empty()) continue;
        const std::size_t m = idx.size();
        std::vector<double> a(m), b(m), c(m);
        std::vector<Vec2> r(m);
        for (std::size_t q = 0; q < m; ++q) {
            a[q] = q > 0 ? lower(idx[q]) : 0.0;
            b[q] = diag(idx[q]);
            c[q] = q + 1 < m ? upper(idx[q]) : 0.0;
            r[q] = g[idx[q]];
        }
        const auto x = thomas(a, b, c, r);
        for (std::size_t q = 0; q < m; ++q) d[idx[q]] = x[q];
    }
    return d;
}

StepOutcome descent_step(const DiscreteCurve& curve, const EnergyParams& params, const ConstraintSpec& spec,
                         double multiplier, double penalty, double step, const OptimizerConfig& cfg) {
    const Direction dir = direction(curve, params, spec, multiplier, penalty, cfg.smoothing, cfg.room_fraction, cfg.normal_flow);
    return try_step(curve, dir, params, spec, multiplier, penalty, step, cfg,
                    make_guard(curve, params, cfg));
}

OptimizeResult minimize(const DiscreteCurve& curve0, const EnergyParams& params, const ConstraintSpec& spec,
                        const OptimizerConfig& cfg) {
    params.validate();
    spec.validate(0);
    cfg.validate();

    DiscreteCurve curve = curve0;
    if (std::abs(area_res(curve, spec)) > spec.tol_area * spec.epsilon) curve = project_area(curve, spec);
    if (!check_winding_class(curve).ok) throw Error(ErrorKind::Infeasible, "start curve violates the winding class");

    const std::size_t n_target = curve.size();
    // Fixed for the whole run.
    const Guard guard = make_guard(curve, params, cfg);
    const double min_step = 1e-14 * diameter(curve.vertices());

    OptimizeResult res{curve, {}, {}, OptimizeStatus::MaxIterations, 0, 0.0, {}};
    double lambda = 0.0;
    double mu = cfg.penalty0;
    double step = cfg.step0;
    std::size_t phase = 0;
    std::size_t iter = 0;
    std::size_t accepted = 0;
    int first_try_streak = 0;

    Direction dir = direction(curve, params, spec, lambda, mu, cfg.smoothing, cfg.room_fraction, cfg.normal_flow);
    res.history.push_back(snapshot(iter, curve, params, spec, phase, dir.objective));

    bool done = false;
    for (std::size_t outer = 0; outer < cfg.max_outer && !done; ++outer) {
        bool inner_converged = false;
        for (std::size_t inner = 0; inner < cfg.max_inner; ++inner) {
            if (dir.norm <= cfg.grad_tol * (1.0 + std::abs(dir.total))) {
                inner_converged = true;
                break;
            }
            bool first = true;
            StepOutcome out{curve, false, step, dir.objective, dir.norm};
            for (;;) {
                out = try_step(curve, dir, params, spec, lambda, mu, step, cfg, guard);
                if (out.accepted) break;
                step = out.step;
                first = false;
                if (step < min_step) {
                    res.status = OptimizeStatus::InfeasibleStep;
                    done = true;
                    break;
                }
            }
            if (done) break;

            curve = std::move(out.curve);
            ++iter;
            ++accepted;
            if (first) {
                if (++first_try_streak >= 2) {
                    step = std::min(step * 1.5, cfg.step0);
                    first_try_streak = 0;
                }
            } else {
                first_try_streak = 0;
            }
            res.history.push_back(snapshot(iter, curve, params, spec, phase, out.objective));

            if (accepted % cfg.resample_every == 0) {
                try {
                    const double before = objective_energy(curve, params);
                    DiscreteCurve r = project_area(resample_constant_speed(curve, n_target).curve, spec);
                    if (admissible(r, guard)) {
                        const double after = objective_energy(r, params);
                        if (std::abs(after - before) > 0.01 * std::abs(before))
                            res.warnings.push_back("iteration " + std::to_string(iter) + ": resample changed energy by " +
                                                   std::to_string(100.0 * (after - before) / before) + "%");
                        curve = std::move(r);
                        ++phase;
                    } else {
                        res.warnings.push_back("iteration " + std::to_string(iter) + ": resample skipped (inadmissible)");
                    }
                } catch (const Error& e) {
                    res.warnings.push_back("iteration " + std::to_string(iter) + ": resample skipped (" + e.what() + ")");
                }
            }
            dir = direction(curve, params, spec, lambda, mu, cfg.smoothing, cfg.room_fraction, cfg.normal_flow);
        }
        if (done) break;

        const double r = area_res(curve, spec);
        if (inner_converged && std::abs(r) <= spec.tol_area * spec.epsilon) {
            res.status = OptimizeStatus::Converged;
            break;
        }
        lambda += mu * r;
        if (std::abs(r) > spec.tol_area * spec.epsilon) mu *= cfg.penalty_growth;
        ++phase;
        dir = direction(curve, params, spec, lambda, mu, cfg.smoothing, cfg.room_fraction, cfg.normal_flow);
    }

    res.final = curve;
    res.breakdown = total_energy(curve, params);
    res.iterations = iter;
    res.gradient_norm = dir.norm;
    return res;
}

void write_history_csv(std::ostream& out, const std::vector<HistoryEntry>& history) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << "iter,total,length,nonlocal,area_res,pin_res,min_sep\n" << std::setprecision(17);
    for (const auto& h : history)
        out << h.iteration << ',' << h.total << ',' << h.length << ',' << h.nonlocal << ',' << h.area_residual << ','
            << h.pin_residual << ',' << h.min_separation << '\n';
    out.flags(flags);
    out.precision(prec);
}

} // namespace capillary
