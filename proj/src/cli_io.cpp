#include "capillary/cli_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "capillary/errors.hpp"
#include "capillary/experiments.hpp"
#include "capillary/steiner.hpp"
#include "capillary/svg.hpp"

namespace capillary {

namespace {

const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names{
        {"minimize", Command::Minimize}, {"sweep-delta", Command::SweepDelta},
        {"sweep-eps", Command::SweepEps}, {"steiner", Command::Steiner},
        {"energy", Command::Energy},     {"check", Command::Check},
        {"counterexample", Command::Counterexample}, {"recovery", Command::Recovery}};
    return names;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ConfigError(0, "malformed number \"" + s + "\"");
    return v;
}

std::uint64_t to_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(0, "malformed integer \"" + s + "\"");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(0, "malformed boolean \"" + s + "\"");
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_double(part));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : split(s, ',')) out.push_back(to_unsigned(part));
    return out;
}

std::vector<Vec2> to_points(const std::string& s) {
    std::vector<Vec2> out;
    for (const auto& part : split(s, ';')) {
        auto xy = split(part, ',');
        if (xy.size() != 2) throw ConfigError(0, "malformed point \"" + part + "\" (expected x,y)");
        out.push_back({to_double(xy[0]), to_double(xy[1])});
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, const char* sep, F f) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? sep : "") + f(xs[k]);
    return out;
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    /// Range checks for the value just set.
    std::function<void(const RunConfig&)> check;
};

void positive(double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(0, std::string(what) + " must be positive");
}

const std::vector<Key>& keys() {
    auto d = [](double v) { return num(v); };
    auto z = [](std::size_t v) { return std::to_string(v); };
    auto params_ok = [](const RunConfig& c) { c.params.validate(); };
    auto spec_ok = [](const RunConfig& c) { c.spec.validate(0); };
    auto opt_ok = [](const RunConfig& c) { c.optimizer.validate(); };
    static const std::vector<Key> table{
        {"command",
         [](RunConfig& c, const std::string& v) {
             auto it = command_names().find(v);
             if (it == command_names().end()) throw ConfigError(0, "unknown command \"" + v + "\"");
             c.command = it->second;
         },
         [](const RunConfig& c) { return to_string(c.command); }, nullptr},
        {"pins", [](RunConfig& c, const std::string& v) { c.spec.pins = to_points(v); },
         [](const RunConfig& c) {
             return join(c.spec.pins, ";", [](const Vec2& p) { return num(p.x) + "," + num(p.y); });
         },
         spec_ok},
        {"epsilon", [](RunConfig& c, const std::string& v) { c.spec.epsilon = to_double(v); },
         [d](const RunConfig& c) { return d(c.spec.epsilon); }, spec_ok},
        {"tol_pin", [](RunConfig& c, const std::string& v) { c.spec.tol_pin = to_double(v); },
         [d](const RunConfig& c) { return d(c.spec.tol_pin); }, spec_ok},
        {"tol_area", [](RunConfig& c, const std::string& v) { c.spec.tol_area = to_double(v); },
         [d](const RunConfig& c) { return d(c.spec.tol_area); }, spec_ok},
        {"s", [](RunConfig& c, const std::string& v) { c.params.s = to_double(v); },
         [d](const RunConfig& c) { return d(c.params.s); }, params_ok},
        {"p", [](RunConfig& c, const std::string& v) { c.params.p = to_double(v); },
         [d](const RunConfig& c) { return d(c.params.p); }, params_ok},
        {"delta", [](RunConfig& c, const std::string& v) { c.params.delta = to_double(v); },
         [d](const RunConfig& c) { return d(c.params.delta); }, params_ok},
        {"exclusion_width", [](RunConfig& c, const std::string& v) { c.params.exclusion_width = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.params.exclusion_width); }, params_ok},
        {"n", [](RunConfig& c, const std::string& v) { c.n = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.n); },
         [](const RunConfig& c) {
             if (c.n < 3) throw ConfigError(0, "n must be at least 3");
         }},
        {"deltas", [](RunConfig& c, const std::string& v) { c.deltas = to_doubles(v); },
         [d](const RunConfig& c) { return join(c.deltas, ",", d); },
         [](const RunConfig& c) {
             for (std::size_t k = 0; k < c.deltas.size(); ++k) {
                 positive(c.deltas[k], "deltas");
                 if (k && !(c.deltas[k] < c.deltas[k - 1])) throw ConfigError(0, "deltas must be decreasing");
             }
         }},
        {"epsilons", [](RunConfig& c, const std::string& v) { c.epsilons = to_doubles(v); },
         [d](const RunConfig& c) { return join(c.epsilons, ",", d); },
         [](const RunConfig& c) {
             for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
                 positive(c.epsilons[k], "epsilons");
                 if (k && !(c.epsilons[k] < c.epsilons[k - 1])) throw ConfigError(0, "epsilons must be decreasing");
             }
         }},
        {"s_values", [](RunConfig& c, const std::string& v) { c.s_values = to_doubles(v); },
         [d](const RunConfig& c) { return join(c.s_values, ",", d); },
         [](const RunConfig& c) {
             for (double s : c.s_values)
                 if (!(s > 0.0 && s < 1.0)) throw ConfigError(0, "s_values must lie in (0,1)");
         }},
        {"levels", [](RunConfig& c, const std::string& v) { c.levels = to_sizes(v); },
         [z](const RunConfig& c) { return join(c.levels, ",", z); },
         [](const RunConfig& c) {
             for (std::size_t k = 0; k < c.levels.size(); ++k)
                 if (c.levels[k] == 0 || (k && c.levels[k] <= c.levels[k - 1]))
                     throw ConfigError(0, "levels must be positive and increasing");
         }},
        {"geometry", [](RunConfig& c, const std::string& v) { c.geometry = v; },
         [](const RunConfig& c) { return c.geometry; },
         [](const RunConfig& c) {
             if (c.geometry != "tangential" && c.geometry != "crossing")
                 throw ConfigError(0, "geometry must be tangential or crossing");
         }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.samples); }, nullptr},
        {"curve", [](RunConfig& c, const std::string& v) { c.curve = v; },
         [](const RunConfig& c) { return c.curve; },
         [](const RunConfig& c) {
             if (!c.curve.empty() && !std::filesystem::exists(c.curve))
                 throw ConfigError(0, "curve file \"" + c.curve + "\" does not exist");
         }},
        {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
         [](const RunConfig& c) { return c.out_dir; },
         [](const RunConfig& c) {
             if (c.out_dir.empty()) throw ConfigError(0, "out_dir must not be empty");
         }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             c.seed = to_unsigned(v);
             c.optimizer.seed = c.seed;
         },
         [](const RunConfig& c) { return std::to_string(c.seed); }, nullptr},
        {"max_outer", [](RunConfig& c, const std::string& v) { c.optimizer.max_outer = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.optimizer.max_outer); }, opt_ok},
        {"max_inner", [](RunConfig& c, const std::string& v) { c.optimizer.max_inner = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.optimizer.max_inner); }, opt_ok},
        {"step0", [](RunConfig& c, const std::string& v) { c.optimizer.step0 = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.step0); }, opt_ok},
        {"armijo_c", [](RunConfig& c, const std::string& v) { c.optimizer.armijo_c = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.armijo_c); }, opt_ok},
        {"shrink", [](RunConfig& c, const std::string& v) { c.optimizer.shrink = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.shrink); }, opt_ok},
        {"grad_tol", [](RunConfig& c, const std::string& v) { c.optimizer.grad_tol = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.grad_tol); }, opt_ok},
        {"resample_every", [](RunConfig& c, const std::string& v) { c.optimizer.resample_every = to_unsigned(v); },
         [z](const RunConfig& c) { return z(c.optimizer.resample_every); }, opt_ok},
        {"penalty0", [](RunConfig& c, const std::string& v) { c.optimizer.penalty0 = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.penalty0); }, opt_ok},
        {"penalty_growth", [](RunConfig& c, const std::string& v) { c.optimizer.penalty_growth = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.penalty_growth); }, opt_ok},
        {"keep_embedded", [](RunConfig& c, const std::string& v) { c.optimizer.keep_embedded = to_bool(v); },
         [](const RunConfig& c) { return std::string(c.optimizer.keep_embedded ? "true" : "false"); }, nullptr},
        {"normal_flow", [](RunConfig& c, const std::string& v) { c.optimizer.normal_flow = to_bool(v); },
         [](const RunConfig& c) { return std::string(c.optimizer.normal_flow ? "true" : "false"); }, nullptr},
        {"smoothing", [](RunConfig& c, const std::string& v) { c.optimizer.smoothing = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.smoothing); }, opt_ok},
        {"room_fraction", [](RunConfig& c, const std::string& v) { c.optimizer.room_fraction = to_double(v); },
         [d](const RunConfig& c) { return d(c.optimizer.room_fraction); }, opt_ok},
    };
    return table;
}

ConfigError at_line(std::size_t line, const ConfigError& e) {
    std::string msg = e.what();
    return ConfigError(line, msg);
}

// Requirements that depend on the command rather than on a single key.
void check_command(const RunConfig& c, std::size_t line) {
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(line, to_string(c.command) + " needs " + what);
    };
    switch (c.command) {
    case Command::Minimize:
    case Command::SweepDelta:
        need(c.spec.pins.size() >= 2, "at least 2 pins");
        if (c.command == Command::SweepDelta) need(c.params.sp() > 1.0, "s*p > 1");
        break;
    case Command::SweepEps:
    case Command::Steiner:
        need(c.spec.pins.size() >= 2 && c.spec.pins.size() <= 4, "2 to 4 pins");
        break;
    case Command::Energy:
    case Command::Check: need(!c.curve.empty(), "a curve file"); break;
    case Command::Recovery:
        need(!c.curve.empty() || (c.spec.pins.size() >= 2 && c.spec.pins.size() <= 4),
             "a curve file or 2 to 4 pins");
        need(c.spec.epsilon < 1.0, "epsilon < 1");
        break;
    case Command::Counterexample: need(!c.s_values.empty() && c.levels.size() >= 2, "s_values and 2+ levels"); break;
    }
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void run_command(const RunConfig& c, std::ostream& out) {
    const std::filesystem::path dir = c.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    switch (c.command) {
    case Command::Minimize: {
        c.spec.validate();
        DiscreteCurve start = c.curve.empty() ? initial_curve(c.spec, c.n) : attach_pins(load_curve(c.curve), c.spec);
        OptimizeResult res = minimize(start, c.params, c.spec, c.optimizer);
        save_curve((dir / "final.txt").string(), res.final);
        auto hist = open_out(dir / "history.csv");
        write_history_csv(hist, res.history);
        auto svg = open_out(dir / "final.svg");
        write_svg(svg, res.final, c.spec.pins, "minimize");
        out << "status=" << to_string(res.status) << " iterations=" << res.iterations
            << " length=" << num(res.breakdown.length_term) << " nonlocal=" << num(res.breakdown.nonlocal_term)
            << " total=" << num(res.breakdown.total) << " min_sep=" << num(min_nonadjacent_separation(res.final))
            << '\n';
        for (const auto& w : res.warnings) out << "warning: " << w << '\n';
        break;
    }
    case Command::SweepDelta:
    case Command::SweepEps: {
        auto records = c.command == Command::SweepDelta
                           ? sweep_delta(c.spec, c.params, c.deltas, c.optimizer, c.n)
                           : sweep_epsilon(c.spec, c.epsilons, c.params, c.optimizer, c.n);
        emit_report(records, dir, c.spec.pins);
        for (const auto& r : records)
            out << "control=" << num(r.control) << " length=" << num(r.length) << " reference=" << num(r.reference)
                << " status=" << r.status << '\n';
        break;
    }
    case Command::Steiner: {
        SteinerTree tree = steiner_tree(c.spec.pins);
        auto f = open_out(dir / "tree.txt");
        write_tree(f, tree);
        DiscreteCurve cover = double_cover_curve(tree, std::max(c.n, 2 * tree.edges.size()));
        save_curve((dir / "double_cover.txt").string(), cover);
        auto svg = open_out(dir / "double_cover.svg");
        write_svg(svg, cover, c.spec.pins, "double cover");
        MultiplicityReport mult = verify_even_multiplicity(cover, c.samples, c.seed);
        out << "length=" << num(tree.total_length) << " steiner_points=" << tree.steiner_points.size()
            << " mst=" << num(minimum_spanning_tree_length(c.spec.pins))
            << " max_angle_error=" << num(max_steiner_angle_error(tree))
            << " cover_length=" << num(curve_length(cover)) << " even=" << (mult.ok ? "true" : "false") << '\n';
        break;
    }
    case Command::Energy: {
        EnergyBreakdown e = total_energy(load_curve(c.curve), c.params);
        out << "length=" << num(e.length_term) << " nonlocal=" << num(e.nonlocal_term) << " total=" << num(e.total)
            << '\n';
        break;
    }
    case Command::Check: {
        DiscreteCurve curve = load_curve(c.curve);
        WindingReport w = check_winding_class(curve);
        out << "embedded=" << (w.embedded ? "true" : "false") << ", winding=" << (w.ok ? "ok" : "violated");
        if (w.ok) out << ", area=" << num(enclosed_area(curve));
        else if (w.witness) out << ", witness=" << num(w.witness->x) << "," << num(w.witness->y) << " (" << w.witness_winding << ")";
        out << ", min_sep=" << num(min_nonadjacent_separation(curve))
            << ", self_intersections=" << self_intersections(curve).size() << '\n';
        break;
    }
    case Command::Counterexample: {
        auto geom = c.geometry == "crossing" ? ContactGeometry::Crossing : ContactGeometry::Tangential;
        CounterexampleTable table = counterexample_study(c.s_values, c.params.p, c.levels, geom);
        auto f = open_out(dir / "counterexample.csv");
        write_counterexample_csv(f, table);
        for (std::size_t k = 0; k < c.s_values.size(); ++k)
            out << "s=" << num(c.s_values[k]) << " sp=" << num(c.s_values[k] * c.params.p)
                << " fitted_exponent=" << num(table.fitted[k]) << '\n';
        break;
    }
    case Command::Recovery: {
        DiscreteCurve base = c.curve.empty() ? double_cover_curve(steiner_tree(c.spec.pins), c.n)
                                             : load_curve(c.curve);
        RecoveryResult rec = recovery_sequence(base, c.spec.epsilon, c.n);
        save_curve((dir / "recovery.txt").string(), rec.curve);
        auto svg = open_out(dir / "recovery.svg");
        write_svg(svg, rec.curve, c.spec.pins, "recovery");
        out << "area=" << num(enclosed_area(rec.curve))
            << " added_length=" << num(curve_length(rec.curve) - curve_length(base))
            << " hausdorff=" << num(hausdorff_distance(rec.curve, base)) << " lambda=" << num(rec.lambda) << '\n';
        break;
    }
    }
}

} // namespace

std::string to_string(Command c) {
    for (const auto& [name, cmd] : command_names())
        if (cmd == c) return name;
    return "unknown";
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        const Key* k = nullptr;
        for (const auto& cand : keys())
            if (cand.name == key) k = &cand;
        if (!k) throw ConfigError(line_no, "unknown key \"" + key + "\"");
        if (seen.count(key)) throw ConfigError(line_no, "duplicate key \"" + key + "\"");
        seen[key] = line_no;
        try {
            k->set(cfg, value);
            if (k->check) k->check(cfg);
        } catch (const ConfigError& e) {
            throw at_line(line_no, e);
        }
    }
    if (!seen.count("command")) throw ConfigError(0, "missing key \"command\"");
    check_command(cfg, seen["command"]);
    return cfg;
}

std::string serialize(const RunConfig& config) {
    std::string out;
    for (const auto& k : keys()) {
        std::string v = k.get(config);
        // an empty value would not parse back; leaving the key out keeps its default
        if (v.empty()) continue;
        out += k.name + " = " + v + "\n";
    }
    return out;
}

int report_error(const std::exception& e, std::ostream& err) {
    ErrorKind kind = ErrorKind::Numerical;
    if (const auto* ce = dynamic_cast<const Error*>(&e)) kind = ce->kind();
    std::string msg = e.what();
    for (char& ch : msg)
        if (ch == '\n') ch = ' ';
    err << "error code=" << static_cast<int>(kind) << " kind=" << kind_name(kind) << " message=" << msg << '\n';
    return static_cast<int>(kind);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        run_command(config, out);
        return 0;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

} // namespace capillary
