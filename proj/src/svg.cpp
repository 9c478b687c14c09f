#include "capillary/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace capillary {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else if (ch == '&') out += "&amp;";
        else out += ch;
    }
    return out;
}

} // namespace

void write_svg(std::ostream& out, const DiscreteCurve& curve, const std::vector<Vec2>& pins,
               const std::string& title) {
    constexpr double size = 1000.0;
    constexpr double margin = 0.05 * size;
    double lo_x = curve[0].x, hi_x = lo_x, lo_y = curve[0].y, hi_y = lo_y;
    auto grow = [&](const Vec2& v) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    };
    for (const auto& v : curve.vertices()) grow(v);
    for (const auto& v : pins) grow(v);
    double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-300});
    double scale = (size - 2.0 * margin) / span;
    // centre the drawing; y grows downwards in SVG
    double ox = margin + 0.5 * ((size - 2.0 * margin) - scale * (hi_x - lo_x));
    double oy = margin + 0.5 * ((size - 2.0 * margin) - scale * (hi_y - lo_y));
    auto X = [&](const Vec2& v) { return fmt(ox + scale * (v.x - lo_x)); };
    auto Y = [&](const Vec2& v) { return fmt(size - (oy + scale * (v.y - lo_y))); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
    out << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    if (!title.empty()) out << "<title>" << escape(title) << "</title>\n";
    out << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i) out << (i ? " " : "") << X(curve[i]) << ',' << Y(curve[i]);
    out << "\"/>\n";
    for (const auto& hit : self_intersections(curve))
        out << "<circle cx=\"" << X(hit.point) << "\" cy=\"" << Y(hit.point)
            << "\" r=\"6\" fill=\"none\" stroke=\"blue\"/>\n";
    for (const auto& p : pins) {
        double x = ox + scale * (p.x - lo_x), y = size - (oy + scale * (p.y - lo_y));
        out << "<path d=\"M" << fmt(x - 8) << ' ' << fmt(y - 8) << " L" << fmt(x + 8) << ' ' << fmt(y + 8) << " M"
            << fmt(x - 8) << ' ' << fmt(y + 8) << " L" << fmt(x + 8) << ' ' << fmt(y - 8)
            << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace capillary
