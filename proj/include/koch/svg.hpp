#pragma once

// Deterministic SVG pictures of a table and, optionally, an orbit drawn on
// it: boundary outline, dashed ghosts, cell triangles, orbit path and
// footprint dots. Geometry stays exact until the final print, where numbers
// are emitted with 12 significant digits.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "koch/boundary.hpp"
#include "koch/dynamics.hpp"

namespace koch {

struct SvgStyle {
    int width = 800;
    double margin = 0.06;  // fraction of the bounding box on each edge
    bool ghosts = true;
    bool cells = true;
    bool footprint = true;
};

namespace detail {

struct Xy {
    double x, y;
};

inline Xy cartesian(const LatticePoint& p) {
    double a = p.a.convert_to<double>();
    double b = p.b.convert_to<double>();
    return {a + b / 2, b * 0.8660254037844386};
}

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string render_svg(const Prefractal& p, const Orbit* orbit,
                              const SvgStyle& style = {}) {
    using detail::Xy;
    using detail::cartesian;
    using detail::num;

    std::vector<Xy> outline;
    outline.reserve(p.side_count());
    for (std::size_t k = 1; k <= p.side_count(); ++k) outline.push_back(cartesian(p.side_start(k)));

    std::vector<Xy> path;
    std::vector<Xy> dots;
    if (orbit) {
        if (orbit->status.backward_vertex) path.push_back(cartesian(*orbit->status.backward_vertex));
        for (const BilliardState& s : orbit->states) {
            Xy q = cartesian(state_point(p, s));
            path.push_back(q);
            dots.push_back(q);
        }
        if (orbit->status.kind == OrbitStatusKind::periodic)
            path.push_back(cartesian(state_point(p, orbit->states[0])));
        if (orbit->status.forward_vertex) path.push_back(cartesian(*orbit->status.forward_vertex));
    }

    double minx = outline[0].x, maxx = outline[0].x, miny = outline[0].y, maxy = outline[0].y;
    auto grow = [&](const Xy& q) {
        minx = std::min(minx, q.x);
        maxx = std::max(maxx, q.x);
        miny = std::min(miny, q.y);
        maxy = std::max(maxy, q.y);
    };
    for (const Xy& q : outline) grow(q);
    for (const Xy& q : path) grow(q);

    double w = maxx - minx, h = maxy - miny;
    double pad = style.margin * (w > h ? w : h);
    double vx = minx - pad, vw = w + 2 * pad, vh = h + 2 * pad;
    // svg y grows downward; flip by emitting y' = (maxy + pad) - y
    double ytop = maxy + pad;
    auto sy = [&](double y) { return ytop - y; };
    int height = static_cast<int>(std::lround(style.width * vh / vw));
    double thin = vw / 600, mid = vw / 300, fat = vw / 200, r = vw / 120;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"" + num(vx) + " 0 " + num(vw) +
         " " + num(vh) + "\">\n";

    s += "  <path fill=\"#fcfcf7\" stroke=\"#333333\" stroke-width=\"" + num(mid) + "\" d=\"";
    for (std::size_t i = 0; i < outline.size(); ++i) {
        s += (i == 0 ? "M" : " L");
        s += num(outline[i].x) + " " + num(sy(outline[i].y));
    }
    s += " Z\"/>\n";

    if (style.cells && p.level() >= 1) {
        s += "  <g fill=\"none\" stroke=\"#b9c4d0\" stroke-width=\"" + num(thin) + "\">\n";
        for (std::size_t k = 1; k <= p.cell_count(); ++k) {
            Cell c = p.cell(k);
            Xy a = cartesian(c.triangle[0]), b = cartesian(c.triangle[1]),
               d = cartesian(c.triangle[2]);
            s += "    <path d=\"M" + num(a.x) + " " + num(sy(a.y)) + " L" + num(b.x) + " " +
                 num(sy(b.y)) + " L" + num(d.x) + " " + num(sy(d.y)) + " Z\"/>\n";
        }
        s += "  </g>\n";
    }

    if (style.ghosts && p.level() >= 1) {
        s += "  <g stroke=\"#999999\" stroke-width=\"" + num(thin) + "\" stroke-dasharray=\"" +
             num(3 * thin) + " " + num(2 * thin) + "\">\n";
        for (std::size_t k = 1; k <= p.cell_count(); ++k) {
            Ghost g = p.cell(k).ghost;
            Xy a = cartesian(g.segment.start), b = cartesian(g.segment.end);
            s += "    <line x1=\"" + num(a.x) + "\" y1=\"" + num(sy(a.y)) + "\" x2=\"" + num(b.x) +
                 "\" y2=\"" + num(sy(b.y)) + "\"/>\n";
        }
        s += "  </g>\n";
    }

    if (!path.empty()) {
        s += "  <path fill=\"none\" stroke=\"#c0392b\" stroke-width=\"" + num(fat) + "\" d=\"";
        for (std::size_t i = 0; i < path.size(); ++i) {
            s += (i == 0 ? "M" : " L");
            s += num(path[i].x) + " " + num(sy(path[i].y));
        }
        s += "\"/>\n";
        if (style.footprint) {
            s += "  <g fill=\"#1f618d\">\n";
            for (const Xy& q : dots)
                s += "    <circle cx=\"" + num(q.x) + "\" cy=\"" + num(sy(q.y)) + "\" r=\"" +
                     num(r) + "\"/>\n";
            s += "  </g>\n";
        }
    }

    s += "</svg>\n";
    return s;
}

}  // namespace koch
