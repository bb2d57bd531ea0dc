#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "shadowing/errors.hpp"
#include "shadowing/vec2.hpp"

namespace shadowing {

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '&') out += "&amp;";
        else if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else out += ch;
    }
    return out;
}

} // namespace detail

// Minimal SVG 1.1 figure writer. World coordinates are mapped into the plot
// area at render time; y points up. Polylines with fewer than two points are
// never emitted.
class SvgPlot {
public:
    SvgPlot(int width = 800, int height = 600, bool equal_aspect = false)
        : width_(width), height_(height), equal_aspect_(equal_aspect) {}

    void set_title(std::string title) { title_ = std::move(title); }

    void enable_axes(std::string xlabel, std::string ylabel) {
        axes_ = true;
        xlabel_ = std::move(xlabel);
        ylabel_ = std::move(ylabel);
    }

    void add_polyline(std::vector<Vec2> pts, std::string color, double stroke_width = 1.5) {
        polys_.push_back({std::move(pts), std::move(color), stroke_width});
    }

    // radius is in pixels; world position
    void add_marker(Vec2 p, double radius_px, std::string stroke, std::string fill) {
        markers_.push_back({p, radius_px, std::move(stroke), std::move(fill)});
    }

    std::string render() const {
        double xmin, xmax, ymin, ymax;
        bounds(xmin, xmax, ymin, ymax);

        const double ml = axes_ ? 70.0 : 20.0, mr = 20.0, mt = title_.empty() ? 20.0 : 44.0,
                     mb = axes_ ? 56.0 : 20.0;
        const double pw = width_ - ml - mr, ph = height_ - mt - mb;

        if (equal_aspect_) {
            double sx = pw / (xmax - xmin), sy = ph / (ymax - ymin);
            if (sx < sy) {
                double cy = 0.5 * (ymin + ymax), half = 0.5 * ph / sx;
                ymin = cy - half;
                ymax = cy + half;
            } else {
                double cx = 0.5 * (xmin + xmax), half = 0.5 * pw / sy;
                xmin = cx - half;
                xmax = cx + half;
            }
        }
        auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
        auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

        std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
             std::to_string(width_) + "\" height=\"" + std::to_string(height_) + "\" viewBox=\"0 0 " +
             std::to_string(width_) + " " + std::to_string(height_) + "\">\n";
        s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) + "\" height=\"" +
             std::to_string(height_) + "\" fill=\"white\"/>\n";

        if (!title_.empty())
            s += "<text x=\"" + detail::svg_num(width_ / 2.0) +
                 "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
                 detail::xml_escape(title_) + "</text>\n";

        if (axes_) {
            s += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) +
                 "\" width=\"" + detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) +
                 "\" fill=\"none\" stroke=\"black\"/>\n";
            for (int i = 0; i <= 4; ++i) {
                double fx = xmin + (xmax - xmin) * i / 4.0;
                double px = X(fx);
                s += "<line x1=\"" + detail::svg_num(px) + "\" y1=\"" + detail::svg_num(mt + ph) +
                     "\" x2=\"" + detail::svg_num(px) + "\" y2=\"" + detail::svg_num(mt + ph + 6) +
                     "\" stroke=\"black\"/>\n";
                s += "<text x=\"" + detail::svg_num(px) + "\" y=\"" + detail::svg_num(mt + ph + 20) +
                     "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
                     detail::svg_num(fx) + "</text>\n";
                double fy = ymin + (ymax - ymin) * i / 4.0;
                double py = Y(fy);
                s += "<line x1=\"" + detail::svg_num(ml - 6) + "\" y1=\"" + detail::svg_num(py) +
                     "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(py) +
                     "\" stroke=\"black\"/>\n";
                s += "<text x=\"" + detail::svg_num(ml - 9) + "\" y=\"" + detail::svg_num(py + 4) +
                     "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
                     detail::svg_num(fy) + "</text>\n";
            }
            s += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
                 detail::svg_num(mt + ph + 40) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
                 detail::xml_escape(xlabel_) + "</text>\n";
            s += "<text x=\"16\" y=\"" + detail::svg_num(mt + ph / 2) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " +
                 detail::svg_num(mt + ph / 2) + ")\">" + detail::xml_escape(ylabel_) + "</text>\n";
        }

        for (const Poly& p : polys_) {
            if (p.pts.size() < 2) continue; // never emit a degenerate polyline
            s += "<polyline fill=\"none\" stroke=\"" + p.color + "\" stroke-width=\"" +
                 detail::svg_num(p.stroke_width) + "\" points=\"";
            for (std::size_t i = 0; i < p.pts.size(); ++i) {
                if (i) s += ' ';
                s += detail::svg_num(X(p.pts[i].x)) + "," + detail::svg_num(Y(p.pts[i].y));
            }
            s += "\"/>\n";
        }
        for (const Marker& m : markers_) {
            s += "<circle cx=\"" + detail::svg_num(X(m.p.x)) + "\" cy=\"" + detail::svg_num(Y(m.p.y)) +
                 "\" r=\"" + detail::svg_num(m.radius_px) + "\" stroke=\"" + m.stroke + "\" fill=\"" +
                 m.fill + "\" stroke-width=\"1.5\"/>\n";
        }
        s += "</svg>\n";
        return s;
    }

private:
    struct Poly {
        std::vector<Vec2> pts;
        std::string color;
        double stroke_width;
    };
    struct Marker {
        Vec2 p;
        double radius_px;
        std::string stroke, fill;
    };

    void bounds(double& xmin, double& xmax, double& ymin, double& ymax) const {
        xmin = ymin = std::numeric_limits<double>::infinity();
        xmax = ymax = -std::numeric_limits<double>::infinity();
        auto eat = [&](const Vec2& p) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        };
        for (const Poly& p : polys_)
            for (const Vec2& q : p.pts) eat(q);
        for (const Marker& m : markers_) eat(m.p);
        if (!std::isfinite(xmin)) {
            xmin = ymin = -1.0;
            xmax = ymax = 1.0;
        }
        auto pad = [](double& lo, double& hi) {
            double d = hi - lo;
            if (d <= 0.0) d = std::max(1.0, std::abs(lo));
            lo -= 0.05 * d;
            hi += 0.05 * d;
        };
        pad(xmin, xmax);
        pad(ymin, ymax);
    }

    int width_, height_;
    bool equal_aspect_;
    bool axes_ = false;
    std::string title_, xlabel_, ylabel_;
    std::vector<Poly> polys_;
    std::vector<Marker> markers_;
};

} // namespace shadowing
