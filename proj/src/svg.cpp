#include "gasketlab/svg.hpp"

#include "gasketlab/gasket.hpp"
#include "gasketlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gasketlab {
namespace svg {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

/// Simple blue-to-red ramp for field values in [0, 1].
std::string heat_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    int r = static_cast<int>(255 * v);
    int b = static_cast<int>(255 * (1 - v));
    int g = static_cast<int>(80 * (1 - std::abs(2 * v - 1)));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

Canvas::Canvas(double min_x, double min_y, double max_x, double max_y, int width_px)
    : min_x_(min_x), min_y_(min_y), max_y_(max_y), width_(width_px) {
    scale_ = width_px / (max_x - min_x);
    height_ = static_cast<int>(std::ceil((max_y - min_y) * scale_));
}

double Canvas::tx(double x) const { return (x - min_x_) * scale_; }
double Canvas::ty(double y) const { return (max_y_ - y) * scale_; }

void Canvas::polygon(const std::vector<EuclidPoint>& pts, const std::string& fill,
                     const std::string& stroke, double stroke_width, double opacity) {
    body_ += "<polygon points=\"";
    for (const auto& p : pts) body_ += fmt(tx(p.x)) + "," + fmt(ty(p.y)) + " ";
    body_ += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             fmt(stroke_width) + "\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void Canvas::segment(const EuclidPoint& a, const EuclidPoint& b, const std::string& stroke,
                     double stroke_width) {
    body_ += "<line x1=\"" + fmt(tx(a.x)) + "\" y1=\"" + fmt(ty(a.y)) + "\" x2=\"" +
             fmt(tx(b.x)) + "\" y2=\"" + fmt(ty(b.y)) + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
}

void Canvas::circle(const EuclidPoint& c, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + fmt(tx(c.x)) + "\" cy=\"" + fmt(ty(c.y)) + "\" r=\"" +
             fmt(r * scale_) + "\" fill=\"" + fill + "\"/>\n";
}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  const std::string& stroke, double stroke_width) {
    body_ += "<rect x=\"" + fmt(tx(x)) + "\" y=\"" + fmt(ty(y + h)) + "\" width=\"" +
             fmt(w * scale_) + "\" height=\"" + fmt(h * scale_) + "\" fill=\"" + fill +
             "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
}

std::string Canvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
                      "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
                      std::to_string(height_) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

std::string render_gasket(int level) {
    mark_op("harness.render");
    Canvas canvas(-0.05, -0.05, 1.05, 0.95);
    auto root = gasket::root_vertices();
    canvas.polygon({to_euclid(root[0]), to_euclid(root[1]), to_euclid(root[2])}, "#f4ead6",
                   "#333333", 1.0);
    for (const auto& e : gasket::enumerate_w(level)) {
        double shade = 0.25 + 0.6 * (e.address.level() / (level + 1.0));
        canvas.polygon({to_euclid(e.vertices[0]), to_euclid(e.vertices[1]),
                        to_euclid(e.vertices[2])},
                       "#ffffff", "#b06060", 0.4, shade);
    }
    return canvas.str();
}

std::string render_witness_heatmap(const witness::ScalarWitness& w, int grid) {
    mark_op("harness.render");
    Canvas canvas(-0.05, -0.05, 1.05, 0.95);
    double cell = 1.1 / grid;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            double x = -0.05 + (i + 0.5) * cell;
            double y = -0.05 + (j + 0.5) * cell;
            auto v = w.value_at({x, y});
            if (!v) continue;
            canvas.rect(x - cell / 2, y - cell / 2, cell, cell, heat_color(*v), "none", 0.0);
        }
    }
    return canvas.str();
}

std::string render_collapse(const collapse::CollapseStage& stage, int level) {
    mark_op("harness.render");
    Canvas canvas(-0.05, -0.05, 1.05, 0.95);
    auto root = gasket::root_vertices();
    canvas.polygon({to_euclid(root[0]), to_euclid(root[1]), to_euclid(root[2])}, "#fbf7ee",
                   "#444444", 1.0);
    for (const auto& q : stage.quads) {
        if (q.quad.level != level) continue;
        std::vector<EuclidPoint> pts;
        for (const auto& p : q.quad.poly.verts()) pts.push_back(to_euclid(p));
        canvas.polygon(pts, "#cfe3cf", "#447744", 0.5, 0.8);
    }
    for (const auto& t : stage.tripods) {
        if (t.w.level() > level) continue;
        EuclidPoint a = to_euclid(t.tripod.a);
        for (int k = 0; k < 3; ++k) {
            canvas.segment(a, to_euclid(t.tripod.c[static_cast<std::size_t>(k)]), "#993333",
                           1.0);
        }
        canvas.circle(a, 0.004, "#222222");
    }
    return canvas.str();
}

std::string render_fold(const fold::FoldMap& fm) {
    mark_op("harness.render");
    // Source subdivision on the left, target rectangles on the right.
    Canvas canvas(-0.1, -1.3, 2.6, 1.1);
    const char* face_fill[2] = {"#d7e5f4", "#f4ddd7"};
    for (int spoke = 0; spoke < 3; ++spoke) {
        for (int face = 0; face < 2; ++face) {
            for (const auto& piece : fm.pieces_for(spoke, face, 4096)) {
                std::vector<EuclidPoint> pts;
                for (const auto& s : piece.src) pts.push_back(to_euclid(s));
                canvas.polygon(pts, face_fill[face], "#555555", 0.35, 0.9);
            }
        }
    }
    // target charts: six rectangles laid out in rows
    double y0 = -0.25;
    for (int spoke = 0; spoke < 3; ++spoke) {
        RatInterval li = sqrt_interval(fm.g.len2(spoke), 32);
        RatInterval hi = sqrt_interval(fm.h2, 32);
        double len = to_double(li.mid());
        double h = to_double(hi.mid());
        for (int face = 0; face < 2; ++face) {
            double ox = 1.4, oy = y0 - spoke * 3.2 * h - face * 1.4 * h;
            for (const auto& piece : fm.pieces_for(spoke, face, 4096)) {
                std::vector<EuclidPoint> pts;
                for (const auto& d : piece.dst) {
                    pts.push_back({ox + to_double(d.s) * len, oy + to_double(d.t) * h});
                }
                canvas.polygon(pts, face_fill[face], "#555555", 0.3, 0.9);
            }
        }
    }
    return canvas.str();
}

std::string render_phi(const phi::PhiStage& stage) {
    mark_op("harness.render");
    Canvas canvas(-0.05, -0.05, 1.05, 0.95);
    for (const auto& q : stage.cstage.quads) {
        if (q.quad.level != stage.level) continue;
        std::vector<EuclidPoint> pts;
        for (const auto& p : q.quad.poly.verts()) pts.push_back(to_euclid(p));
        canvas.polygon(pts, "#cfe0ef", "#33557a", 0.3, 0.85);
    }
    for (const auto& t : stage.cstage.tripods) {
        EuclidPoint a = to_euclid(t.tripod.a);
        double h = to_double(t.h);
        for (int k = 0; k < 3; ++k) {
            EuclidPoint c = to_euclid(t.tripod.c[static_cast<std::size_t>(k)]);
            canvas.segment(a, c, "#aa3333", 0.8);
            // schematic flap: offset rectangle hinting the pillow height
            EuclidPoint n{-(c.y - a.y), c.x - a.x};
            double nn = std::hypot(n.x, n.y);
            if (nn > 0) {
                n.x *= h / nn;
                n.y *= h / nn;
                canvas.polygon({a, c, {c.x + n.x, c.y + n.y}, {a.x + n.x, a.y + n.y}},
                               "#e8c8c8", "none", 0.0, 0.5);
            }
        }
    }
    return canvas.str();
}

}  // namespace svg
}  // namespace gasketlab
