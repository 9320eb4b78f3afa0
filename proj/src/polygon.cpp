#include "gasketlab/polygon.hpp"
#include "gasketlab/report.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace gasketlab {

ConvexPolygon::ConvexPolygon(std::vector<RatPoint> verts) : verts_(std::move(verts)) {
    if (verts_.size() < 3) throw DegeneratePolygon("polygon needs at least 3 vertices");
    Rat area = polygon_area_units(verts_);
    if (sgn(area) == 0) throw DegeneratePolygon("zero-area polygon");
    if (sgn(area) < 0) std::reverse(verts_.begin(), verts_.end());
    if (!is_convex_ccw(verts_, /*allow_collinear=*/true))
        throw NonConvexCell("vertex list is not convex");
}

bool ConvexPolygon::is_convex_ccw(const std::vector<RatPoint>& verts, bool allow_collinear) {
    const std::size_t n = verts.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        int o = orient(verts[i], verts[(i + 1) % n], verts[(i + 2) % n]);
        if (o < 0) return false;
        if (o == 0 && !allow_collinear) return false;
    }
    return true;
}

bool ConvexPolygon::contains(const RatPoint& p) const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (orient(verts_[i], verts_[(i + 1) % n], p) < 0) return false;
    }
    return true;
}

bool ConvexPolygon::contains_interior(const RatPoint& p) const {
    return contains(p) && !on_boundary(p);
}

bool ConvexPolygon::on_boundary(const RatPoint& p) const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, verts_[i], verts_[(i + 1) % n])) return true;
    }
    return false;
}

namespace {

// Exact counterclockwise order of directions, starting from the positive
// e1 axis. Lattice coordinates preserve cyclic order (the basis change is
// orientation-preserving).
int angle_class(const RatPoint& d) {
    // 0: positive x-axis, 1: open upper half, 2: negative x-axis, 3: open lower half.
    int sb = sign(d.b);
    if (sb > 0) return 1;
    if (sb < 0) return 3;
    return sign(d.a) > 0 ? 0 : 2;
}

bool angle_less(const RatPoint& u, const RatPoint& v) {
    int cu = angle_class(u), cv = angle_class(v);
    if (cu != cv) return cu < cv;
    return sign(cross(u, v)) > 0;
}

struct NodeEdges {
    std::vector<std::size_t> out;  // indices into the half-edge array
};

struct HalfEdge {
    std::size_t from;
    std::size_t to;
    std::size_t twin;
    std::size_t next = SIZE_MAX;
    bool visited = false;
};

}  // namespace

std::vector<ConvexPolygon> split_convex(const ConvexPolygon& poly,
                                        const std::vector<Segment>& segments) {
    mark_op("triq.split_convex");
    if (segments.empty()) return {poly};

    // Gather the raw edge pool: polygon boundary plus cut segments.
    std::vector<Segment> pool;
    const auto& pv = poly.verts();
    for (std::size_t i = 0; i < pv.size(); ++i) {
        pool.push_back({pv[i], pv[(i + 1) % pv.size()]});
    }
    for (const auto& s : segments) {
        if (s.p == s.q) throw DegeneratePolygon("degenerate cut segment");
        if (!poly.contains(s.p) || !poly.contains(s.q))
            throw DegeneratePolygon("cut segment leaves the polygon");
        pool.push_back(s);
    }

    // Split every edge at any point of the pool that lies on it.
    std::vector<RatPoint> all_points;
    for (const auto& s : pool) {
        all_points.push_back(s.p);
        all_points.push_back(s.q);
    }
    for (std::size_t i = pv.size(); i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            for (auto& x : segment_intersection_points(pool[i].p, pool[i].q, pool[j].p, pool[j].q))
                all_points.push_back(x);
        }
    }

    std::unordered_map<RatPoint, std::size_t, RatPointHash> node_id;
    std::vector<RatPoint> nodes;
    auto intern = [&](const RatPoint& p) {
        auto it = node_id.find(p);
        if (it != node_id.end()) return it->second;
        std::size_t id = nodes.size();
        nodes.push_back(p);
        node_id.emplace(p, id);
        return id;
    };

    std::vector<HalfEdge> hedges;
    std::vector<std::pair<std::size_t, std::size_t>> seen_pairs;
    auto add_edge = [&](std::size_t u, std::size_t v) {
        if (u == v) return;
        auto key = std::minmax(u, v);
        std::pair<std::size_t, std::size_t> kp{key.first, key.second};
        if (std::find(seen_pairs.begin(), seen_pairs.end(), kp) != seen_pairs.end()) return;
        seen_pairs.push_back(kp);
        std::size_t e1 = hedges.size();
        hedges.push_back({u, v, e1 + 1});
        hedges.push_back({v, u, e1});
    };

    for (const auto& s : pool) {
        std::vector<std::pair<Rat, std::size_t>> cuts;
        for (const auto& p : all_points) {
            if (on_segment(p, s.p, s.q)) cuts.emplace_back(segment_param(p, s.p, s.q), intern(p));
        }
        std::sort(cuts.begin(), cuts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (cuts[i].second != cuts[i + 1].second) add_edge(cuts[i].second, cuts[i + 1].second);
        }
    }

    // Counterclockwise angular order of outgoing edges per node.
    std::vector<NodeEdges> at(nodes.size());
    for (std::size_t e = 0; e < hedges.size(); ++e) at[hedges[e].from].out.push_back(e);
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        std::sort(at[v].out.begin(), at[v].out.end(), [&](std::size_t x, std::size_t y) {
            return angle_less(nodes[hedges[x].to] - nodes[v], nodes[hedges[y].to] - nodes[v]);
        });
    }

    // next(e): the outgoing edge at e.to immediately clockwise of twin(e).
    for (std::size_t e = 0; e < hedges.size(); ++e) {
        const auto& outs = at[hedges[e].to].out;
        std::size_t tw = hedges[e].twin;
        auto it = std::find(outs.begin(), outs.end(), tw);
        std::size_t idx = static_cast<std::size_t>(it - outs.begin());
        std::size_t prev = (idx + outs.size() - 1) % outs.size();
        hedges[e].next = outs[prev];
    }

    // Trace faces; interior faces come out counterclockwise with positive area.
    std::vector<ConvexPolygon> cells;
    Rat total(0);
    for (std::size_t e0 = 0; e0 < hedges.size(); ++e0) {
        if (hedges[e0].visited) continue;
        std::vector<RatPoint> ring;
        std::size_t e = e0;
        do {
            hedges[e].visited = true;
            ring.push_back(nodes[hedges[e].from]);
            e = hedges[e].next;
        } while (e != e0);
        Rat area = polygon_area_units(ring);
        if (sgn(area) <= 0) continue;  // outer face
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const RatPoint& a = ring[i];
            const RatPoint& b = ring[(i + 1) % ring.size()];
            if (a == b) throw NonConvexCell("spur in cell boundary (dangling cut segment)");
        }
        if (!ConvexPolygon::is_convex_ccw(ring, /*allow_collinear=*/true))
            throw NonConvexCell("split produced a non-convex cell");
        total += area;
        cells.emplace_back(std::move(ring));
    }

    if (total != poly.area_units())
        throw NonConvexCell("split cells do not partition the polygon exactly");
    return cells;
}

}  // namespace gasketlab
