#include "gasketlab/lattice.hpp"
#include "gasketlab/report.hpp"

#include <algorithm>

namespace gasketlab {

bool on_segment(const RatPoint& p, const RatPoint& s0, const RatPoint& s1) {
    if (orient(s0, s1, p) != 0) return false;
    Rat t_num = dot(p - s0, s1 - s0);
    Rat len2 = norm2(s1 - s0);
    if (sgn(len2) == 0) return p == s0;
    return sgn(t_num) >= 0 && t_num <= len2;
}

bool on_open_segment(const RatPoint& p, const RatPoint& s0, const RatPoint& s1) {
    return on_segment(p, s0, s1) && p != s0 && p != s1;
}

Rat segment_param(const RatPoint& p, const RatPoint& s0, const RatPoint& s1) {
    RatPoint d = s1 - s0;
    Rat len2 = norm2(d);
    if (sgn(len2) == 0) throw std::domain_error("segment_param: degenerate segment");
    return dot(p - s0, d) / len2;
}

bool segments_intersect(const RatPoint& a0, const RatPoint& a1, const RatPoint& b0,
                        const RatPoint& b1) {
    int o1 = orient(a0, a1, b0);
    int o2 = orient(a0, a1, b1);
    int o3 = orient(b0, b1, a0);
    int o4 = orient(b0, b1, a1);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(b0, a0, a1)) return true;
    if (o2 == 0 && on_segment(b1, a0, a1)) return true;
    if (o3 == 0 && on_segment(a0, b0, b1)) return true;
    if (o4 == 0 && on_segment(a1, b0, b1)) return true;
    return false;
}

std::optional<RatPoint> line_intersection(const RatPoint& a0, const RatPoint& a1,
                                          const RatPoint& b0, const RatPoint& b1) {
    RatPoint da = a1 - a0, db = b1 - b0;
    Rat den = cross(da, db);
    if (sgn(den) == 0) return std::nullopt;
    Rat t = cross(b0 - a0, db) / den;
    return a0 + da * t;
}

std::vector<RatPoint> segment_intersection_points(const RatPoint& a0, const RatPoint& a1,
                                                  const RatPoint& b0, const RatPoint& b1) {
    std::vector<RatPoint> out;
    RatPoint da = a1 - a0, db = b1 - b0;
    Rat den = cross(da, db);
    if (sgn(den) != 0) {
        Rat t = cross(b0 - a0, db) / den;
        Rat u = cross(b0 - a0, da) / den;
        if (sgn(t) >= 0 && t <= 1 && sgn(u) >= 0 && u <= 1) out.push_back(a0 + da * t);
        return out;
    }
    // Parallel; collinear overlap reduces to endpoint membership.
    if (orient(a0, a1, b0) != 0) return out;
    auto push_unique = [&out](const RatPoint& p) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    if (on_segment(b0, a0, a1)) push_unique(b0);
    if (on_segment(b1, a0, a1)) push_unique(b1);
    if (on_segment(a0, b0, b1)) push_unique(a0);
    if (on_segment(a1, b0, b1)) push_unique(a1);
    return out;
}

Rat point_segment_dist2(const RatPoint& p, const RatPoint& s0, const RatPoint& s1) {
    RatPoint d = s1 - s0;
    Rat len2 = norm2(d);
    if (sgn(len2) == 0) return dist2(p, s0);
    Rat t = dot(p - s0, d) / len2;
    if (sgn(t) <= 0) return dist2(p, s0);
    if (t >= 1) return dist2(p, s1);
    return dist2(p, s0 + d * t);
}

Rat segment_segment_dist2(const RatPoint& a0, const RatPoint& a1, const RatPoint& b0,
                          const RatPoint& b1) {
    if (segments_intersect(a0, a1, b0, b1)) return Rat(0);
    Rat best = point_segment_dist2(a0, b0, b1);
    best = rat_min(best, point_segment_dist2(a1, b0, b1));
    best = rat_min(best, point_segment_dist2(b0, a0, a1));
    best = rat_min(best, point_segment_dist2(b1, a0, a1));
    return best;
}

Rat polygon_area_units(const std::vector<RatPoint>& verts) {
    Rat sum(0);
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        sum += cross(verts[i], verts[(i + 1) % n]);
    }
    return sum;
}

}  // namespace gasketlab
