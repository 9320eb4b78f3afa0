#pragma once

#include "gasketlab/rational.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gasketlab {

/// Plane point a*e1 + b*e2 in the triangular-lattice basis
/// e1 = (1, 0), e2 = (1/2, sqrt(3)/2). Coordinates are exact rationals;
/// gasket vertices stay dyadic, collapse/tripod data picks up denominators 3^k.
struct RatPoint {
    Rat a;
    Rat b;

    RatPoint() = default;
    RatPoint(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}
    RatPoint(long a_, long b_) : a(a_), b(b_) {}

    bool operator==(const RatPoint& o) const { return a == o.a && b == o.b; }
    bool operator!=(const RatPoint& o) const { return !(*this == o); }

    RatPoint operator+(const RatPoint& o) const { return {a + o.a, b + o.b}; }
    RatPoint operator-(const RatPoint& o) const { return {a - o.a, b - o.b}; }
    RatPoint operator*(const Rat& s) const { return {a * s, b * s}; }

    std::string str() const { return "(" + a.get_str() + "," + b.get_str() + ")"; }
};

inline RatPoint midpoint(const RatPoint& p, const RatPoint& q) {
    return {(p.a + q.a) / 2, (p.b + q.b) / 2};
}

inline RatPoint lerp(const RatPoint& p, const RatPoint& q, const Rat& t) {
    return p + (q - p) * t;
}

/// LatticePoint with dyadic coordinates; the form every gasket vertex takes.
struct LatticePoint {
    Dyadic a;
    Dyadic b;

    RatPoint to_rat() const { return {a.to_rat(), b.to_rat()}; }
    bool operator==(const LatticePoint& o) const { return a == o.a && b == o.b; }
};

/// Exact squared Euclidean norm: |a e1 + b e2|^2 = a^2 + ab + b^2.
inline Rat norm2(const RatPoint& p) { return p.a * p.a + p.a * p.b + p.b * p.b; }
inline Dyadic norm2(const LatticePoint& p) {
    return p.a * p.a + p.a * p.b + p.b * p.b;
}

/// Exact Euclidean inner product via the Gram matrix [[1,1/2],[1/2,1]].
inline Rat dot(const RatPoint& u, const RatPoint& v) {
    return u.a * v.a + u.b * v.b + (u.a * v.b + u.b * v.a) / 2;
}

inline Rat dist2(const RatPoint& p, const RatPoint& q) { return norm2(p - q); }

/// Lattice cross product; the Euclidean cross is this times sqrt(3)/2,
/// so its sign is the Euclidean orientation sign.
inline Rat cross(const RatPoint& u, const RatPoint& v) { return u.a * v.b - u.b * v.a; }

/// Orientation of the triple (p, q, r): +1 counterclockwise, -1 clockwise, 0 collinear.
inline int orient(const RatPoint& p, const RatPoint& q, const RatPoint& r) {
    return sign(cross(q - p, r - p));
}

struct EuclidPoint {
    double x;
    double y;
};

inline EuclidPoint to_euclid(const RatPoint& p) {
    double a = to_double(p.a), b = to_double(p.b);
    return {a + b / 2.0, b * 0.8660254037844386};
}

/// Closed segment membership, exact.
bool on_segment(const RatPoint& p, const RatPoint& s0, const RatPoint& s1);

/// Membership in the open segment (endpoints excluded), exact.
bool on_open_segment(const RatPoint& p, const RatPoint& s0, const RatPoint& s1);

/// Parameter t with p = s0 + t (s1 - s0); requires p collinear with the segment.
Rat segment_param(const RatPoint& p, const RatPoint& s0, const RatPoint& s1);

/// Whether the closed segments intersect (shared endpoints count).
bool segments_intersect(const RatPoint& a0, const RatPoint& a1, const RatPoint& b0,
                        const RatPoint& b1);

/// Intersection point of two non-parallel lines through (a0,a1) and (b0,b1).
std::optional<RatPoint> line_intersection(const RatPoint& a0, const RatPoint& a1,
                                          const RatPoint& b0, const RatPoint& b1);

/// All intersection points of two closed segments; empty if disjoint.
/// Overlapping collinear segments report the overlap endpoints.
std::vector<RatPoint> segment_intersection_points(const RatPoint& a0, const RatPoint& a1,
                                                  const RatPoint& b0, const RatPoint& b1);

/// Exact squared Euclidean distance from p to the closed segment [s0, s1].
Rat point_segment_dist2(const RatPoint& p, const RatPoint& s0, const RatPoint& s1);

/// Exact squared Euclidean distance between two closed segments.
Rat segment_segment_dist2(const RatPoint& a0, const RatPoint& a1, const RatPoint& b0,
                          const RatPoint& b1);

/// Signed polygon area in units of sqrt(3)/4 (the area of the unit lattice
/// triangle); positive for counterclockwise order.
Rat polygon_area_units(const std::vector<RatPoint>& verts);

/// Hash suitable for exact-point dedup tables.
struct RatPointHash {
    std::size_t operator()(const RatPoint& p) const {
        std::hash<std::string> h;
        return h(p.a.get_str() + "|" + p.b.get_str());
    }
};

}  // namespace gasketlab
