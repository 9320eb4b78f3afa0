#pragma once

#include "gasketlab/lattice.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace gasketlab {

struct NonConvexCell : std::runtime_error {
    explicit NonConvexCell(const std::string& m) : std::runtime_error(m) {}
};
struct DegeneratePolygon : std::runtime_error {
    explicit DegeneratePolygon(const std::string& m) : std::runtime_error(m) {}
};

/// Convex polygon with exact vertices in counterclockwise order.
/// Zero-area input is rejected at construction.
class ConvexPolygon {
  public:
    /// Empty placeholder; the validating constructor is the real entry point.
    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<RatPoint> verts);

    const std::vector<RatPoint>& verts() const { return verts_; }
    std::size_t size() const { return verts_.size(); }

    /// Area in units of sqrt(3)/4.
    Rat area_units() const { return polygon_area_units(verts_); }

    bool contains(const RatPoint& p) const;          // closed
    bool contains_interior(const RatPoint& p) const; // open
    bool on_boundary(const RatPoint& p) const;

    /// Strict convexity test for an arbitrary CCW vertex list; collinear
    /// consecutive triples are allowed when allow_collinear is set.
    static bool is_convex_ccw(const std::vector<RatPoint>& verts, bool allow_collinear = false);

  private:
    std::vector<RatPoint> verts_;
};

struct Segment {
    RatPoint p;
    RatPoint q;
};

/// Splits a convex polygon along interior segments. Segments must lie in the
/// closed polygon and be pairwise non-crossing except at shared endpoints.
/// Returned cells partition the polygon: areas sum exactly to the input area.
/// Throws NonConvexCell if a produced cell fails the exact convexity test.
std::vector<ConvexPolygon> split_convex(const ConvexPolygon& poly,
                                        const std::vector<Segment>& segments);

}  // namespace gasketlab
