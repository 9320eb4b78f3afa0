#pragma once

#include "gasketlab/lattice.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasketlab {
namespace gasket {

struct OutsideGasketHull : std::runtime_error {
    explicit OutsideGasketHull(const std::string& m) : std::runtime_error(m) {}
};
struct DepthExceeded : std::runtime_error {
    explicit DepthExceeded(const std::string& m) : std::runtime_error(m) {}
};

/// Address of a kept (v-) triangle: the child choice per subdivision step.
/// Child i of a v-triangle keeps vertex i of its parent. The root word is
/// empty and has level 0 (sidelength 1); level n triangles have sidelength 2^-n.
struct VAddress {
    std::vector<uint8_t> path;

    int level() const { return static_cast<int>(path.size()); }
    VAddress child(uint8_t i) const {
        VAddress c = *this;
        c.path.push_back(i);
        return c;
    }
    bool operator==(const VAddress& o) const { return path == o.path; }
    bool operator<(const VAddress& o) const { return path < o.path; }
    std::string str() const;
    static VAddress parse(const std::string& s);
};

/// Address of a removed (w-) triangle: the central child of its parent
/// v-triangle. Level 0 is the unbounded complementary component.
struct WAddress {
    std::optional<VAddress> parent;  // nullopt encodes level 0

    static WAddress level0() { return WAddress{std::nullopt}; }
    static WAddress central_of(VAddress v) { return WAddress{std::move(v)}; }

    bool is_level0() const { return !parent.has_value(); }
    int level() const { return is_level0() ? 0 : parent->level() + 1; }
    bool operator==(const WAddress& o) const { return parent == o.parent; }
    bool operator<(const WAddress& o) const;
    std::string str() const;
};

/// Vertices of a v-triangle: index i sits in the direction of root corner i.
std::array<RatPoint, 3> v_vertices(const VAddress& v);

/// Vertices of a bounded w-triangle; vertex k is the midpoint of the parent
/// edge opposite parent corner k. Throws for level 0.
std::array<RatPoint, 3> w_vertices(const WAddress& w);

/// Root triangle corners (0,0), (1,0), (0,1) in lattice coordinates.
std::array<RatPoint, 3> root_vertices();

/// Edge k of a triangle runs from vertex (k+1)%3 to vertex (k+2)%3. For the
/// level-0 component these are the root triangle edges.
std::pair<RatPoint, RatPoint> w_edge(const WAddress& w, int edge);

/// Reference of a segment inside a host w-edge: params t0, t1 are the host
/// edge parameters of the segment endpoints.
struct EdgeRef {
    WAddress host;
    int host_edge = 0;
    Rat t0, t1;
};

/// Working frame of the subdivision descent: a v-triangle with exact corners
/// and, per edge, the lower-level w-triangle hosting it. Edge k (opposite
/// corner k) runs from corner (k+1)%3 to corner (k+2)%3; t0/t1 are the host
/// edge parameters of those two corners.
struct VFrame {
    VAddress va;
    std::array<RatPoint, 3> p;
    std::array<EdgeRef, 3> ref;

    static VFrame root();
    VFrame descend(uint8_t child) const;

    /// Vertices of the central w-triangle; index k is the midpoint of the
    /// edge opposite corner k.
    std::array<RatPoint, 3> w_mid() const;

    /// Host edge parameter of a point lying on the edge opposite corner k.
    Rat host_param(int k, const RatPoint& x) const;
};

struct PointClass {
    enum class Kind { Vertex, Edge, Interior, InsideRemoved };
    Kind kind;
    // Vertex: a = the w-triangle having the point as a vertex, b = the
    //         lower-level w-triangle whose edge carries it (a == b == level 0
    //         exactly for the three root corners).
    // Edge:   b = the carrying w-triangle, edge index and position on it.
    // InsideRemoved: a = the removed triangle containing the point.
    WAddress a;
    WAddress b;
    int edge = -1;
    Rat position;   // host edge parameter in [0,1]
    int depth_used = 0;
};

/// Exact classification among triangles of level <= depth. Interior verdicts
/// mean "interior up to depth". Vertex/edge verdicts carry exact data.
PointClass classify(const RatPoint& p, int depth);

/// One enumerated removed triangle.
struct WEntry {
    WAddress address;
    std::array<RatPoint, 3> vertices;
};

/// All w-triangles of level 1..levelMax in lexicographic address order.
std::vector<WEntry> enumerate_w(int levelMax);

/// Per-step data of the nested-sequence combinatorics: for index n >= 2 the
/// central triangle W(n) has one vertex on the boundary of W(n-1) and the
/// other two on the boundaries of A(n) and B(n), with level(B) <= level(A).
struct NestedStep {
    int n = 0;
    WAddress w;            // W(n), level n
    WAddress a;            // A(n)
    WAddress b;            // B(n)
    RatPoint vertex_on_prev;  // vertex of W(n) on boundary of W(n-1)
    RatPoint vertex_on_a;
    RatPoint vertex_on_b;
    std::optional<int> k;  // level of A(n) when A(n) = W(k)
    std::optional<int> l;  // level of B(n) when B(n) = W(l)
};

struct NestedData {
    std::vector<NestedStep> steps;  // indices 2..n
};

/// Walks a (finite prefix of an) infinite address and reports the nested
/// sequence data through index n. Throws DepthExceeded when the prefix is
/// shorter than n.
NestedData nested_sequence(const VAddress& prefix, int n);

/// Checks the ordered half-edge property of step n in case (III): the three
/// contact vertices on the boundary of W(k(n)) are collinear on one half-edge
/// with the newest strictly between the other two.
bool check_half_edge_order(const NestedData& data, int n);

/// The point at parameter 2^-k along edge `edge` of w, measured from the
/// vertex end selected by half (0: vertex (edge+1)%3, 1: vertex (edge+2)%3).
RatPoint dyadic_edge_point(const WAddress& w, int edge, int half, int k);

/// Adjacency: a vertex of one lies on the closed boundary of the other.
bool adjacency(const WAddress& w1, const WAddress& w2);

/// Sum of exact areas of all level-n v-triangles, in sqrt(3)/4 units.
Rat level_cover_area_units(int n);

}  // namespace gasket
}  // namespace gasketlab
