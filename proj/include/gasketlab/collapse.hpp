#pragma once

#include "gasketlab/gasket.hpp"
#include "gasketlab/lattice.hpp"
#include "gasketlab/polygon.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasketlab {
namespace collapse {

struct CollinearInput : std::runtime_error {
    explicit CollinearInput(const std::string& m) : std::runtime_error(m) {}
};
struct PointOnWrongSide : std::runtime_error {
    explicit PointOnWrongSide(const std::string& m) : std::runtime_error(m) {}
};
struct NonConvexResult : std::runtime_error {
    explicit NonConvexResult(const std::string& m) : std::runtime_error(m) {}
};

/// Canonical tripod: three spokes from the barycenter of the tips.
struct Tripod {
    std::array<RatPoint, 3> c;  // tips
    RatPoint a;                 // center = (c0 + c1 + c2) / 3

    Rat len2(int i) const { return dist2(a, c[static_cast<std::size_t>(i)]); }
    /// Squared longest spoke length; the square of O(W) for the map case.
    Rat osc_sq() const;
    Rat min_len2() const;
};

Tripod canonical_tripod(const RatPoint& c1, const RatPoint& c2, const RatPoint& c3);

/// Convex quadrilateral cell of the collapsed picture. The marked vertex is
/// the image of the midpoint of the v-triangle edge created last.
struct UQuad {
    ConvexPolygon poly;
    int marked = 0;  // index into poly.verts()
    int level = 0;

    const RatPoint& marked_vertex() const { return poly.verts()[static_cast<std::size_t>(marked)]; }
};

struct SplitResult {
    Tripod tripod;
    std::vector<UQuad> children;  // three cells, marked at the tripod center
};

/// Splits a u-quadrilateral along the canonical tripod of (marked vertex,
/// c2, c3). c2 and c3 must lie strictly inside the two sides not incident to
/// the marked vertex. Exact area conservation and convexity are verified.
SplitResult split_u(const UQuad& u, const RatPoint& c2, const RatPoint& c3);

/// Per-spoke anchor schedule: dyadic point 2^-k on the half-edge maps to the
/// fraction (k-1)/(N+1) of the spoke from the center, the tail linearly onto
/// the last cell. N is the unique integer with (N+1) h <= len < (N+2) h.
struct AnchorSchedule {
    Int n;  // cells per spoke = n + 1

    /// Fraction along [a, c] for the half-edge parameter t in [0, 1/2]
    /// measured from the vertex end (t = 1/2 is the midpoint).
    Rat fraction(const Rat& t) const;
};

/// Where a tripod tip came from: the lower-level host edge carrying the
/// w-triangle vertex whose image it is.
struct TipRef {
    gasket::WAddress host;
    int host_edge = 0;
    Rat host_t;  // host edge parameter of the source vertex
};

struct TripodEntry {
    gasket::WAddress w;
    Tripod tripod;
    Rat h;                          // flap height attached to this tripod
    std::array<AnchorSchedule, 3> spokes;  // per tip
    std::array<TipRef, 3> tips;
};

struct QuadEntry {
    gasket::VAddress v;
    UQuad quad;
};

/// Chooses the flap height for a new tripod, given all previous entries.
using HeightPolicy =
    std::function<Rat(const Tripod& next, const std::vector<TripodEntry>& previous)>;

/// Largest dyadic 2^-k with h <= min spoke length / 6.
Rat default_height(const Tripod& t);

class CollapseStage {
  public:
    int level_max = 0;
    std::vector<TripodEntry> tripods;          // ordered by (level, address)
    std::map<std::string, std::size_t> tripod_index;
    std::vector<QuadEntry> quads;              // every v-address, levels 1..level_max
    std::map<std::string, std::size_t> quad_index;

    const TripodEntry* find_tripod(const gasket::WAddress& w) const;
    const QuadEntry* find_quad(const gasket::VAddress& v) const;

    /// Exact image of the point at parameter t on edge `edge` of a collapsed
    /// w-triangle (level-0 hosts are fixed pointwise).
    RatPoint edge_point(const gasket::WAddress& host, int edge, const Rat& t) const;

    /// Exact image of a v-triangle corner or any point on a built boundary,
    /// given the frame edge reference carrying it.
    RatPoint boundary_image(const gasket::EdgeRef& ref, const Rat& host_t) const;

    /// Sum of exact u-quad areas at a level, in sqrt(3)/4 units.
    Rat level_area_units(int level) const;
};

CollapseStage build_collapse(int levelMax, const HeightPolicy& policy = nullptr);

/// Exact verification of property (G) and the degree bound on the union graph.
struct FamilyReport {
    bool property_g = true;
    int max_degree = 0;
    long long pairs_checked = 0;
    long long contacts = 0;
    std::string violation;
};

FamilyReport tripod_family_checks(const CollapseStage& stage);

/// Per-level maxima of the squared oscillation O(W)^2 (exact rationals).
std::vector<Rat> oscillation_decay_sq(const CollapseStage& stage);

/// Map-case oscillation recurrence along a nested sequence: case-3 steps must
/// satisfy osc(W_n)^2 <= (49/81) max(parent osc)^2.
struct MapRecurrenceSweep {
    int steps_checked = 0;
    int violations = 0;
};
MapRecurrenceSweep map_recurrence_sweep(const CollapseStage& stage, int samples, uint64_t seed);

/// Exact modulus certificate on every spoke: the anchor cell length obeys
/// cell <= 2h and 2h <= spoke/3 <= O(W)/3.
bool check_anchor_certificates(const CollapseStage& stage);

/// Strict monotonicity of the anchor fractions on sampled dyadic parameters.
bool check_boundary_monotone(const CollapseStage& stage);

}  // namespace collapse
}  // namespace gasketlab
