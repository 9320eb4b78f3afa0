#pragma once

#include "gasketlab/collapse.hpp"
#include "gasketlab/distortion.hpp"
#include "gasketlab/lattice.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gasketlab {
namespace fold {

struct HeightTooLarge : std::runtime_error {
    explicit HeightTooLarge(const std::string& m) : std::runtime_error(m) {}
};
struct DegeneratePiece : std::runtime_error {
    explicit DegeneratePiece(const std::string& m) : std::runtime_error(m) {}
};

/// Exact subdivision of a rational edge length: len = N h + q with h <= q < 2h.
struct Subdivision {
    Int n;
    Rat q;
};
Subdivision subdivision_params(const Rat& len, const Rat& h);

/// Number of uniform cells per spoke for squared data: the unique N with
/// (N+1)^2 h^2 <= len^2 < (N+2)^2 h^2 (cells of width len/(N+1) in [h, 2h)).
Int spoke_cells(const Rat& len2, const Rat& h2);

/// The three kite quadrilaterals cut from an equilateral triangle by its
/// altitudes. Kite i holds vertex i and its two half-edges.
std::array<ConvexPolygon, 3> split_triangle(const std::array<RatPoint, 3>& w);

/// Target chart coordinates: s is the fraction along the spoke from the
/// center (u = s * len), t the normalized height (v = t * h). All piece
/// corners are rational in this frame even when len and h are irrational.
struct ChartPoint {
    Rat s;
    Rat t;
};

/// One linear map of the piecewise fold: a source triangle in lattice
/// coordinates onto a chart triangle over spoke `spoke`, face 0 or 1.
struct FoldPiece {
    std::array<RatPoint, 3> src;
    std::array<ChartPoint, 3> dst;
    int spoke = 0;
    int face = 0;
    bool trapezoid_half = false;  // part of a trapezoid cell (vs vertex cell)
    long long cell = 0;           // cell index along the spoke, 1-based

    /// Linear map in the rational frame (lattice source, (s,t) target).
    RatMat2 matrix() const;
    RatPoint translation() const;
    /// Exact distortion data against the scaled chart metric.
    FrameDistortion distortion(const Rat& len2, const Rat& h2) const;
};

struct ChartImage {
    int spoke = 0;
    int face = 0;
    Rat s;
    Rat t;
};

/// Piecewise-linear fold of an equilateral triangle onto the six rectangles
/// over a tripod. Pieces are self-similar along each spoke, so only the
/// distinct shapes are materialized; evaluation synthesizes the right cell.
class FoldMap {
  public:
    std::array<RatPoint, 3> w;  // source triangle, vertex i folds to tip i
    collapse::Tripod g;
    Rat h2;                      // flap height squared
    std::array<Int, 3> cells;    // N per spoke
    RatPoint centroid;

    /// Exact image of a source point (throws DegeneratePiece off the closure).
    ChartImage map_point(const RatPoint& p) const;

    /// Boundary trace: full-edge parameter tau on edge `edge` of the source
    /// (vertex (edge+1)%3 at tau = 0) to the spoke fraction s, matching the
    /// collapse anchor schedule exactly.
    Rat boundary_fraction(int edge, const Rat& tau) const;

    /// Representative pieces: one trapezoid pair and the vertex pair per
    /// (spoke, face); distortion of every other cell equals its representative
    /// by similarity.
    std::vector<FoldPiece> representative_pieces() const;

    /// All pieces of a spoke face, materialized; throws when N exceeds cap.
    std::vector<FoldPiece> pieces_for(int spoke, int face, long long cap = 4096) const;

    /// Exact max of mu^2 over the representative pieces (hence over all).
    Rat max_mu2() const;
    double distortion_value() const;

    /// Exact modulus certificate: every anchor cell has chart length <= 2h and
    /// 2h <= spoke/3.
    bool anchor_certificate() const;
};

/// Builds the fold. h2 = h^2 must satisfy 36 h2 <= min spoke length^2; the
/// source triangle must be equilateral with tips matched by vertex index.
FoldMap assemble_fold(const std::array<RatPoint, 3>& w_verts, const collapse::Tripod& g,
                      const Rat& h2);

/// Max piece distortion as an interval-certified double.
double distortion_bound(const FoldMap& fm);

}  // namespace fold
}  // namespace gasketlab
