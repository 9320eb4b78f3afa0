#include "gasketlab/fold.hpp"
#include "gasketlab/report.hpp"

#include <algorithm>
#include <cmath>

namespace gasketlab {
namespace fold {

Subdivision subdivision_params(const Rat& len, const Rat& h) {
    mark_op("fold.subdivision_params");
    if (sgn(h) <= 0 || sgn(len) <= 0) throw HeightTooLarge("need positive len and h");
    if (h * 6 > len) throw HeightTooLarge("need h <= len/6");
    // N = floor(len/h) - 1 gives len = N h + q with h <= q < 2h.
    Rat ratio = len / h;
    Int floor_ratio;
    mpz_fdiv_q(floor_ratio.get_mpz_t(), ratio.get_num().get_mpz_t(),
               ratio.get_den().get_mpz_t());
    Int n = floor_ratio - 1;
    Rat q = len - Rat(n) * h;
    if (q < h || q >= h * 2) throw DegeneratePiece("subdivision arithmetic failed");
    return Subdivision{n, q};
}

Int spoke_cells(const Rat& len2, const Rat& h2) {
    if (sgn(h2) <= 0) throw HeightTooLarge("need h > 0");
    if (h2 * 36 > len2) throw HeightTooLarge("need h <= len/6");
    Rat ratio2 = len2 / h2;
    Int m = floor_sqrt(ratio2);
    while (Rat(m * m) > ratio2) m -= 1;
    while (Rat((m + 1) * (m + 1)) <= ratio2) m += 1;
    return m - 1;  // cells per spoke = N + 1, width in [h, 2h)
}

std::array<ConvexPolygon, 3> split_triangle(const std::array<RatPoint, 3>& w) {
    mark_op("fold.split_triangle");
    Rat e0 = dist2(w[1], w[2]);
    Rat e1 = dist2(w[0], w[2]);
    Rat e2 = dist2(w[0], w[1]);
    if (!(e0 == e1 && e1 == e2)) throw DegeneratePiece("source triangle must be equilateral");
    RatPoint o((w[0].a + w[1].a + w[2].a) / 3, (w[0].b + w[1].b + w[2].b) / 3);
    std::array<ConvexPolygon, 3> kites;
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        kites[static_cast<std::size_t>(i)] = ConvexPolygon(
            {w[static_cast<std::size_t>(i)],
             midpoint(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]), o,
             midpoint(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(k)])});
    }
    return kites;
}

RatMat2 FoldPiece::matrix() const {
    RatPoint u1 = src[1] - src[0];
    RatPoint u2 = src[2] - src[0];
    Rat det = u1.a * u2.b - u1.b * u2.a;
    if (sgn(det) == 0) throw DegeneratePiece("piece source is degenerate");
    Rat d1s = dst[1].s - dst[0].s, d1t = dst[1].t - dst[0].t;
    Rat d2s = dst[2].s - dst[0].s, d2t = dst[2].t - dst[0].t;
    // M = [d1 d2] * [u1 u2]^-1
    RatMat2 m;
    m.a = (d1s * u2.b - d2s * u1.b) / det;
    m.b = (d2s * u1.a - d1s * u2.a) / det;
    m.c = (d1t * u2.b - d2t * u1.b) / det;
    m.d = (d2t * u1.a - d1t * u2.a) / det;
    return m;
}

RatPoint FoldPiece::translation() const {
    RatMat2 m = matrix();
    return {dst[0].s - (m.a * src[0].a + m.b * src[0].b),
            dst[0].t - (m.c * src[0].a + m.d * src[0].b)};
}

FrameDistortion FoldPiece::distortion(const Rat& len2, const Rat& h2) const {
    return frame_distortion(matrix(), len2, h2);
}

namespace {

Rat pow2_neg(long long k) {
    Int two(1);
    two <<= static_cast<unsigned>(k);
    return Rat(1) / Rat(two);
}

struct Bary {
    Rat u, v;
};

Bary solve_frame(const RatPoint& p, const RatPoint& origin, const RatPoint& e1,
                 const RatPoint& e2) {
    Rat det = e1.a * e2.b - e1.b * e2.a;
    if (sgn(det) == 0) throw DegeneratePiece("degenerate frame");
    RatPoint d = p - origin;
    return {(d.a * e2.b - d.b * e2.a) / det, (e1.a * d.b - e1.b * d.a) / det};
}

ChartPoint apply_piece(const FoldPiece& piece, const RatPoint& p) {
    Bary b = solve_frame(p, piece.src[0], piece.src[1] - piece.src[0],
                         piece.src[2] - piece.src[0]);
    Rat s = piece.dst[0].s + (piece.dst[1].s - piece.dst[0].s) * b.u +
            (piece.dst[2].s - piece.dst[0].s) * b.v;
    Rat t = piece.dst[0].t + (piece.dst[1].t - piece.dst[0].t) * b.u +
            (piece.dst[2].t - piece.dst[0].t) * b.v;
    return {s, t};
}

}  // namespace

FoldMap assemble_fold(const std::array<RatPoint, 3>& w_verts, const collapse::Tripod& g,
                      const Rat& h2) {
    mark_op("fold.assemble_fold");
    FoldMap fm;
    fm.w = w_verts;
    fm.g = g;
    fm.h2 = h2;
    Rat e0 = dist2(w_verts[1], w_verts[2]);
    Rat e1 = dist2(w_verts[0], w_verts[2]);
    Rat e2 = dist2(w_verts[0], w_verts[1]);
    if (!(e0 == e1 && e1 == e2)) throw DegeneratePiece("source triangle must be equilateral");
    for (int i = 0; i < 3; ++i) {
        fm.cells[static_cast<std::size_t>(i)] = spoke_cells(g.len2(i), h2);
    }
    fm.centroid = RatPoint((w_verts[0].a + w_verts[1].a + w_verts[2].a) / 3,
                           (w_verts[0].b + w_verts[1].b + w_verts[2].b) / 3);
    return fm;
}

namespace {

void make_trapezoid_pieces(const FoldMap& fm, int spoke, int face, long long k,
                           std::vector<FoldPiece>& out) {
    const Int& n = fm.cells[static_cast<std::size_t>(spoke)];
    Rat cells = Rat(n) + 1;
    int other = (face == 0) ? (spoke + 1) % 3 : (spoke + 2) % 3;
    const RatPoint& xi = fm.w[static_cast<std::size_t>(spoke)];
    RatPoint m = midpoint(xi, fm.w[static_cast<std::size_t>(other)]);
    RatPoint em = m - xi;
    RatPoint ea = fm.centroid - xi;
    Rat t_hi = pow2_neg(k - 1);  // outer cross-line scale 2^(1-k)
    Rat t_lo = t_hi / 2;
    RatPoint p_hi = xi + em * t_hi;
    RatPoint p_lo = xi + em * t_lo;
    RatPoint a_lo = xi + ea * t_lo;
    RatPoint a_hi = xi + ea * t_hi;
    Rat s_prev = Rat(static_cast<long>(k - 1)) / cells;
    Rat s_cur = Rat(static_cast<long>(k)) / cells;
    // Diagonal out of the corner whose image is nearest the tripod center.
    FoldPiece lower;
    lower.src = {p_hi, p_lo, a_lo};
    lower.dst = {ChartPoint{s_prev, Rat(0)}, ChartPoint{s_cur, Rat(0)}, ChartPoint{s_cur, Rat(1)}};
    lower.spoke = spoke;
    lower.face = face;
    lower.trapezoid_half = true;
    lower.cell = k;
    FoldPiece upper;
    upper.src = {p_hi, a_lo, a_hi};
    upper.dst = {ChartPoint{s_prev, Rat(0)}, ChartPoint{s_cur, Rat(1)}, ChartPoint{s_prev, Rat(1)}};
    upper.spoke = spoke;
    upper.face = face;
    upper.trapezoid_half = true;
    upper.cell = k;
    out.push_back(std::move(lower));
    out.push_back(std::move(upper));
}

void make_vertex_pieces(const FoldMap& fm, int spoke, int face, std::vector<FoldPiece>& out) {
    const Int& n = fm.cells[static_cast<std::size_t>(spoke)];
    Rat cells = Rat(n) + 1;
    int other = (face == 0) ? (spoke + 1) % 3 : (spoke + 2) % 3;
    const RatPoint& xi = fm.w[static_cast<std::size_t>(spoke)];
    RatPoint m = midpoint(xi, fm.w[static_cast<std::size_t>(other)]);
    long long n_ll = static_cast<long long>(mpz_get_si(n.get_mpz_t()));
    Rat t_n = pow2_neg(n_ll);
    RatPoint h_pt = xi + (m - xi) * t_n;
    RatPoint k_pt = xi + (fm.centroid - xi) * t_n;
    RatPoint j_pt = midpoint(xi, k_pt);
    Rat s_n = Rat(n) / cells;
    FoldPiece tip;
    tip.src = {h_pt, xi, j_pt};
    tip.dst = {ChartPoint{s_n, Rat(0)}, ChartPoint{Rat(1), Rat(0)}, ChartPoint{Rat(1), Rat(1)}};
    tip.spoke = spoke;
    tip.face = face;
    tip.cell = n_ll + 1;
    FoldPiece top;
    top.src = {h_pt, j_pt, k_pt};
    top.dst = {ChartPoint{s_n, Rat(0)}, ChartPoint{Rat(1), Rat(1)}, ChartPoint{s_n, Rat(1)}};
    top.spoke = spoke;
    top.face = face;
    top.cell = n_ll + 1;
    out.push_back(std::move(tip));
    out.push_back(std::move(top));
}

bool in_closed_tri(const RatPoint& p, const RatPoint& a, const RatPoint& b, const RatPoint& c) {
    int o1 = orient(a, b, p), o2 = orient(b, c, p), o3 = orient(c, a, p);
    return (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0);
}

}  // namespace

ChartImage FoldMap::map_point(const RatPoint& p) const {
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        const RatPoint& xi = w[static_cast<std::size_t>(i)];
        RatPoint mj = midpoint(xi, w[static_cast<std::size_t>(j)]);
        RatPoint mk = midpoint(xi, w[static_cast<std::size_t>(k)]);
        int face = -1;
        if (in_closed_tri(p, xi, mj, centroid)) {
            face = 0;
        } else if (in_closed_tri(p, xi, mk, centroid)) {
            face = 1;
        }
        if (face < 0) continue;
        const RatPoint& m = (face == 0) ? mj : mk;
        Bary c = solve_frame(p, xi, m - xi, centroid - xi);
        Rat scale = c.u + c.v;  // cross-line coordinate: 1 on [m, O], 0 at the vertex
        if (sgn(scale) == 0) return {i, face, Rat(1), Rat(0)};

        const Int& n = cells[static_cast<std::size_t>(i)];
        Int kk_i(0);
        {
            const Int& pn = scale.get_num();
            const Int& qd = scale.get_den();
            Int shifted = pn;
            Int cap = n + 2;
            while (shifted < qd && kk_i < cap) {
                shifted <<= 1;
                kk_i += 1;
            }
            if (kk_i < 1) kk_i = 1;
        }
        long long kk = static_cast<long long>(mpz_get_si(kk_i.get_mpz_t()));
        std::vector<FoldPiece> candidates;
        if (kk_i > n) {
            make_vertex_pieces(*this, i, face, candidates);
        } else {
            make_trapezoid_pieces(*this, i, face, kk, candidates);
            if (kk > 1) make_trapezoid_pieces(*this, i, face, kk - 1, candidates);
            if (kk_i == n) make_vertex_pieces(*this, i, face, candidates);
        }
        for (const auto& piece : candidates) {
            if (in_closed_tri(p, piece.src[0], piece.src[1], piece.src[2])) {
                ChartPoint img = apply_piece(piece, p);
                return {i, face, img.s, img.t};
            }
        }
    }
    throw DegeneratePiece("point outside the source triangle");
}

Rat FoldMap::boundary_fraction(int edge, const Rat& tau) const {
    int v1 = (edge + 1) % 3, v2 = (edge + 2) % 3;
    Rat half(1, 2);
    if (tau <= half) {
        collapse::AnchorSchedule sched{cells[static_cast<std::size_t>(v1)]};
        return sched.fraction(tau);
    }
    collapse::AnchorSchedule sched{cells[static_cast<std::size_t>(v2)]};
    return sched.fraction(Rat(1) - tau);
}

std::vector<FoldPiece> FoldMap::representative_pieces() const {
    std::vector<FoldPiece> out;
    for (int spoke = 0; spoke < 3; ++spoke) {
        for (int face = 0; face < 2; ++face) {
            make_trapezoid_pieces(*this, spoke, face, 1, out);
            make_vertex_pieces(*this, spoke, face, out);
        }
    }
    return out;
}

std::vector<FoldPiece> FoldMap::pieces_for(int spoke, int face, long long cap) const {
    const Int& n = cells[static_cast<std::size_t>(spoke)];
    if (n > Int(static_cast<long>(cap)))
        throw DegeneratePiece("spoke subdivision too fine to materialize");
    long long n_ll = static_cast<long long>(mpz_get_si(n.get_mpz_t()));
    std::vector<FoldPiece> out;
    for (long long k = 1; k <= n_ll; ++k) make_trapezoid_pieces(*this, spoke, face, k, out);
    make_vertex_pieces(*this, spoke, face, out);
    return out;
}

Rat FoldMap::max_mu2() const {
    Rat best(0);
    for (const auto& piece : representative_pieces()) {
        FrameDistortion fd = piece.distortion(g.len2(piece.spoke), h2);
        best = rat_max(best, fd.mu2());
    }
    return best;
}

double FoldMap::distortion_value() const {
    Rat mu2 = max_mu2();
    RatInterval mu = sqrt_interval(mu2, 64);
    Rat disc = mu2 - 4;
    if (sgn(disc) < 0) disc = 0;
    RatInterval s = sqrt_interval(disc, 64);
    return to_double((mu.mid() + s.mid()) / 2);
}

bool FoldMap::anchor_certificate() const {
    for (int spoke = 0; spoke < 3; ++spoke) {
        Rat len2 = g.len2(spoke);
        if (h2 * 36 > len2) return false;  // 2h <= spoke/3
        Rat c = Rat(cells[static_cast<std::size_t>(spoke)]) + 1;
        if (len2 > h2 * 4 * c * c) return false;  // anchor cell <= 2h
    }
    return true;
}

double distortion_bound(const FoldMap& fm) {
    mark_op("fold.distortion_bound");  return fm.distortion_value(); }

}  // namespace fold
}  // namespace gasketlab
