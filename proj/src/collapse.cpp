#include "gasketlab/collapse.hpp"
#include "gasketlab/report.hpp"

#include "gasketlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace gasketlab {
namespace collapse {

using gasket::EdgeRef;
using gasket::VAddress;
using gasket::VFrame;
using gasket::WAddress;

Rat Tripod::osc_sq() const { return rat_max(len2(0), rat_max(len2(1), len2(2))); }

Rat Tripod::min_len2() const { return rat_min(len2(0), rat_min(len2(1), len2(2))); }

Tripod canonical_tripod(const RatPoint& c1, const RatPoint& c2, const RatPoint& c3) {
    mark_op("collapse.canonical_tripod");
    if (orient(c1, c2, c3) == 0) throw CollinearInput("tripod tips are collinear");
    Tripod t;
    t.c = {c1, c2, c3};
    t.a = RatPoint((c1.a + c2.a + c3.a) / 3, (c1.b + c2.b + c3.b) / 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            auto pts = segment_intersection_points(t.a, t.c[static_cast<std::size_t>(i)], t.a,
                                                   t.c[static_cast<std::size_t>(j)]);
            if (pts.size() != 1 || pts[0] != t.a) throw CollinearInput("tripod spokes overlap");
        }
    }
    return t;
}

SplitResult split_u(const UQuad& u, const RatPoint& c2, const RatPoint& c3) {
    mark_op("collapse.split_u");
    const auto& v = u.poly.verts();
    const std::size_t n = v.size();
    const RatPoint& c1 = u.marked_vertex();

    auto side_of = [&](const RatPoint& p) -> std::optional<std::size_t> {
        for (std::size_t s = 0; s < n; ++s) {
            if (on_open_segment(p, v[s], v[(s + 1) % n])) return s;
        }
        return std::nullopt;
    };
    auto s2 = side_of(c2);
    auto s3 = side_of(c3);
    if (!s2 || !s3 || *s2 == *s3)
        throw PointOnWrongSide("cut points must sit on distinct open sides");
    std::size_t m = static_cast<std::size_t>(u.marked);
    if (*s2 == m || (*s2 + 1) % n == m || *s3 == m || (*s3 + 1) % n == m)
        throw PointOnWrongSide("cut point on a side incident to the marked vertex");

    Tripod g = canonical_tripod(c1, c2, c3);
    if (!u.poly.contains(g.a)) throw PointOnWrongSide("tripod center left the cell");

    std::vector<ConvexPolygon> cells;
    try {
        cells = split_convex(u.poly, {{g.a, g.c[0]}, {g.a, g.c[1]}, {g.a, g.c[2]}});
    } catch (const NonConvexCell& e) {
        throw NonConvexResult(e.what());
    }
    if (cells.size() != 3) throw NonConvexResult("expected three components");

    SplitResult out;
    out.tripod = g;
    Rat total(0);
    for (auto& cell : cells) {
        total += cell.area_units();
        // Drop collinear subdivision vertices before the strict convexity test.
        std::vector<RatPoint> verts = cell.verts();
        std::vector<RatPoint> clean;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const RatPoint& prev = verts[(i + verts.size() - 1) % verts.size()];
            const RatPoint& cur = verts[i];
            const RatPoint& nxt = verts[(i + 1) % verts.size()];
            if (orient(prev, cur, nxt) != 0) clean.push_back(cur);
        }
        if (clean.size() != 4) throw NonConvexResult("component is not a quadrilateral");
        UQuad child;
        child.poly = ConvexPolygon(clean);
        child.level = u.level + 1;
        child.marked = -1;
        const auto& cv = child.poly.verts();
        for (std::size_t i = 0; i < cv.size(); ++i) {
            if (cv[i] == g.a) child.marked = static_cast<int>(i);
        }
        if (child.marked < 0) throw NonConvexResult("component misses the tripod center");
        if (!ConvexPolygon::is_convex_ccw(cv, /*allow_collinear=*/false))
            throw NonConvexResult("component has a straight angle");
        out.children.push_back(std::move(child));
    }
    if (total != u.poly.area_units()) throw NonConvexResult("area not conserved");
    return out;
}

Rat AnchorSchedule::fraction(const Rat& t) const {
    Rat cells = Rat(n) + 1;
    if (t >= make_rat(1, 2)) return Rat(0);
    if (sgn(t) == 0) return Rat(1);
    const Int& p = t.get_num();
    const Int& q = t.get_den();
    // smallest k with t >= 2^-k, capped once past the tail threshold n+1
    Int cap = n + 2;
    Int k(0);
    Int shifted = p;
    while (shifted < q && k < cap) {
        shifted <<= 1;
        k += 1;
    }
    if (k > n + 1) {
        // tail piece [0, 2^-(n+1)] -> [n/(n+1), 1]
        unsigned shift = static_cast<unsigned>(mpz_get_ui(Int(n + 1).get_mpz_t()));
        Int two_t(1);
        two_t <<= shift;
        Rat t_anchor = Rat(1) / Rat(two_t);
        return (Rat(n) + (t_anchor - t) / t_anchor) / cells;
    }
    // t sits between the anchors 2^-k and 2^-(k-1) whose values are
    // (k-1)/(n+1) and (k-2)/(n+1); linear in between.
    unsigned shift = static_cast<unsigned>(mpz_get_ui(k.get_mpz_t()));
    Int two_k(1);
    two_k <<= shift;
    Rat lower_anchor = Rat(1) / Rat(two_k);  // 2^-k
    return (Rat(k - 1) + (lower_anchor * 2 - t - lower_anchor) / lower_anchor) / cells;
}

Rat default_height(const Tripod& t) {
    Rat bound = t.min_len2() / 36;
    Rat h(1);
    while (h * h > bound) h /= 2;
    return h;
}

const TripodEntry* CollapseStage::find_tripod(const WAddress& w) const {
    auto it = tripod_index.find(w.str());
    return it == tripod_index.end() ? nullptr : &tripods[it->second];
}

const QuadEntry* CollapseStage::find_quad(const VAddress& v) const {
    auto it = quad_index.find(v.str());
    return it == quad_index.end() ? nullptr : &quads[it->second];
}

RatPoint CollapseStage::edge_point(const WAddress& host, int edge, const Rat& t) const {
    if (host.is_level0()) {
        auto [e0, e1] = gasket::w_edge(host, edge);
        return lerp(e0, e1, t);
    }
    const TripodEntry* entry = find_tripod(host);
    if (!entry) throw std::domain_error("edge_point: unknown host " + host.str());
    int v1 = (edge + 1) % 3, v2 = (edge + 2) % 3;
    Rat half(1, 2);
    if (t <= half) {
        Rat frac = entry->spokes[static_cast<std::size_t>(v1)].fraction(t);
        return lerp(entry->tripod.a, entry->tripod.c[static_cast<std::size_t>(v1)], frac);
    }
    Rat frac = entry->spokes[static_cast<std::size_t>(v2)].fraction(Rat(1) - t);
    return lerp(entry->tripod.a, entry->tripod.c[static_cast<std::size_t>(v2)], frac);
}

RatPoint CollapseStage::boundary_image(const EdgeRef& ref, const Rat& host_t) const {
    return edge_point(ref.host, ref.host_edge, host_t);
}

Rat CollapseStage::level_area_units(int level) const {
    Rat total(0);
    for (const auto& q : quads) {
        if (q.quad.level == level) total += q.quad.poly.area_units();
    }
    return total;
}

namespace {

AnchorSchedule make_schedule(const Rat& len2, const Rat& h) {
    // unique N with (N+1) h <= len < (N+2) h, via M = floor(len / h).
    Rat ratio2 = len2 / (h * h);
    Int m = floor_sqrt(ratio2);
    while (Rat(m * m) > ratio2) m -= 1;
    while (Rat((m + 1) * (m + 1)) <= ratio2) m += 1;
    Int n = m - 1;
    if (n < 1) throw std::domain_error("height too large for spoke subdivision");
    return AnchorSchedule{n};
}

}  // namespace

CollapseStage build_collapse(int levelMax, const HeightPolicy& policy) {
    mark_op("collapse.build_collapse");
    if (levelMax < 1) throw std::invalid_argument("build_collapse: levelMax >= 1");
    CollapseStage stage;
    stage.level_max = levelMax;

    std::vector<VFrame> frontier{VFrame::root()};
    for (int level = 1; level <= levelMax; ++level) {
        std::vector<VFrame> next;
        next.reserve(frontier.size() * 3);
        for (const VFrame& f : frontier) {
            auto mid = f.w_mid();
            std::array<RatPoint, 3> tips;
            std::array<TipRef, 3> tip_refs;
            for (int k = 0; k < 3; ++k) {
                Rat t = f.host_param(k, mid[static_cast<std::size_t>(k)]);
                const EdgeRef& r = f.ref[static_cast<std::size_t>(k)];
                tips[static_cast<std::size_t>(k)] = stage.edge_point(r.host, r.host_edge, t);
                tip_refs[static_cast<std::size_t>(k)] = TipRef{r.host, r.host_edge, t};
            }
            TripodEntry entry;
            entry.w = WAddress::central_of(f.va);
            entry.tripod = canonical_tripod(tips[0], tips[1], tips[2]);
            entry.tips = tip_refs;
            entry.h = policy ? policy(entry.tripod, stage.tripods) : default_height(entry.tripod);
            if (sgn(entry.h) <= 0) throw std::domain_error("height policy returned h <= 0");
            for (int k = 0; k < 3; ++k) {
                entry.spokes[static_cast<std::size_t>(k)] =
                    make_schedule(entry.tripod.len2(k), entry.h);
            }
            stage.tripod_index[entry.w.str()] = stage.tripods.size();
            stage.tripods.push_back(entry);
            const TripodEntry& te = stage.tripods.back();

            // Children u-quads: child i runs (corner image, tip k, center, tip j).
            for (uint8_t i = 0; i < 3; ++i) {
                int j = (i + 1) % 3, k = (i + 2) % 3;
                const EdgeRef& rj = f.ref[static_cast<std::size_t>(j)];
                RatPoint corner_img = stage.boundary_image(rj, rj.t1);
                {
                    const EdgeRef& rk = f.ref[static_cast<std::size_t>(k)];
                    RatPoint alt = stage.boundary_image(rk, rk.t0);
                    if (!(alt == corner_img))
                        throw NonConvexResult("corner image mismatch between edges");
                }
                UQuad child;
                child.level = level;
                child.poly = ConvexPolygon({corner_img, te.tripod.c[static_cast<std::size_t>(k)],
                                            te.tripod.a, te.tripod.c[static_cast<std::size_t>(j)]});
                child.marked = -1;
                const auto& cv = child.poly.verts();
                for (std::size_t q = 0; q < cv.size(); ++q) {
                    if (cv[q] == te.tripod.a) child.marked = static_cast<int>(q);
                }
                if (child.marked < 0) throw NonConvexResult("child misses tripod center");
                if (!ConvexPolygon::is_convex_ccw(cv, /*allow_collinear=*/false))
                    throw NonConvexResult("child quad not strictly convex at level " +
                                          std::to_string(level));
                VAddress cva = f.va.child(i);
                stage.quad_index[cva.str()] = stage.quads.size();
                stage.quads.push_back(QuadEntry{cva, std::move(child)});
            }
            if (level < levelMax) {
                for (uint8_t c = 0; c < 3; ++c) next.push_back(f.descend(c));
            }
        }
        frontier = std::move(next);
    }
    return stage;
}

// ---------------------------------------------------------------------------
// Family checks

namespace {

struct Box {
    double lo_x, lo_y, hi_x, hi_y;

    bool overlaps(const Box& o) const {
        return lo_x <= o.hi_x && o.lo_x <= hi_x && lo_y <= o.hi_y && o.lo_y <= hi_y;
    }
};

Box tripod_box(const Tripod& t) {
    Box b{1e300, 1e300, -1e300, -1e300};
    auto add = [&b](const RatPoint& p) {
        EuclidPoint e = to_euclid(p);
        b.lo_x = std::min(b.lo_x, e.x);
        b.lo_y = std::min(b.lo_y, e.y);
        b.hi_x = std::max(b.hi_x, e.x);
        b.hi_y = std::max(b.hi_y, e.y);
    };
    add(t.a);
    for (const auto& c : t.c) add(c);
    const double pad = 1e-9;
    b.lo_x -= pad;
    b.lo_y -= pad;
    b.hi_x += pad;
    b.hi_y += pad;
    return b;
}

}  // namespace

FamilyReport tripod_family_checks(const CollapseStage& stage) {
    mark_op("collapse.tripod_family_checks");
    FamilyReport report;
    const auto& ts = stage.tripods;
    std::vector<Box> boxes;
    boxes.reserve(ts.size());
    for (const auto& t : ts) boxes.push_back(tripod_box(t.tripod));

    for (std::size_t i = 0; i < ts.size() && report.property_g; ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            if (!boxes[i].overlaps(boxes[j])) continue;
            ++report.pairs_checked;
            std::vector<RatPoint> pts;
            for (int ei = 0; ei < 3; ++ei) {
                for (int ej = 0; ej < 3; ++ej) {
                    auto inter = segment_intersection_points(
                        ts[i].tripod.a, ts[i].tripod.c[static_cast<std::size_t>(ei)],
                        ts[j].tripod.a, ts[j].tripod.c[static_cast<std::size_t>(ej)]);
                    for (auto& p : inter) {
                        if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
                    }
                }
            }
            if (pts.empty()) continue;
            ++report.contacts;
            if (pts.size() > 1) {
                report.property_g = false;
                report.violation = ts[i].w.str() + " x " + ts[j].w.str() + ": multiple points";
                break;
            }
            const RatPoint& p = pts[0];
            bool tip_i =
                (p == ts[i].tripod.c[0] || p == ts[i].tripod.c[1] || p == ts[i].tripod.c[2]);
            bool tip_j =
                (p == ts[j].tripod.c[0] || p == ts[j].tripod.c[1] || p == ts[j].tripod.c[2]);
            if (!tip_i && !tip_j) {
                report.property_g = false;
                report.violation = ts[i].w.str() + " x " + ts[j].w.str() + ": not a tip contact";
                break;
            }
        }
    }

    // Degree of the union graph: tripod vertices, spokes split at interior
    // incidences.
    std::unordered_map<RatPoint, int, RatPointHash> degree;
    std::vector<RatPoint> verts;
    auto note_vertex = [&](const RatPoint& p) {
        if (degree.emplace(p, 0).second) verts.push_back(p);
    };
    for (const auto& t : ts) {
        note_vertex(t.tripod.a);
        for (const auto& c : t.tripod.c) note_vertex(c);
    }
    const double cell = 1.0 / 64.0;
    std::unordered_map<long long, std::vector<std::size_t>> grid;
    auto key_of = [cell](double x, double y) {
        long long gx = static_cast<long long>(std::floor(x / cell));
        long long gy = static_cast<long long>(std::floor(y / cell));
        return gx * 1000003LL + gy;
    };
    for (std::size_t vi = 0; vi < verts.size(); ++vi) {
        EuclidPoint e = to_euclid(verts[vi]);
        grid[key_of(e.x, e.y)].push_back(vi);
    }
    for (const auto& t : ts) {
        for (int s = 0; s < 3; ++s) {
            const RatPoint& a = t.tripod.a;
            const RatPoint& c = t.tripod.c[static_cast<std::size_t>(s)];
            degree[a] += 1;
            degree[c] += 1;
            EuclidPoint ea = to_euclid(a), ec = to_euclid(c);
            double lo_x = std::min(ea.x, ec.x) - cell, hi_x = std::max(ea.x, ec.x) + cell;
            double lo_y = std::min(ea.y, ec.y) - cell, hi_y = std::max(ea.y, ec.y) + cell;
            for (long long gx = static_cast<long long>(std::floor(lo_x / cell));
                 gx <= static_cast<long long>(std::floor(hi_x / cell)); ++gx) {
                for (long long gy = static_cast<long long>(std::floor(lo_y / cell));
                     gy <= static_cast<long long>(std::floor(hi_y / cell)); ++gy) {
                    auto it = grid.find(gx * 1000003LL + gy);
                    if (it == grid.end()) continue;
                    for (std::size_t vi : it->second) {
                        const RatPoint& p = verts[vi];
                        if (p == a || p == c) continue;
                        if (on_open_segment(p, a, c)) degree[p] += 2;
                    }
                }
            }
        }
    }
    for (const auto& [p, d] : degree) report.max_degree = std::max(report.max_degree, d);
    return report;
}

std::vector<Rat> oscillation_decay_sq(const CollapseStage& stage) {
    mark_op("collapse.oscillation_decay");
    std::vector<Rat> maxima(static_cast<std::size_t>(stage.level_max) + 1, Rat(0));
    for (const auto& t : stage.tripods) {
        std::size_t lvl = static_cast<std::size_t>(t.w.level());
        maxima[lvl] = rat_max(maxima[lvl], t.tripod.osc_sq());
    }
    return maxima;
}

MapRecurrenceSweep map_recurrence_sweep(const CollapseStage& stage, int samples, uint64_t seed) {
    MapRecurrenceSweep sweep;
    std::vector<VAddress> words;
    VAddress rotating;
    for (int i = 0; i < stage.level_max; ++i)
        rotating.path.push_back(static_cast<uint8_t>(i % 3));
    words.push_back(rotating);
    for (int s = 0; s + 1 < samples; ++s) {
        Rng rng = Rng::stream(seed, static_cast<uint64_t>(s));
        VAddress v;
        for (int i = 0; i < stage.level_max; ++i)
            v.path.push_back(static_cast<uint8_t>(rng.below(3)));
        words.push_back(v);
    }

    for (const auto& word : words) {
        int n_max = std::min(stage.level_max, word.level() + 1);
        if (n_max < 4) continue;
        gasket::NestedData nd = gasket::nested_sequence(word, n_max);
        for (std::size_t si = 2; si < nd.steps.size(); ++si) {
            const auto& cur = nd.steps[si];
            const auto& prev = nd.steps[si - 1];
            if (cur.a.is_level0() || cur.b.is_level0()) continue;
            if (cur.a == prev.a || cur.b == prev.b) continue;  // not a case-3 step
            if (!gasket::check_half_edge_order(nd, cur.n)) continue;
            const TripodEntry* tn = stage.find_tripod(cur.w);
            const TripodEntry* tp = stage.find_tripod(prev.w);
            const TripodEntry* ta = stage.find_tripod(cur.a);
            const TripodEntry* tb = stage.find_tripod(cur.b);
            if (!tn || !tp || !ta || !tb) continue;
            Rat parent_sq =
                rat_max(tp->tripod.osc_sq(), rat_max(ta->tripod.osc_sq(), tb->tripod.osc_sq()));
            ++sweep.steps_checked;
            if (tn->tripod.osc_sq() * 81 > parent_sq * 49) ++sweep.violations;
        }
    }
    return sweep;
}

bool check_anchor_certificates(const CollapseStage& stage) {
    for (const auto& t : stage.tripods) {
        Rat h2_4 = t.h * t.h * 4;  // (2h)^2
        for (int s = 0; s < 3; ++s) {
            Rat len_sq = t.tripod.len2(s);
            if (t.h * t.h * 36 > len_sq) return false;  // 2h <= spoke/3
            Rat cells = Rat(t.spokes[static_cast<std::size_t>(s)].n) + 1;
            if (len_sq > h2_4 * cells * cells) return false;  // cell <= 2h
        }
    }
    return true;
}

bool check_boundary_monotone(const CollapseStage& stage) {
    for (std::size_t ti = 0; ti < std::min<std::size_t>(stage.tripods.size(), 64); ++ti) {
        const auto& entry = stage.tripods[ti];
        for (int s = 0; s < 3; ++s) {
            const AnchorSchedule& sched = entry.spokes[static_cast<std::size_t>(s)];
            Rat prev = sched.fraction(make_rat(1, 2));
            if (prev != 0) return false;
            for (int k = 2; k <= 12; ++k) {
                Rat t = make_rat(1, 1 << k);
                Rat cur = sched.fraction(t);
                if (!(cur > prev)) return false;
                prev = cur;
            }
            if (!(sched.fraction(Rat(0)) == 1)) return false;
        }
    }
    return true;
}

}  // namespace collapse
}  // namespace gasketlab
