#include "gasketlab/phi.hpp"
#include "gasketlab/report.hpp"

#include "gasketlab/rng.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace gasketlab {
namespace phi {

using collapse::TripodEntry;
using gasket::VAddress;
using gasket::VFrame;
using gasket::WAddress;

PhiStage build_phi(int level, const collapse::HeightPolicy& policy) {
    mark_op("phi.build_phi");
    PhiStage stage;
    stage.level = level;
    stage.cstage = collapse::build_collapse(level, policy);
    stage.folds.reserve(stage.cstage.tripods.size());
    for (const auto& entry : stage.cstage.tripods) {
        std::array<RatPoint, 3> wv = gasket::w_vertices(entry.w);
        stage.folds.push_back(fold::assemble_fold(wv, entry.tripod, entry.h * entry.h));
    }
    return stage;
}

namespace {

bool in_closed_tri(const RatPoint& x, const std::array<RatPoint, 3>& p) {
    int o1 = orient(p[0], p[1], x), o2 = orient(p[1], p[2], x), o3 = orient(p[2], p[0], x);
    return (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0);
}

}  // namespace

Image PhiStage::evaluate(const RatPoint& p) const {
    auto root = gasket::root_vertices();
    if (!in_closed_tri(p, root)) {
        Image img;
        img.kind = Image::Kind::PlaneIdentity;
        img.plane = p;
        return img;
    }
    // Boundary of the root is fixed pointwise.
    for (int e = 0; e < 3; ++e) {
        if (on_segment(p, root[static_cast<std::size_t>((e + 1) % 3)],
                       root[static_cast<std::size_t>((e + 2) % 3)])) {
            Image img;
            img.kind = Image::Kind::PlaneIdentity;
            img.plane = p;
            return img;
        }
    }
    VFrame f = VFrame::root();
    for (int lvl = 1; lvl <= level; ++lvl) {
        auto m = f.w_mid();
        if (in_closed_tri(p, m)) {
            WAddress w = WAddress::central_of(f.va);
            auto it = cstage.tripod_index.find(w.str());
            if (it == cstage.tripod_index.end()) break;
            int idx = static_cast<int>(it->second);
            fold::ChartImage ci = folds[static_cast<std::size_t>(idx)].map_point(p);
            Image img;
            img.kind = Image::Kind::Chart;
            img.tripod = idx;
            img.spoke = ci.spoke;
            img.face = ci.face;
            img.s = ci.s;
            img.t = ci.t;
            return img;
        }
        int child = -1;
        for (int i = 0; i < 3 && child < 0; ++i) {
            std::array<RatPoint, 3> q{f.p[static_cast<std::size_t>(i)],
                                      midpoint(f.p[static_cast<std::size_t>(i)],
                                               f.p[static_cast<std::size_t>((i + 1) % 3)]),
                                      midpoint(f.p[static_cast<std::size_t>(i)],
                                               f.p[static_cast<std::size_t>((i + 2) % 3)])};
            if (in_closed_tri(p, q)) child = i;
        }
        if (child < 0) throw std::logic_error("phi evaluate: descent failed");
        f = f.descend(static_cast<uint8_t>(child));
    }
    Image img;
    img.kind = Image::Kind::Region;
    img.region = f.va;
    return img;
}

namespace {

/// CCW sector of direction d among the three spoke directions of t; returns
/// the unordered pair of spokes bounding the sector, as (lo, hi). With three
/// spokes every unordered pair bounds exactly one sector, which also matches
/// the kite adjacency of the fold source.
std::pair<int, int> sector_pair_of(const collapse::Tripod& t, const RatPoint& d) {
    std::array<RatPoint, 3> dir;
    for (int k = 0; k < 3; ++k) dir[static_cast<std::size_t>(k)] = t.c[static_cast<std::size_t>(k)] - t.a;
    auto angle_class = [](const RatPoint& v) {
        int sb = sign(v.b);
        if (sb > 0) return 1;
        if (sb < 0) return 3;
        return sign(v.a) > 0 ? 0 : 2;
    };
    auto angle_less = [&](const RatPoint& u, const RatPoint& v) {
        int cu = angle_class(u), cv = angle_class(v);
        if (cu != cv) return cu < cv;
        return sign(cross(u, v)) > 0;
    };
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return angle_less(dir[static_cast<std::size_t>(i)], dir[static_cast<std::size_t>(j)]);
    });
    // find the sector [dir_order[i], dir_order[i+1]) containing d
    for (int i = 0; i < 3; ++i) {
        int a = order[static_cast<std::size_t>(i)];
        int b = order[static_cast<std::size_t>((i + 1) % 3)];
        const RatPoint& lo = dir[static_cast<std::size_t>(a)];
        const RatPoint& hi = dir[static_cast<std::size_t>(b)];
        bool ge_lo = !angle_less(d, lo);
        bool lt_hi = angle_less(d, hi);
        bool in_sector = (i + 1 < 3) ? (ge_lo && lt_hi) : (ge_lo || lt_hi);
        if (in_sector) return {std::min(a, b), std::max(a, b)};
    }
    return {std::min(order[0], order[1]), std::max(order[0], order[1])};
}

}  // namespace

std::string PhiStage::canonical_key(const Image& img) const {
    switch (img.kind) {
        case Image::Kind::PlaneIdentity:
            return "P:" + img.plane.a.get_str() + "," + img.plane.b.get_str();
        case Image::Kind::Region:
            return "R:" + img.region.str();
        case Image::Kind::Chart:
            break;
    }
    int tripod = img.tripod;
    int spoke = img.spoke;
    int face = img.face;
    Rat s = img.s, t = img.t;

    // Recursively resolve tip-corner contacts down to the oldest host chart.
    while (s == 1 && sgn(t) == 0) {
        const TripodEntry& te = entry(tripod);
        const collapse::TipRef& ref = te.tips[static_cast<std::size_t>(spoke)];
        if (ref.host.is_level0()) {
            auto [e0, e1] = gasket::w_edge(ref.host, ref.host_edge);
            RatPoint pos = lerp(e0, e1, ref.host_t);
            Image plane_img;
            plane_img.kind = Image::Kind::PlaneIdentity;
            plane_img.plane = pos;
            return canonical_key(plane_img);
        }
        auto it = cstage.tripod_index.find(ref.host.str());
        if (it == cstage.tripod_index.end()) throw std::logic_error("missing host tripod");
        int host_idx = static_cast<int>(it->second);
        const TripodEntry& host = entry(host_idx);
        // host edge parameter -> spoke and fraction
        int v1 = (ref.host_edge + 1) % 3, v2 = (ref.host_edge + 2) % 3;
        Rat half(1, 2);
        int host_spoke;
        Rat frac;
        if (ref.host_t <= half) {
            host_spoke = v1;
            frac = host.spokes[static_cast<std::size_t>(v1)].fraction(ref.host_t);
        } else {
            host_spoke = v2;
            frac = host.spokes[static_cast<std::size_t>(v2)].fraction(Rat(1) - ref.host_t);
        }
        if (sgn(frac) == 0) {
            // lands on the host center: pick the sector copy by the approach
            // direction of this tripod's center
            RatPoint approach = entry(tripod).tripod.a - host.tripod.a;
            auto [lo, hi] = sector_pair_of(host.tripod, approach);
            return "C:" + std::to_string(host_idx) + ":sec" + std::to_string(lo) +
                   std::to_string(hi);
        }
        if (frac == 1) {
            // the host's own tip: resolve again
            tripod = host_idx;
            spoke = host_spoke;
            s = 1;
            t = 0;
            continue;
        }
        // bank point on the host: side from the approach orientation
        const RatPoint& ha = host.tripod.a;
        const RatPoint& hc = host.tripod.c[static_cast<std::size_t>(host_spoke)];
        int side_sign = orient(ha, hc, entry(tripod).tripod.a);
        int side = side_sign > 0 ? 0 : 1;
        if (side_sign == 0) throw std::logic_error("degenerate contact approach");
        return "B:" + std::to_string(host_idx) + ":" + std::to_string(host_spoke) + ":" +
               std::to_string(side) + ":" + frac.get_str();
    }

    if (t == 1) {
        // pillow crest: shared by both faces
        return "T:" + std::to_string(tripod) + ":" + std::to_string(spoke) + ":" + s.get_str();
    }
    if (s == 1) {
        // tip vertical, shared by both faces
        return "V:" + std::to_string(tripod) + ":" + std::to_string(spoke) + ":" + t.get_str();
    }
    if (sgn(s) == 0) {
        // center lift shared between the kites of spokes spoke and other
        int other = (face == 0) ? (spoke + 1) % 3 : (spoke + 2) % 3;
        int lo = std::min(spoke, other), hi = std::max(spoke, other);
        if (sgn(t) == 0) {
            return "C:" + std::to_string(tripod) + ":sec" + std::to_string(lo) +
                   std::to_string(hi);
        }
        return "L:" + std::to_string(tripod) + ":" + std::to_string(lo) + std::to_string(hi) +
               ":" + t.get_str();
    }
    // interior or bank point of one face: the face pins the bank side
    // (face f of spoke i covers the half-edge toward vertex (i+1+f)%3)
    return "Q:" + std::to_string(tripod) + ":" + std::to_string(spoke) + ":" +
           std::to_string(face) + ":" + s.get_str() + ":" + t.get_str();
}

RatInterval PhiStage::flap_area(const Rat& scale) const {
    Rat lo(0), hi(0);
    for (const auto& te : cstage.tripods) {
        Rat sl(0), sh(0);
        for (int k = 0; k < 3; ++k) {
            RatInterval li = sqrt_interval(te.tripod.len2(k), 64);
            sl += li.lo;
            sh += li.hi;
        }
        lo += te.h * scale * 2 * sl;
        hi += te.h * scale * 2 * sh;
    }
    return {lo, hi};
}

RatInterval PhiStage::tripod_length() const {
    Rat lo(0), hi(0);
    for (const auto& te : cstage.tripods) {
        for (int k = 0; k < 3; ++k) {
            RatInterval li = sqrt_interval(te.tripod.len2(k), 64);
            lo += li.lo;
            hi += li.hi;
        }
    }
    return {lo, hi};
}

InjectivityReport injectivity_scan(const PhiStage& stage, long long n_samples, uint64_t seed,
                                   bool throw_on_collision) {
    mark_op("phi.injectivity_scan");
    InjectivityReport report;
    std::unordered_map<std::string, std::string> seen;  // canonical image -> source

    auto visit = [&](const RatPoint& src, const Image& img) {
        std::string key = stage.canonical_key(img);
        std::string src_key = src.a.get_str() + "," + src.b.get_str();
        auto [it, inserted] = seen.emplace(key, src_key);
        if (!inserted && it->second != src_key) {
            ++report.collisions;
            if (report.first_collision.empty())
                report.first_collision = key + " from " + it->second + " and " + src_key;
            if (throw_on_collision)
                throw CollisionFound("distinct points share the image " + key);
        }
    };

    // All exact w-triangle vertices at the build level.
    std::unordered_set<std::string> vertex_seen;
    for (const auto& e : gasket::enumerate_w(stage.level)) {
        for (const auto& v : e.vertices) {
            std::string sk = v.a.get_str() + "," + v.b.get_str();
            if (!vertex_seen.insert(sk).second) continue;
            ++report.vertex_points;
            visit(v, stage.evaluate(v));
        }
    }

    // Random dyadic samples inside built triangles (region hits are noted and
    // resampled since the finite-stage map is set-valued there).
    Rng rng(seed);
    const long long denom = 1LL << 28;
    long long accepted = 0;
    while (accepted < n_samples) {
        long long na = static_cast<long long>(rng.below(denom));
        long long nb = static_cast<long long>(rng.below(denom));
        Rat a(static_cast<long>(na));
        Rat b(static_cast<long>(nb));
        a /= Rat(static_cast<long>(denom));
        b /= Rat(static_cast<long>(denom));
        if (a + b > 1) continue;  // outside the root triangle
        RatPoint p(a, b);
        Image img = stage.evaluate(p);
        if (img.kind == Image::Kind::Region) {
            ++report.region_hits;
            continue;
        }
        ++accepted;
        ++report.samples;
        visit(p, img);
    }
    return report;
}

MeasureReport measure_blowup(const PhiStage& stage) {
    mark_op("phi.measure_blowup");
    MeasureReport report;
    report.planar_area_units = stage.cstage.level_area_units(stage.level);
    report.flap_area = stage.flap_area();
    report.tripod_length = stage.tripod_length();
    report.planar_area = to_double(report.planar_area_units);
    report.flap_area_mid = to_double(report.flap_area.mid());
    return report;
}

bool check_boundary_compatibility(const PhiStage& stage, int dyadic_depth) {
    for (std::size_t i = 0; i < stage.cstage.tripods.size(); ++i) {
        const TripodEntry& te = stage.cstage.tripods[i];
        const fold::FoldMap& fm = stage.folds[i];
        for (int k = 0; k < 3; ++k) {
            if (!(fm.cells[static_cast<std::size_t>(k)] ==
                  te.spokes[static_cast<std::size_t>(k)].n))
                return false;
        }
        // anchor traces agree on dyadic parameters of every edge
        if (i < 32) {
            for (int e = 0; e < 3; ++e) {
                for (int kk = 1; kk <= dyadic_depth; ++kk) {
                    Rat tau = make_rat(1, 1 << kk);
                    Rat frac_fold = fm.boundary_fraction(e, tau);
                    int v1 = (e + 1) % 3;
                    Rat frac_sched = te.spokes[static_cast<std::size_t>(v1)].fraction(tau);
                    if (frac_fold != frac_sched) return false;
                    // the collapse edge point equals the spoke point
                    RatPoint via_edge = stage.cstage.edge_point(te.w, e, tau);
                    RatPoint via_spoke = lerp(te.tripod.a,
                                              te.tripod.c[static_cast<std::size_t>(v1)],
                                              frac_sched);
                    if (!(via_edge == via_spoke)) return false;
                }
            }
        }
    }
    return true;
}

double max_piece_distortion(const PhiStage& stage) {
    Rat best(0);
    const fold::FoldMap* best_fold = nullptr;
    for (const auto& fm : stage.folds) {
        Rat mu2 = fm.max_mu2();
        if (mu2 > best) {
            best = mu2;
            best_fold = &fm;
        }
    }
    return best_fold ? best_fold->distortion_value() : 1.0;
}

bool check_modulus(const PhiStage& stage) {
    for (const auto& fm : stage.folds) {
        if (!fm.anchor_certificate()) return false;
    }
    return collapse::check_anchor_certificates(stage.cstage);
}

}  // namespace phi
}  // namespace gasketlab
