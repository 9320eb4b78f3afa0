#include "gasketlab/flapplane.hpp"
#include "gasketlab/report.hpp"

#include "gasketlab/parallel.hpp"
#include "gasketlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <unordered_map>

namespace gasketlab {
namespace flap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hyp(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

double dist_d(const EuclidPoint& p, const EuclidPoint& q) { return hyp(p.x - q.x, p.y - q.y); }

/// Exact-fallback orientation for double inputs (doubles are exact rationals).
int orient_d(const EuclidPoint& a, const EuclidPoint& b, const EuclidPoint& c) {
    double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double mag = std::abs(b.x - a.x) * std::abs(c.y - a.y) +
                 std::abs(b.y - a.y) * std::abs(c.x - a.x);
    if (std::abs(det) > 1e-12 * (1.0 + mag)) return det > 0 ? 1 : -1;
    // fall back to exact arithmetic on the binary values
    Rat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    Rat d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return sgn(d);
}

bool segments_cross_d(const EuclidPoint& a0, const EuclidPoint& a1, const EuclidPoint& b0,
                      const EuclidPoint& b1) {
    int o1 = orient_d(a0, a1, b0);
    int o2 = orient_d(a0, a1, b1);
    int o3 = orient_d(b0, b1, a0);
    int o4 = orient_d(b0, b1, a1);
    if (o1 != o2 && o3 != o4) return true;
    auto on = [](const EuclidPoint& p, const EuclidPoint& s0, const EuclidPoint& s1) {
        return std::min(s0.x, s1.x) - 1e-15 <= p.x && p.x <= std::max(s0.x, s1.x) + 1e-15 &&
               std::min(s0.y, s1.y) - 1e-15 <= p.y && p.y <= std::max(s0.y, s1.y) + 1e-15;
    };
    if (o1 == 0 && on(b0, a0, a1)) return true;
    if (o2 == 0 && on(b1, a0, a1)) return true;
    if (o3 == 0 && on(a0, b0, b1)) return true;
    if (o4 == 0 && on(a1, b0, b1)) return true;
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stage construction

double FlapPlaneStage::min_height() const {
    double m = 1e300;
    for (const auto& t : tripods) m = std::min(m, t.hd);
    return m;
}

EuclidPoint FlapPlaneStage::project_to_plane(const FlapPoint& p) const {
    if (p.chart == FlapPoint::Chart::Plane) return {p.x, p.y};
    const StageTripod& t = tripods[static_cast<std::size_t>(p.rect.tripod)];
    double frac = p.u / t.len[static_cast<std::size_t>(p.rect.spoke)];
    const EuclidPoint& a = t.a;
    const EuclidPoint& c = t.c[static_cast<std::size_t>(p.rect.spoke)];
    return {a.x + frac * (c.x - a.x), a.y + frac * (c.y - a.y)};
}

FlapPoint FlapPlaneStage::project(const FlapPoint& p, int l) const {
    mark_op("flap.project");
    if (p.chart == FlapPoint::Chart::Plane) return p;
    if (p.rect.tripod < l) return p;
    EuclidPoint e = project_to_plane(p);
    return FlapPoint::plane(e.x, e.y);
}

double FlapPlaneStage::flap_area(int tripod) const {
    const StageTripod& t = tripods[static_cast<std::size_t>(tripod)];
    return 2.0 * t.hd * (t.len[0] + t.len[1] + t.len[2]);
}

bool FlapPlaneStage::in_window(const EuclidPoint& p) const {
    return dist_d(p, window_center) <= window_radius;
}

namespace {

/// Counterclockwise successor ordering of the three spoke directions.
std::array<int, 3> ccw_order(const collapse::Tripod& t) {
    std::array<double, 3> ang;
    for (int k = 0; k < 3; ++k) {
        EuclidPoint a = to_euclid(t.a);
        EuclidPoint c = to_euclid(t.c[static_cast<std::size_t>(k)]);
        ang[static_cast<std::size_t>(k)] = std::atan2(c.y - a.y, c.x - a.x);
    }
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&ang](int i, int j) {
        return ang[static_cast<std::size_t>(i)] < ang[static_cast<std::size_t>(j)];
    });
    std::array<int, 3> next{};
    for (int p = 0; p < 3; ++p) {
        next[static_cast<std::size_t>(idx[static_cast<std::size_t>(p)])] =
            idx[static_cast<std::size_t>((p + 1) % 3)];
    }
    return next;
}

}  // namespace

FlapPlaneStage build_stage(const std::vector<collapse::TripodEntry>& family, int n,
                           const std::vector<Rat>& heights) {
    mark_op("flap.build_stage");
    if (n < 1 || n > static_cast<int>(family.size()) ||
        n > static_cast<int>(heights.size()))
        throw std::invalid_argument("build_stage: bad prefix length");

    FlapPlaneStage stage;
    for (int i = 0; i < n; ++i) {
        const collapse::Tripod& g = family[static_cast<std::size_t>(i)].tripod;
        const Rat& h = heights[static_cast<std::size_t>(i)];
        if (sgn(h) <= 0) throw HeightWidthViolation("height must be positive");
        if (h * h * 36 > g.min_len2())
            throw HeightWidthViolation("height exceeds min spoke length / 6");
        StageTripod st;
        st.shape = g;
        st.h = h;
        st.hd = to_double(h);
        st.a = to_euclid(g.a);
        for (int k = 0; k < 3; ++k) {
            st.c[static_cast<std::size_t>(k)] = to_euclid(g.c[static_cast<std::size_t>(k)]);
            RatInterval li = sqrt_interval(g.len2(k), 64);
            st.len[static_cast<std::size_t>(k)] = to_double(li.mid());
        }
        st.ccw_next = ccw_order(g);
        stage.tripods.push_back(st);
    }

    // Exact pairwise property (G) and contact extraction.
    for (int i = 0; i < n; ++i) {
        const collapse::Tripod& gi = stage.tripods[static_cast<std::size_t>(i)].shape;
        for (int j = 0; j < i; ++j) {
            const collapse::Tripod& gj = stage.tripods[static_cast<std::size_t>(j)].shape;
            std::vector<RatPoint> pts;
            for (int ei = 0; ei < 3; ++ei) {
                for (int ej = 0; ej < 3; ++ej) {
                    auto inter = segment_intersection_points(
                        gi.a, gi.c[static_cast<std::size_t>(ei)], gj.a,
                        gj.c[static_cast<std::size_t>(ej)]);
                    for (auto& p : inter) {
                        if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
                    }
                }
            }
            if (pts.empty()) continue;
            if (pts.size() > 1) throw PropertyGViolation("tripods share more than one point");
            const RatPoint& p = pts[0];
            int tip_i = -1, tip_j = -1;
            for (int k = 0; k < 3; ++k) {
                if (p == gi.c[static_cast<std::size_t>(k)]) tip_i = k;
                if (p == gj.c[static_cast<std::size_t>(k)]) tip_j = k;
            }
            if (tip_i < 0 && tip_j < 0)
                throw PropertyGViolation("contact is not a tip of either tripod");
            // Record the later tripod's tip on the earlier tripod.
            Contact contact;
            contact.tripod = i;
            if (tip_i < 0) {
                // the earlier tripod's tip sits on the later one's spoke; the
                // gasket families never produce this, treat as violation
                throw PropertyGViolation("earlier tip rests on a later spoke");
            }
            contact.spoke = tip_i;
            contact.host = j;
            contact.at_host_tip = (tip_j >= 0);
            if (p == gj.a) contact.at_host_center = true;
            if (contact.at_host_tip) {
                contact.host_spoke = tip_j;
                contact.host_u =
                    stage.tripods[static_cast<std::size_t>(j)].len[static_cast<std::size_t>(tip_j)];
                contact.host_side = 0;
            } else if (!contact.at_host_center) {
                for (int k = 0; k < 3; ++k) {
                    if (on_segment(p, gj.a, gj.c[static_cast<std::size_t>(k)])) {
                        contact.host_spoke = k;
                        Rat t = segment_param(p, gj.a, gj.c[static_cast<std::size_t>(k)]);
                        contact.host_u =
                            to_double(t) *
                            stage.tripods[static_cast<std::size_t>(j)].len[static_cast<std::size_t>(k)];
                        int side = orient(gj.a, gj.c[static_cast<std::size_t>(k)], gi.a);
                        if (side == 0)
                            throw PropertyGViolation("incoming spoke collinear with host");
                        contact.host_side = side > 0 ? 0 : 1;
                        break;
                    }
                }
            }
            stage.contacts.push_back(contact);
        }
    }
    return stage;
}

// ---------------------------------------------------------------------------
// Height schedule

namespace {

struct AreaInterval {
    Rat lo, hi;
};

AreaInterval flap_area_interval(const collapse::Tripod& t, const Rat& h) {
    Rat lo(0), hi(0);
    for (int k = 0; k < 3; ++k) {
        RatInterval li = sqrt_interval(t.len2(k), 64);
        lo += li.lo;
        hi += li.hi;
    }
    return {h * 2 * lo, h * 2 * hi};
}

}  // namespace

std::vector<ScheduleEntry> height_schedule(const std::vector<collapse::TripodEntry>& family,
                                           int n) {
    mark_op("flap.height_schedule");
    std::vector<ScheduleEntry> out;
    std::vector<collapse::Tripod> prev;
    Rat prev_area_lo(0);
    for (int i = 0; i < n; ++i) {
        const collapse::Tripod& t = family[static_cast<std::size_t>(i)].tripod;
        ScheduleEntry entry;
        // (i) width / fold constraint
        Rat h = collapse::default_height(t);

        if (!prev.empty()) {
            // separation of the new spokes from the earlier tripods; spokes are
            // split at earlier-tripod vertices lying in their interiors
            Rat sep(-1);
            for (int s = 0; s < 3; ++s) {
                RatPoint a = t.a;
                RatPoint c = t.c[static_cast<std::size_t>(s)];
                std::vector<RatPoint> cuts{a, c};
                for (const auto& old_t : prev) {
                    std::vector<RatPoint> old_verts{old_t.a, old_t.c[0], old_t.c[1], old_t.c[2]};
                    for (const auto& v : old_verts) {
                        if (on_open_segment(v, a, c)) cuts.push_back(v);
                    }
                }
                std::sort(cuts.begin(), cuts.end(), [&a](const RatPoint& p, const RatPoint& q) {
                    return dist2(a, p) < dist2(a, q);
                });
                for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
                    const RatPoint& p0 = cuts[piece];
                    const RatPoint& p1 = cuts[piece + 1];
                    for (const auto& old_t : prev) {
                        // skip incident pairs: the sub-edge touches this tripod
                        bool incident = false;
                        for (int k = 0; k < 3; ++k) {
                            if (segments_intersect(p0, p1, old_t.a,
                                                   old_t.c[static_cast<std::size_t>(k)])) {
                                incident = true;
                                break;
                            }
                        }
                        if (incident) continue;
                        Rat d(-1);
                        for (int k = 0; k < 3; ++k) {
                            Rat dk = segment_segment_dist2(p0, p1, old_t.a,
                                                           old_t.c[static_cast<std::size_t>(k)]);
                            if (d < 0 || dk < d) d = dk;
                        }
                        if (sep < 0 || d < sep) sep = d;
                    }
                }
            }
            if (sep == 0) throw DegenerateSeparation("zero partitioned-edge separation");
            if (sep > 0) {
                entry.sep_sq = sep;
                // (iii) flap area <= sep^2 / 4 and (iv) h < sep / (12 m^2)
                Rat m2 = Rat(i + 1) * Rat(i + 1);
                while (true) {
                    AreaInterval ai = flap_area_interval(t, h);
                    bool ok_iii = (ai.hi <= sep / 4);
                    bool ok_iv = (h * h * 144 * m2 * m2 < sep);
                    if (ok_iii && ok_iv) break;
                    h /= 2;
                }
            }
            // (ii) geometric decay against the previous tripod's flap area
            while (true) {
                AreaInterval ai = flap_area_interval(t, h);
                if (ai.hi * 2 <= prev_area_lo) break;
                h /= 2;
            }
        }
        entry.h = h;
        AreaInterval ai = flap_area_interval(t, h);
        entry.area_bound = to_double(ai.hi);
        prev_area_lo = ai.lo;
        prev.push_back(t);
        out.push_back(entry);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Oracle graph

namespace {

int rect_key(int tripod, int spoke, int side) { return tripod * 6 + spoke * 2 + side; }

}  // namespace

struct OracleBuilder {
    DistanceOracle& o;
    const FlapPlaneStage& stage;
    double eps;
    std::vector<int> uf;

    int find(int a) {
        while (uf[static_cast<std::size_t>(a)] != a) {
            uf[static_cast<std::size_t>(a)] =
                uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(a)])];
            a = uf[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) uf[static_cast<std::size_t>(b)] = a;
    }

    // node grids per rect: u index, v index -> node id
    struct RectGrid {
        std::vector<double> us;
        std::vector<double> vs;
        std::vector<int> ids;  // us.size() * vs.size()
        int at(std::size_t ui, std::size_t vi) const { return ids[vi * us.size() + ui]; }
    };
    std::vector<RectGrid> grids;

    void build();
};

void OracleBuilder::build() {
    const int nt = stage.size();
    auto& nodes = o.nodes_;

    // --- plane grid over the tripod bounding box, padded ---
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const auto& t : stage.tripods) {
        for (int k = 0; k < 3; ++k) {
            lo_x = std::min({lo_x, t.a.x, t.c[static_cast<std::size_t>(k)].x});
            lo_y = std::min({lo_y, t.a.y, t.c[static_cast<std::size_t>(k)].y});
            hi_x = std::max({hi_x, t.a.x, t.c[static_cast<std::size_t>(k)].x});
            hi_y = std::max({hi_y, t.a.y, t.c[static_cast<std::size_t>(k)].y});
        }
    }
    double pad = 0.35;
    lo_x -= pad;
    lo_y -= pad;
    hi_x += pad;
    hi_y += pad;

    auto on_any_slit = [&](const EuclidPoint& p) {
        for (const auto& t : stage.tripods) {
            for (int k = 0; k < 3; ++k) {
                const EuclidPoint& a = t.a;
                const EuclidPoint& c = t.c[static_cast<std::size_t>(k)];
                double len = t.len[static_cast<std::size_t>(k)];
                double cross = (c.x - a.x) * (p.y - a.y) - (c.y - a.y) * (p.x - a.x);
                if (std::abs(cross) > 1e-9 * len) continue;
                double dot = (c.x - a.x) * (p.x - a.x) + (c.y - a.y) * (p.y - a.y);
                if (dot >= -1e-12 && dot <= len * len + 1e-12) return true;
            }
        }
        return false;
    };

    for (double x = lo_x; x <= hi_x + 1e-12; x += eps) {
        for (double y = lo_y; y <= hi_y + 1e-12; y += eps) {
            EuclidPoint p{x, y};
            if (!stage.in_window(p)) continue;
            if (on_any_slit(p)) continue;
            nodes.push_back({FlapPoint::plane(x, y), p, -1});
        }
    }
    const int plane_count = static_cast<int>(nodes.size());

    // --- rectangle grids ---
    grids.resize(static_cast<std::size_t>(nt * 6));
    for (int t = 0; t < nt; ++t) {
        const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            double len = st.len[static_cast<std::size_t>(k)];
            double h = st.hd;
            int nu = std::max(2, static_cast<int>(std::ceil(len / eps)));
            int nv = std::max(1, static_cast<int>(std::ceil(h / eps)));
            nu = std::min(nu, 48);
            nv = std::min(nv, 12);
            std::vector<double> us, vs;
            for (int i = 0; i <= nu; ++i) us.push_back(len * i / nu);
            for (int i = 0; i <= nv; ++i) vs.push_back(h * i / nv);
            for (int side = 0; side < 2; ++side) {
                RectGrid grid;
                grid.us = us;
                grid.vs = vs;
                for (double v : vs) {
                    for (double u : us) {
                        RectId id{t, k, side};
                        FlapPoint fp = FlapPoint::on_rect(id, u, v);
                        EuclidPoint pos = stage.project_to_plane(fp);
                        grid.ids.push_back(static_cast<int>(nodes.size()));
                        nodes.push_back({fp, pos, rect_key(t, k, side)});
                    }
                }
                grids[static_cast<std::size_t>(rect_key(t, k, side))] = std::move(grid);
            }
        }
    }

    // --- contact nodes on host banks ---
    std::vector<int> contact_nodes;
    for (const auto& contact : stage.contacts) {
        if (contact.at_host_center || contact.at_host_tip) {
            contact_nodes.push_back(-1);
            continue;
        }
        RectId id{contact.host, contact.host_spoke, contact.host_side};
        FlapPoint fp = FlapPoint::on_rect(id, contact.host_u, 0.0);
        contact_nodes.push_back(static_cast<int>(nodes.size()));
        nodes.push_back({fp, stage.project_to_plane(fp), rect_key(contact.host,
                                                                  contact.host_spoke,
                                                                  contact.host_side)});
    }

    // --- identifications ---
    uf.resize(nodes.size());
    for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);

    auto grid_of = [&](int t, int k, int s) -> RectGrid& {
        return grids[static_cast<std::size_t>(rect_key(t, k, s))];
    };
    for (int t = 0; t < nt; ++t) {
        const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            RectGrid& g0 = grid_of(t, k, 0);
            RectGrid& g1 = grid_of(t, k, 1);
            std::size_t last_v = g0.vs.size() - 1;
            std::size_t last_u = g0.us.size() - 1;
            // top edges
            for (std::size_t ui = 0; ui < g0.us.size(); ++ui)
                unite(g0.at(ui, last_v), g1.at(ui, last_v));
            // tip verticals
            for (std::size_t vi = 0; vi < g0.vs.size(); ++vi)
                unite(g0.at(last_u, vi), g1.at(last_u, vi));
            // center lifts: left bank of spoke k pairs with right bank of the
            // counterclockwise successor
            int kn = st.ccw_next[static_cast<std::size_t>(k)];
            RectGrid& gn = grid_of(t, kn, 1);
            for (std::size_t vi = 0; vi < g0.vs.size() && vi < gn.vs.size(); ++vi)
                unite(g0.at(0, vi), gn.at(0, vi));
        }
    }
    // contact identifications: the later tripod's tip corner meets the host
    for (std::size_t ci = 0; ci < stage.contacts.size(); ++ci) {
        const Contact& contact = stage.contacts[ci];
        RectGrid& gt = grid_of(contact.tripod, contact.spoke, 0);
        int tip_node = gt.at(gt.us.size() - 1, 0);
        int host_node = -1;
        if (contact.at_host_tip) {
            RectGrid& gh = grid_of(contact.host, contact.host_spoke, 0);
            host_node = gh.at(gh.us.size() - 1, 0);
        } else if (contact.at_host_center) {
            // the sector copy whose banks face the incoming spoke: pick the
            // side-0 corner of the host spoke bounding that sector
            const StageTripod& ht = stage.tripods[static_cast<std::size_t>(contact.host)];
            EuclidPoint dir = stage.tripods[static_cast<std::size_t>(contact.tripod)].a;
            EuclidPoint ap = ht.a;
            double best = -2.0;
            int best_k = 0;
            for (int k = 0; k < 3; ++k) {
                // sector between spoke k (left side) and ccw_next(k) (right side)
                const EuclidPoint& ck = ht.c[static_cast<std::size_t>(k)];
                double cr = (ck.x - ap.x) * (dir.y - ap.y) - (ck.y - ap.y) * (dir.x - ap.x);
                double dt = (ck.x - ap.x) * (dir.x - ap.x) + (ck.y - ap.y) * (dir.y - ap.y);
                double score = std::atan2(cr, dt);
                if (score >= 0 && (best < 0 || score < best)) {
                    best = score;
                    best_k = k;
                }
            }
            RectGrid& gh = grid_of(contact.host, best_k, 0);
            host_node = gh.at(0, 0);
        } else {
            host_node = contact_nodes[ci];
        }
        if (host_node >= 0) unite(tip_node, host_node);
    }

    // --- edges ---
    o.adj_.assign(nodes.size(), {});
    auto add_edge = [&](int a, int b, double w) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        o.adj_[static_cast<std::size_t>(a)].push_back({b, static_cast<float>(w)});
        o.adj_[static_cast<std::size_t>(b)].push_back({a, static_cast<float>(w)});
    };

    // intra-rect complete graphs
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            for (int s = 0; s < 2; ++s) {
                RectGrid& g = grid_of(t, k, s);
                for (std::size_t i = 0; i < g.ids.size(); ++i) {
                    for (std::size_t j = i + 1; j < g.ids.size(); ++j) {
                        const auto& ni = nodes[static_cast<std::size_t>(g.ids[i])].pt;
                        const auto& nj = nodes[static_cast<std::size_t>(g.ids[j])].pt;
                        add_edge(g.ids[i], g.ids[j], hyp(ni.u - nj.u, ni.v - nj.v));
                    }
                }
            }
        }
    }
    // contact nodes join their host rect completely
    for (std::size_t ci = 0; ci < stage.contacts.size(); ++ci) {
        int cn = contact_nodes[ci];
        if (cn < 0) continue;
        const Contact& contact = stage.contacts[ci];
        RectGrid& g = grid_of(contact.host, contact.host_spoke, contact.host_side);
        const auto& np = nodes[static_cast<std::size_t>(cn)].pt;
        for (int id : g.ids) {
            const auto& nq = nodes[static_cast<std::size_t>(id)].pt;
            add_edge(cn, id, hyp(np.u - nq.u, np.v - nq.v));
        }
    }

    // plane visibility edges within a hop radius; bucket by cells of size eps
    std::unordered_map<long long, std::vector<int>> buckets;
    auto bkey = [this](double x, double y) {
        long long gx = static_cast<long long>(std::floor(x / eps));
        long long gy = static_cast<long long>(std::floor(y / eps));
        return gx * 2000003LL + gy;
    };
    for (int i = 0; i < plane_count; ++i)
        buckets[bkey(nodes[static_cast<std::size_t>(i)].pos.x,
                     nodes[static_cast<std::size_t>(i)].pos.y)]
            .push_back(i);

    // Hop radius independent of eps over the working range, so refined nets
    // contain the coarse graph and upper bounds are monotone under refinement.
    const double rho = std::max(0.2, 2.2 * eps);
    for (int i = 0; i < plane_count; ++i) {
        const EuclidPoint& pi = nodes[static_cast<std::size_t>(i)].pos;
        for (long long gx = static_cast<long long>(std::floor((pi.x - rho) / eps));
             gx <= static_cast<long long>(std::floor((pi.x + rho) / eps)); ++gx) {
            for (long long gy = static_cast<long long>(std::floor((pi.y - rho) / eps));
                 gy <= static_cast<long long>(std::floor((pi.y + rho) / eps)); ++gy) {
                auto it = buckets.find(gx * 2000003LL + gy);
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    if (j <= i) continue;
                    const EuclidPoint& pj = nodes[static_cast<std::size_t>(j)].pos;
                    double d = dist_d(pi, pj);
                    if (d > rho) continue;
                    if (o.plane_visible(pi, pj)) add_edge(i, j, d);
                }
            }
        }
    }

    // plane <-> bank edges: bank nodes are rect nodes with v = 0
    for (std::size_t ni = static_cast<std::size_t>(plane_count); ni < nodes.size(); ++ni) {
        const auto& node = nodes[ni];
        if (node.pt.chart != FlapPoint::Chart::Rect || node.pt.v != 0.0) continue;
        const RectId& id = node.pt.rect;
        const StageTripod& st = stage.tripods[static_cast<std::size_t>(id.tripod)];
        const EuclidPoint& a = st.a;
        const EuclidPoint& c = st.c[static_cast<std::size_t>(id.spoke)];
        bool is_corner = (node.pt.u <= 1e-15) ||
                         (node.pt.u >= st.len[static_cast<std::size_t>(id.spoke)] - 1e-15);
        for (long long gx = static_cast<long long>(std::floor((node.pos.x - rho) / eps));
             gx <= static_cast<long long>(std::floor((node.pos.x + rho) / eps)); ++gx) {
            for (long long gy = static_cast<long long>(std::floor((node.pos.y - rho) / eps));
                 gy <= static_cast<long long>(std::floor((node.pos.y + rho) / eps)); ++gy) {
                auto it = buckets.find(gx * 2000003LL + gy);
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    const EuclidPoint& pj = nodes[static_cast<std::size_t>(j)].pos;
                    double d = dist_d(node.pos, pj);
                    if (d > rho || d < 1e-15) continue;
                    if (!is_corner) {
                        int side = orient_d(a, c, pj);
                        if (side == 0) continue;
                        int side_idx = side > 0 ? 0 : 1;
                        if (side_idx != id.side) continue;
                    }
                    if (!o.plane_visible(node.pos, pj, id.tripod, id.spoke)) continue;
                    add_edge(static_cast<int>(ni), j, d);
                }
            }
        }
    }
}

DistanceOracle::DistanceOracle(const FlapPlaneStage& stage, double eps)
    : stage_(&stage), eps_(eps) {
    OracleBuilder builder{*this, stage, eps, {}, {}};
    builder.build();
    // Edges live on union-find roots; persist the resolution for queries.
    root_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        root_[i] = builder.find(static_cast<int>(i));
}

bool DistanceOracle::plane_visible(const EuclidPoint& p, const EuclidPoint& q, int skip_tripod,
                                   int skip_spoke) const {
    for (int t = 0; t < stage_->size(); ++t) {
        const StageTripod& st = stage_->tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            if (t == skip_tripod && k == skip_spoke) continue;
            if (segments_cross_d(p, q, st.a, st.c[static_cast<std::size_t>(k)])) return false;
        }
    }
    return true;
}

double DistanceOracle::projection_lower(const FlapPoint& x, const FlapPoint& y) const {
    return dist_d(stage_->project_to_plane(x), stage_->project_to_plane(y));
}

std::optional<double> DistanceOracle::lift_path_upper(const FlapPoint& x, const FlapPoint& y,
                                                      std::vector<FlapPoint>* path) const {
    EuclidPoint px = stage_->project_to_plane(x);
    EuclidPoint py = stage_->project_to_plane(y);
    double cost = dist_d(px, py);
    if (path) path->clear();
    if (path) path->push_back(x);

    auto host_of = [&](const FlapPoint& p) -> std::pair<int, int> {
        if (p.chart == FlapPoint::Chart::Rect) return {p.rect.tripod, p.rect.spoke};
        return {-1, -1};
    };
    auto [hx_t, hx_k] = host_of(x);
    auto [hy_t, hy_k] = host_of(y);
    if (x.chart == FlapPoint::Chart::Rect) {
        cost += x.v;
        if (path) path->push_back(FlapPoint::on_rect(x.rect, x.u, 0.0));
    }
    if (y.chart == FlapPoint::Chart::Rect) cost += y.v;

    struct Crossing {
        double tpar;
        int tripod;
        int spoke;
        double u;
        int side_in;
    };
    std::vector<Crossing> crossings;
    double seg_len = dist_d(px, py);
    bool same_rect = x.chart == FlapPoint::Chart::Rect && y.chart == FlapPoint::Chart::Rect &&
                     x.rect == y.rect;
    if (seg_len < 1e-15) {
        // Same projection. Distinct charts over one point sit on different
        // banks; no straight-path cost model applies, leave it to the net.
        if (!same_rect && !(x.chart == FlapPoint::Chart::Plane &&
                            y.chart == FlapPoint::Chart::Plane))
            return std::nullopt;
        if (path) path->push_back(y);
        return cost;
    }
    double dx = (py.x - px.x) / seg_len, dy = (py.y - px.y) / seg_len;

    // A rectangle endpoint projects onto its own slit; when the segment leaves
    // toward the far bank the path must first clear the host pillow.
    auto host_exit_cost = [&](const FlapPoint& q, const EuclidPoint& other) -> std::optional<double> {
        if (q.chart != FlapPoint::Chart::Rect) return 0.0;
        const StageTripod& st = stage_->tripods[static_cast<std::size_t>(q.rect.tripod)];
        const EuclidPoint& a = st.a;
        const EuclidPoint& c = st.c[static_cast<std::size_t>(q.rect.spoke)];
        int side = orient_d(a, c, other);
        if (side == 0) return std::nullopt;  // walk along the slit line: degenerate
        int side_idx = side > 0 ? 0 : 1;
        if (side_idx == q.rect.side) return 0.0;
        return 2.0 * st.hd;  // climb over the pillow at the descent point
    };
    {
        auto cx = host_exit_cost(x, py);
        auto cy = host_exit_cost(y, px);
        if (!cx || !cy) return std::nullopt;
        cost += *cx + *cy;
    }
    for (int t = 0; t < stage_->size(); ++t) {
        const StageTripod& st = stage_->tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            const EuclidPoint& a = st.a;
            const EuclidPoint& c = st.c[static_cast<std::size_t>(k)];
            double rx = c.x - a.x, ry = c.y - a.y;
            double den = dx * ry - dy * rx;
            if (std::abs(den) < 1e-14) {
                // parallel: collinear overlap is degenerate
                double cr = (px.x - a.x) * ry - (px.y - a.y) * rx;
                if (std::abs(cr) < 1e-14) return std::nullopt;
                continue;
            }
            double tpar = ((a.x - px.x) * ry - (a.y - px.y) * rx) / den;
            double spar = ((a.x - px.x) * dy - (a.y - px.y) * dx) / den;
            // spar in spoke units (fraction of the direction vector r)
            if (tpar <= 1e-12 || tpar >= seg_len - 1e-12) {
                // endpoint contact: if the segment endpoint is this host's bank
                // the descent already covers it; other touches are degenerate
                if (tpar > -1e-12 && tpar < 1e-12 && t == hx_t && k == hx_k) continue;
                if (tpar > seg_len - 1e-12 && tpar < seg_len + 1e-12 && t == hy_t && k == hy_k)
                    continue;
                if (tpar > -1e-9 && tpar < seg_len + 1e-9 && spar > -1e-9 && spar < 1 + 1e-9) {
                    if (spar > 1e-9 && spar < 1 - 1e-9) return std::nullopt;
                }
                continue;
            }
            if (spar < -1e-12 || spar > 1 + 1e-12) continue;
            if (spar < 1e-9) return std::nullopt;  // passes through the center copy
            if (spar > 1 - 1e-9) {
                // through the tip: allowed, detour over the tip vertical
                double len = st.len[static_cast<std::size_t>(k)];
                int side_in = (den > 0) ? 1 : 0;
                crossings.push_back({tpar, t, k, len, side_in});
                continue;
            }
            double len = st.len[static_cast<std::size_t>(k)];
            int side_in = (den > 0) ? 1 : 0;
            crossings.push_back({tpar, t, k, spar * len, side_in});
        }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.tpar < b.tpar; });
    for (const auto& cr : crossings) {
        double h = stage_->tripods[static_cast<std::size_t>(cr.tripod)].hd;
        cost += 2.0 * h;
        if (path) {
            RectId in{cr.tripod, cr.spoke, cr.side_in};
            RectId out{cr.tripod, cr.spoke, 1 - cr.side_in};
            path->push_back(FlapPoint::on_rect(in, cr.u, 0.0));
            path->push_back(FlapPoint::on_rect(in, cr.u, h));
            path->push_back(FlapPoint::on_rect(out, cr.u, h));
            path->push_back(FlapPoint::on_rect(out, cr.u, 0.0));
        }
    }
    if (path) {
        if (y.chart == FlapPoint::Chart::Rect)
            path->push_back(FlapPoint::on_rect(y.rect, y.u, 0.0));
        path->push_back(y);
    }
    return cost;
}

int DistanceOracle::attach_query(const FlapPoint& p,
                                 std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (!stage_->in_window(stage_->project_to_plane(p)))
        throw WindowExceeded("query point outside the window");
    if (p.chart == FlapPoint::Chart::Rect) {
        int key = rect_key(p.rect.tripod, p.rect.spoke, p.rect.side);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].chart != key) continue;
            const FlapPoint& q = nodes_[i].pt;
            out.push_back({root_[i], hyp(p.u - q.u, p.v - q.v)});
        }
        return static_cast<int>(out.size());
    }
    EuclidPoint pp{p.x, p.y};
    double rho = std::max(0.25, 3.2 * eps_);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        double d = dist_d(pp, node.pos);
        if (d > rho) continue;
        if (node.chart == -1) {
            if (plane_visible(pp, node.pos)) out.push_back({root_[i], d});
        } else if (node.pt.v == 0.0) {
            const RectId& id = node.pt.rect;
            const StageTripod& st = stage_->tripods[static_cast<std::size_t>(id.tripod)];
            double len = st.len[static_cast<std::size_t>(id.spoke)];
            bool corner = node.pt.u <= 1e-15 || node.pt.u >= len - 1e-15;
            if (!corner) {
                int side = orient_d(st.a, st.c[static_cast<std::size_t>(id.spoke)], pp);
                if (side == 0 || (side > 0 ? 0 : 1) != id.side) continue;
            }
            if (plane_visible(pp, node.pos, id.tripod, id.spoke))
                out.push_back({root_[i], d});
        }
    }
    return static_cast<int>(out.size());
}

std::vector<double> DistanceOracle::upper_bounds_from(const FlapPoint& x) const {
    std::vector<std::pair<int, double>> seeds;
    attach_query(x, seeds);
    std::vector<double> dist(nodes_.size(), 1e300);
    using QItem = std::pair<double, int>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
    for (auto& [id, w] : seeds) {
        if (w < dist[static_cast<std::size_t>(id)]) {
            dist[static_cast<std::size_t>(id)] = w;
            pq.push({w, id});
        }
    }
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)] + 1e-15) continue;
        for (const auto& [v, w] : adj_[static_cast<std::size_t>(u)]) {
            double nd = d + w;
            if (nd < dist[static_cast<std::size_t>(v)] - 1e-15) {
                dist[static_cast<std::size_t>(v)] = nd;
                pq.push({nd, v});
            }
        }
    }
    return dist;
}

DistanceCertificate DistanceOracle::distance(const FlapPoint& x, const FlapPoint& y) const {
    mark_op("flap.distance");
    DistanceCertificate cert;
    cert.lower = projection_lower(x, y);
    if (x.chart == FlapPoint::Chart::Rect && y.chart == FlapPoint::Chart::Rect &&
        x.rect == y.rect) {
        double d = hyp(x.u - y.u, x.v - y.v);
        cert.lower = d;
        cert.upper = d;
        cert.exact = true;
        cert.path = {x, y};
        return cert;
    }
    std::vector<FlapPoint> lift;
    auto lift_cost = lift_path_upper(x, y, &lift);
    double best = lift_cost ? *lift_cost : 1e300;
    if (lift_cost) cert.path = lift;

    // net route
    std::vector<double> from_x = upper_bounds_from(x);
    std::vector<std::pair<int, double>> y_seeds;
    attach_query(y, y_seeds);
    for (auto& [id, w] : y_seeds) {
        double cand = from_x[static_cast<std::size_t>(id)] + w;
        if (cand < best) {
            best = cand;
            cert.path.clear();  // net path detail omitted; cost retained
        }
    }
    cert.upper = best;
    if (cert.upper < cert.lower) cert.upper = cert.lower;  // floating safety
    return cert;
}

// ---------------------------------------------------------------------------
// Ball measure

MeasureInterval ball_measure(const DistanceOracle& oracle, const FlapPoint& x, double r,
                             int resolution) {
    mark_op("flap.ball_measure");
    const FlapPlaneStage& stage = oracle.stage();
    MeasureInterval mi;
    EuclidPoint px = stage.project_to_plane(x);

    bool near_pillow = false;
    for (int t = 0; t < stage.size(); ++t) {
        const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            // conservative distance from the ball to the spoke
            EuclidPoint a = st.a, c = st.c[static_cast<std::size_t>(k)];
            double t0 = ((px.x - a.x) * (c.x - a.x) + (px.y - a.y) * (c.y - a.y)) /
                        (st.len[static_cast<std::size_t>(k)] * st.len[static_cast<std::size_t>(k)]);
            t0 = std::clamp(t0, 0.0, 1.0);
            EuclidPoint q{a.x + t0 * (c.x - a.x), a.y + t0 * (c.y - a.y)};
            if (dist_d(px, q) <= r + st.hd * 2) near_pillow = true;
        }
    }
    std::vector<double> net_dist;
    if (near_pillow || x.chart == FlapPoint::Chart::Rect)
        net_dist = oracle.upper_bounds_from(x);

    auto ub_to_plane_point = [&](const EuclidPoint& c) -> double {
        double best = 1e300;
        if (x.chart == FlapPoint::Chart::Plane && oracle.plane_visible(px, c))
            best = dist_d(px, c);
        auto lift = oracle.lift_path_upper(x, FlapPoint::plane(c.x, c.y));
        if (lift) best = std::min(best, *lift);
        if (!net_dist.empty()) {
            const auto& nodes = oracle.nodes();
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (nodes[i].chart != -1) continue;
                double d = dist_d(nodes[i].pos, c);
                if (d > 3 * oracle.eps()) continue;
                double nd = net_dist[static_cast<std::size_t>(oracle.root(static_cast<int>(i)))];
                if (nd > 1e290) continue;
                if (oracle.plane_visible(nodes[i].pos, c)) best = std::min(best, nd + d);
            }
        }
        return best;
    };

    // --- planar part ---
    double delta = 2.0 * r / resolution;
    double cell_rad = delta * 0.70710678;
    for (double cx = px.x - r - delta; cx <= px.x + r + delta; cx += delta) {
        for (double cy = px.y - r - delta; cy <= px.y + r + delta; cy += delta) {
            EuclidPoint c{cx, cy};
            double proj_d = dist_d(px, c);
            if (proj_d - cell_rad > r) continue;  // certified out
            double area = delta * delta;
            // cells overlapping a slit are ambiguous by construction
            bool slit_near = false;
            for (int t = 0; t < stage.size() && !slit_near; ++t) {
                const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
                for (int k = 0; k < 3 && !slit_near; ++k) {
                    EuclidPoint a = st.a, cc = st.c[static_cast<std::size_t>(k)];
                    double ll = st.len[static_cast<std::size_t>(k)];
                    double tt = ((c.x - a.x) * (cc.x - a.x) + (c.y - a.y) * (cc.y - a.y)) /
                                (ll * ll);
                    tt = std::clamp(tt, 0.0, 1.0);
                    EuclidPoint q{a.x + tt * (cc.x - a.x), a.y + tt * (cc.y - a.y)};
                    if (dist_d(c, q) <= cell_rad) slit_near = true;
                }
            }
            double ub = ub_to_plane_point(c);
            if (!slit_near && ub + cell_rad <= r) {
                mi.lower += area;
                mi.upper += area;
                mi.plane_part += area;
            } else {
                mi.upper += area;  // ambiguous
            }
        }
    }

    // --- rectangle parts ---
    const auto& nodes = oracle.nodes();
    for (int t = 0; t < stage.size(); ++t) {
        const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            double len = st.len[static_cast<std::size_t>(k)];
            double h = st.hd;
            int nu = std::max(2, static_cast<int>(std::ceil(len / delta)));
            int nv = std::max(1, static_cast<int>(std::ceil(h / delta)));
            nu = std::min(nu, 64);
            nv = std::min(nv, 16);
            double du = len / nu, dv = h / nv;
            double crad = 0.5 * hyp(du, dv);
            for (int side = 0; side < 2; ++side) {
                RectId id{t, k, side};
                bool same_rect =
                    (x.chart == FlapPoint::Chart::Rect && x.rect == id);
                for (int ui = 0; ui < nu; ++ui) {
                    for (int vi = 0; vi < nv; ++vi) {
                        double uc = (ui + 0.5) * du, vc = (vi + 0.5) * dv;
                        FlapPoint cell = FlapPoint::on_rect(id, uc, vc);
                        EuclidPoint cpos = stage.project_to_plane(cell);
                        // projection lower bound for the whole cell
                        double lb = dist_d(px, cpos) - crad - h;
                        if (lb > r) continue;
                        double area = du * dv;
                        double ub = 1e300;
                        if (same_rect) {
                            ub = hyp(x.u - uc, x.v - vc);
                        } else {
                            auto lift = oracle.lift_path_upper(x, cell);
                            if (lift) ub = *lift;
                            if (!net_dist.empty()) {
                                int key = rect_key(t, k, side);
                                for (std::size_t nix = 0; nix < nodes.size(); ++nix) {
                                    if (nodes[nix].chart != key) continue;
                                    double nd = net_dist[static_cast<std::size_t>(
                                        oracle.root(static_cast<int>(nix)))];
                                    if (nd > 1e290) continue;
                                    const FlapPoint& np = nodes[nix].pt;
                                    ub = std::min(ub, nd + hyp(np.u - uc, np.v - vc));
                                }
                            }
                        }
                        if (ub + crad <= r) {
                            mi.lower += area;
                            mi.upper += area;
                            mi.rect_part += area;
                        } else {
                            mi.upper += area;
                        }
                    }
                }
            }
        }
    }
    return mi;
}

// ---------------------------------------------------------------------------
// LLC probe

namespace {

struct ClearanceTracker {
    EuclidPoint px;
    double min_clear = 1e300;

    void visit_projection(const EuclidPoint& p) {
        min_clear = std::min(min_clear, dist_d(px, p));
    }
    void visit_walk(double certified) { min_clear = std::min(min_clear, certified); }
};

}  // namespace

LlcReport llc_probe(const DistanceOracle& oracle, const FlapPoint& x, double r,
                    const FlapPoint& z, const FlapPoint& w) {
    mark_op("flap.llc_probe");
    const FlapPlaneStage& stage = oracle.stage();
    LlcReport report;
    report.case_id = (r >= 12.0 * stage.min_height()) ? 1 : 2;
    const double rc = r / 48.0;
    EuclidPoint px = stage.project_to_plane(x);

    ClearanceTracker tracker{px, 1e300};

    // Escape walk: from q to a point whose projection clears rc, certified by
    // d(x, p) >= d(x, q) - walked >= r - walked along the way.
    auto escape = [&](const FlapPoint& q,
                      std::vector<FlapPoint>& chain) -> std::optional<EuclidPoint> {
        EuclidPoint pq = stage.project_to_plane(q);
        chain.push_back(q);
        if (dist_d(px, pq) >= rc) {
            tracker.visit_projection(pq);
            if (q.chart == FlapPoint::Chart::Rect) {
                // descend on the projection certificate
                chain.push_back(FlapPoint::on_rect(q.rect, q.u, 0.0));
            }
            return pq;
        }
        if (q.chart == FlapPoint::Chart::Rect) {
            const StageTripod& st = stage.tripods[static_cast<std::size_t>(q.rect.tripod)];
            double len = st.len[static_cast<std::size_t>(q.rect.spoke)];
            // walk along u, keeping v, in the direction that exits the
            // projection footprint of B(px, rc) fastest
            for (double dir : {+1.0, -1.0}) {
                double walked = 0;
                double u = q.u;
                double step = std::min(rc / 8.0, len / 64.0);
                bool ok = false;
                std::vector<FlapPoint> local;
                while (u + dir * step >= 0 && u + dir * step <= len && walked <= 3.0 * rc) {
                    u += dir * step;
                    walked += step;
                    FlapPoint p = FlapPoint::on_rect(q.rect, u, q.v);
                    EuclidPoint pp = stage.project_to_plane(p);
                    tracker.visit_walk(r - walked);
                    local.push_back(p);
                    if (dist_d(px, pp) >= rc) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) continue;
                for (auto& p : local) chain.push_back(p);
                FlapPoint endp = local.back();
                EuclidPoint pe = stage.project_to_plane(endp);
                tracker.visit_projection(pe);
                chain.push_back(FlapPoint::on_rect(endp.rect, endp.u, 0.0));
                return pe;
            }
            return std::nullopt;
        }
        // planar point hiding under an elevated x: walk radially or parallel
        // to the blocking slit
        for (double rot : {0.0, kPi / 6, -kPi / 6, kPi / 3, -kPi / 3, kPi / 2}) {
            EuclidPoint away{pq.x - px.x, pq.y - px.y};
            double nn = hyp(away.x, away.y);
            if (nn < 1e-12) away = {1.0, 0.0}, nn = 1.0;
            away.x /= nn;
            away.y /= nn;
            double ca = std::cos(rot), sa = std::sin(rot);
            EuclidPoint dir{away.x * ca - away.y * sa, away.x * sa + away.y * ca};
            double need = rc - dist_d(px, pq) + rc;  // generous target
            EuclidPoint target{pq.x + dir.x * need, pq.y + dir.y * need};
            if (!oracle.plane_visible(pq, target)) continue;
            if (dist_d(px, target) < rc) continue;
            tracker.visit_walk(r - need);
            tracker.visit_projection(target);
            chain.push_back(FlapPoint::plane(target.x, target.y));
            return target;
        }
        return std::nullopt;
    };

    std::vector<FlapPoint> chain_z, chain_w;
    auto ez = escape(z, chain_z);
    auto ew = escape(w, chain_w);
    if (!ez || !ew) throw ProbeFailure("escape walk failed");

    // Connect the two escape endpoints outside B(px, rc) in the plane, then
    // lift; pillow climbs inherit the projection clearance of their base.
    std::vector<EuclidPoint> polyline;
    polyline.push_back(*ez);
    EuclidPoint pz = *ez, pw = *ew;
    double dz = dist_d(px, pz), dw = dist_d(px, pw);
    // does the straight segment dip into the disk?
    double t0 = ((px.x - pz.x) * (pw.x - pz.x) + (px.y - pz.y) * (pw.y - pz.y)) /
                std::max(dist_d(pz, pw) * dist_d(pz, pw), 1e-30);
    t0 = std::clamp(t0, 0.0, 1.0);
    EuclidPoint closest{pz.x + t0 * (pw.x - pz.x), pz.y + t0 * (pw.y - pz.y)};
    if (dist_d(px, closest) < rc) {
        // circumscribed polygon arc at radius rc (tangential clearance = rc)
        double az = std::atan2(pz.y - px.y, pz.x - px.x);
        double aw = std::atan2(pw.y - px.y, pw.x - px.x);
        double diff = aw - az;
        while (diff > kPi) diff -= 2 * kPi;
        while (diff < -kPi) diff += 2 * kPi;
        int segs = 48;
        double rad = rc / std::cos(std::abs(diff) / (2 * segs));
        for (int i = 0; i <= segs; ++i) {
            double ang = az + diff * i / segs;
            polyline.push_back({px.x + rad * std::cos(ang), px.y + rad * std::sin(ang)});
        }
    }
    polyline.push_back(pw);
    (void)dz;
    (void)dw;

    auto lifted = lift_path(stage, polyline);
    if (!lifted) throw ProbeFailure("connecting path failed to lift");
    for (const auto& p : *lifted) {
        tracker.visit_projection(stage.project_to_plane(p));
    }
    report.path = chain_z;
    report.path.insert(report.path.end(), lifted->begin(), lifted->end());
    report.path.insert(report.path.end(), chain_w.rbegin(), chain_w.rend());
    report.min_clearance = tracker.min_clear;
    if (report.min_clearance <= 0) throw ProbeFailure("negative certified clearance");
    report.c_achieved = r / report.min_clearance;
    return report;
}

// ---------------------------------------------------------------------------
// Gromov-Hausdorff finite-stage gaps

GhReport gh_distortion(const FlapPlaneStage& stage_m, int n, int pairs, uint64_t seed) {
    mark_op("flap.gh_distortion");
    GhReport report;
    int m = stage_m.size();
    if (n >= m) return report;
    // prefix stage (same tripods, fewer pillows)
    std::vector<collapse::TripodEntry> fam;
    std::vector<Rat> hs;
    for (int i = 0; i < n; ++i) {
        collapse::TripodEntry e;
        e.tripod = stage_m.tripods[static_cast<std::size_t>(i)].shape;
        fam.push_back(e);
        hs.push_back(stage_m.tripods[static_cast<std::size_t>(i)].h);
    }
    FlapPlaneStage stage_n = n > 0 ? build_stage(fam, n, hs) : FlapPlaneStage{};

    double tail = 0;
    for (int i = n; i < m; ++i) tail += 6.0 * stage_m.tripods[static_cast<std::size_t>(i)].hd;
    report.tail_bound = tail;

    DistanceOracle om(stage_m, 0.25);  // lift paths only need the stage; coarse net
    DistanceOracle on(stage_n, 0.25);

    Rng rng(seed);
    for (int it = 0; it < pairs; ++it) {
        // planar pairs in the action region
        FlapPoint a = FlapPoint::plane(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 1.0));
        FlapPoint b = FlapPoint::plane(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 1.0));
        auto um = om.lift_path_upper(a, b);
        auto un = on.lift_path_upper(stage_m.project(a, n), stage_m.project(b, n));
        if (!um || !un) continue;
        ++report.checked;
        double gap = *um - *un;
        report.max_gap = std::max(report.max_gap, gap);
        if (gap > tail + 1e-9 || gap < -1e-9) ++report.violations;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Ahlfors sweep

AhlforsReport regularity_sweep(const DistanceOracle& oracle, int samples, uint64_t seed) {
    mark_op("flap.regularity_sweep");
    AhlforsReport report;
    report.bound_constant = kPi + 24.0 * 6.0 * kPi + 2.0;
    const FlapPlaneStage& stage = oracle.stage();

    // Per-sample slots keep the sweep deterministic under GASKETLAB_THREADS;
    // the oracle is read-only and safe for concurrent queries.
    std::vector<std::optional<AhlforsSample>> slots(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
        Rng item = Rng::stream(seed, static_cast<uint64_t>(s));
        double r = 0.02 + 0.3 * item.uniform();
        FlapPoint x;
        double kind = item.uniform();
        if (kind < 0.6 || stage.size() == 0) {
            x = FlapPoint::plane(item.uniform(-0.1, 1.1), item.uniform(-0.05, 0.95));
        } else {
            int t = static_cast<int>(item.below(static_cast<uint64_t>(stage.size())));
            int k = static_cast<int>(item.below(3));
            int side = static_cast<int>(item.below(2));
            const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
            double u = item.uniform() * st.len[static_cast<std::size_t>(k)];
            double v = item.uniform() * st.hd;
            x = FlapPoint::on_rect(RectId{t, k, side}, u, v);
        }
        if (!stage.in_window(stage.project_to_plane(x))) return;
        MeasureInterval mi = ball_measure(oracle, x, r, 20);
        EuclidPoint pos = stage.project_to_plane(x);
        bool pass = mi.lower <= report.bound_constant * r * r;
        slots[s] = AhlforsSample{pos.x,     pos.y,
                                 r,         mi.lower,
                                 mi.upper,  report.bound_constant * r * r,
                                 pass};
    });
    double min_ratio = 1e300;
    for (const auto& slot : slots) {
        if (!slot) continue;
        ++report.samples;
        double ratio = slot->lower / (slot->r * slot->r);
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (slot->lower > 0) min_ratio = std::min(min_ratio, ratio);
        if (!slot->pass) ++report.upper_violations;
        report.rows.push_back(*slot);
    }
    report.min_nonzero_ratio = (min_ratio > 1e299) ? 0.0 : min_ratio;
    return report;
}

// ---------------------------------------------------------------------------
// Path lifting (G3)

std::optional<std::vector<FlapPoint>> lift_path(const FlapPlaneStage& stage,
                                                const std::vector<EuclidPoint>& polyline) {
    if (polyline.size() < 2) return std::nullopt;
    DistanceOracle* null_oracle = nullptr;
    (void)null_oracle;
    std::vector<FlapPoint> chain;
    chain.push_back(FlapPoint::plane(polyline[0].x, polyline[0].y));
    // reuse the segment-crossing machinery through a throwaway oracle-less path
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        EuclidPoint p = polyline[i], q = polyline[i + 1];
        double seg_len = dist_d(p, q);
        if (seg_len < 1e-15) continue;
        double dx = (q.x - p.x) / seg_len, dy = (q.y - p.y) / seg_len;
        struct Crossing {
            double tpar;
            int tripod, spoke;
            double u;
            int side_in;
        };
        std::vector<Crossing> crossings;
        for (int t = 0; t < stage.size(); ++t) {
            const StageTripod& st = stage.tripods[static_cast<std::size_t>(t)];
            for (int k = 0; k < 3; ++k) {
                const EuclidPoint& a = st.a;
                const EuclidPoint& c = st.c[static_cast<std::size_t>(k)];
                double rx = c.x - a.x, ry = c.y - a.y;
                double den = dx * ry - dy * rx;
                if (std::abs(den) < 1e-14) continue;
                double tpar = ((a.x - p.x) * ry - (a.y - p.y) * rx) / den;
                double spar = ((a.x - p.x) * dy - (a.y - p.y) * dx) / den;
                if (tpar <= 1e-12 || tpar >= seg_len - 1e-12) continue;
                if (spar < 1e-12 || spar > 1 - 1e-12) continue;
                crossings.push_back(
                    {tpar, t, k, spar * st.len[static_cast<std::size_t>(k)], den > 0 ? 1 : 0});
            }
        }
        std::sort(crossings.begin(), crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.tpar < b.tpar; });
        for (const auto& cr : crossings) {
            double h = stage.tripods[static_cast<std::size_t>(cr.tripod)].hd;
            RectId in{cr.tripod, cr.spoke, cr.side_in};
            RectId out{cr.tripod, cr.spoke, 1 - cr.side_in};
            chain.push_back(FlapPoint::on_rect(in, cr.u, 0.0));
            chain.push_back(FlapPoint::on_rect(in, cr.u, h));
            chain.push_back(FlapPoint::on_rect(out, cr.u, h));
            chain.push_back(FlapPoint::on_rect(out, cr.u, 0.0));
        }
        chain.push_back(FlapPoint::plane(q.x, q.y));
    }
    return chain;
}

}  // namespace flap
}  // namespace gasketlab
