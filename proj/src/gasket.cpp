#include "gasketlab/gasket.hpp"
#include "gasketlab/report.hpp"

#include <algorithm>

namespace gasketlab {
namespace gasket {

std::string VAddress::str() const {
    std::string s = "v";
    for (uint8_t c : path) s += static_cast<char>('0' + c);
    return s;
}

VAddress VAddress::parse(const std::string& s) {
    VAddress v;
    std::size_t start = (!s.empty() && s[0] == 'v') ? 1 : 0;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (c < '0' || c > '2') throw std::invalid_argument("bad v-address: " + s);
        v.path.push_back(static_cast<uint8_t>(c - '0'));
    }
    return v;
}

bool WAddress::operator<(const WAddress& o) const {
    if (is_level0() != o.is_level0()) return is_level0();
    if (is_level0()) return false;
    if (parent->level() != o.parent->level()) return parent->level() < o.parent->level();
    return parent->path < o.parent->path;
}

std::string WAddress::str() const {
    if (is_level0()) return "outer";
    std::string s = "w";
    for (uint8_t c : parent->path) s += static_cast<char>('0' + c);
    return s;
}

std::array<RatPoint, 3> root_vertices() {
    return {RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1)};
}

std::array<RatPoint, 3> v_vertices(const VAddress& v) {
    std::array<RatPoint, 3> p = root_vertices();
    for (uint8_t i : v.path) {
        std::array<RatPoint, 3> q;
        q[i] = p[i];
        for (int j = 0; j < 3; ++j) {
            if (j != i) q[j] = midpoint(p[i], p[j]);
        }
        p = q;
    }
    return p;
}

std::array<RatPoint, 3> w_vertices(const WAddress& w) {
    if (w.is_level0()) throw std::domain_error("level-0 component has no vertex triple");
    std::array<RatPoint, 3> p = v_vertices(*w.parent);
    return {midpoint(p[1], p[2]), midpoint(p[0], p[2]), midpoint(p[0], p[1])};
}

std::pair<RatPoint, RatPoint> w_edge(const WAddress& w, int edge) {
    std::array<RatPoint, 3> v = w.is_level0() ? root_vertices() : w_vertices(w);
    return {v[(edge + 1) % 3], v[(edge + 2) % 3]};
}

VFrame VFrame::root() {
    VFrame f;
    f.p = root_vertices();
    for (int k = 0; k < 3; ++k) {
        f.ref[k] = EdgeRef{WAddress::level0(), k, Rat(0), Rat(1)};
    }
    return f;
}

std::array<RatPoint, 3> VFrame::w_mid() const {
    return {midpoint(p[1], p[2]), midpoint(p[0], p[2]), midpoint(p[0], p[1])};
}

Rat VFrame::host_param(int k, const RatPoint& x) const {
    const RatPoint& lo = p[(k + 1) % 3];
    const RatPoint& hi = p[(k + 2) % 3];
    Rat t = segment_param(x, lo, hi);
    return ref[k].t0 + (ref[k].t1 - ref[k].t0) * t;
}

VFrame VFrame::descend(uint8_t i) const {
    VFrame c;
    c.va = va.child(i);
    int j = (i + 1) % 3, k = (i + 2) % 3;
    c.p[i] = p[i];
    c.p[j] = midpoint(p[i], p[j]);
    c.p[k] = midpoint(p[i], p[k]);
    // New edge (opposite corner i) is edge i of the central triangle W(va),
    // whose vertices are m_t = midpoint of the parent edge opposite t.
    // Edge i runs m_j -> m_k; the child corners sit at c.p[j] = m_k and
    // c.p[k] = m_j, so the host params come out reversed.
    c.ref[i] = EdgeRef{WAddress::central_of(va), i, Rat(1), Rat(0)};
    {
        const EdgeRef& r = ref[j];
        // Parent edge opposite j runs corner (j+1)%3=k -> (j+2)%3=i.
        Rat tk = r.t0, ti = r.t1;
        c.ref[j] = EdgeRef{r.host, r.host_edge, (tk + ti) / 2, ti};
    }
    {
        const EdgeRef& r = ref[k];
        // Parent edge opposite k runs corner (k+1)%3=i -> (k+2)%3=j.
        Rat ti = r.t0, tj = r.t1;
        c.ref[k] = EdgeRef{r.host, r.host_edge, ti, (ti + tj) / 2};
    }
    return c;
}

namespace {

using Frame = VFrame;

bool in_closed_triangle(const RatPoint& x, const std::array<RatPoint, 3>& p) {
    return orient(p[0], p[1], x) >= 0 && orient(p[1], p[2], x) >= 0 && orient(p[2], p[0], x) >= 0;
}

bool in_open_triangle(const RatPoint& x, const std::array<RatPoint, 3>& p) {
    return orient(p[0], p[1], x) > 0 && orient(p[1], p[2], x) > 0 && orient(p[2], p[0], x) > 0;
}

}  // namespace

PointClass classify(const RatPoint& p, int depth) {
    mark_op("gasket.classify");
    Frame f = Frame::root();
    if (!in_closed_triangle(p, f.p)) throw OutsideGasketHull("point outside the root triangle");

    for (int k = 0; k < 3; ++k) {
        if (p == f.p[k]) {
            PointClass out;
            out.kind = PointClass::Kind::Vertex;
            out.a = WAddress::level0();
            out.b = WAddress::level0();
            out.depth_used = 0;
            return out;
        }
    }

    for (int level = 0; level < depth; ++level) {
        auto m = f.w_mid();
        WAddress w = WAddress::central_of(f.va);
        for (int k = 0; k < 3; ++k) {
            if (p == m[k]) {
                PointClass out;
                out.kind = PointClass::Kind::Vertex;
                out.a = w;
                out.b = f.ref[k].host;
                out.depth_used = level + 1;
                return out;
            }
        }
        if (in_open_triangle(p, m)) {
            PointClass out;
            out.kind = PointClass::Kind::InsideRemoved;
            out.a = w;
            out.depth_used = level + 1;
            return out;
        }
        int child = -1;
        for (int i = 0; i < 3; ++i) {
            std::array<RatPoint, 3> q{f.p[i], midpoint(f.p[i], f.p[(i + 1) % 3]),
                                      midpoint(f.p[i], f.p[(i + 2) % 3])};
            if (in_closed_triangle(p, q)) {
                child = i;
                break;
            }
        }
        if (child < 0) throw std::logic_error("classify: descent failed");
        f = f.descend(static_cast<uint8_t>(child));
    }

    // Depth exhausted: the point sits on a host edge or is interior so far.
    for (int k = 0; k < 3; ++k) {
        if (on_segment(p, f.p[(k + 1) % 3], f.p[(k + 2) % 3])) {
            PointClass out;
            out.kind = PointClass::Kind::Edge;
            out.b = f.ref[k].host;
            out.edge = f.ref[k].host_edge;
            out.position = f.host_param(k, p);
            out.depth_used = depth;
            return out;
        }
    }
    PointClass out;
    out.kind = PointClass::Kind::Interior;
    out.depth_used = depth;
    return out;
}

std::vector<WEntry> enumerate_w(int levelMax) {
    mark_op("gasket.enumerate_w");
    if (levelMax < 1) throw std::invalid_argument("enumerate_w: levelMax >= 1 required");
    std::vector<WEntry> out;
    struct Item {
        VAddress va;
        std::array<RatPoint, 3> p;
    };
    std::vector<Item> frontier{{VAddress{}, root_vertices()}};
    for (int level = 1; level <= levelMax; ++level) {
        std::vector<Item> next;
        next.reserve(frontier.size() * 3);
        for (const auto& it : frontier) {
            out.push_back(WEntry{WAddress::central_of(it.va),
                                 {midpoint(it.p[1], it.p[2]), midpoint(it.p[0], it.p[2]),
                                  midpoint(it.p[0], it.p[1])}});
            if (level < levelMax) {
                for (uint8_t i = 0; i < 3; ++i) {
                    std::array<RatPoint, 3> q;
                    q[i] = it.p[i];
                    q[(i + 1) % 3] = midpoint(it.p[i], it.p[(i + 1) % 3]);
                    q[(i + 2) % 3] = midpoint(it.p[i], it.p[(i + 2) % 3]);
                    next.push_back(Item{it.va.child(i), q});
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end(),
              [](const WEntry& x, const WEntry& y) { return x.address < y.address; });
    return out;
}

NestedData nested_sequence(const VAddress& prefix, int n) {
    mark_op("gasket.nested_sequence");
    if (n < 2) throw std::invalid_argument("nested_sequence: n >= 2 required");
    if (prefix.level() < n - 1) throw DepthExceeded("address prefix shorter than n");

    NestedData data;
    Frame f = Frame::root();
    std::vector<Frame> frames{f};
    for (int s = 0; s < n - 1; ++s) {
        f = f.descend(prefix.path[static_cast<std::size_t>(s)]);
        frames.push_back(f);
    }
    // Step m (2 <= m <= n) reads the level-(m-1) triangle frames[m-1]; the
    // descent into it used child index prefix.path[m-2].
    for (int m = 2; m <= n; ++m) {
        const Frame& fv = frames[static_cast<std::size_t>(m - 1)];
        int i = prefix.path[static_cast<std::size_t>(m - 2)];
        auto mid3 = fv.w_mid();
        NestedStep step;
        step.n = m;
        step.w = WAddress::central_of(fv.va);
        step.vertex_on_prev = mid3[i];  // midpoint of the new edge, on boundary of W(m-1)
        int j = (i + 1) % 3, k = (i + 2) % 3;
        const EdgeRef& rj = fv.ref[j];
        const EdgeRef& rk = fv.ref[k];
        // Order so that level(B) <= level(A).
        const bool j_shallow = rj.host.level() <= rk.host.level();
        const EdgeRef& rb = j_shallow ? rj : rk;
        const EdgeRef& ra = j_shallow ? rk : rj;
        step.a = ra.host;
        step.b = rb.host;
        step.vertex_on_a = j_shallow ? mid3[k] : mid3[j];
        step.vertex_on_b = j_shallow ? mid3[j] : mid3[k];
        if (!step.a.is_level0()) step.k = step.a.level();
        if (!step.b.is_level0()) step.l = step.b.level();
        data.steps.push_back(step);
    }
    return data;
}

bool check_half_edge_order(const NestedData& data, int n) {
    const NestedStep* cur = nullptr;
    const NestedStep* prev = nullptr;
    const NestedStep* prev2 = nullptr;
    for (const auto& s : data.steps) {
        if (s.n == n) cur = &s;
        if (s.n == n - 1) prev = &s;
        if (s.n == n - 2) prev2 = &s;
    }
    if (!cur || !prev || cur->a.is_level0()) return false;
    int kn = cur->a.level();
    // x_{n-1,k(n)}: vertex of W(n-1) on the boundary of W(k(n)). The host
    // A(n) is one of W(n-2), A(n-1), B(n-1); W(n-1) has a vertex on each.
    WAddress w_prev2 =
        prev2 ? prev2->w : WAddress::central_of(VAddress{});  // W(2) base case: W(1)
    RatPoint x_prev;
    if (prev->a == cur->a) {
        x_prev = prev->vertex_on_a;
    } else if (prev->b == cur->a) {
        x_prev = prev->vertex_on_b;
    } else if (cur->a == w_prev2) {
        x_prev = prev->vertex_on_prev;
    } else {
        return false;
    }
    RatPoint x_cur = cur->vertex_on_a;
    (void)kn;
    const std::array<RatPoint, 3> wk = w_vertices(cur->a);
    auto on_boundary_of = [](const WAddress& of, const RatPoint& p) {
        for (int e = 0; e < 3; ++e) {
            auto [a, b] = w_edge(of, e);
            if (on_segment(p, a, b)) return true;
        }
        return false;
    };
    // The three contact points must share one half-edge of W(k(n)).
    for (int e = 0; e < 3; ++e) {
        const RatPoint& lo = wk[(e + 1) % 3];
        const RatPoint& hi = wk[(e + 2) % 3];
        if (!on_segment(x_prev, lo, hi) || !on_segment(x_cur, lo, hi)) continue;
        Rat tp = segment_param(x_prev, lo, hi);
        Rat tc = segment_param(x_cur, lo, hi);
        Rat half(1, 2);
        bool same_half = (tp <= half && tc <= half) || (tp >= half && tc >= half);
        if (!same_half) return false;
        // The third point x_{k(n),l(n)} is the corner of W(k(n)) closing the
        // half-edge; it must actually touch the boundary of B(n). The half is
        // picked by the strictly interior contact tc (tp may sit exactly on
        // the midpoint shared by both halves).
        Rat tv = (tc <= half) ? Rat(0) : Rat(1);
        RatPoint x_kl = (tv == 0) ? lo : hi;
        if (!on_boundary_of(cur->b, x_kl)) return false;
        return (tc > rat_min(tp, tv)) && (tc < rat_max(tp, tv));
    }
    return false;
}

RatPoint dyadic_edge_point(const WAddress& w, int edge, int half, int k) {
    mark_op("gasket.dyadic_edge_points");
    if (k < 1) throw std::invalid_argument("dyadic_edge_point: k >= 1 required");
    auto [e0, e1] = w_edge(w, edge);
    const RatPoint& v = (half == 0) ? e0 : e1;
    const RatPoint& u = (half == 0) ? e1 : e0;
    Rat t(1);
    for (int i = 0; i < k; ++i) t /= 2;
    return v + (u - v) * t;
}

bool adjacency(const WAddress& w1, const WAddress& w2) {
    mark_op("gasket.adjacency");
    if (w1 == w2) return false;
    auto on_boundary_of = [](const WAddress& of, const RatPoint& p) {
        for (int e = 0; e < 3; ++e) {
            auto [a, b] = w_edge(of, e);
            if (on_segment(p, a, b)) return true;
        }
        return false;
    };
    if (!w1.is_level0()) {
        for (const auto& v : w_vertices(w1)) {
            if (on_boundary_of(w2, v)) return true;
        }
    }
    if (!w2.is_level0()) {
        for (const auto& v : w_vertices(w2)) {
            if (on_boundary_of(w1, v)) return true;
        }
    }
    return false;
}

Rat level_cover_area_units(int n) {
    // 3^n v-triangles of level n, each of area 4^-n units; computed by walking
    // the tree so the identity is exercised rather than assumed.
    struct Item {
        std::array<RatPoint, 3> p;
        int level;
    };
    Rat total(0);
    std::vector<Item> stack{{root_vertices(), 0}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        if (it.level == n) {
            total += polygon_area_units({it.p[0], it.p[1], it.p[2]});
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            std::array<RatPoint, 3> q;
            q[i] = it.p[i];
            q[(i + 1) % 3] = midpoint(it.p[i], it.p[(i + 1) % 3]);
            q[(i + 2) % 3] = midpoint(it.p[i], it.p[(i + 2) % 3]);
            stack.push_back({q, it.level + 1});
        }
    }
    return total;
}

}  // namespace gasket
}  // namespace gasketlab
