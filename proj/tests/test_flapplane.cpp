#include "doctest.h"

#include "gasketlab/flapplane.hpp"
#include "gasketlab/rng.hpp"

#include <cmath>

using namespace gasketlab;
using namespace gasketlab::flap;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<collapse::TripodEntry> gasket_family(int level) {
    auto stage = collapse::build_collapse(level);
    return stage.tripods;
}

std::vector<Rat> default_heights(const std::vector<collapse::TripodEntry>& fam, int n,
                                 int extra_halvings = 0) {
    std::vector<Rat> hs;
    for (int i = 0; i < n; ++i) {
        Rat h = collapse::default_height(fam[static_cast<std::size_t>(i)].tripod);
        for (int j = 0; j < extra_halvings; ++j) h /= 2;
        hs.push_back(h);
    }
    return hs;
}

}  // namespace

TEST_CASE("stage construction and contacts") {
    auto fam = gasket_family(2);

    SUBCASE("single tripod stage") {
        FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
        CHECK(st.size() == 1);
        CHECK(st.contacts.empty());
        CHECK(st.min_height() > 0);
    }

    SUBCASE("level-2 tripods each touch the level-1 tripod once") {
        FlapPlaneStage st = build_stage(fam, 4, default_heights(fam, 4));
        CHECK(st.size() == 4);
        // every level-2 tripod has exactly one tip on the level-1 tripod
        int on_first = 0;
        for (const auto& c : st.contacts) {
            CHECK(c.tripod > 0);
            if (c.host == 0) ++on_first;
        }
        CHECK(on_first == 3);
    }

    SUBCASE("oversized height is rejected") {
        std::vector<Rat> hs = default_heights(fam, 1);
        hs[0] = Rat(1);  // way beyond min spoke / 6
        CHECK_THROWS_AS(build_stage(fam, 1, hs), HeightWidthViolation);
    }
}

TEST_CASE("projections") {
    auto fam = gasket_family(2);
    FlapPlaneStage st = build_stage(fam, 4, default_heights(fam, 4));

    SUBCASE("plane points are fixed") {
        FlapPoint p = FlapPoint::plane(0.3, 0.1);
        FlapPoint q = st.project(p, 0);
        CHECK(q.chart == FlapPoint::Chart::Plane);
        CHECK(q.x == 0.3);
        CHECK(q.y == 0.1);
    }

    SUBCASE("rect points collapse orthogonally past their stage") {
        const StageTripod& t0 = st.tripods[0];
        FlapPoint p = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] / 2, t0.hd / 2);
        FlapPoint q = st.project(p, 0);
        CHECK(q.chart == FlapPoint::Chart::Plane);
        EuclidPoint e = st.project_to_plane(p);
        CHECK(q.x == doctest::Approx(e.x));
        CHECK(q.y == doctest::Approx(e.y));
    }

    SUBCASE("projection composition is exact") {
        Rng rng(5);
        for (int i = 0; i < 1000; ++i) {
            int t = static_cast<int>(rng.below(4));
            int k = static_cast<int>(rng.below(3));
            int s = static_cast<int>(rng.below(2));
            const StageTripod& tri = st.tripods[static_cast<std::size_t>(t)];
            FlapPoint p = FlapPoint::on_rect(RectId{t, k, s},
                                             rng.uniform() * tri.len[static_cast<std::size_t>(k)],
                                             rng.uniform() * tri.hd);
            FlapPoint via = st.project(st.project(p, 1), 0);
            FlapPoint direct = st.project(p, 0);
            CHECK(via.chart == direct.chart);
            CHECK(via.x == doctest::Approx(direct.x).epsilon(1e-14));
            CHECK(via.y == doctest::Approx(direct.y).epsilon(1e-14));
        }
    }
}

TEST_CASE("distance oracle basics") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.04);

    SUBCASE("same rectangle is globally isometric") {
        const StageTripod& t0 = st.tripods[0];
        FlapPoint a = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] * 0.2, t0.hd * 0.3);
        FlapPoint b = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] * 0.8, t0.hd * 0.9);
        DistanceCertificate cert = oracle.distance(a, b);
        CHECK(cert.exact);
        CHECK(cert.lower == cert.upper);
    }

    SUBCASE("clear planar segments are exact") {
        FlapPoint a = FlapPoint::plane(-0.2, -0.1);
        FlapPoint b = FlapPoint::plane(1.2, -0.1);
        DistanceCertificate cert = oracle.distance(a, b);
        CHECK(cert.upper == doctest::Approx(cert.lower).epsilon(1e-12));
    }

    SUBCASE("opposite sides of a slit obey the 6h bound") {
        // straddle the spoke toward tip 2 = (1/2, 0) in lattice coords
        EuclidPoint a_e = to_euclid(st.tripods[0].shape.a);
        EuclidPoint c_e = to_euclid(st.tripods[0].shape.c[2]);
        EuclidPoint mid{(a_e.x + c_e.x) / 2, (a_e.y + c_e.y) / 2};
        EuclidPoint nrm{-(c_e.y - a_e.y), c_e.x - a_e.x};
        double nn = std::hypot(nrm.x, nrm.y);
        nrm.x /= nn;
        nrm.y /= nn;
        double off = 0.01;
        FlapPoint p = FlapPoint::plane(mid.x + off * nrm.x, mid.y + off * nrm.y);
        FlapPoint q = FlapPoint::plane(mid.x - off * nrm.x, mid.y - off * nrm.y);
        DistanceCertificate cert = oracle.distance(p, q);
        CHECK(cert.lower <= cert.upper);
        CHECK(cert.upper <= cert.lower + 6.0 * st.tripods[0].hd + 1e-9);
        CHECK(cert.upper >= 2.0 * st.tripods[0].hd - 1e-9);  // must climb the pillow
    }

    SUBCASE("G1 on random pairs") {
        Rng rng(17);
        for (int i = 0; i < 200; ++i) {
            FlapPoint a = FlapPoint::plane(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 0.9));
            FlapPoint b = FlapPoint::plane(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 0.9));
            DistanceCertificate cert = oracle.distance(a, b);
            CHECK(cert.lower <= cert.upper + 1e-12);
            CHECK(cert.lower >= oracle.projection_lower(a, b) - 1e-12);
        }
    }

    SUBCASE("query outside the window throws") {
        CHECK_THROWS_AS(oracle.distance(FlapPoint::plane(10.0, 0.0), FlapPoint::plane(0.0, 0.0)),
                        WindowExceeded);
    }
}

TEST_CASE("lift path bound shrinks with the height") {
    auto fam = gasket_family(1);
    for (int halvings : {0, 3}) {
        FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1, halvings));
        DistanceOracle oracle(st, 0.08);
        EuclidPoint a_e = to_euclid(st.tripods[0].shape.a);
        EuclidPoint c_e = to_euclid(st.tripods[0].shape.c[2]);
        EuclidPoint mid{(a_e.x + c_e.x) / 2, (a_e.y + c_e.y) / 2};
        EuclidPoint nrm{-(c_e.y - a_e.y), c_e.x - a_e.x};
        double nn = std::hypot(nrm.x, nrm.y);
        FlapPoint p = FlapPoint::plane(mid.x + 0.005 * nrm.x / nn, mid.y + 0.005 * nrm.y / nn);
        FlapPoint q = FlapPoint::plane(mid.x - 0.005 * nrm.x / nn, mid.y - 0.005 * nrm.y / nn);
        auto lift = oracle.lift_path_upper(p, q);
        REQUIRE(lift.has_value());
        CHECK(*lift <= oracle.projection_lower(p, q) + 6.0 * st.tripods[0].hd + 1e-12);
    }
}

TEST_CASE("ball measures") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.03);

    SUBCASE("flat ball away from the tripod") {
        FlapPoint x = FlapPoint::plane(-0.15, -0.15);
        double r = 0.08;
        MeasureInterval mi = ball_measure(oracle, x, r, 24);
        CHECK(mi.lower <= kPi * r * r + 1e-9);
        CHECK(mi.upper >= kPi * r * r - 1e-9);
        CHECK(mi.lower >= 0.75 * kPi * r * r);
        CHECK(mi.upper <= 1.35 * kPi * r * r);
    }

    SUBCASE("ball deep inside one rectangle") {
        const StageTripod& t0 = st.tripods[0];
        double r = t0.hd * 0.35;
        FlapPoint x = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] / 2, t0.hd / 2);
        MeasureInterval mi = ball_measure(oracle, x, r, 24);
        CHECK(mi.lower >= 0.6 * kPi * r * r);
        CHECK(mi.lower <= kPi * r * r + 1e-9);
    }

    SUBCASE("ball meeting the pillow respects the coarse bound") {
        EuclidPoint a_e = to_euclid(st.tripods[0].shape.a);
        FlapPoint x = FlapPoint::plane(a_e.x + 0.12, a_e.y + 0.1);
        double r = 0.2;
        MeasureInterval mi = ball_measure(oracle, x, r, 20);
        CHECK(mi.lower <= (kPi + 24.0 * kPi) * r * r);
    }
}

TEST_CASE("height schedule constraints") {
    auto fam = gasket_family(3);
    int n = 6;
    auto sched = height_schedule(fam, n);
    REQUIRE(static_cast<int>(sched.size()) == n);
    double prev_area = 0;
    for (int i = 0; i < n; ++i) {
        const auto& e = sched[static_cast<std::size_t>(i)];
        const collapse::Tripod& t = fam[static_cast<std::size_t>(i)].tripod;
        // (i) width / fold constraint
        CHECK(e.h * e.h * 36 <= t.min_len2());
        // (ii) geometric decay
        if (i > 0) CHECK(e.area_bound * 2.0 <= prev_area * (1 + 1e-9));
        prev_area = e.area_bound;
        if (i > 0) {
            REQUIRE(sgn(e.sep_sq) > 0);
            // (iii) flap area below sep^2/4
            CHECK(Rat(e.area_bound) <= e.sep_sq / 4 + Rat(1, 1000000));
            // (iv) h < sep / (12 (i+1)^2)
            Rat m2 = Rat(i + 1) * Rat(i + 1);
            CHECK(e.h * e.h * 144 * m2 * m2 < e.sep_sq);
        }
    }

    SUBCASE("stage builds with the scheduled heights") {
        std::vector<Rat> hs;
        for (const auto& e : sched) hs.push_back(e.h);
        FlapPlaneStage st = build_stage(fam, n, hs);
        CHECK(st.size() == n);
    }
}

TEST_CASE("llc probe") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.05);
    EuclidPoint a_e = to_euclid(st.tripods[0].shape.a);

    SUBCASE("planar points far from the tripod achieve c <= 2") {
        FlapPoint x = FlapPoint::plane(a_e.x + 0.9, a_e.y + 0.9);
        FlapPoint z = FlapPoint::plane(a_e.x + 1.3, a_e.y + 0.9);
        FlapPoint w = FlapPoint::plane(a_e.x + 0.9, a_e.y + 1.3);
        double r = 0.35;
        LlcReport rep = llc_probe(oracle, x, r, z, w);
        CHECK(rep.c_achieved <= 2.0 + 1e-6);
    }

    SUBCASE("small radius with in-rectangle endpoints achieves c <= 48") {
        const StageTripod& t0 = st.tripods[0];
        double h = t0.hd;
        double r = 2.0 * h;  // r < 12h
        FlapPoint x = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] * 0.4, h * 0.5);
        FlapPoint z = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] * 0.4 + r * 1.2, h * 0.5);
        FlapPoint w = FlapPoint::plane(a_e.x + r * 1.5, a_e.y - r * 1.2);
        // preconditions: oracle lower bounds place z, w outside B(x, r)
        double lbz = std::hypot(r * 1.2, 0.0);
        REQUIRE(lbz >= r);
        REQUIRE(t0.len[0] * 0.4 + r * 1.2 <= t0.len[0]);
        LlcReport rep = llc_probe(oracle, x, r, z, w);
        CHECK(rep.case_id == 2);
        CHECK(rep.c_achieved <= 48.0 + 1e-6);
    }

    SUBCASE("two-tripod stage stays within 96") {
        auto fam2 = gasket_family(2);
        FlapPlaneStage st2 = build_stage(fam2, 2, default_heights(fam2, 2));
        DistanceOracle oracle2(st2, 0.05);
        double h = st2.min_height();
        double r = 6.0 * h;
        EuclidPoint base = to_euclid(st2.tripods[1].shape.a);
        FlapPoint x = FlapPoint::plane(base.x + 0.6, base.y + 0.6);
        FlapPoint z = FlapPoint::plane(base.x + 0.6 + 1.2 * r, base.y + 0.6);
        FlapPoint w = FlapPoint::plane(base.x + 0.6, base.y + 0.6 + 1.2 * r);
        LlcReport rep = llc_probe(oracle2, x, r, z, w);
        CHECK(rep.c_achieved <= 96.0 + 1e-6);
    }
}

TEST_CASE("gromov-hausdorff gaps against tail heights") {
    auto fam = gasket_family(2);
    std::vector<Rat> hs = default_heights(fam, 4, 2);
    FlapPlaneStage st4 = build_stage(fam, 4, hs);
    GhReport rep = gh_distortion(st4, 1, 200, 99);
    CHECK(rep.checked > 100);
    CHECK(rep.violations == 0);
    CHECK(rep.max_gap <= rep.tail_bound + 1e-9);
}

TEST_CASE("path lifting across pillows") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    Rng rng(31);
    int lifted_count = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<EuclidPoint> poly;
        poly.push_back({rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.0)});
        poly.push_back({rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.0)});
        poly.push_back({rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.0)});
        auto chain = lift_path(st, poly);
        REQUIRE(chain.has_value());
        // The chain starts and ends at the polyline endpoints and alternates
        // consistently between charts.
        CHECK(chain->front().chart == FlapPoint::Chart::Plane);
        CHECK(chain->back().chart == FlapPoint::Chart::Plane);
        for (std::size_t p = 0; p + 1 < chain->size(); ++p) {
            const FlapPoint& cur = (*chain)[p];
            const FlapPoint& nxt = (*chain)[p + 1];
            // Plane <-> rect transitions enter and leave through the bank
            // (v = 0); rect <-> rect switches ride an identified gluing point.
            if (cur.chart != nxt.chart) {
                const FlapPoint& rectpt = (cur.chart == FlapPoint::Chart::Rect) ? cur : nxt;
                CHECK(rectpt.v == 0.0);
            } else if (cur.chart == FlapPoint::Chart::Rect && !(cur.rect == nxt.rect)) {
                bool bank_hop = (cur.v == 0.0 && nxt.v == 0.0);  // planar piece between banks
                bool top_switch = cur.rect.tripod == nxt.rect.tripod &&
                                  cur.rect.spoke == nxt.rect.spoke && cur.u == nxt.u &&
                                  cur.v == nxt.v;
                CHECK((bank_hop || top_switch));
            }
        }
        if (chain->size() > 3) ++lifted_count;
    }
    CHECK(lifted_count > 10);  // plenty of crossings in the sample
}

TEST_CASE("lift path charges the pillow exit for far-bank targets") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.06);
    const StageTripod& t0 = st.tripods[0];
    double h = t0.hd;
    // point on the side-0 bank face, target placed just off the side-1 bank
    FlapPoint x = FlapPoint::on_rect(RectId{0, 0, 0}, t0.len[0] * 0.5, h * 0.25);
    EuclidPoint base = st.project_to_plane(x);
    EuclidPoint a = t0.a, c = t0.c[0];
    EuclidPoint nrm{-(c.y - a.y), c.x - a.x};
    double nn = std::hypot(nrm.x, nrm.y);
    nrm.x /= nn;
    nrm.y /= nn;
    double off = h / 4;
    for (double dir : {+1.0, -1.0}) {
        FlapPoint y = FlapPoint::plane(base.x + dir * off * nrm.x, base.y + dir * off * nrm.y);
        auto up = oracle.lift_path_upper(x, y);
        REQUIRE(up.has_value());
        int side = (dir > 0) ? 0 : 1;
        double descent = h * 0.25;
        if (side == x.rect.side) {
            CHECK(*up == doctest::Approx(descent + off).epsilon(1e-9));
        } else {
            // must clear the pillow: the straight model adds a 2h climb
            CHECK(*up >= descent + off + 2 * h - 1e-9);
        }
        // upper bounds must dominate the certified distance either way
        DistanceCertificate cert = oracle.distance(x, y);
        CHECK(cert.lower <= *up + 1e-12);
    }
}

TEST_CASE("balls avoiding the tripod pull back across stages") {
    // Distances between points whose connecting geometry avoids the tripod
    // agree between the one-tripod stage and the bare plane.
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.06);
    Rng rng(123);
    for (int i = 0; i < 60; ++i) {
        // sample in the corner region left of the tripod
        FlapPoint a = FlapPoint::plane(rng.uniform(-0.2, 0.05), rng.uniform(-0.2, 0.05));
        FlapPoint b = FlapPoint::plane(rng.uniform(-0.2, 0.05), rng.uniform(-0.2, 0.05));
        if (!oracle.plane_visible({a.x, a.y}, {b.x, b.y})) continue;
        DistanceCertificate cert = oracle.distance(a, b);
        double euclid = std::hypot(a.x - b.x, a.y - b.y);
        CHECK(cert.lower == doctest::Approx(euclid).epsilon(1e-12));
        CHECK(cert.upper == doctest::Approx(euclid).epsilon(1e-12));
    }
}

TEST_CASE("measure additivity over disjoint flat balls") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle oracle(st, 0.03);
    FlapPoint x1 = FlapPoint::plane(-0.2, -0.2);
    FlapPoint x2 = FlapPoint::plane(1.2, -0.2);
    double r1 = 0.06, r2 = 0.09;
    MeasureInterval m1 = ball_measure(oracle, x1, r1, 24);
    MeasureInterval m2 = ball_measure(oracle, x2, r2, 24);
    double truth = kPi * (r1 * r1 + r2 * r2);
    CHECK(m1.lower + m2.lower <= truth + 1e-9);
    CHECK(m1.upper + m2.upper >= truth - 1e-9);
}

TEST_CASE("oracle refinement monotonicity") {
    auto fam = gasket_family(1);
    FlapPlaneStage st = build_stage(fam, 1, default_heights(fam, 1));
    DistanceOracle coarse(st, 0.08);
    DistanceOracle fine(st, 0.04);
    Rng rng(77);
    for (int i = 0; i < 40; ++i) {
        FlapPoint a = FlapPoint::plane(rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.8));
        FlapPoint b = FlapPoint::plane(rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.8));
        DistanceCertificate cc = coarse.distance(a, b);
        DistanceCertificate cf = fine.distance(a, b);
        CHECK(cf.upper <= cc.upper + 1e-6);
        CHECK(cf.lower >= cc.lower - 1e-12);
    }
}
