#include "doctest.h"

#include "gasketlab/collapse.hpp"

using namespace gasketlab;
using namespace gasketlab::collapse;

TEST_CASE("canonical tripod") {
    SUBCASE("lattice unit triangle has center (1/3, 1/3)") {
        Tripod t = canonical_tripod(RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1));
        CHECK(t.a == RatPoint(make_rat(1, 3), make_rat(1, 3)));
    }

    SUBCASE("equilateral triple: three equal spokes") {
        // Root edge midpoints: the level-1 tripod.
        Tripod t = canonical_tripod(RatPoint(make_rat(1, 2), make_rat(1, 2)),
                                    RatPoint(Rat(0), make_rat(1, 2)),
                                    RatPoint(make_rat(1, 2), Rat(0)));
        CHECK(t.len2(0) == t.len2(1));
        CHECK(t.len2(1) == t.len2(2));
        CHECK(t.osc_sq() == make_rat(1, 12));
    }

    SUBCASE("nearly collinear triple: one long spoke dominates") {
        Tripod t = canonical_tripod(RatPoint(0, 0), RatPoint(8, 0),
                                    RatPoint(make_rat(4, 1), make_rat(1, 64)));
        Rat longest = rat_max(t.len2(0), rat_max(t.len2(1), t.len2(2)));
        CHECK(t.osc_sq() == longest);
        CHECK(t.len2(0) > t.len2(2));
    }

    CHECK_THROWS_AS(canonical_tripod(RatPoint(0, 0), RatPoint(1, 1), RatPoint(2, 2)),
                    CollinearInput);
}

TEST_CASE("split_u on a lattice square") {
    UQuad u;
    u.poly = ConvexPolygon({RatPoint(0, 0), RatPoint(1, 0), RatPoint(1, 1), RatPoint(0, 1)});
    u.marked = 0;
    u.level = 0;

    RatPoint c2 = midpoint(RatPoint(1, 0), RatPoint(1, 1));  // right side
    RatPoint c3 = midpoint(RatPoint(1, 1), RatPoint(0, 1));  // top side

    SplitResult res = split_u(u, c2, c3);
    REQUIRE(res.children.size() == 3);
    Rat total(0);
    for (const auto& ch : res.children) {
        total += ch.poly.area_units();
        CHECK(ch.marked_vertex() == res.tripod.a);
        CHECK(ch.poly.size() == 4);
    }
    CHECK(total == u.poly.area_units());

    SUBCASE("children split again (convexity closes under the construction)") {
        for (const auto& ch : res.children) {
            const auto& v = ch.poly.verts();
            std::size_t m = static_cast<std::size_t>(ch.marked);
            std::size_t s1 = (m + 1) % 4;
            std::size_t s2 = (m + 2) % 4;
            RatPoint p1 = midpoint(v[s1], v[(s1 + 1) % 4]);
            RatPoint p2 = midpoint(v[s2], v[(s2 + 1) % 4]);
            SplitResult sub = split_u(ch, p1, p2);
            Rat sub_total(0);
            for (const auto& g : sub.children) sub_total += g.poly.area_units();
            CHECK(sub_total == ch.poly.area_units());
        }
    }

    SUBCASE("cut point on a marked-incident side is rejected") {
        RatPoint bad = midpoint(RatPoint(0, 0), RatPoint(1, 0));
        CHECK_THROWS_AS(split_u(u, bad, c3), PointOnWrongSide);
    }
}

TEST_CASE("collapse build: level-1 picture") {
    CollapseStage stage = build_collapse(1);
    REQUIRE(stage.tripods.size() == 1);
    const Tripod& g = stage.tripods[0].tripod;
    CHECK(g.a == RatPoint(make_rat(1, 3), make_rat(1, 3)));  // root centroid
    CHECK(g.osc_sq() == make_rat(1, 12));
    CHECK(stage.level_area_units(1) == 1);
}

TEST_CASE("collapse build: exact area conservation at every level") {
    CollapseStage stage = build_collapse(5);
    for (int level = 1; level <= 5; ++level) {
        CHECK(stage.level_area_units(level) == 1);
    }
    CHECK(stage.quads.size() == 3 + 9 + 27 + 81 + 243);
}

TEST_CASE("collapse boundary: midpoints map to centers, corners to tips") {
    CollapseStage stage = build_collapse(3);
    const TripodEntry* t1 = stage.find_tripod(gasket::WAddress::central_of(gasket::VAddress{}));
    REQUIRE(t1 != nullptr);
    RatPoint mid_img = stage.edge_point(t1->w, 0, make_rat(1, 2));
    CHECK(mid_img == t1->tripod.a);
    CHECK(stage.edge_point(t1->w, 0, Rat(0)) == t1->tripod.c[1]);
    CHECK(stage.edge_point(t1->w, 0, Rat(1)) == t1->tripod.c[2]);
}

TEST_CASE("tripod family: property (G) and degree bound") {
    CollapseStage stage = build_collapse(4);
    FamilyReport rep = tripod_family_checks(stage);
    CHECK(rep.property_g);
    CHECK(rep.max_degree <= 6);
    CHECK(rep.contacts > 0);

    SUBCASE("single tripod has no intersections") {
        CollapseStage s1 = build_collapse(1);
        FamilyReport r1 = tripod_family_checks(s1);
        CHECK(r1.property_g);
        CHECK(r1.contacts == 0);
    }
}

TEST_CASE("oscillation decay per level") {
    CollapseStage stage = build_collapse(6);
    std::vector<Rat> osc = oscillation_decay_sq(stage);
    REQUIRE(osc.size() == 7);
    for (int level = 3; level <= 6; ++level) {
        CHECK(osc[static_cast<std::size_t>(level)] <=
              osc[static_cast<std::size_t>(level - 1)]);
    }
}

TEST_CASE("map-case oscillation recurrence") {
    CollapseStage stage = build_collapse(7);
    MapRecurrenceSweep sweep = map_recurrence_sweep(stage, 12, 2024);
    CHECK(sweep.steps_checked > 0);
    CHECK(sweep.violations == 0);
}

TEST_CASE("anchor schedules: certificates and monotonicity") {
    CollapseStage stage = build_collapse(4);
    CHECK(check_anchor_certificates(stage));
    CHECK(check_boundary_monotone(stage));

    SUBCASE("halved heights keep the certificates") {
        HeightPolicy halved = [](const Tripod& t, const std::vector<TripodEntry>&) -> Rat {
            Rat h = default_height(t) / 2;
            return h;
        };
        CollapseStage s2 = build_collapse(3, halved);
        CHECK(check_anchor_certificates(s2));
        for (int level = 1; level <= 3; ++level) CHECK(s2.level_area_units(level) == 1);
    }
}

TEST_CASE("anchor fraction arithmetic") {
    AnchorSchedule sched{Int(5)};  // six cells per spoke
    CHECK(sched.fraction(make_rat(1, 2)) == 0);
    CHECK(sched.fraction(make_rat(1, 4)) == make_rat(1, 6));
    CHECK(sched.fraction(make_rat(1, 8)) == make_rat(2, 6));
    CHECK(sched.fraction(make_rat(1, 64)) == make_rat(5, 6));
    CHECK(sched.fraction(Rat(0)) == 1);
    Rat mid = sched.fraction(make_rat(3, 16));  // between 1/8 and 1/4
    CHECK(mid == (make_rat(1, 6) + make_rat(2, 6)) / 2);
}
