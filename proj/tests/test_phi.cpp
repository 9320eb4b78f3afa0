#include "doctest.h"

#include "gasketlab/phi.hpp"

#include <cmath>

using namespace gasketlab;
using namespace gasketlab::phi;

TEST_CASE("phi evaluation basics") {
    PhiStage stage = build_phi(3);

    SUBCASE("unbounded component is fixed pointwise") {
        RatPoint p(Rat(-1), Rat(0));
        Image img = stage.evaluate(p);
        CHECK(img.kind == Image::Kind::PlaneIdentity);
        CHECK(img.plane == p);
    }

    SUBCASE("edge midpoint of the level-1 triangle lands on the center lift") {
        auto w1 = gasket::w_vertices(gasket::WAddress::central_of(gasket::VAddress{}));
        RatPoint mid = midpoint(w1[0], w1[1]);
        Image img = stage.evaluate(mid);
        REQUIRE(img.kind == Image::Kind::Chart);
        CHECK(img.tripod == 0);
        CHECK(img.s == 0);
        CHECK(img.t == 0);
        std::string key = stage.canonical_key(img);
        CHECK(key.substr(0, 2) == "C:");
    }

    SUBCASE("interior points of removed triangles map into charts") {
        RatPoint centroid(make_rat(1, 3), make_rat(1, 3));
        Image img = stage.evaluate(centroid);
        CHECK(img.kind == Image::Kind::Chart);
        CHECK(img.tripod == 0);
    }

    SUBCASE("leftover leaves are reported as regions") {
        // near the root corner, never touched at level 3
        RatPoint p(make_rat(1, 100), make_rat(1, 100));
        Image img = stage.evaluate(p);
        CHECK(img.kind == Image::Kind::Region);
    }
}

TEST_CASE("phi: shared vertices map to a single identified point") {
    PhiStage stage = build_phi(4);
    // The vertex (1/4, 1/4) of the level-2 triangle in child 0 lies on the
    // boundary of the level-1 triangle: both chart evaluations must agree
    // after canonicalization.
    RatPoint z(make_rat(1, 4), make_rat(1, 4));
    auto pc = gasket::classify(z, 4);
    REQUIRE(pc.kind == gasket::PointClass::Kind::Vertex);

    // Evaluate via the tip of the deeper tripod.
    auto it_deep = stage.cstage.tripod_index.find(pc.a.str());
    REQUIRE(it_deep != stage.cstage.tripod_index.end());
    int deep = static_cast<int>(it_deep->second);
    fold::ChartImage deep_img = stage.folds[static_cast<std::size_t>(deep)].map_point(z);
    Image img1;
    img1.kind = Image::Kind::Chart;
    img1.tripod = deep;
    img1.spoke = deep_img.spoke;
    img1.face = deep_img.face;
    img1.s = deep_img.s;
    img1.t = deep_img.t;
    CHECK(img1.s == 1);  // the tip corner

    // Evaluate via the shallow host chart.
    auto it_host = stage.cstage.tripod_index.find(pc.b.str());
    REQUIRE(it_host != stage.cstage.tripod_index.end());
    int host = static_cast<int>(it_host->second);
    fold::ChartImage host_img = stage.folds[static_cast<std::size_t>(host)].map_point(z);
    Image img2;
    img2.kind = Image::Kind::Chart;
    img2.tripod = host;
    img2.spoke = host_img.spoke;
    img2.face = host_img.face;
    img2.s = host_img.s;
    img2.t = host_img.t;

    CHECK(stage.canonical_key(img1) == stage.canonical_key(img2));
}

TEST_CASE("phi: injectivity scan") {
    PhiStage stage = build_phi(4);
    InjectivityReport rep = injectivity_scan(stage, 3000, 42);
    CHECK(rep.collisions == 0);
    CHECK(rep.vertex_points > 100);
    CHECK(rep.samples == 3000);
}

TEST_CASE("phi: measure accounting") {
    PhiStage stage = build_phi(4);
    MeasureReport rep = measure_blowup(stage);
    CHECK(rep.planar_area_units == 1);  // exactly sqrt(3)/4 in Euclidean terms

    SUBCASE("halving the pillow heights halves the flap slack exactly") {
        RatInterval full = stage.flap_area();
        RatInterval half = stage.flap_area(make_rat(1, 2));
        CHECK(half.lo * 2 == full.lo);
        CHECK(half.hi * 2 == full.hi);
    }

    SUBCASE("rebuilding with a halved policy lands near half (anchor feedback)") {
        collapse::HeightPolicy halved = [](const collapse::Tripod& t,
                                           const std::vector<collapse::TripodEntry>&) -> Rat {
            Rat h = collapse::default_height(t) / 2;
            return h;
        };
        PhiStage stage2 = build_phi(4, halved);
        MeasureReport rep2 = measure_blowup(stage2);
        CHECK(rep2.planar_area_units == 1);
        double ratio = rep2.flap_area_mid / rep.flap_area_mid;
        CHECK(ratio > 0.4);
        CHECK(ratio < 0.6);
    }

    SUBCASE("tripod family has finite total length") {
        CHECK(to_double(rep.tripod_length.hi) < 1e9);
        CHECK(to_double(rep.tripod_length.lo) > 0);
    }
}

TEST_CASE("phi: boundary compatibility, modulus, distortion") {
    PhiStage stage = build_phi(4);
    CHECK(check_boundary_compatibility(stage));
    CHECK(check_modulus(stage));
    double m = max_piece_distortion(stage);
    CHECK(m > 1.0);
    CHECK(m < 100.0);
}
