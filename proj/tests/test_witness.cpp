#include "doctest.h"

#include "gasketlab/witness.hpp"

#include <cmath>

using namespace gasketlab;
using namespace gasketlab::witness;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("radial block: analytic energy and quadrature agreement") {
    const double e = std::exp(1.0);
    for (double ratio : {e, e * e, e * e * e * e}) {
        RadialBlock b = radial_block(0.25 * ratio, 0.25);
        double analytic = b.analytic_energy();
        CHECK(analytic == doctest::Approx(2.0 * kPi / std::log(ratio)).epsilon(1e-12));
        double quad = radial_energy_quadrature(b);
        CHECK(std::abs(quad - analytic) / analytic < 0.05);
    }

    SUBCASE("energy vanishes as R/r grows") {
        double prev = 1e300;
        for (double ratio : {4.0, 64.0, 4096.0}) {
            double en = radial_block(ratio, 1.0).analytic_energy();
            CHECK(en < prev);
            prev = en;
        }
    }

    SUBCASE("log midpoint value is 1/2") {
        RadialBlock b = radial_block(0.9, 0.1);
        CHECK(b.value(std::sqrt(0.9 * 0.1)) == doctest::Approx(0.5).epsilon(1e-12));
    }

    CHECK_THROWS_AS(radial_block(0.1, 0.2), BadRadii);
}

TEST_CASE("staircase profile: exact anchors and energy scaling") {
    StaircaseProfile prof{3};

    SUBCASE("dyadic edge-point increments stay within 1/N") {
        // On a unit edge with the vertex at 0 the ratio at 2^-k is 2^(2-k).
        Rat prev = prof.value_ratio(Rat(2));  // k = 1 (midpoint), u = 2
        for (int k = 2; k <= 8; ++k) {
            Rat u = make_rat(4, 1 << k);
            Rat cur = prof.value_ratio(u);
            CHECK(rat_abs(cur - prev) <= make_rat(1, 3));
            prev = cur;
        }
        CHECK(prof.value_ratio(Rat(1)) == 0);
        CHECK(prof.value_ratio(make_rat(1, 32)) == 1);
    }

    SUBCASE("analytic full-plane energy is 3 pi / N") {
        for (long long n : {4LL, 8LL, 16LL, 32LL, 64LL}) {
            StaircaseBlock b = staircase_block(n, 0.25);
            double quad = staircase_energy_quadrature(b);
            double analytic = b.analytic_energy();
            CHECK(std::abs(quad - analytic) / analytic < 0.05);
            // energy * N is constant within a factor 2
            CHECK(quad * static_cast<double>(n) > 0.5 * 3.0 * kPi);
            CHECK(quad * static_cast<double>(n) < 2.0 * 3.0 * kPi);
        }
    }
}

TEST_CASE("half-plane block") {
    std::vector<double> xs, ys;
    for (int k = 1; k <= 24; ++k) {
        xs.push_back(std::pow(4.0, -k));
        ys.push_back(-std::pow(4.0, -k));
    }

    SUBCASE("boundary values and sequence increments") {
        HalfPlaneBlock b = halfplane_block(xs, ys, 4);
        CHECK(b.value(0.0, 0.0) == doctest::Approx(1.0));
        CHECK(b.value(0.5, 0.1) == doctest::Approx(0.0));
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            double d = std::abs(b.value(xs[k], 0.0) - b.value(xs[k + 1], 0.0));
            CHECK(d <= 0.25 + 1e-12);
        }
        double prev = b.value(xs[0], 0.0);
        for (std::size_t k = 1; k < xs.size(); ++k) {
            double cur = b.value(xs[k], 0.0);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }

    SUBCASE("doubling N halves the energy") {
        HalfPlaneBlock b1 = halfplane_block(xs, ys, 4);
        HalfPlaneBlock b2 = halfplane_block(xs, ys, 8);
        double e1 = halfplane_energy_quadrature(b1);
        double e2 = halfplane_energy_quadrature(b2);
        CHECK(std::abs(e2 / e1 - 0.5) < 0.15);
        CHECK(std::abs(e1 - b1.analytic_energy()) / b1.analytic_energy() < 0.05);
    }

    SUBCASE("non-monotone input rejected") {
        std::vector<double> bad{0.25, 0.3, 0.1};
        CHECK_THROWS_AS(halfplane_block(bad, ys, 4), NonMonotoneSequence);
    }
}

TEST_CASE("witness build: level-1 block and level-2 averaging") {
    ScalarWitness w = build_witness(3, make_rat(1, 10));

    const TriangleRecord* w1 = w.find(gasket::WAddress::central_of(gasket::VAddress{}));
    REQUIRE(w1 != nullptr);
    CHECK(w1->params.a == 1);
    CHECK(w1->params.c[0] == 0);
    CHECK(w1->osc == 1);

    for (const auto& rec : w.tris) {
        if (rec.w.level() != 2) continue;
        Rat mean = (rec.params.c[0] + rec.params.c[1] + rec.params.c[2]) / 3;
        CHECK(rec.params.a == mean);
    }
}

TEST_CASE("witness: exact energy accounting meets the budget schedule") {
    Rat eps = make_rat(1, 10);
    ScalarWitness w = build_witness(4, eps);

    for (const auto& rec : w.tris) {
        CHECK(rec.energy_over_pi * make_rat(355, 113) <= rec.budget);
    }
    // The squared-norm budget sums to eps^2 * sum 4^-l = eps^2 / 3.
    CHECK(w.total_energy_upper() < eps * eps);
    CHECK(w.total_energy() < to_double(eps) * to_double(eps));
    CHECK(std::sqrt(w.total_energy()) < to_double(eps));
}

TEST_CASE("witness: star condition holds exactly on anchors") {
    ScalarWitness w = build_witness(5, make_rat(1, 10));
    CHECK(check_star_condition(w));

    const TriangleRecord* rec = w.find(gasket::WAddress::central_of(gasket::VAddress{}));
    REQUIRE(rec != nullptr);
    Rat prev = w.edge_value(rec->w, 0, make_rat(1, 2));
    for (int k = 2; k <= 10; ++k) {
        Rat t = make_rat(1, 1 << k);
        Rat cur = w.edge_value(rec->w, 0, t);
        CHECK(rat_abs(cur - prev) * 3 <= rec->osc);
        prev = cur;
    }
}

TEST_CASE("witness: f is 1 near the centre and 0 outside the root") {
    ScalarWitness w = build_witness(3, make_rat(1, 10));
    EuclidPoint x0 = to_euclid(w.x0);
    double r0 = std::sqrt(to_double(w.r0_sq));
    for (double ang = 0; ang < 6.28; ang += 0.7) {
        EuclidPoint p{x0.x + 0.95 * r0 * std::cos(ang), x0.y + 0.95 * r0 * std::sin(ang)};
        auto v = w.value_at(p);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(1.0));
    }
    CHECK(*w.value_at({-0.5, 0.0}) == 0.0);
    CHECK(*w.value_at({2.0, 2.0}) == 0.0);
}

TEST_CASE("witness: oscillation recurrences along nested sequences") {
    ScalarWitness w = build_witness(7, make_rat(1, 10));

    SUBCASE("interior word obeys the 7/9 contraction per step") {
        gasket::VAddress word;
        for (int i = 0; i < 7; ++i) word.path.push_back(static_cast<uint8_t>(i % 3));
        RecurrenceReport rep = verify_recurrences(w, word);
        CHECK(rep.all_ok());
        int case3 = 0;
        for (const auto& s : rep.steps) {
            if (s.case_id == 3) ++case3;
        }
        CHECK(case3 > 0);
    }

    SUBCASE("sweep over random words finds no violations") {
        RecurrenceSweep sweep = recurrence_sweep(w, 20, 12345);
        CHECK(sweep.sequences == 20);
        CHECK(sweep.violations == 0);
        CHECK(sweep.steps_checked > 0);
    }

    SUBCASE("theoretical envelopes") {
        RecurrenceReport rep = verify_recurrences(w, gasket::VAddress{});
        REQUIRE(rep.case1_envelope.size() >= 3);
        CHECK(rep.case1_envelope[0] == doctest::Approx(2.0 / 3.0));
        CHECK(rep.case1_envelope[2] == doctest::Approx(8.0 / 27.0));
        CHECK(rep.case3_envelope[0] == doctest::Approx(1.0));
        CHECK(rep.case3_envelope[1] == doctest::Approx(7.0 / 9.0));
    }
}

TEST_CASE("witness: monotonicity on sampled v-triangles") {
    ScalarWitness w = build_witness(5, make_rat(1, 10));
    CHECK(check_monotonicity(w, gasket::VAddress::parse("0")));
    CHECK(check_monotonicity(w, gasket::VAddress::parse("12")));
    CHECK(check_monotonicity(w, gasket::VAddress::parse("201")));
}

TEST_CASE("witness: line crossings accumulate unit variation") {
    ScalarWitness w = build_witness(5, make_rat(1, 20));
    LineReport rep = line_energy_check(w, 20, 99);
    REQUIRE(rep.lines.size() == 20);
    for (const auto& lc : rep.lines) {
        CHECK(lc.lower_bound >= 1.0 - 0.02);
    }
    CHECK(rep.tension_demonstrated);
    CHECK(*w.value_at({0.5, 1.5}) == 0.0);
}

TEST_CASE("witness: gradient vs centered differences") {
    ScalarWitness w = build_witness(3, make_rat(1, 10));
    const TriangleRecord* rec = w.find(gasket::WAddress::central_of(gasket::VAddress{}));
    REQUIRE(rec != nullptr);
    EuclidPoint v0 = to_euclid(rec->x[0]);
    double r1 = to_double(rec->params.R1);
    StaircaseProfile prof{rec->params.N};
    int tested = 0;
    for (double frac : {0.53, 0.62, 0.71, 0.83, 0.91}) {
        double rho = r1 * frac;
        double ca = to_double(rec->params.c[0] - rec->params.a);
        double analytic = std::abs(ca) * prof.slope_ratio_d(frac) / r1;
        double h = 1e-7;
        EuclidPoint dir{-std::sqrt(0.5), -std::sqrt(0.5)};
        EuclidPoint p{v0.x + rho * dir.x, v0.y + rho * dir.y};
        auto fp = w.value_at({p.x + h * dir.x, p.y + h * dir.y});
        auto fm = w.value_at({p.x - h * dir.x, p.y - h * dir.y});
        REQUIRE(fp.has_value());
        REQUIRE(fm.has_value());
        double fd = std::abs(*fp - *fm) / (2 * h);
        if (analytic > 1e-9) {
            CHECK(std::abs(fd - analytic) / analytic < 0.01);
            ++tested;
        }
    }
    CHECK(tested >= 3);
}

TEST_CASE("witness: budget cap raises BudgetInfeasible") {
    CHECK_THROWS_AS(build_witness(4, make_rat(1, 1000000), 10), BudgetInfeasible);
}

TEST_CASE("positive-measure witness") {
    SUBCASE("p = 2, n = 2: divergent full-plane series, convergent mask series") {
        std::vector<double> log2_radii;
        for (int i = 0; i < 1000; ++i) log2_radii.push_back(-2.0 - 1.5 * i);
        PMWitnessReport rep = positive_measure_witness(log2_radii, 2.0, 2);
        REQUIRE(rep.terms.size() == 1000);
        CHECK(rep.terms[0].m == 1);
        CHECK(rep.full_partial_sums.back() == doctest::Approx(7.485470861).epsilon(1e-6));
        CHECK(rep.full_partial_sums.back() >= std::log(1000.0) * 0.9);
        double tail = rep.omega_partial_sums.back() - rep.omega_partial_sums[499];
        CHECK(tail < 1e-3);
    }

    SUBCASE("p = 1, n = 2: m_i r_i bounded by 2") {
        std::vector<double> log2_radii;
        for (int i = 1; i <= 10; ++i) log2_radii.push_back(-3.0 * i);  // r_i = 8^-i
        PMWitnessReport rep = positive_measure_witness(log2_radii, 1.0, 2);
        for (const auto& t : rep.terms) {
            double m_r = static_cast<double>(t.m) * std::exp2(t.log2_r);
            CHECK(m_r >= 1.0 - 1e-9);
            CHECK(m_r <= 2.0 + 1e-9);
        }
    }

    SUBCASE("empty mask kills the omega energy") {
        std::vector<double> log2_radii{-2.0, -3.5, -5.0};
        std::vector<double> mask{0.0, 0.0, 0.0};
        PMWitnessReport rep = positive_measure_witness(log2_radii, 2.0, 2, &mask);
        CHECK(rep.omega_partial_sums.back() == 0.0);
    }

    SUBCASE("halving violation rejected") {
        std::vector<double> bad{-2.0, -2.5};
        CHECK_THROWS_AS(positive_measure_witness(bad, 2.0, 2), RadiiViolation);
    }
}
