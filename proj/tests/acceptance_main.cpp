// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include "gasketlab/collapse.hpp"
#include "gasketlab/flapplane.hpp"
#include "gasketlab/fold.hpp"
#include "gasketlab/gasket.hpp"
#include "gasketlab/phi.hpp"
#include "gasketlab/rng.hpp"
#include "gasketlab/witness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace gasketlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
    int id;
    std::string name;
    std::function<std::pair<bool, std::string>()> fn;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Combinatorics: 3^(n-1) triangles per level for n <= 10, exact covering
//    identity, under 10 s.
std::pair<bool, std::string> criterion_combinatorics() {
    auto t0 = std::chrono::steady_clock::now();
    auto entries = gasket::enumerate_w(10);
    std::vector<long long> per_level(11, 0);
    for (const auto& e : entries) per_level[static_cast<std::size_t>(e.address.level())]++;
    long long expect = 1;
    for (int n = 1; n <= 10; ++n) {
        if (per_level[static_cast<std::size_t>(n)] != expect)
            return {false, "count mismatch at level " + std::to_string(n)};
        expect *= 3;
    }
    Rat cover(1);
    for (int n = 1; n <= 10; ++n) {
        cover *= make_rat(3, 4);
        if (gasket::level_cover_area_units(n) != cover)
            return {false, "covering identity failed at level " + std::to_string(n)};
    }
    double dt = seconds_since(t0);
    if (dt >= 10.0) return {false, "runtime " + std::to_string(dt) + "s"};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "19683 leaves checked, runtime %.2fs", dt);
    return {true, buf};
}

// 2. Radial block quadrature within 5% of 2 pi / log(R/r); staircase
//    energy * N flat within a factor 2 across N in {4..64}.
std::pair<bool, std::string> criterion_radial() {
    const double e1 = std::exp(1.0);
    for (double ratio : {e1, e1 * e1, e1 * e1 * e1 * e1}) {
        witness::RadialBlock b = witness::radial_block(0.2 * ratio, 0.2);
        double analytic = b.analytic_energy();
        double quad = witness::radial_energy_quadrature(b);
        if (std::abs(quad - analytic) / analytic >= 0.05)
            return {false, "radial quadrature off at R/r=" + std::to_string(ratio)};
    }
    double lo = 1e300, hi = 0;
    for (long long n : {4LL, 8LL, 16LL, 32LL, 64LL}) {
        witness::StaircaseBlock b = witness::staircase_block(n, 0.25);
        double scaled = witness::staircase_energy_quadrature(b) * static_cast<double>(n);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    if (hi / lo > 2.0) return {false, "staircase energy*N spread exceeds factor 2"};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "energy*N in [%.4f, %.4f] (3*pi = %.4f)", lo, hi, 3 * kPi);
    return {true, buf};
}

// 3. Level-8 witness with eps = 0.1: energy below eps, exact star condition,
//    recurrences dominate 50 sampled sequences, under 60 s.
std::pair<bool, std::string> criterion_witness_build(witness::ScalarWitness& out) {
    auto t0 = std::chrono::steady_clock::now();
    out = witness::build_witness(8, make_rat(1, 10));
    if (!(out.total_energy_upper() < make_rat(1, 10)))
        return {false, "certified energy bound not below 0.1"};
    if (!witness::check_star_condition(out)) return {false, "star condition violated"};
    witness::RecurrenceSweep sweep = witness::recurrence_sweep(out, 50, 20260810);
    if (sweep.violations != 0)
        return {false, std::to_string(sweep.violations) + " recurrence violations"};
    double dt = seconds_since(t0);
    if (dt >= 60.0) return {false, "runtime " + std::to_string(dt) + "s"};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "energy=%.5f, %d sequences / %d steps dominated, runtime %.2fs",
                  out.total_energy(), sweep.sequences, sweep.steps_checked, dt);
    return {true, buf};
}

// 4. 100 lines through B(x0, r0): crossing integral >= 1 within 2%, while
//    ||grad f||_2 < eps and below the Sobolev tension threshold.
std::pair<bool, std::string> criterion_lines(const witness::ScalarWitness& w) {
    witness::LineReport rep = witness::line_energy_check(w, 100, 20260810);
    for (const auto& line : rep.lines) {
        if (line.lower_bound < 1.0 - 0.02)
            return {false, "crossing integral " + std::to_string(line.lower_bound)};
    }
    if (!(rep.grad_l2 < 0.1)) return {false, "gradient norm not below eps"};
    if (!rep.tension_demonstrated) return {false, "no Sobolev tension"};
    char buf[160];
    std::snprintf(buf, sizeof(buf), "min crossing=%.4f, ||grad||=%.4f < 0.1 and < %.4f",
                  rep.min_lower_bound, rep.grad_l2, rep.r0 / (std::sqrt(kPi) * rep.R0));
    return {true, buf};
}

// 5. Positive-measure witness, p = 2, n = 2, 1000 terms.
std::pair<bool, std::string> criterion_positive_measure() {
    std::vector<double> log2_radii;
    for (int i = 0; i < 1000; ++i) log2_radii.push_back(-2.0 - 1.5 * i);
    auto rep = witness::positive_measure_witness(log2_radii, 2.0, 2);
    double tail = rep.omega_partial_sums.back() - rep.omega_partial_sums[499];
    if (tail >= 1e-3) return {false, "omega tail " + std::to_string(tail)};
    double need = std::log(1000.0) * 0.9;
    if (rep.full_partial_sums.back() < need)
        return {false, "full-plane sum " + std::to_string(rep.full_partial_sums.back())};
    char buf[160];
    std::snprintf(buf, sizeof(buf), "full sum=%.4f >= %.4f, omega tail=%.2e",
                  rep.full_partial_sums.back(), need, tail);
    return {true, buf};
}

// 6. Collapse: exact area conservation to level 8; property (G) and degree
//    bound 6 on the full family.
std::pair<bool, std::string> criterion_collapse(collapse::CollapseStage& out) {
    out = collapse::build_collapse(8);
    for (int level = 1; level <= 8; ++level) {
        if (out.level_area_units(level) != 1)
            return {false, "area not conserved at level " + std::to_string(level)};
    }
    collapse::FamilyReport rep = collapse::tripod_family_checks(out);
    if (!rep.property_g) return {false, "property (G) violated: " + rep.violation};
    if (rep.max_degree > 6) return {false, "degree " + std::to_string(rep.max_degree)};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "areas exact at 8 levels; %lld contacts, max degree %d",
                  rep.contacts, rep.max_degree);
    return {true, buf};
}

// 7. Fold: exact h-invariance of trapezoid distortion, reported M, modulus
//    certificate for every triangle to level 6.
std::pair<bool, std::string> criterion_fold() {
    auto g = collapse::canonical_tripod(RatPoint(make_rat(1, 2), make_rat(1, 2)),
                                        RatPoint(Rat(0), make_rat(1, 2)),
                                        RatPoint(make_rat(1, 2), Rat(0)));
    std::array<RatPoint, 3> tri{RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1)};
    Rat len2 = g.len2(0);
    auto trap_mu2 = [&](const fold::FoldMap& fm) {
        std::vector<Rat> out;
        for (const auto& piece : fm.representative_pieces()) {
            if (piece.trapezoid_half)
                out.push_back(piece.distortion(fm.g.len2(piece.spoke), fm.h2).mu2());
        }
        return out;
    };
    fold::FoldMap f6 = fold::assemble_fold(tri, g, len2 / 36);
    fold::FoldMap f12 = fold::assemble_fold(tri, g, len2 / 144);
    fold::FoldMap f24 = fold::assemble_fold(tri, g, len2 / 576);
    auto m6 = trap_mu2(f6), m12 = trap_mu2(f12), m24 = trap_mu2(f24);
    if (m6.size() != m12.size() || m6.size() != m24.size())
        return {false, "piece inventory mismatch"};
    for (std::size_t i = 0; i < m6.size(); ++i) {
        if (!(m6[i] == m12[i] && m6[i] == m24[i]))
            return {false, "trapezoid distortion not h-invariant (exact)"};
    }
    double sym_m = f6.distortion_value();
    if (!(sym_m > 1.0) || !(sym_m < 1e6)) return {false, "reported M not finite"};

    collapse::CollapseStage stage = collapse::build_collapse(6);
    double max_m = 0;
    for (const auto& te : stage.tripods) {
        auto wv = gasket::w_vertices(te.w);
        fold::FoldMap fm = fold::assemble_fold(wv, te.tripod, te.h * te.h);
        if (!fm.anchor_certificate())
            return {false, "modulus certificate failed at " + te.w.str()};
        max_m = std::max(max_m, fm.distortion_value());
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "exact h-invariance; symmetric M=%.5f, level<=6 family max M=%.5f", sym_m,
                  max_m);
    return {true, buf};
}

// 8. Flap-plane: (G1)/(G2) on 1000 pairs per stage for n <= 20 over the
//    level-4 family; GH gaps within the tail bound.
std::pair<bool, std::string> criterion_flap_stages() {
    auto family = collapse::build_collapse(4).tripods;
    int n_max = 20;
    auto sched = flap::height_schedule(family, n_max);
    std::vector<Rat> hs;
    for (const auto& e : sched) hs.push_back(e.h);

    std::vector<flap::FlapPlaneStage> stages;
    for (int n = 1; n <= n_max; ++n) stages.push_back(flap::build_stage(family, n, hs));

    double worst_g2_slack = 0;
    for (int n = 1; n <= n_max; ++n) {
        const flap::FlapPlaneStage& cur = stages[static_cast<std::size_t>(n - 1)];
        flap::DistanceOracle oracle(cur, 0.3);  // lift-path bounds drive the checks
        const flap::FlapPlaneStage* prev =
            (n >= 2) ? &stages[static_cast<std::size_t>(n - 2)] : nullptr;
        flap::DistanceOracle* prev_oracle = nullptr;
        flap::DistanceOracle prev_storage = oracle;  // placeholder copy
        if (prev) {
            prev_storage = flap::DistanceOracle(*prev, 0.3);
            prev_oracle = &prev_storage;
        }
        Rng rng(1000 + static_cast<uint64_t>(n));
        int done = 0;
        while (done < 1000) {
            flap::FlapPoint a = flap::FlapPoint::plane(rng.uniform(-0.1, 1.1),
                                                       rng.uniform(-0.1, 1.0));
            flap::FlapPoint b = flap::FlapPoint::plane(rng.uniform(-0.1, 1.1),
                                                       rng.uniform(-0.1, 1.0));
            auto up = oracle.lift_path_upper(a, b);
            if (!up) continue;
            double low = oracle.projection_lower(a, b);
            if (low > *up + 1e-12) return {false, "(G1) violated at stage " + std::to_string(n)};
            if (prev_oracle) {
                auto up_prev = prev_oracle->lift_path_upper(a, b);
                if (up_prev) {
                    double slack = *up - (*up_prev +
                                          6.0 * cur.tripods[static_cast<std::size_t>(n - 1)].hd);
                    worst_g2_slack = std::max(worst_g2_slack, slack);
                    if (slack > 1e-9)
                        return {false, "(G2) violated at stage " + std::to_string(n)};
                }
            }
            ++done;
        }
    }
    flap::GhReport gh = flap::gh_distortion(stages.back(), 10, 1000, 4242);
    if (gh.violations != 0) return {false, "GH gap exceeded the tail bound"};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "20 stages x 1000 pairs; worst (G2) slack %.2e; GH max gap %.4g <= %.4g",
                  worst_g2_slack, gh.max_gap, gh.tail_bound);
    return {true, buf};
}

// 9. Ahlfors sweep and LLC probes.
std::pair<bool, std::string> criterion_ahlfors_llc() {
    auto family = collapse::build_collapse(2).tripods;
    auto sched = flap::height_schedule(family, 4);
    std::vector<Rat> hs;
    for (const auto& e : sched) hs.push_back(e.h);

    flap::FlapPlaneStage st3 = flap::build_stage(family, 3, hs);
    flap::DistanceOracle oracle3(st3, 0.05);
    flap::AhlforsReport sweep = flap::regularity_sweep(oracle3, 500, 20260810);
    if (sweep.upper_violations != 0)
        return {false, std::to_string(sweep.upper_violations) + " upper-bound violations"};

    // LLC: single-tripod stage must achieve c <= 48, k-tripod stages
    // c <= 2^(k-1) * 48 for k <= 3.
    double worst[4] = {0, 0, 0, 0};
    for (int k = 1; k <= 3; ++k) {
        flap::FlapPlaneStage st = flap::build_stage(family, k, hs);
        flap::DistanceOracle oracle(st, 0.05);
        double hmin = st.min_height();
        Rng rng(777 + static_cast<uint64_t>(k));
        int case2_runs = 0;
        for (int it = 0; it < 12; ++it) {
            bool small_r = (it % 2 == 0);
            double r = small_r ? (1.5 + 1.0 * rng.uniform()) * hmin
                               : 0.2 + 0.2 * rng.uniform();
            flap::FlapPoint x, z, w;
            if (small_r && it % 4 == 0) {
                const flap::StageTripod& t0 = st.tripods[0];
                double u0 = t0.len[0] * 0.4;
                x = flap::FlapPoint::on_rect(flap::RectId{0, 0, 0}, u0, t0.hd * 0.5);
                double du = std::min(1.3 * r, t0.len[0] * 0.45);
                if (du < r || u0 + du > t0.len[0]) continue;
                z = flap::FlapPoint::on_rect(flap::RectId{0, 0, 0}, u0 + du, t0.hd * 0.5);
                EuclidPoint base = st.project_to_plane(x);
                w = flap::FlapPoint::plane(base.x + 1.3 * r, base.y - 1.3 * r);
                ++case2_runs;
            } else {
                EuclidPoint base{0.1 + 0.8 * rng.uniform(), 0.05 + 0.6 * rng.uniform()};
                x = flap::FlapPoint::plane(base.x, base.y);
                z = flap::FlapPoint::plane(base.x + 1.3 * r, base.y);
                w = flap::FlapPoint::plane(base.x - 1.1 * r, base.y + 0.7 * r);
            }
            if (oracle.projection_lower(x, z) < r || oracle.projection_lower(x, w) < r)
                continue;
            flap::LlcReport rep = flap::llc_probe(oracle, x, r, z, w);
            worst[k] = std::max(worst[k], rep.c_achieved);
        }
        {
            // antipodal pair: the straight connection dives through the ball,
            // forcing the circumscribed detour arc at radius r/48
            double r = 0.15;
            flap::FlapPoint x = flap::FlapPoint::plane(0.55, 0.15);
            flap::FlapPoint z = flap::FlapPoint::plane(0.55 + 1.4 * r, 0.15 + 0.01 * r);
            flap::FlapPoint w = flap::FlapPoint::plane(0.55 - 1.4 * r, 0.15 - 0.01 * r);
            flap::LlcReport rep = flap::llc_probe(oracle, x, r, z, w);
            worst[k] = std::max(worst[k], rep.c_achieved);
            if (rep.c_achieved < 40.0) return {false, "arc detour not exercised"};
        }
        double budget = std::pow(2.0, k - 1) * 48.0;
        if (worst[k] > budget + 1e-6)
            return {false, "LLC constant " + std::to_string(worst[k]) + " at k=" +
                               std::to_string(k)};
        if (case2_runs == 0) return {false, "no small-radius probes ran"};
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "500 balls within (pi+144pi+2) r^2; LLC c: k=1 %.2f, k=2 %.2f, k=3 %.2f",
                  worst[1], worst[2], worst[3]);
    return {true, buf};
}

// 10. Level-6 homeomorphism stage: injectivity, exact planar area, exact
//     flap-slack halving.
std::pair<bool, std::string> criterion_phi() {
    phi::PhiStage stage = phi::build_phi(6);
    phi::InjectivityReport rep = phi::injectivity_scan(stage, 100000, 20260810);
    if (rep.collisions != 0) return {false, rep.first_collision};
    phi::MeasureReport mr = phi::measure_blowup(stage);
    if (mr.planar_area_units != 1) return {false, "planar image area not exact"};
    RatInterval full = stage.flap_area();
    RatInterval half = stage.flap_area(make_rat(1, 2));
    if (!(half.lo * 2 == full.lo && half.hi * 2 == full.hi))
        return {false, "flap slack does not halve exactly"};
    if (!phi::check_boundary_compatibility(stage)) return {false, "boundary traces differ"};
    if (!phi::check_modulus(stage)) return {false, "modulus certificate failed"};
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%lld vertices + %lld samples collision-free; planar area exact; "
                  "flap slack %.4g halves exactly",
                  rep.vertex_points, rep.samples, to_double(full.mid()));
    return {true, buf};
}

}  // namespace

int main() {
    witness::ScalarWitness witness_l8;
    collapse::CollapseStage collapse_l8;

    std::vector<Criterion> criteria{
        {1, "gasket combinatorics", criterion_combinatorics},
        {2, "radial and staircase energy", criterion_radial},
        {3, "witness level 8",
         [&]() { return criterion_witness_build(witness_l8); }},
        {4, "line-crossing tension", [&]() { return criterion_lines(witness_l8); }},
        {5, "positive-measure witness", criterion_positive_measure},
        {6, "collapse conservation and family",
         [&]() { return criterion_collapse(collapse_l8); }},
        {7, "fold distortion and modulus", criterion_fold},
        {8, "flap-plane projection bounds", criterion_flap_stages},
        {9, "Ahlfors and LLC constants", criterion_ahlfors_llc},
        {10, "stage-6 homeomorphism data", criterion_phi},
    };

    int failures = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : criteria) {
        auto ct0 = std::chrono::steady_clock::now();
        std::pair<bool, std::string> result;
        try {
            result = c.fn();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        double dt = seconds_since(ct0);
        std::printf("[%s] criterion %2d (%s): %s [%.2fs]\n", result.first ? "PASS" : "FAIL",
                    c.id, c.name.c_str(), result.second.c_str(), dt);
        std::fflush(stdout);
        if (!result.first) ++failures;
    }
    std::printf("%d/10 criteria passed in %.1fs\n", 10 - failures, seconds_since(t0));
    return failures;
}
