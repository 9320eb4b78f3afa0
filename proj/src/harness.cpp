#include "gasketlab/harness.hpp"

#include "gasketlab/collapse.hpp"
#include "gasketlab/flapplane.hpp"
#include "gasketlab/fold.hpp"
#include "gasketlab/gasket.hpp"
#include "gasketlab/phi.hpp"
#include "gasketlab/report.hpp"
#include "gasketlab/rng.hpp"
#include "gasketlab/svg.hpp"
#include "gasketlab/witness.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace gasketlab {
namespace harness {

using nlohmann::ordered_json;

namespace {

ordered_json rat_json(const Rat& r) {
    return ordered_json{{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}};
}

ordered_json dyadic_json(const Rat& r) {
    Dyadic d = Dyadic::from_rat(r);
    return ordered_json{{"num", d.num().get_str()}, {"exp", d.exp()}};
}

ordered_json point_json(const RatPoint& p) {
    ordered_json out = ordered_json::array();
    if (Dyadic::is_dyadic(p.a) && Dyadic::is_dyadic(p.b)) {
        out.push_back(dyadic_json(p.a));
        out.push_back(dyadic_json(p.b));
    } else {
        out.push_back(rat_json(p.a));
        out.push_back(rat_json(p.b));
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << content;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

ordered_json report_envelope(const ExperimentConfig& cfg, const std::string& command) {
    ordered_json env;
    env["command"] = command;
    env["config"] = ordered_json::parse(config_json(cfg, command));
    env["config_hash"] = sha1_hex(config_json(cfg, command));
    env["schema_version"] = 1;
    return env;
}

Rat parse_rat_token(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stol(s));
    Rat r(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
    r.canonicalize();
    return r;
}

/// "a,b" with rational tokens like 1/3 in lattice coordinates.
RatPoint parse_point(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("point must be 'a,b'");
    return RatPoint(parse_rat_token(s.substr(0, comma)), parse_rat_token(s.substr(comma + 1)));
}

Rat rat_from_double(double v, long denom = 1000000) {
    Rat r(static_cast<long>(std::llround(v * denom)), denom);
    r.canonicalize();
    return r;
}

}  // namespace

std::string config_json(const ExperimentConfig& cfg, const std::string& command) {
    ordered_json j;
    j["command"] = command;
    j["level"] = cfg.level;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["resolution"] = cfg.resolution;
    return j.dump();
}

namespace {

int run_gasket(const std::string& action, const ExperimentConfig& cfg) {
    if (action == "enumerate" || action.empty()) {
        auto entries = gasket::enumerate_w(cfg.level);
        ordered_json j = report_envelope(cfg, "gasket.enumerate");
        ordered_json arr = ordered_json::array();
        for (const auto& e : entries) {
            ordered_json item;
            item["address"] = e.address.str();
            item["level"] = e.address.level();
            ordered_json verts = ordered_json::array();
            for (const auto& v : e.vertices) verts.push_back(point_json(v));
            item["vertices"] = verts;
            arr.push_back(item);
        }
        j["count"] = entries.size();
        j["triangles"] = arr;
        write_file(out_path(cfg, "gasket_enumerate.json"), j.dump(1));
        if (cfg.format == "svg")
            write_file(out_path(cfg, "gasket.svg"), svg::render_gasket(cfg.level));
        std::cout << "gasket enumerate: " << entries.size() << " triangles\n";
        return 0;
    }
    if (action == "classify") {
        // classification sweep over the dyadic anchor points of the root edge
        ordered_json j = report_envelope(cfg, "gasket.classify");
        ordered_json arr = ordered_json::array();
        for (int k = 1; k <= cfg.level; ++k) {
            RatPoint p = gasket::dyadic_edge_point(gasket::WAddress::level0(), 0, 0, k);
            auto pc = gasket::classify(p, cfg.level);
            ordered_json item;
            item["k"] = k;
            item["kind"] = pc.kind == gasket::PointClass::Kind::Vertex ? "vertex" : "edge";
            if (pc.kind == gasket::PointClass::Kind::Vertex) item["a"] = pc.a.str();
            arr.push_back(item);
        }
        j["points"] = arr;
        write_file(out_path(cfg, "gasket_classify.json"), j.dump(1));
        return 0;
    }
    throw ConfigError("unknown gasket action: " + action);
}

int run_witness(const std::string& action, const ExperimentConfig& cfg) {
    Rat eps = rat_from_double(cfg.epsilon);
    witness::ScalarWitness w = witness::build_witness(cfg.level, eps);
    if (action == "build" || action.empty()) {
        ordered_json j = report_envelope(cfg, "witness.build");
        ordered_json tris = ordered_json::array();
        for (const auto& rec : w.tris) {
            ordered_json item;
            item["address"] = rec.w.str();
            item["a"] = rat_json(rec.params.a);
            ordered_json cs = ordered_json::array();
            for (const auto& c : rec.params.c) cs.push_back(rat_json(c));
            item["c"] = cs;
            item["N"] = rec.params.N;
            item["R1"] = rat_json(rec.params.R1);
            tris.push_back(item);
        }
        j["triangles"] = tris;
        j["r0_sq"] = rat_json(w.r0_sq);
        j["R0_sq"] = rat_json(w.R0_sq);
        j["epsilon"] = rat_json(w.epsilon);
        j["total_energy"] = w.total_energy();
        write_file(out_path(cfg, "witness.json"), j.dump(1));
        // energy CSV
        std::string csv = "address,level,energy,bound\n";
        for (const auto& rec : w.tris) {
            csv += rec.w.str() + "," + std::to_string(rec.w.level()) + "," +
                   format_double(to_double(rec.energy_over_pi) * 3.14159265358979323846) + "," +
                   format_double(to_double(rec.budget)) + "\n";
        }
        write_file(out_path(cfg, "witness_energy.csv"), csv);
        if (cfg.format == "svg")
            write_file(out_path(cfg, "witness.svg"), svg::render_witness_heatmap(w));
        std::cout << "witness build: " << w.tris.size()
                  << " triangles, energy=" << format_double(w.total_energy()) << "\n";
        return 0;
    }
    if (action == "verify") {
        bool star = witness::check_star_condition(w);
        witness::RecurrenceSweep sweep = witness::recurrence_sweep(w, 50, cfg.seed);
        ordered_json j = report_envelope(cfg, "witness.verify");
        j["star_condition"] = star;
        j["sequences"] = sweep.sequences;
        j["steps_checked"] = sweep.steps_checked;
        j["violations"] = sweep.violations;
        write_file(out_path(cfg, "witness_verify.json"), j.dump(1));
        std::cout << "witness verify: star=" << star << " violations=" << sweep.violations
                  << "\n";
        if (!star || sweep.violations > 0) throw AssertionFailure("witness recurrences failed");
        return 0;
    }
    if (action == "lines") {
        witness::LineReport rep = witness::line_energy_check(w, 100, cfg.seed);
        ordered_json j = report_envelope(cfg, "witness.lines");
        j["min_lower_bound"] = rep.min_lower_bound;
        j["grad_l2"] = rep.grad_l2;
        j["tension"] = rep.tension_demonstrated;
        write_file(out_path(cfg, "witness_lines.json"), j.dump(1));
        std::cout << "witness lines: min=" << format_double(rep.min_lower_bound)
                  << " gradL2=" << format_double(rep.grad_l2) << "\n";
        if (rep.min_lower_bound < 0.98) throw AssertionFailure("line crossing below 1 - 2%");
        return 0;
    }
    if (action == "posmeasure") {
        std::vector<double> log2_radii;
        for (int i = 0; i < 1000; ++i) log2_radii.push_back(-2.0 - 1.5 * i);
        auto rep = witness::positive_measure_witness(log2_radii, 2.0, 2);
        ordered_json j = report_envelope(cfg, "witness.posmeasure");
        j["full_sum"] = rep.full_partial_sums.back();
        j["omega_sum"] = rep.omega_partial_sums.back();
        write_file(out_path(cfg, "witness_posmeasure.json"), j.dump(1));
        std::cout << "positive-measure witness: full=" << rep.full_partial_sums.back()
                  << " omega=" << rep.omega_partial_sums.back() << "\n";
        return 0;
    }
    throw ConfigError("unknown witness action: " + action);
}

int run_collapse(const std::string& action, const ExperimentConfig& cfg) {
    collapse::CollapseStage stage = collapse::build_collapse(cfg.level);
    if (action == "build" || action.empty()) {
        ordered_json j = report_envelope(cfg, "collapse.build");
        ordered_json tripods = ordered_json::array();
        for (const auto& t : stage.tripods) {
            ordered_json item;
            item["address"] = t.w.str();
            item["c1"] = point_json(t.tripod.c[0]);
            item["c2"] = point_json(t.tripod.c[1]);
            item["c3"] = point_json(t.tripod.c[2]);
            item["a"] = point_json(t.tripod.a);
            item["h"] = rat_json(t.h);
            tripods.push_back(item);
        }
        ordered_json quads = ordered_json::array();
        for (const auto& q : stage.quads) {
            if (q.quad.level != cfg.level) continue;
            ordered_json item;
            item["address"] = q.v.str();
            ordered_json vs = ordered_json::array();
            for (const auto& p : q.quad.poly.verts()) vs.push_back(point_json(p));
            item["vertices"] = vs;
            quads.push_back(item);
        }
        j["tripods"] = tripods;
        j["uquads"] = quads;
        write_file(out_path(cfg, "collapse.json"), j.dump(1));
        if (cfg.format == "svg")
            write_file(out_path(cfg, "collapse.svg"), svg::render_collapse(stage, cfg.level));
        std::cout << "collapse build: " << stage.tripods.size() << " tripods\n";
        return 0;
    }
    if (action == "checks") {
        collapse::FamilyReport rep = collapse::tripod_family_checks(stage);
        auto osc = collapse::oscillation_decay_sq(stage);
        ordered_json j = report_envelope(cfg, "collapse.checks");
        j["property_g"] = rep.property_g;
        j["max_degree"] = rep.max_degree;
        j["contacts"] = rep.contacts;
        ordered_json decay = ordered_json::array();
        for (const auto& o : osc) decay.push_back(to_double(o));
        j["oscillation_sq_per_level"] = decay;
        ordered_json areas = ordered_json::array();
        for (int l = 1; l <= cfg.level; ++l)
            areas.push_back(stage.level_area_units(l) == 1 ? "exact" : "violated");
        j["area_conservation"] = areas;
        write_file(out_path(cfg, "collapse_checks.json"), j.dump(1));
        std::cout << "collapse checks: G=" << rep.property_g << " deg=" << rep.max_degree
                  << "\n";
        if (!rep.property_g || rep.max_degree > 6)
            throw AssertionFailure("tripod family checks failed");
        return 0;
    }
    throw ConfigError("unknown collapse action: " + action);
}

int run_fold(const std::string& action, const ExperimentConfig& cfg) {
    auto g = collapse::canonical_tripod(RatPoint(make_rat(1, 2), make_rat(1, 2)),
                                        RatPoint(Rat(0), make_rat(1, 2)),
                                        RatPoint(make_rat(1, 2), Rat(0)));
    Rat h2 = g.len2(0) / 36;
    fold::FoldMap fm = fold::assemble_fold(
        {RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1)}, g, h2);
    if (action == "build" || action.empty()) {
        ordered_json j = report_envelope(cfg, "fold.build");
        ordered_json pieces = ordered_json::array();
        for (const auto& piece : fm.representative_pieces()) {
            ordered_json item;
            ordered_json src = ordered_json::array();
            for (const auto& s : piece.src) src.push_back(point_json(s));
            item["sourcePoly"] = src;
            RatMat2 m = piece.matrix();
            item["matrix"] = ordered_json::array(
                {rat_json(m.a), rat_json(m.b), rat_json(m.c), rat_json(m.d)});
            RatPoint tr = piece.translation();
            item["translation"] = ordered_json::array({rat_json(tr.a), rat_json(tr.b)});
            item["targetChart"] =
                ordered_json{{"spoke", piece.spoke}, {"face", piece.face}, {"cell", piece.cell}};
            pieces.push_back(item);
        }
        j["pieces"] = pieces;
        j["distortion"] = fm.distortion_value();
        write_file(out_path(cfg, "fold.json"), j.dump(1));
        if (cfg.format == "svg") write_file(out_path(cfg, "fold.svg"), svg::render_fold(fm));
        std::cout << "fold build: M=" << format_double(fm.distortion_value()) << "\n";
        return 0;
    }
    if (action == "distortion") {
        collapse::CollapseStage stage = collapse::build_collapse(std::min(cfg.level, 6));
        double max_m = 0;
        for (const auto& te : stage.tripods) {
            auto wv = gasket::w_vertices(te.w);
            auto f = fold::assemble_fold(wv, te.tripod, te.h * te.h);
            max_m = std::max(max_m, fold::distortion_bound(f));
        }
        ordered_json j = report_envelope(cfg, "fold.distortion");
        j["symmetric_M"] = fm.distortion_value();
        j["family_max_M"] = max_m;
        write_file(out_path(cfg, "fold_distortion.json"), j.dump(1));
        std::cout << "fold distortion: symmetric=" << format_double(fm.distortion_value())
                  << " family_max=" << format_double(max_m) << "\n";
        return 0;
    }
    throw ConfigError("unknown fold action: " + action);
}

int run_flap(const std::string& action, const ExperimentConfig& cfg) {
    auto family = collapse::build_collapse(std::min(cfg.level, 4)).tripods;
    int n = std::min<int>(static_cast<int>(family.size()), 8);
    auto sched = flap::height_schedule(family, n);
    std::vector<Rat> hs;
    for (const auto& e : sched) hs.push_back(e.h);
    flap::FlapPlaneStage stage = flap::build_stage(family, n, hs);

    if (action == "build" || action.empty()) {
        ordered_json j = report_envelope(cfg, "flap.build");
        j["tripods"] = stage.size();
        j["contacts"] = stage.contacts.size();
        ordered_json heights = ordered_json::array();
        for (const auto& e : sched) heights.push_back(rat_json(e.h));
        j["heights"] = heights;
        write_file(out_path(cfg, "flap_stage.json"), j.dump(1));
        std::cout << "flap build: " << stage.size() << " tripods, " << stage.contacts.size()
                  << " contacts\n";
        return 0;
    }
    if (action == "sweep") {
        flap::DistanceOracle oracle(stage, 0.05);
        flap::AhlforsReport rep = flap::regularity_sweep(oracle, 100, cfg.seed);
        std::string csv = "x,r,lower,upper,bound,pass\n";
        for (const auto& row : rep.rows) {
            csv += "(" + format_double(row.x) + ";" + format_double(row.y) + ")," +
                   format_double(row.r) + "," + format_double(row.lower) + "," +
                   format_double(row.upper) + "," + format_double(row.bound) + "," +
                   (row.pass ? "1" : "0") + "\n";
        }
        write_file(out_path(cfg, "flap_sweep.csv"), csv);
        std::cout << "flap sweep: samples=" << rep.samples
                  << " max_ratio=" << format_double(rep.max_ratio)
                  << " bound=" << format_double(rep.bound_constant) << "\n";
        if (rep.upper_violations > 0) throw AssertionFailure("Ahlfors upper bound violated");
        return 0;
    }
    if (action == "llc") {
        flap::DistanceOracle oracle(stage, 0.05);
        Rng rng(cfg.seed);
        double worst = 0;
        for (int i = 0; i < 20; ++i) {
            double r = 0.1 + 0.2 * rng.uniform();
            EuclidPoint base{0.2 + 0.6 * rng.uniform(), 0.1 + 0.5 * rng.uniform()};
            flap::FlapPoint x = flap::FlapPoint::plane(base.x, base.y);
            flap::FlapPoint z = flap::FlapPoint::plane(base.x + 1.3 * r, base.y);
            flap::FlapPoint w = flap::FlapPoint::plane(base.x, base.y + 1.3 * r);
            auto rep = flap::llc_probe(oracle, x, r, z, w);
            worst = std::max(worst, rep.c_achieved);
        }
        ordered_json j = report_envelope(cfg, "flap.llc");
        j["worst_c"] = worst;
        write_file(out_path(cfg, "flap_llc.json"), j.dump(1));
        std::cout << "flap llc: worst c=" << format_double(worst) << "\n";
        if (worst > 48.0 + 1e-6) throw AssertionFailure("LLC constant exceeded 48");
        return 0;
    }
    if (action == "gh") {
        flap::GhReport rep = flap::gh_distortion(stage, std::max(1, n / 2), 300, cfg.seed);
        ordered_json j = report_envelope(cfg, "flap.gh");
        j["checked"] = rep.checked;
        j["violations"] = rep.violations;
        j["max_gap"] = rep.max_gap;
        j["tail_bound"] = rep.tail_bound;
        write_file(out_path(cfg, "flap_gh.json"), j.dump(1));
        std::cout << "flap gh: gap=" << format_double(rep.max_gap)
                  << " bound=" << format_double(rep.tail_bound) << "\n";
        if (rep.violations > 0) throw AssertionFailure("GH gap bound violated");
        return 0;
    }
    throw ConfigError("unknown flap action: " + action);
}

int run_phi(const std::string& action, const ExperimentConfig& cfg) {
    phi::PhiStage stage = phi::build_phi(std::min(cfg.level, 6));
    if (action == "build" || action.empty()) {
        ordered_json j = report_envelope(cfg, "phi.build");
        j["level"] = stage.level;
        j["tripods"] = stage.cstage.tripods.size();
        j["boundary_compatible"] = phi::check_boundary_compatibility(stage);
        j["modulus"] = phi::check_modulus(stage);
        j["max_distortion"] = phi::max_piece_distortion(stage);
        write_file(out_path(cfg, "phi.json"), j.dump(1));
        if (cfg.format == "svg") write_file(out_path(cfg, "phi.svg"), svg::render_phi(stage));
        std::cout << "phi build: level " << stage.level << "\n";
        return 0;
    }
    if (action == "scan") {
        phi::InjectivityReport rep = phi::injectivity_scan(stage, 10000, cfg.seed);
        ordered_json j = report_envelope(cfg, "phi.scan");
        j["vertex_points"] = rep.vertex_points;
        j["samples"] = rep.samples;
        j["collisions"] = rep.collisions;
        write_file(out_path(cfg, "phi_scan.json"), j.dump(1));
        std::cout << "phi scan: vertices=" << rep.vertex_points
                  << " samples=" << rep.samples << " collisions=" << rep.collisions << "\n";
        return 0;
    }
    if (action == "measure") {
        phi::MeasureReport rep = phi::measure_blowup(stage);
        ordered_json j = report_envelope(cfg, "phi.measure");
        j["planar_area_units"] = rat_json(rep.planar_area_units);
        j["flap_area_mid"] = rep.flap_area_mid;
        write_file(out_path(cfg, "phi_measure.json"), j.dump(1));
        std::cout << "phi measure: planar=" << format_double(rep.planar_area)
                  << " flap=" << format_double(rep.flap_area_mid) << "\n";
        if (rep.planar_area_units != 1) throw AssertionFailure("planar image area not exact");
        return 0;
    }
    if (action == "eval") {
        RatPoint p = cfg.point.empty() ? RatPoint(make_rat(1, 3), make_rat(1, 3))
                                       : parse_point(cfg.point);
        phi::Image img = stage.evaluate(p);
        ordered_json j = report_envelope(cfg, "phi.eval");
        j["point"] = point_json(p);
        j["kind"] = img.kind == phi::Image::Kind::Chart ? "chart" : "other";
        if (img.kind == phi::Image::Kind::Chart) {
            j["tripod"] = img.tripod;
            j["spoke"] = img.spoke;
            j["face"] = img.face;
            j["s"] = rat_json(img.s);
            j["t"] = rat_json(img.t);
        }
        write_file(out_path(cfg, "phi_eval.json"), j.dump(1));
        return 0;
    }
    throw ConfigError("unknown phi action: " + action);
}

}  // namespace

int run(const std::string& command, const std::string& action, const ExperimentConfig& cfg) {
    mark_op("harness.run");
    if (command == "gasket") return run_gasket(action, cfg);
    if (command == "witness") return run_witness(action, cfg);
    if (command == "collapse") return run_collapse(action, cfg);
    if (command == "fold") return run_fold(action, cfg);
    if (command == "flap") return run_flap(action, cfg);
    if (command == "phi") return run_phi(action, cfg);
    if (command == "all") return run_all(cfg);
    throw ConfigError("unknown command: " + command);
}

int run_all(const ExperimentConfig& cfg) {
    mark_op("harness.run");
    reset_op_coverage();
    mark_op("harness.run");
    auto t0 = std::chrono::steady_clock::now();

    // kernel ops not exercised through the reports
    {
        RatPoint p(1, 1);
        if (norm2(p) != 3) throw AssertionFailure("norm2 identity failed");
        mark_op("triq.norm2");
        ConvexPolygon tri({RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1)});
        split_convex(tri, {{RatPoint(0, 0), midpoint(RatPoint(1, 0), RatPoint(0, 1))}});
        distortion_key(RatMat2{2, 0, 0, 1});
    }
    ExperimentConfig sub = cfg;
    sub.level = std::min(cfg.level, 5);

    write_file(out_path(sub, "gasket.svg"), svg::render_gasket(sub.level));
    run_gasket("enumerate", sub);
    run_gasket("classify", sub);
    {
        gasket::VAddress word;
        for (int i = 0; i < sub.level; ++i) word.path.push_back(static_cast<uint8_t>(i % 3));
        gasket::nested_sequence(word, std::max(2, sub.level));
        gasket::adjacency(gasket::WAddress::central_of(gasket::VAddress{}),
                          gasket::WAddress::level0());
    }
    run_witness("build", sub);
    run_witness("verify", sub);
    run_witness("lines", sub);
    run_witness("posmeasure", sub);
    {
        witness::radial_block(0.5, 0.1);
        witness::staircase_block(8, 0.25);
        std::vector<double> xs, ys;
        for (int k = 1; k <= 20; ++k) {
            xs.push_back(std::pow(4.0, -k));
            ys.push_back(-std::pow(4.0, -k));
        }
        witness::halfplane_block(xs, ys, 4);
    }
    run_collapse("build", sub);
    run_collapse("checks", sub);
    {
        collapse::CollapseStage stage = collapse::build_collapse(3);
        collapse::oscillation_decay_sq(stage);
        collapse::UQuad u;
        u.poly = ConvexPolygon({RatPoint(0, 0), RatPoint(1, 0), RatPoint(1, 1), RatPoint(0, 1)});
        u.marked = 0;
        collapse::split_u(u, midpoint(RatPoint(1, 0), RatPoint(1, 1)),
                          midpoint(RatPoint(1, 1), RatPoint(0, 1)));
    }
    run_fold("build", sub);
    run_fold("distortion", sub);
    {
        fold::subdivision_params(Rat(1), make_rat(1, 6));
        fold::split_triangle({RatPoint(0, 0), RatPoint(1, 0), RatPoint(0, 1)});
    }
    run_flap("build", sub);
    run_flap("sweep", sub);
    run_flap("llc", sub);
    run_flap("gh", sub);
    {
        auto family = collapse::build_collapse(2).tripods;
        auto sched = flap::height_schedule(family, 2);
        std::vector<Rat> hs{sched[0].h, sched[1].h};
        flap::FlapPlaneStage st = flap::build_stage(family, 2, hs);
        flap::DistanceOracle oracle(st, 0.08);
        flap::FlapPoint a = flap::FlapPoint::plane(0.1, 0.05);
        flap::FlapPoint b = flap::FlapPoint::plane(0.8, 0.1);
        oracle.distance(a, b);
        st.project(a, 1);
        flap::ball_measure(oracle, a, 0.05, 10);
    }
    run_phi("build", sub);
    run_phi("scan", sub);
    run_phi("measure", sub);
    run_phi("eval", sub);

    // coverage assertion: the op registry must show every module operation
    const char* required[] = {
        "triq.norm2",          "triq.affine_distortion",    "triq.split_convex",
        "gasket.enumerate_w",  "gasket.classify",           "gasket.nested_sequence",
        "gasket.dyadic_edge_points", "gasket.adjacency",
        "witness.radial_block", "witness.staircase_block",  "witness.halfplane_block",
        "witness.build_witness", "witness.verify_recurrences", "witness.line_energy_check",
        "witness.positive_measure_witness",
        "collapse.canonical_tripod", "collapse.split_u",    "collapse.build_collapse",
        "collapse.tripod_family_checks", "collapse.oscillation_decay",
        "fold.split_triangle", "fold.subdivision_params",   "fold.assemble_fold",
        "fold.distortion_bound",
        "flap.build_stage",    "flap.project",              "flap.distance",
        "flap.ball_measure",   "flap.height_schedule",      "flap.llc_probe",
        "flap.gh_distortion",  "flap.regularity_sweep",
        "phi.build_phi",       "phi.injectivity_scan",      "phi.measure_blowup",
        "harness.run",         "harness.render",
    };
    auto cov = op_coverage();
    std::string missing;
    for (const char* op : required) {
        if (cov.find(op) == cov.end()) missing += std::string(op) + " ";
    }
    if (!missing.empty()) throw AssertionFailure("coverage gaps: " + missing);

    auto t1 = std::chrono::steady_clock::now();
    std::cout << "all: complete in " << std::chrono::duration<double>(t1 - t0).count()
              << "s, " << cov.size() << " ops covered\n";
    return 0;
}

}  // namespace harness
}  // namespace gasketlab
