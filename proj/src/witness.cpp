#include "gasketlab/witness.hpp"
#include "gasketlab/report.hpp"

#include "gasketlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gasketlab {
namespace witness {

using gasket::EdgeRef;
using gasket::VAddress;
using gasket::VFrame;
using gasket::WAddress;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Radial block

RadialBlock radial_block(double R, double r) {
    mark_op("witness.radial_block");
    if (!(0 < r && r < R)) throw BadRadii("radial block needs 0 < r < R");
    return RadialBlock{R, r};
}

double RadialBlock::value(double rho) const {
    if (rho <= r) return 1.0;
    if (rho >= R) return 0.0;
    return std::log(R / rho) / std::log(R / r);
}

double RadialBlock::grad_mag(double rho) const {
    if (rho <= r || rho >= R) return 0.0;
    return 1.0 / (rho * std::log(R / r));
}

double RadialBlock::analytic_energy() const { return 2.0 * kPi / std::log(R / r); }

namespace {

/// Midpoint rule for int slope(rho)^2 * angle_factor * rho drho over [lo, hi],
/// doubled until the estimate settles.
template <typename SlopeFn>
double polar_energy_quadrature(double lo, double hi, SlopeFn slope, double rel_tol,
                               double angle_factor = 2.0 * kPi) {
    double prev = 0.0;
    for (int m = 256; m <= (1 << 22); m *= 2) {
        double h = (hi - lo) / m;
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            double rho = lo + (i + 0.5) * h;
            double s = slope(rho);
            sum += s * s * rho * h;
        }
        sum *= angle_factor;
        if (m > 256 && std::abs(sum - prev) <= rel_tol * std::abs(sum)) return sum;
        prev = sum;
    }
    return prev;
}

}  // namespace

double radial_energy_quadrature(const RadialBlock& b, double rel_tol) {
    return polar_energy_quadrature(
        b.r, b.R, [&b](double rho) { return b.grad_mag(rho); }, rel_tol);
}

// ---------------------------------------------------------------------------
// Staircase profile

Rat StaircaseProfile::value_ratio(const Rat& u) const {
    if (sgn(u) <= 0) return Rat(1);
    if (u >= 1) return Rat(0);
    // Annulus j: u in [2^-j, 2^-j+1], j smallest with num * 2^j >= den.
    const Int& p = u.get_num();
    const Int& q = u.get_den();
    long long j = 0;
    Int shifted = p;
    while (shifted < q) {
        shifted <<= 1;
        ++j;
        if (j > N) return Rat(1);  // u < 2^-N: saturated plateau
    }
    if (j == 0) j = 1;
    Rat nr(static_cast<long>(N));
    Int two_jm1(1);
    two_jm1 <<= static_cast<unsigned>(j - 1);
    Rat outer = Rat(1) / Rat(two_jm1);  // 2^-(j-1)
    Rat width = outer / 2;              // annulus width 2^-j
    Rat sigma = Rat(static_cast<long>(j - 1)) / nr + (outer - u) / width / nr;
    if (sigma < 0) sigma = 0;
    if (sigma > 1) sigma = 1;
    return sigma;
}

double StaircaseProfile::value_ratio_d(double u) const {
    if (u <= 0) return 1.0;
    if (u >= 1) return 0.0;
    double j = std::ceil(-std::log2(u));
    if (j < 1) j = 1;
    if (j > static_cast<double>(N)) return 1.0;
    double outer = std::pow(2.0, -(j - 1));
    double sigma = (j - 1) / static_cast<double>(N) + (outer - u) / (outer / 2) / static_cast<double>(N);
    return std::clamp(sigma, 0.0, 1.0);
}

double StaircaseProfile::slope_ratio_d(double u) const {
    if (u <= 0 || u >= 1) return 0.0;
    double j = std::ceil(-std::log2(u));
    if (j < 1) j = 1;
    if (j > static_cast<double>(N)) return 0.0;
    return std::pow(2.0, j) / static_cast<double>(N);
}

StaircaseBlock staircase_block(long long N, double R1) {
    mark_op("witness.staircase_block");
    if (N < 1) throw BadRadii("staircase needs N >= 1");
    if (R1 <= 0) throw BadRadii("staircase needs R1 > 0");
    return StaircaseBlock{StaircaseProfile{N}, R1};
}

double staircase_energy_quadrature(const StaircaseBlock& b, double rel_tol) {
    // Integrate annulus by annulus: the dyadic annuli shrink geometrically and
    // a single uniform grid would miss the inner ones entirely.
    double total = 0.0;
    double outer = b.R1;
    for (long long j = 1; j <= b.profile.N; ++j) {
        double inner = outer / 2.0;
        total += polar_energy_quadrature(
            inner, outer, [&b](double rho) { return b.grad_mag(rho); }, rel_tol);
        outer = inner;
        if (outer < 1e-280) break;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Half-plane block

HalfPlaneBlock halfplane_block(const std::vector<double>& xs, const std::vector<double>& ys,
                               long long N, double R1) {
    mark_op("witness.halfplane_block");
    if (N < 1) throw BadRadii("halfplane block needs N >= 1");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] > xs[i + 1] && xs[i + 1] > 0))
            throw NonMonotoneSequence("xs must decrease strictly to 0");
    }
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
        if (!(ys[i] < ys[i + 1] && ys[i + 1] < 0))
            throw NonMonotoneSequence("ys must increase strictly to 0");
    }

    HalfPlaneBlock b;
    b.N = N;
    b.R.push_back(R1);
    for (long long m = 1; m < N; ++m) {
        double r_m = b.R.back() / 2.0;
        // The transition annulus (R_{m+1}, r_m) must contain a point of each
        // boundary sequence.
        double px = 0, py = 0;
        for (double x : xs) {
            if (x < r_m) {
                px = x;
                break;
            }
        }
        for (double y : ys) {
            if (-y < r_m) {
                py = -y;
                break;
            }
        }
        if (px == 0 || py == 0)
            throw NonMonotoneSequence("sequences too short for the requested N");
        b.R.push_back(std::min(px, py) / 2.0);
    }
    return b;
}

double HalfPlaneBlock::value_radius(double rho) const {
    if (rho >= R[0]) return 0.0;
    for (std::size_t m = 0; m < R.size(); ++m) {
        double r_m = R[m] / 2.0;
        if (rho >= R[m]) return static_cast<double>(m) / static_cast<double>(N);
        if (rho >= r_m) {
            // Active annulus m+1: rises m/N -> (m+1)/N inward.
            double frac = (R[m] - rho) / (R[m] - r_m);
            return (static_cast<double>(m) + frac) / static_cast<double>(N);
        }
    }
    return 1.0;
}

double HalfPlaneBlock::value(double x, double y) const { return value_radius(std::hypot(x, y)); }

double HalfPlaneBlock::grad_mag(double rho) const {
    for (std::size_t m = 0; m < R.size(); ++m) {
        double r_m = R[m] / 2.0;
        if (rho >= R[m]) return 0.0;
        if (rho >= r_m) return 1.0 / (static_cast<double>(N) * (R[m] - r_m));
    }
    return 0.0;
}

double halfplane_energy_quadrature(const HalfPlaneBlock& b, double rel_tol) {
    double total = 0.0;
    for (std::size_t m = 0; m < b.R.size(); ++m) {
        total += polar_energy_quadrature(
            b.R[m] / 2.0, b.R[m], [&b](double rho) { return b.grad_mag(rho); }, rel_tol,
            kPi);  // upper half-plane
    }
    return total;
}

// ---------------------------------------------------------------------------
// Scalar witness build

const TriangleRecord* ScalarWitness::find(const WAddress& w) const {
    auto it = index.find(w.str());
    if (it == index.end()) return nullptr;
    return &tris[it->second];
}

Rat ScalarWitness::edge_value(const WAddress& host, int edge, const Rat& t) const {
    if (host.is_level0()) return Rat(0);
    const TriangleRecord* rec = find(host);
    if (!rec) throw std::domain_error("edge_value: unknown host " + host.str());
    int v1 = (edge + 1) % 3, v2 = (edge + 2) % 3;
    StaircaseProfile prof{rec->params.N};
    // u = rho / R1 with R1 = sidelength/4, so u = 4t from the v1 end.
    Rat u1 = t * 4;
    Rat u2 = (Rat(1) - t) * 4;
    Rat val = rec->params.a;
    if (u1 < 1) val += (rec->params.c[v1] - rec->params.a) * prof.value_ratio(u1);
    if (u2 < 1) val += (rec->params.c[v2] - rec->params.a) * prof.value_ratio(u2);
    return val;
}

ScalarWitness build_witness(int levelMax, const Rat& epsilon, long long n_cap) {
    mark_op("witness.build_witness");
    if (levelMax < 1) throw std::invalid_argument("build_witness: levelMax >= 1");
    if (sgn(epsilon) <= 0) throw std::invalid_argument("build_witness: epsilon > 0");

    ScalarWitness w;
    w.level_max = levelMax;
    w.epsilon = epsilon;
    w.n_cap = n_cap;
    w.x0 = RatPoint(make_rat(1, 3), make_rat(1, 3));
    w.r0_sq = make_rat(1, 48);
    w.R0_sq = make_rat(1, 3);

    std::vector<VFrame> frontier{VFrame::root()};
    for (int level = 1; level <= levelMax; ++level) {
        // epsilon bounds the L2 norm of the gradient; the squared-norm budget
        // eps^2 is spread geometrically over levels, uniformly within a level.
        Rat budget = epsilon * epsilon;
        for (int i = 0; i < level; ++i) budget /= 4;
        for (int i = 0; i + 1 < level; ++i) budget /= 3;

        std::vector<VFrame> next;
        next.reserve(frontier.size() * 3);
        for (const VFrame& f : frontier) {
            TriangleRecord rec;
            rec.w = WAddress::central_of(f.va);
            rec.x = f.w_mid();
            rec.vertex_host = f.ref;
            rec.budget = budget;

            BlockParams p;
            if (level == 1) {
                p.a = 1;
                p.c = {Rat(0), Rat(0), Rat(0)};
            } else {
                for (int k = 0; k < 3; ++k) {
                    const EdgeRef& r = f.ref[k];
                    Rat t = f.host_param(k, rec.x[k]);
                    p.c[k] = w.edge_value(r.host, r.host_edge, t);
                }
                p.a = (p.c[0] + p.c[1] + p.c[2]) / 3;
            }
            Rat sum_sq(0);
            Rat osc(0);
            for (int k = 0; k < 3; ++k) {
                Rat d = p.c[k] - p.a;
                sum_sq += d * d;
                osc = rat_max(osc, rat_abs(d));
            }
            rec.osc = osc;
            // Exact energy is pi * sum_sq / (2N); choose N so that
            // (355/113) * sum_sq / (2N) <= budget, certifying the bound with
            // the rational cover pi <= 355/113.
            long long n_val = 3;
            if (sgn(sum_sq) > 0) {
                Rat need = Rat(355) * sum_sq / (Rat(113) * 2 * budget);
                Int n_int;
                mpz_cdiv_q(n_int.get_mpz_t(), need.get_num().get_mpz_t(),
                           need.get_den().get_mpz_t());
                if (n_int > Int(static_cast<long>(n_cap)))
                    throw BudgetInfeasible("triangle " + rec.w.str() + " needs N beyond cap");
                if (n_int > 3) n_val = static_cast<long long>(n_int.get_si());
            }
            p.N = n_val;
            {
                Rat side(1);
                for (int i = 0; i < level + 2; ++i) side /= 2;  // 2^-(level+2)
                p.R1 = side;
            }
            rec.params = p;
            rec.energy_over_pi = sum_sq / (Rat(2) * Rat(static_cast<long>(n_val)));
            w.index[rec.w.str()] = w.tris.size();
            w.tris.push_back(std::move(rec));

            if (level < levelMax) {
                for (uint8_t c = 0; c < 3; ++c) next.push_back(f.descend(c));
            }
        }
        frontier = std::move(next);
    }
    return w;
}

Rat ScalarWitness::total_energy_over_pi() const {
    Rat total(0);
    for (const auto& t : tris) total += t.energy_over_pi;
    return total;
}

double ScalarWitness::total_energy() const { return to_double(total_energy_over_pi()) * kPi; }

Rat ScalarWitness::total_energy_upper() const {
    return total_energy_over_pi() * make_rat(355, 113);
}

std::optional<double> ScalarWitness::value_at(const EuclidPoint& pt) const {
    // Convert to lattice coordinates and descend in doubles.
    double b = pt.y / 0.8660254037844386;
    double a = pt.x - b / 2.0;
    if (a < 0 || b < 0 || a + b > 1) return 0.0;  // closure of the unbounded component

    double pa[3] = {0, 1, 0};
    double pb[3] = {0, 0, 1};
    std::string path;
    for (int level = 1; level <= level_max; ++level) {
        double ma[3] = {(pa[1] + pa[2]) / 2, (pa[0] + pa[2]) / 2, (pa[0] + pa[1]) / 2};
        double mb[3] = {(pb[1] + pb[2]) / 2, (pb[0] + pb[2]) / 2, (pb[0] + pb[1]) / 2};
        auto side = [&](int i, int j) {
            return (ma[j] - ma[i]) * (b - mb[i]) - (mb[j] - mb[i]) * (a - ma[i]);
        };
        double s0 = side(0, 1), s1 = side(1, 2), s2 = side(2, 0);
        bool in_central = (s0 <= 0 && s1 <= 0 && s2 <= 0) || (s0 >= 0 && s1 >= 0 && s2 >= 0);
        if (in_central) {
            auto it = index.find("w" + path);
            if (it == index.end()) return std::nullopt;
            const TriangleRecord& rec = tris[it->second];
            double val = to_double(rec.params.a);
            StaircaseProfile prof{rec.params.N};
            double r1 = to_double(rec.params.R1);
            for (int k = 0; k < 3; ++k) {
                EuclidPoint vk = to_euclid(rec.x[k]);
                double rho = std::hypot(pt.x - vk.x, pt.y - vk.y);
                if (rho < r1) {
                    val += to_double(rec.params.c[k] - rec.params.a) * prof.value_ratio_d(rho / r1);
                }
            }
            return val;
        }
        // Descend into the child keeping the nearest corner.
        double d0 = std::abs(a - pa[0]) + std::abs(b - pb[0]);
        double d1 = std::abs(a - pa[1]) + std::abs(b - pb[1]);
        double d2 = std::abs(a - pa[2]) + std::abs(b - pb[2]);
        int child = (d0 <= d1 && d0 <= d2) ? 0 : (d1 <= d2 ? 1 : 2);
        path += static_cast<char>('0' + child);
        for (int j = 0; j < 3; ++j) {
            if (j == child) continue;
            pa[j] = (pa[child] + pa[j]) / 2;
            pb[j] = (pb[child] + pb[j]) / 2;
        }
    }
    return std::nullopt;  // leftover v-triangle at the build depth
}

bool check_star_condition(const ScalarWitness& w) {
    for (const auto& rec : w.tris) {
        Rat n_rat(static_cast<long>(rec.params.N));
        for (int k = 0; k < 3; ++k) {
            Rat step = rat_abs(rec.params.c[k] - rec.params.a);
            // anchor increment |c - a| / N must be <= O(W) / 3
            if (step * 3 > n_rat * rec.osc) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Recurrence verification

namespace {

std::optional<Rat> vertex_value_at(const TriangleRecord& rec, const RatPoint& q) {
    for (int k = 0; k < 3; ++k) {
        if (rec.x[k] == q) return rec.params.c[k];
    }
    return std::nullopt;
}

/// A vertex of `rec` lying on the boundary of `other`, with its f value.
std::optional<std::pair<RatPoint, Rat>> vertex_on_boundary(const TriangleRecord& rec,
                                                           const WAddress& other) {
    for (int k = 0; k < 3; ++k) {
        for (int e = 0; e < 3; ++e) {
            auto [a, b] = gasket::w_edge(other, e);
            if (on_segment(rec.x[k], a, b)) return std::make_pair(rec.x[k], rec.params.c[k]);
        }
    }
    return std::nullopt;
}

}  // namespace

RecurrenceReport verify_recurrences(const ScalarWitness& w, const VAddress& word) {
    mark_op("witness.verify_recurrences");
    RecurrenceReport report;
    for (int m = 1; m <= 12; ++m) {
        report.case1_envelope.push_back(std::pow(2.0 / 3.0, m));
        report.case2_envelope.push_back(std::pow(5.0 / 6.0, m));
        report.case3_envelope.push_back(std::pow(7.0 / 9.0, m - 1));
    }

    int n_max = std::min(w.level_max, word.level() + 1);
    if (n_max < 4) return report;
    gasket::NestedData nd = gasket::nested_sequence(word, n_max);

    auto osc_of = [&w](const WAddress& a) -> Rat {
        if (a.is_level0()) return Rat(0);
        const TriangleRecord* rec = w.find(a);
        return rec ? rec->osc : Rat(0);
    };

    for (std::size_t si = 2; si < nd.steps.size(); ++si) {
        const auto& cur = nd.steps[si];
        const auto& prev = nd.steps[si - 1];
        if (cur.n < 4) continue;
        const TriangleRecord* rec_n = w.find(cur.w);
        const TriangleRecord* rec_p = w.find(prev.w);
        if (!rec_n || !rec_p) continue;

        RecurrenceStep step;
        step.n = cur.n;
        step.osc_n = rec_n->osc;

        // Case I/II ask whether the same triangle recurs in the same role; a
        // deepening sequence re-using the previous step's partner is still a
        // moving contact.
        bool a_stable = (cur.a == prev.a);
        bool b_stable = (cur.b == prev.b);

        if (a_stable && b_stable) {
            step.case_id = 1;
            auto cnA = vertex_value_at(*rec_n, cur.vertex_on_a);
            auto cnB = vertex_value_at(*rec_n, cur.vertex_on_b);
            auto cpA = vertex_on_boundary(*rec_p, cur.a);
            auto cpB = vertex_on_boundary(*rec_p, cur.b);
            if (!cnA || !cnB || !cpA || !cpB) continue;
            Rat eps = rat_max(rat_abs(*cnA - cpA->second), rat_abs(*cnB - cpB->second));
            eps = rat_max(eps, rat_abs(*cnA - *cnB));
            step.eps_measured = eps;
            step.parent_max = rec_p->osc;
            step.bound = eps * 2 / 3 + step.parent_max * 2 / 3;
        } else if (a_stable != b_stable) {
            step.case_id = 2;
            const WAddress& stable = b_stable ? cur.b : cur.a;
            const WAddress& moving = b_stable ? cur.a : cur.b;
            const RatPoint& v_stable = b_stable ? cur.vertex_on_b : cur.vertex_on_a;
            const RatPoint& v_moving = b_stable ? cur.vertex_on_a : cur.vertex_on_b;
            const TriangleRecord* rec_k = moving.is_level0() ? nullptr : w.find(moving);
            auto cnB = vertex_value_at(*rec_n, v_stable);
            auto cnK = vertex_value_at(*rec_n, v_moving);
            auto cpB = vertex_on_boundary(*rec_p, stable);
            if (!cnB || !cnK || !cpB) continue;
            Rat eps = rat_abs(*cnB - cpB->second);
            if (rec_k) {
                auto ckB = vertex_on_boundary(*rec_k, stable);
                if (ckB) {
                    eps = rat_max(eps, rat_abs(ckB->second - cpB->second));
                    eps = rat_max(eps, rat_abs(*cnB - ckB->second));
                }
            }
            // The branch argument needs the ordered contact points on the
            // half-edge of the moving triangle; skip transitional steps.
            if (rec_k && !gasket::check_half_edge_order(nd, cur.n)) continue;
            step.eps_measured = eps;
            step.parent_max = rat_max(rec_p->osc, osc_of(moving));
            // Rigorous per-step form: (5/6) D plus 2e/3 when 2e <= D, else e.
            Rat eps_term = (eps * 2 <= step.parent_max) ? eps * 2 / 3 : eps;
            step.bound = step.parent_max * 5 / 6 + eps_term;
        } else {
            step.case_id = 3;
            // The 7/9 step is a theorem only when W(n-1) touches both A(n)
            // and B(n) and the contacts on the A(n) edge are ordered.
            if (!vertex_on_boundary(*rec_p, cur.a) || !vertex_on_boundary(*rec_p, cur.b))
                continue;
            if (!gasket::check_half_edge_order(nd, cur.n)) continue;
            step.eps_measured = Rat(0);
            step.parent_max = rat_max(rec_p->osc, rat_max(osc_of(cur.a), osc_of(cur.b)));
            step.bound = step.parent_max * 7 / 9;
        }
        step.ok = (step.osc_n <= step.bound);
        report.steps.push_back(step);
    }
    return report;
}

bool RecurrenceReport::all_ok() const {
    for (const auto& s : steps) {
        if (!s.ok) return false;
    }
    return true;
}

RecurrenceSweep recurrence_sweep(const ScalarWitness& w, int samples, uint64_t seed) {
    RecurrenceSweep sweep;
    std::vector<VAddress> words;
    VAddress constant, two_symbol, rotating;
    for (int i = 0; i < w.level_max; ++i) {
        constant.path.push_back(0);
        two_symbol.path.push_back(static_cast<uint8_t>(i % 2));
        rotating.path.push_back(static_cast<uint8_t>(i % 3));
    }
    words.push_back(constant);
    words.push_back(two_symbol);
    words.push_back(rotating);
    for (int s = 0; s < samples - 3; ++s) {
        Rng rng = Rng::stream(seed, static_cast<uint64_t>(s));
        VAddress v;
        for (int i = 0; i < w.level_max; ++i)
            v.path.push_back(static_cast<uint8_t>(rng.below(3)));
        words.push_back(v);
    }
    for (const auto& word : words) {
        RecurrenceReport rep = verify_recurrences(w, word);
        sweep.sequences += 1;
        sweep.steps_checked += static_cast<int>(rep.steps.size());
        for (const auto& st : rep.steps) {
            if (!st.ok) sweep.violations += 1;
        }
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Line-crossing energy

namespace {

/// Length of segment [p, q] inside the annulus rho in [lo, hi] around c.
double segment_annulus_length(EuclidPoint p, EuclidPoint q, EuclidPoint c, double lo, double hi) {
    double dx = q.x - p.x, dy = q.y - p.y;
    double len = std::hypot(dx, dy);
    if (len == 0) return 0.0;
    double ux = dx / len, uy = dy / len;
    double fx = p.x - c.x, fy = p.y - c.y;
    double b = fx * ux + fy * uy;
    double c2 = fx * fx + fy * fy;
    auto inside_len = [&](double r) {
        double disc = b * b - (c2 - r * r);
        if (disc <= 0) return 0.0;
        double s = std::sqrt(disc);
        double t0 = std::max(-b - s, 0.0);
        double t1 = std::min(-b + s, len);
        return std::max(t1 - t0, 0.0);
    };
    return inside_len(hi) - inside_len(lo);
}

std::optional<std::pair<double, double>> clip_line_triangle(
    double t, const std::array<EuclidPoint, 3>& tri) {
    double lo = 1e300, hi = -1e300;
    int hits = 0;
    for (int i = 0; i < 3; ++i) {
        EuclidPoint a = tri[i], b = tri[(i + 1) % 3];
        if ((a.y - t) * (b.y - t) > 0) continue;
        if (a.y == b.y) {
            if (a.y == t) {
                lo = std::min({lo, a.x, b.x});
                hi = std::max({hi, a.x, b.x});
                hits += 2;
            }
            continue;
        }
        double s = (t - a.y) / (b.y - a.y);
        if (s < 0 || s > 1) continue;
        double x = a.x + s * (b.x - a.x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++hits;
    }
    if (hits < 2 || hi <= lo) return std::nullopt;
    return std::make_pair(lo, hi);
}

}  // namespace

LineReport line_energy_check(const ScalarWitness& w, int nLines, uint64_t seed) {
    mark_op("witness.line_energy_check");
    LineReport report;
    report.grad_l2 = std::sqrt(w.total_energy());
    report.r0 = std::sqrt(to_double(w.r0_sq));
    report.R0 = std::sqrt(to_double(w.R0_sq));

    EuclidPoint x0 = to_euclid(w.x0);

    struct TriCache {
        std::array<EuclidPoint, 3> v;
        std::array<double, 3> ca;
        double r1;
        long long n;
    };
    std::vector<TriCache> cache;
    cache.reserve(w.tris.size());
    for (const auto& rec : w.tris) {
        TriCache tc;
        for (int k = 0; k < 3; ++k) tc.v[k] = to_euclid(rec.x[k]);
        for (int k = 0; k < 3; ++k) tc.ca[k] = to_double(rec.params.c[k] - rec.params.a);
        tc.r1 = to_double(rec.params.R1);
        tc.n = rec.params.N;
        cache.push_back(tc);
    }

    Rng rng(seed);
    for (int li = 0; li < nLines; ++li) {
        double t = x0.y + (rng.uniform() * 2.0 - 1.0) * 0.9 * report.r0;
        LineCrossing lc;
        lc.t = t;
        lc.built_integral = 0.0;
        lc.leftover_jumps = 0.0;

        double start_x = x0.x;
        for (const auto& tc : cache) {
            auto chord = clip_line_triangle(t, tc.v);
            if (!chord) continue;
            double lo = std::max(chord->first, start_x);
            double hi = chord->second;
            if (hi <= lo) continue;
            EuclidPoint p{lo, t}, q{hi, t};
            for (int k = 0; k < 3; ++k) {
                if (tc.ca[k] == 0) continue;
                double dmin = std::abs(t - tc.v[k].y);
                double outer = tc.r1;
                for (long long j = 1; j <= tc.n && outer >= dmin * 0.999; ++j) {
                    double inner = outer / 2.0;
                    double seg = segment_annulus_length(p, q, tc.v[k], inner, outer);
                    if (seg > 0) {
                        double slope = std::pow(2.0, static_cast<double>(j)) /
                                       (static_cast<double>(tc.n) * tc.r1);
                        lc.built_integral += std::abs(tc.ca[k]) * slope * seg;
                    }
                    outer = inner;
                    if (outer < 1e-14) break;
                }
            }
        }

        // Leftover leaf v-triangles crossed by the ray contribute |f| jumps.
        struct StackItem {
            VFrame f;
            int level;
        };
        std::vector<StackItem> stack{{VFrame::root(), 0}};
        while (!stack.empty()) {
            StackItem it = stack.back();
            stack.pop_back();
            std::array<EuclidPoint, 3> tri{to_euclid(it.f.p[0]), to_euclid(it.f.p[1]),
                                           to_euclid(it.f.p[2])};
            auto chord = clip_line_triangle(t, tri);
            if (!chord || chord->second <= start_x) continue;
            if (it.level == w.level_max) {
                double lo = std::max(chord->first, start_x);
                double hi = chord->second;
                if (hi <= lo) continue;
                auto boundary_value = [&](double x) -> std::optional<double> {
                    for (int k = 0; k < 3; ++k) {
                        EuclidPoint a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
                        if (std::abs(a.y - b.y) < 1e-15) continue;
                        double s = (t - a.y) / (b.y - a.y);
                        if (s < -1e-9 || s > 1 + 1e-9) continue;
                        double xx = a.x + s * (b.x - a.x);
                        if (std::abs(xx - x) < 1e-9) {
                            const EdgeRef& r = it.f.ref[k];
                            double hp =
                                to_double(r.t0) + (to_double(r.t1) - to_double(r.t0)) * s;
                            return to_double(
                                w.edge_value(r.host, r.host_edge, Rat(hp)));
                        }
                    }
                    return std::nullopt;
                };
                auto f_lo = boundary_value(lo);
                auto f_hi = boundary_value(hi);
                if (f_lo && f_hi) lc.leftover_jumps += std::abs(*f_hi - *f_lo);
                continue;
            }
            for (uint8_t c = 0; c < 3; ++c) stack.push_back({it.f.descend(c), it.level + 1});
        }

        lc.lower_bound = lc.built_integral + lc.leftover_jumps;
        report.lines.push_back(lc);
    }

    report.min_lower_bound = 1e300;
    for (const auto& lc : report.lines)
        report.min_lower_bound = std::min(report.min_lower_bound, lc.lower_bound);
    double threshold = report.r0 / (std::sqrt(kPi) * report.R0);
    report.tension_demonstrated = report.grad_l2 < threshold;
    return report;
}

// ---------------------------------------------------------------------------
// Positive-measure witness

PMWitnessReport positive_measure_witness(const std::vector<double>& log2_radii, double p, int n,
                                         const std::vector<double>* mask) {
    mark_op("witness.positive_measure_witness");
    PMWitnessReport report;
    report.p = p;
    report.n = n;
    for (std::size_t i = 0; i + 1 < log2_radii.size(); ++i) {
        if (!(log2_radii[i + 1] < log2_radii[i] - 1.0))
            throw RadiiViolation("need r_{i+1} < r_i / 2");
    }
    if (!log2_radii.empty() && !(log2_radii[0] < 0.0)) throw RadiiViolation("need r_1 < 1");

    double full_sum = 0.0, omega_sum = 0.0;
    for (std::size_t i = 0; i < log2_radii.size(); ++i) {
        double lr = log2_radii[i];
        double idx = static_cast<double>(i + 1);
        PMWitnessTerm term;
        term.log2_r = lr;
        long long m = 1;
        double c;
        if (p >= n) {
            // c_i = r^(1 - n/p) i^(-1/p): exponent of r is 0 at p = n.
            c = std::exp2(lr * (1.0 - n / p)) * std::pow(idx, -1.0 / p);
        } else {
            c = std::pow(idx, -1.0 / p);
            // smallest integer with m * r^(n/p - 1) >= 1, i.e. m >= r^(1 - n/p)
            double m_real = std::exp2(lr * (1.0 - n / p));
            m = static_cast<long long>(std::ceil(m_real - 1e-12));
            if (m < 1) m = 1;
        }
        term.c = c;
        term.m = m;
        // Scale-free series term c^p m^p r^(n-p), assembled in log2 to avoid
        // spurious under/overflow; for p = n = 2 the exact field energy is
        // 3 pi times this.
        double log2_term = p * std::log2(c) + p * std::log2(static_cast<double>(m)) +
                           (n - p) * lr;
        term.full_energy_p = std::exp2(log2_term);
        double log2_grad = 1.0 + std::log2(c) + std::log2(static_cast<double>(m)) - lr;
        double log2_mass;
        if (mask && i < mask->size()) {
            double mv = (*mask)[i];
            log2_mass = mv > 0 ? std::log2(mv) : -1.0 / 0.0;
        } else {
            log2_mass = -idx * p + n * lr;
        }
        double log2_omega = p * log2_grad + log2_mass;
        term.omega_energy_p = std::isfinite(log2_omega) ? std::exp2(log2_omega) : 0.0;
        full_sum += term.full_energy_p;
        omega_sum += term.omega_energy_p;
        report.terms.push_back(term);
        report.full_partial_sums.push_back(full_sum);
        report.omega_partial_sums.push_back(omega_sum);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Monotonicity

bool check_monotonicity(const ScalarWitness& w, const VAddress& v) {
    VFrame f = VFrame::root();
    for (uint8_t c : v.path) f = f.descend(c);

    // Boundary extrema from the exact edge profiles: the profile restricted to
    // a host-edge interval is piecewise monotone with a plateau in the middle,
    // so extremes occur at interval endpoints or saturation parameters.
    Rat bmin, bmax;
    bool first = true;
    for (int k = 0; k < 3; ++k) {
        const gasket::EdgeRef& r = f.ref[k];
        Rat lo = rat_min(r.t0, r.t1), hi = rat_max(r.t0, r.t1);
        std::vector<Rat> cands{lo, hi};
        for (const Rat& t : {make_rat(1, 4), make_rat(1, 2), make_rat(3, 4)}) {
            if (lo < t && t < hi) cands.push_back(t);
        }
        for (const Rat& t : cands) {
            Rat val = w.edge_value(r.host, r.host_edge, t);
            if (first) {
                bmin = bmax = val;
                first = false;
            } else {
                bmin = rat_min(bmin, val);
                bmax = rat_max(bmax, val);
            }
        }
    }
    if (first) return true;

    std::vector<VFrame> stack{f};
    while (!stack.empty()) {
        VFrame cur = stack.back();
        stack.pop_back();
        if (cur.va.level() >= w.level_max) continue;
        const TriangleRecord* rec = w.find(WAddress::central_of(cur.va));
        if (rec) {
            for (int k = 0; k < 3; ++k) {
                if (rec->params.c[k] < bmin || rec->params.c[k] > bmax) return false;
            }
            if (rec->params.a < bmin || rec->params.a > bmax) return false;
        }
        for (uint8_t c = 0; c < 3; ++c) stack.push_back(cur.descend(c));
    }
    return true;
}

}  // namespace witness
}  // namespace gasketlab
