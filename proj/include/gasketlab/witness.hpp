#pragma once

#include "gasketlab/gasket.hpp"
#include "gasketlab/lattice.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasketlab {
namespace witness {

struct BadRadii : std::runtime_error {
    explicit BadRadii(const std::string& m) : std::runtime_error(m) {}
};
struct NonMonotoneSequence : std::runtime_error {
    explicit NonMonotoneSequence(const std::string& m) : std::runtime_error(m) {}
};
struct BudgetInfeasible : std::runtime_error {
    explicit BudgetInfeasible(const std::string& m) : std::runtime_error(m) {}
};
struct RadiiViolation : std::runtime_error {
    explicit RadiiViolation(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------
// Radial capacity block: 1 inside radius r, 0 outside R, logarithmic between.

struct RadialBlock {
    double R;
    double r;

    double value(double rho) const;
    double grad_mag(double rho) const;
    /// Closed form 2*pi / log(R/r).
    double analytic_energy() const;
};

RadialBlock radial_block(double R, double r);

/// Polar midpoint-rule Dirichlet energy, refined (Richardson-style doubling)
/// until the relative change drops below rel_tol.
double radial_energy_quadrature(const RadialBlock& b, double rel_tol = 1e-3);

// ---------------------------------------------------------------------------
// Staircase profile: the vertex-local modulus-of-continuity construction.
// As a function of the radius ratio u = rho / R1 it vanishes for u >= 1/2,
// rises by 1/N across each dyadic annulus u in (2^-1-j, 2^-j), j = 1..N, and
// is 1 for u <= 2^-1-N. Scaled to a unit edge with R1 = 1/4 the annuli are
// A(0; 2^-2-j, 2^-1-j) and consecutive dyadic edge points differ by <= 1/N.

struct StaircaseProfile {
    long long N = 3;

    /// Exact value at rational radius ratio u = rho / R1.
    Rat value_ratio(const Rat& u) const;
    double value_ratio_d(double u) const;
    /// |d sigma / du| at ratio u (0 on plateaus).
    double slope_ratio_d(double u) const;
    /// Full-plane Dirichlet energy of the unscaled profile: 3*pi/N exactly
    /// (reported as the rational multiple of pi).
    Rat energy_over_pi() const { return make_rat(3, 1) / Rat(static_cast<long>(N)); }
};

/// Vertex-local radial field over support radius R1 with N staircase annuli.
struct StaircaseBlock {
    StaircaseProfile profile;
    double R1;

    double value(double rho) const { return profile.value_ratio_d(rho / R1); }
    double grad_mag(double rho) const { return profile.slope_ratio_d(rho / R1) / R1; }
    double analytic_energy() const { return 3.0 * 3.14159265358979323846 / profile.N; }
};

StaircaseBlock staircase_block(long long N, double R1);
double staircase_energy_quadrature(const StaircaseBlock& b, double rel_tol = 1e-3);

// ---------------------------------------------------------------------------
// Half-plane building block for homeomorphic-gasket boundary data. Radial
// staircase with transition annuli: active annuli A_m = A(0; R_m/2, R_m) where
// g rises by 1/N, constant in between; each transition annulus contains a
// point of both boundary sequences so that consecutive sequence points differ
// by at most 1/N.

struct HalfPlaneBlock {
    long long N;
    std::vector<double> R;  // outer radii of the active annuli, decreasing

    double value_radius(double rho) const;
    double value(double x, double y) const;  // y >= 0 half-plane
    double grad_mag(double rho) const;
    /// Full half-plane energy: 3*pi/(2N) exactly.
    double analytic_energy() const { return 1.5 * 3.14159265358979323846 / N; }
};

/// xs strictly decreasing to 0 (positives), ys strictly increasing to 0
/// (negatives); throws NonMonotoneSequence otherwise.
HalfPlaneBlock halfplane_block(const std::vector<double>& xs, const std::vector<double>& ys,
                               long long N, double R1 = 0.25);
double halfplane_energy_quadrature(const HalfPlaneBlock& b, double rel_tol = 1e-3);

// ---------------------------------------------------------------------------
// The scalar Sobolev witness at finite depth.

struct BlockParams {
    Rat a;                    // height
    std::array<Rat, 3> c;     // vertex values
    long long N = 3;          // staircase resolution
    Rat R1;                   // vertex support radius (sidelength / 4, dyadic)
};

struct TriangleRecord {
    gasket::WAddress w;
    std::array<RatPoint, 3> x;  // vertices
    std::array<gasket::EdgeRef, 3> vertex_host;  // lower-level edge carrying x[k]
    BlockParams params;
    Rat osc;              // O(W) = max |a - c_i|
    Rat energy_over_pi;   // exact Dirichlet energy / pi
    Rat budget;           // assigned energy budget for this triangle
};

struct ScalarWitness {
    int level_max = 0;
    Rat epsilon;
    long long n_cap = 0;
    std::vector<TriangleRecord> tris;                // lexicographic by address
    std::map<std::string, std::size_t> index;        // address string -> index

    RatPoint x0;      // centre of the level-1 triangle (= root centroid)
    Rat r0_sq;        // f == 1 on B(x0, r0); r0^2 = 1/48
    Rat R0_sq;        // f == 0 outside B(x0, R0); R0^2 = 1/3

    const TriangleRecord* find(const gasket::WAddress& w) const;

    /// Exact f on the edge `edge` of a built w-triangle at parameter t; host
    /// level 0 gives 0 identically.
    Rat edge_value(const gasket::WAddress& host, int edge, const Rat& t) const;

    /// Exact f at a vertex-type point (value at the vertex of a built triangle).
    Rat vertex_value(const TriangleRecord& rec, int k) const { return rec.params.c[k]; }

    /// Pointwise evaluation in doubles; points in unbuilt leftover triangles
    /// report nullopt.
    std::optional<double> value_at(const EuclidPoint& pt) const;

    /// Exact total Dirichlet energy divided by pi.
    Rat total_energy_over_pi() const;
    double total_energy() const;
    /// Rigorous upper bound with pi <= 355/113 (used for budget certification).
    Rat total_energy_upper() const;
};

/// Builds the witness to levelMax with global energy budget epsilon spread as
/// eps * 4^-level * 3^-(level-1) per triangle; throws BudgetInfeasible when a
/// triangle would need more than n_cap staircase annuli.
ScalarWitness build_witness(int levelMax, const Rat& epsilon,
                            long long n_cap = 1000000000000000LL);

/// Exact check of the dyadic-anchor modulus on every half-edge: consecutive
/// anchor values differ by at most O(W)/3 (requires N >= 3 per block).
bool check_star_condition(const ScalarWitness& w);

// Per-step oscillation recurrences along a nested sequence. The step bound is
// checked with exact arithmetic: case 1 needs O(W_n) <= 2e/3 + (2/3) D,
// case 2 O(W_n) <= 2e/3 + (5/6) D, case 3 O(W_n) <= (7/9) D, where D is the
// measured maximum of the parent oscillations and e the measured boundary
// drift on the stabilized triangles.
struct RecurrenceStep {
    int n = 0;
    int case_id = 0;  // 1, 2, 3
    Rat osc_n;
    Rat parent_max;
    Rat eps_measured;
    Rat bound;
    bool ok = false;
};

struct RecurrenceReport {
    std::vector<RecurrenceStep> steps;
    // Theoretical envelopes for reference.
    std::vector<double> case1_envelope;  // (2/3)^m
    std::vector<double> case2_envelope;  // (5/6)^m
    std::vector<double> case3_envelope;  // (7/9)^(m-1), Delta_1 = 1
    bool all_ok() const;
};

RecurrenceReport verify_recurrences(const ScalarWitness& w, const gasket::VAddress& word);

/// Runs verify_recurrences over `samples` seeded random words plus the three
/// canonical vertex/edge/interior words.
struct RecurrenceSweep {
    int sequences = 0;
    int steps_checked = 0;
    int violations = 0;
};
RecurrenceSweep recurrence_sweep(const ScalarWitness& w, int samples, uint64_t seed);

// ---------------------------------------------------------------------------
// Line-crossing energy.

struct LineCrossing {
    double t;                 // height of the horizontal line
    double built_integral;    // integral of |grad f| over built triangles
    double leftover_jumps;    // sum of |f| jumps across unbuilt leaf triangles
    double lower_bound;       // built_integral + leftover_jumps
};

struct LineReport {
    std::vector<LineCrossing> lines;
    double min_lower_bound = 0;
    double grad_l2;           // exact ||grad f||_2
    double r0;
    double R0;
    /// r0 <= sqrt(pi) R0 ||grad f||_2 fails, exhibiting the Sobolev tension.
    bool tension_demonstrated = false;
};

LineReport line_energy_check(const ScalarWitness& w, int nLines, uint64_t seed);

// ---------------------------------------------------------------------------
// Positive-measure witness (oscillating radial bumps at a Lebesgue point).

struct PMWitnessTerm {
    double log2_r;          // radii are carried in log2; deep sequences leave
                            // the double range (r_1000 < 2^-1000)
    double c;
    long long m;
    double full_energy_p;   // ||grad phi_i||_p^p on R^n, scale-free form c^p m^p r^(n-p)
    double omega_energy_p;  // upper bound via the Lebesgue-point mask
};

struct PMWitnessReport {
    double p;
    int n;
    std::vector<PMWitnessTerm> terms;
    std::vector<double> full_partial_sums;
    std::vector<double> omega_partial_sums;
};

/// Radii given as log2 values; the halving condition r_{i+1} < r_i/2 < 1/2
/// reads log2_r[i+1] < log2_r[i] - 1 and log2_r[0] < 0. mask[i], when given,
/// bounds m(B_i cap Omega); the default surrogate is 2^(-ip) r_i^n. Throws
/// RadiiViolation when the halving chain fails.
PMWitnessReport positive_measure_witness(const std::vector<double>& log2_radii, double p, int n,
                                         const std::vector<double>* mask = nullptr);

// ---------------------------------------------------------------------------
// Monotonicity check: extrema of f over descendant vertex values inside a
// v-triangle are attained on its boundary (exact comparison).

bool check_monotonicity(const ScalarWitness& w, const gasket::VAddress& v);

}  // namespace witness
}  // namespace gasketlab
