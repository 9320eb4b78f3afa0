#pragma once

#include "gasketlab/collapse.hpp"
#include "gasketlab/lattice.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasketlab {
namespace flap {

struct PropertyGViolation : std::runtime_error {
    explicit PropertyGViolation(const std::string& m) : std::runtime_error(m) {}
};
struct HeightWidthViolation : std::runtime_error {
    explicit HeightWidthViolation(const std::string& m) : std::runtime_error(m) {}
};
struct WindowExceeded : std::runtime_error {
    explicit WindowExceeded(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateSeparation : std::runtime_error {
    explicit DegenerateSeparation(const std::string& m) : std::runtime_error(m) {}
};
struct ProbeFailure : std::runtime_error {
    explicit ProbeFailure(const std::string& m) : std::runtime_error(m) {}
};

/// Rectangle chart id: side 0 is the left bank walking center -> tip.
struct RectId {
    int tripod = -1;
    int spoke = 0;
    int side = 0;

    bool operator==(const RectId& o) const {
        return tripod == o.tripod && spoke == o.spoke && side == o.side;
    }
};

/// A point of the glued surface: either a plane point (off the slits) or a
/// rectangle point in local coordinates (u along the spoke from the center,
/// v the height off the bank).
struct FlapPoint {
    enum class Chart { Plane, Rect };
    Chart chart = Chart::Plane;
    double x = 0, y = 0;  // plane chart
    RectId rect;
    double u = 0, v = 0;  // rect chart

    static FlapPoint plane(double x, double y) {
        FlapPoint p;
        p.chart = Chart::Plane;
        p.x = x;
        p.y = y;
        return p;
    }
    static FlapPoint on_rect(RectId id, double u, double v) {
        FlapPoint p;
        p.chart = Chart::Rect;
        p.rect = id;
        p.u = u;
        p.v = v;
        return p;
    }
};

/// One tripod of the stage with numeric geometry and gluing data.
struct StageTripod {
    collapse::Tripod shape;      // exact
    Rat h;                       // exact height
    EuclidPoint a;               // numeric center
    std::array<EuclidPoint, 3> c;
    std::array<double, 3> len;
    double hd = 0;
    std::array<int, 3> ccw_next;  // spoke -> next spoke counterclockwise
};

/// Contact between a tip of a later tripod and an earlier tripod.
struct Contact {
    int tripod = -1;  // the later tripod
    int spoke = 0;    // its touching tip
    int host = -1;    // earlier tripod
    int host_spoke = 0;
    int host_side = 0;   // approach side on the host spoke
    double host_u = 0;   // position along the host spoke
    bool at_host_tip = false;
    bool at_host_center = false;
};

class FlapPlaneStage {
  public:
    std::vector<StageTripod> tripods;
    std::vector<Contact> contacts;
    EuclidPoint window_center{0.5, 0.28867513459481287};
    double window_radius = 4.0;

    int size() const { return static_cast<int>(tripods.size()); }
    double min_height() const;
    /// Planar position of a point (the orthogonal projection).
    EuclidPoint project_to_plane(const FlapPoint& p) const;
    /// Projection to an earlier stage: rectangles of tripods past `l` collapse.
    FlapPoint project(const FlapPoint& p, int l) const;
    /// Flap area 2 h sum(len) of a tripod, numeric.
    double flap_area(int tripod) const;
    bool in_window(const EuclidPoint& p) const;
};

/// Builds a stage over the first n tripods of a collapse family (property (G)
/// is re-checked exactly; heights must clear the width and fold constraints).
FlapPlaneStage build_stage(const std::vector<collapse::TripodEntry>& family, int n,
                           const std::vector<Rat>& heights);

/// Inductive height schedule: each h_{n+1} obeys (i) the width/fold constraint
/// 6 h <= min spoke, (ii) geometric flap-area decay, (iii) flap area <= sep^2/4
/// where sep is the exact partitioned-edge separation, (iv) h < sep/(12 (n+1)^2).
struct ScheduleEntry {
    Rat h;
    Rat sep_sq;       // exact squared separation (0 if no earlier tripods)
    double area_bound;
};
std::vector<ScheduleEntry> height_schedule(const std::vector<collapse::TripodEntry>& family,
                                           int n);

/// Certified two-sided distance data.
struct DistanceCertificate {
    double lower = 0;  // projection bound, exact reasoning
    double upper = 0;  // realised by the witness path
    std::vector<FlapPoint> path;
    bool exact = false;  // both points shared one rectangle (global isometry)
};

/// Net-based distance oracle: upper bounds from a visibility graph over an
/// eps-net plus the straight lift path, lower bounds from the projection.
class DistanceOracle {
  public:
    DistanceOracle(const FlapPlaneStage& stage, double eps);

    const FlapPlaneStage& stage() const { return *stage_; }
    double eps() const { return eps_; }
    std::size_t node_count() const { return nodes_.size(); }

    DistanceCertificate distance(const FlapPoint& x, const FlapPoint& y) const;
    /// Upper bound along the straight projected segment with pillow detours;
    /// nullopt when the segment hits a degenerate configuration.
    std::optional<double> lift_path_upper(const FlapPoint& x, const FlapPoint& y,
                                          std::vector<FlapPoint>* path = nullptr) const;
    double projection_lower(const FlapPoint& x, const FlapPoint& y) const;

    /// Single-source upper bounds to every net node (for sweeps).
    std::vector<double> upper_bounds_from(const FlapPoint& x) const;

    struct Node {
        FlapPoint pt;
        EuclidPoint pos;   // planar位置 for projection bounds
        int chart = -1;    // -1 plane, else rect index (tripod*6 + spoke*2 + side)
    };
    const std::vector<Node>& nodes() const { return nodes_; }
    /// Canonical node id under the gluing identifications.
    int root(int node) const { return root_[static_cast<std::size_t>(node)]; }

    /// Whether the straight planar segment avoids every slit (so it lifts
    /// isometrically).
    bool plane_visible(const EuclidPoint& p, const EuclidPoint& q, int skip_tripod = -1,
                       int skip_spoke = -1) const;

  private:
    friend struct OracleBuilder;
    const FlapPlaneStage* stage_;
    double eps_;
    std::vector<Node> nodes_;
    std::vector<int> root_;
    std::vector<std::vector<std::pair<int, float>>> adj_;

    int attach_query(const FlapPoint& p, std::vector<std::pair<int, double>>& out) const;
};

/// Ball measure estimate: planar part + per-rectangle parts, as an interval.
struct MeasureInterval {
    double lower = 0;
    double upper = 0;
    double plane_part = 0;
    double rect_part = 0;
};
MeasureInterval ball_measure(const DistanceOracle& oracle, const FlapPoint& x, double r,
                             int resolution);

/// Linear local connectivity probe: builds the detour path for z and w around
/// B(x, r) and reports the certified achieved constant (the path clears
/// B(x, r / c_achieved)).
struct LlcReport {
    double c_achieved = 0;
    int case_id = 0;  // 1: r >= 12 h_min, 2: r < 12 h_min
    std::vector<FlapPoint> path;
    double min_clearance = 0;
};
LlcReport llc_probe(const DistanceOracle& oracle, const FlapPoint& x, double r,
                    const FlapPoint& z, const FlapPoint& w);

/// Finite-stage Gromov-Hausdorff data: 0 <= d_m - d_n <= 6 sum of tail heights
/// on sampled pairs, via the structural lift-path bounds.
struct GhReport {
    int checked = 0;
    int violations = 0;
    double max_gap = 0;
    double tail_bound = 0;
};
GhReport gh_distortion(const FlapPlaneStage& stage_m, int n, int pairs, uint64_t seed);

/// Ahlfors upper-bound sweep: mu(B(x,r)) <= (pi + 24 N0 pi + 2) r^2 with
/// N0 = 6, checked against the estimator intervals.
struct AhlforsSample {
    double x = 0, y = 0;  // planar position of the centre
    double r = 0;
    double lower = 0;
    double upper = 0;
    double bound = 0;
    bool pass = true;
};

struct AhlforsReport {
    int samples = 0;
    int upper_violations = 0;
    double max_ratio = 0;        // max over samples of interval.lower / r^2
    double min_nonzero_ratio = 0;
    double bound_constant = 0;
    std::vector<AhlforsSample> rows;
};
AhlforsReport regularity_sweep(const DistanceOracle& oracle, int samples, uint64_t seed);

/// Lift of a planar polyline to a connected chain in the stage (property G3).
std::optional<std::vector<FlapPoint>> lift_path(const FlapPlaneStage& stage,
                                                const std::vector<EuclidPoint>& polyline);

}  // namespace flap
}  // namespace gasketlab
