#pragma once

#include "gasketlab/collapse.hpp"
#include "gasketlab/flapplane.hpp"
#include "gasketlab/fold.hpp"
#include "gasketlab/gasket.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasketlab {
namespace phi {

struct CollisionFound : std::runtime_error {
    explicit CollisionFound(const std::string& m) : std::runtime_error(m) {}
};

/// Image of a point under the finite-stage homeomorphism: the identity on the
/// unbounded component, a rectangle-chart point over a collapsed triangle, or
/// (at finite depth) the u-quad region of an unbuilt leftover triangle.
struct Image {
    enum class Kind { PlaneIdentity, Chart, Region };
    Kind kind = Kind::PlaneIdentity;
    RatPoint plane;            // PlaneIdentity: the point itself
    int tripod = -1;           // Chart: index into the collapse stage order
    int spoke = 0;
    int face = 0;
    Rat s, t;                  // chart coordinates (spoke fraction, height fraction)
    gasket::VAddress region;   // Region: leftover v-triangle address
};

class PhiStage {
  public:
    int level = 0;
    collapse::CollapseStage cstage;
    std::vector<fold::FoldMap> folds;  // parallel to cstage.tripods

    /// Exact evaluation; points must lie in the closed root triangle or are
    /// reported as the identity.
    Image evaluate(const RatPoint& p) const;

    /// Canonical key of a surface point: identified chart representations
    /// (tops, tip verticals, lifts, contact points) collapse to one string.
    std::string canonical_key(const Image& img) const;

    /// Flap area sum 2 h (l1+l2+l3) over all tripods, as a rational interval;
    /// heights are scaled by `scale` with the collapse data held fixed.
    RatInterval flap_area(const Rat& scale = Rat(1)) const;
    /// Total tripod length sum, as a rational interval.
    RatInterval tripod_length() const;

    const collapse::TripodEntry& entry(int idx) const {
        return cstage.tripods[static_cast<std::size_t>(idx)];
    }
};

/// Builds the stage with a height policy (default: largest dyadic below
/// min spoke / 6 per tripod).
PhiStage build_phi(int level, const collapse::HeightPolicy& policy = nullptr);

struct InjectivityReport {
    long long vertex_points = 0;
    long long samples = 0;
    long long region_hits = 0;   // samples landing in unbuilt leftovers
    long long collisions = 0;
    std::string first_collision;
};

/// Exact vertex scan plus seeded random samples; throws CollisionFound when
/// two distinct sources share a canonical image.
InjectivityReport injectivity_scan(const PhiStage& stage, long long n_samples, uint64_t seed,
                                   bool throw_on_collision = true);

struct MeasureReport {
    Rat planar_area_units;     // exact image area at the build level (sqrt3/4 units)
    RatInterval flap_area;     // certified interval
    RatInterval tripod_length;
    double planar_area = 0;
    double flap_area_mid = 0;
};

MeasureReport measure_blowup(const PhiStage& stage);

/// Exact fold/collapse boundary compatibility: cells per spoke agree and the
/// anchor traces coincide on sampled dyadic parameters.
bool check_boundary_compatibility(const PhiStage& stage, int dyadic_depth = 8);

/// Max piece distortion over the per-triangle folds.
double max_piece_distortion(const PhiStage& stage);

/// Anchor-displacement modulus: every fold in the stage carries the exact
/// cell <= 2h <= spoke/3 certificate.
bool check_modulus(const PhiStage& stage);

}  // namespace phi
}  // namespace gasketlab
