#pragma once

#include "gasketlab/lattice.hpp"
#include "gasketlab/polygon.hpp"

#include <stdexcept>

namespace gasketlab {

struct NonOrientationPreserving : std::runtime_error {
    explicit NonOrientationPreserving(const std::string& m) : std::runtime_error(m) {}
};

/// 2x2 rational matrix acting on Euclidean coordinates.
struct RatMat2 {
    Rat a, b, c, d;  // [[a, b], [c, d]]

    Rat det() const { return a * d - b * c; }
    Rat trace_ata() const { return a * a + b * b + c * c + d * d; }

    RatMat2 operator*(const RatMat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

/// Affine plane map with a convex rational domain.
struct AffinePiece {
    RatMat2 linear;
    RatPoint translation;  // Euclidean offset, rational components
    ConvexPolygon domain;
};

/// Distortion ||A||^2 / det A of an orientation-preserving linear map is
/// (mu + sqrt(mu^2 - 4)) / 2 with mu = trace(A^T A) / det A >= 2. The key
/// carries mu exactly, so equality and order are decidable without roots.
struct DistortionKey {
    Rat mu;

    bool operator==(const DistortionKey& o) const { return mu == o.mu; }
    bool operator<(const DistortionKey& o) const { return mu < o.mu; }

    /// Rational enclosure of the distortion value, width <= 2^-bits.
    RatInterval value_interval(unsigned bits = 64) const;
    double value() const { return to_double(value_interval(64).mid()); }
};

DistortionKey distortion_key(const RatMat2& A);

/// Distortion of an affine map given in mixed frames: the source is expressed
/// in lattice-basis coordinates with Gram matrix [[1,1/2],[1/2,1]] and the
/// target in a rectangle chart scaled by diag(w_scale2, h_scale2) on squared
/// lengths. Everything stays rational: mu = trace(A^T A)/|det A| comes out as
/// mu^2 = tau^2 / det2 with tau and det2 rational.
struct FrameDistortion {
    Rat tau;   // trace(A^T A), exact
    Rat det2;  // det(A)^2, exact
    int det_sign;

    Rat mu2() const { return tau * tau / det2; }
    bool same_as(const FrameDistortion& o) const { return mu2() == o.mu2(); }
    RatInterval value_interval(unsigned bits = 64) const;
    double value() const { return to_double(value_interval(64).mid()); }
};

/// M maps source lattice coordinates to chart coordinates (u, v); the chart
/// metric squares lengths by w2 along u and h2 along v (w2 = h2 = 1 for a
/// plain Euclidean chart). Source Gram matrix is the triangular-lattice one.
FrameDistortion frame_distortion(const RatMat2& M, const Rat& w2, const Rat& h2);

/// Spec-level operation: distortion of an affine piece acting on Euclidean
/// coordinates, as a rational approximation within 2^-64.
Rat affine_distortion(const AffinePiece& piece);
DistortionKey affine_distortion_key(const RatMat2& A);

}  // namespace gasketlab
