#include "gasketlab/distortion.hpp"
#include "gasketlab/report.hpp"

namespace gasketlab {

RatInterval DistortionKey::value_interval(unsigned bits) const {
    // (mu + sqrt(mu^2 - 4)) / 2
    Rat disc = mu * mu - 4;
    if (sgn(disc) < 0) disc = 0;  // conformal up to rounding; mu >= 2 always
    RatInterval s = sqrt_interval(disc, bits);
    return {(mu + s.lo) / 2, (mu + s.hi) / 2};
}

DistortionKey distortion_key(const RatMat2& A) {
    mark_op("triq.affine_distortion");
    Rat det = A.det();
    if (sgn(det) <= 0) throw NonOrientationPreserving("det <= 0");
    return {A.trace_ata() / det};
}

RatInterval FrameDistortion::value_interval(unsigned bits) const {
    // mu = sqrt(mu2), distortion = (mu + sqrt(mu2 - 4)) / 2.
    RatInterval mu = sqrt_interval(mu2(), bits);
    Rat disc = mu2() - 4;
    if (sgn(disc) < 0) disc = 0;
    RatInterval s = sqrt_interval(disc, bits);
    return {(mu.lo + s.lo) / 2, (mu.hi + s.hi) / 2};
}

FrameDistortion frame_distortion(const RatMat2& M, const Rat& w2, const Rat& h2) {
    // A = D * M * B^{-1} with D = diag(w, h) and B the lattice basis matrix.
    // trace(A^T A) = trace((M^T D^2 M) G^{-1}) with G = B^T B = [[1,1/2],[1/2,1]],
    // G^{-1} = (4/3) [[1,-1/2],[-1/2,1]].
    // det(A)^2 = w2 * h2 * det(M)^2 * (4/3)   (det B = sqrt(3)/2).
    Rat n11 = w2 * M.a * M.a + h2 * M.c * M.c;
    Rat n12 = w2 * M.a * M.b + h2 * M.c * M.d;
    Rat n22 = w2 * M.b * M.b + h2 * M.d * M.d;
    Rat four_thirds = make_rat(4, 3);
    Rat tau = four_thirds * (n11 - n12 + n22);
    Rat detM = M.det();
    Rat det2 = w2 * h2 * detM * detM * four_thirds;
    if (sgn(det2) == 0) throw NonOrientationPreserving("degenerate piece");
    return {tau, det2, sgn(detM)};
}

DistortionKey affine_distortion_key(const RatMat2& A) { return distortion_key(A); }

Rat affine_distortion(const AffinePiece& piece) {
    DistortionKey key = distortion_key(piece.linear);
    return key.value_interval(64).mid();
}

}  // namespace gasketlab
