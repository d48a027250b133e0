#pragma once

#include "stit/vec.hpp"

namespace stit {

/// Affine hyperplane {x : <x,normal> = offset} with unit normal. In ambient
/// dimension 2 the normal has z = 0 and the "hyperplane" is a line.
///
/// Hyperplanes are unoriented; the stored representative has its normal in a
/// fixed closed half-space of directions (z > 0, equator ties broken
/// lexicographically by y then x).
struct Hyperplane {
    Vec3 normal;
    double offset = 0.0;

    double signed_dist(const Vec3& p) const { return dot(normal, p) - offset; }
};

inline Hyperplane canonicalize(Hyperplane h) {
    const Vec3& n = h.normal;
    bool flip = n.z < 0.0 ||
                (n.z == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0)));
    if (flip) return {-n, -h.offset};
    return h;
}

}  // namespace stit
