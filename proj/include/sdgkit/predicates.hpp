#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "geometry.hpp"

namespace sdgkit {

// Exact sign predicates: a floating-point evaluation with a forward error
// bound decides the generic cases, and anything inside the uncertainty band
// is re-evaluated in arbitrary-precision rationals. Conversion from double
// to cpp_rational is exact, so the fallback is exact for all finite inputs.

namespace detail {

using bigrat = boost::multiprecision::cpp_rational;

// Half an ulp of 1.0; the machine epsilon of the error analysis.
inline constexpr double mach_eps = 1.1102230246251565404e-16; // 2^-53

// Error coefficients for the direct (non-adaptive) evaluations, from the
// standard forward analysis of the translated determinant formulas.
inline constexpr double orient_errbound = (3.0 + 16.0 * mach_eps) * mach_eps;
inline constexpr double incircle_errbound = (10.0 + 96.0 * mach_eps) * mach_eps;

inline sign_t orientation_exact(point a, point b, point c) {
    bigrat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    bigrat det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    int s = det.sign();
    return s > 0 ? sign_t::positive : (s < 0 ? sign_t::negative : sign_t::zero);
}

inline sign_t incircle_exact(point a, point b, point c, point d) {
    bigrat adx = bigrat(a.x) - bigrat(d.x), ady = bigrat(a.y) - bigrat(d.y);
    bigrat bdx = bigrat(b.x) - bigrat(d.x), bdy = bigrat(b.y) - bigrat(d.y);
    bigrat cdx = bigrat(c.x) - bigrat(d.x), cdy = bigrat(c.y) - bigrat(d.y);
    bigrat alift = adx * adx + ady * ady;
    bigrat blift = bdx * bdx + bdy * bdy;
    bigrat clift = cdx * cdx + cdy * cdy;
    bigrat det = alift * (bdx * cdy - cdx * bdy)
               + blift * (cdx * ady - adx * cdy)
               + clift * (adx * bdy - bdx * ady);
    int s = det.sign();
    return s > 0 ? sign_t::positive : (s < 0 ? sign_t::negative : sign_t::zero);
}

} // namespace detail

// Sign of the signed area of triangle a,b,c: positive when c lies to the
// left of the directed line a->b.
inline sign_t orientation(point a, point b, point c) {
    if (!is_finite(a) || !is_finite(b) || !is_finite(c))
        throw invalid_input("orientation requires finite points");
    double detleft = (b.x - a.x) * (c.y - a.y);
    double detright = (b.y - a.y) * (c.x - a.x);
    double det = detleft - detright;
    double detsum = std::fabs(detleft) + std::fabs(detright);
    if (std::fabs(det) > detail::orient_errbound * detsum) return sign_of(det);
    return detail::orientation_exact(a, b, c);
}

// Sign of the incircle determinant: positive when d lies strictly inside the
// circle through a,b,c, for a,b,c in counterclockwise order. Collinear a,b,c
// have no circumcircle and are rejected.
inline sign_t incircle(point a, point b, point c, point d) {
    if (!is_finite(a) || !is_finite(b) || !is_finite(c) || !is_finite(d))
        throw invalid_input("incircle requires finite points");
    if (orientation(a, b, c) == sign_t::zero)
        throw degenerate_triangle("incircle: the three circle points are collinear");

    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double alift = adx * adx + ady * ady;
    double blift = bdx * bdx + bdy * bdy;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift
                     + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift
                     + (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    if (std::fabs(det) > detail::incircle_errbound * permanent) return sign_of(det);
    return detail::incircle_exact(a, b, c, d);
}

// Exact comparison of |a-b| and |c-d|; returns the sign of the difference
// of squared lengths.
inline sign_t compare_distance(point a, point b, point c, point d) {
    if (!is_finite(a) || !is_finite(b) || !is_finite(c) || !is_finite(d))
        throw invalid_input("compare_distance requires finite points");
    using detail::bigrat;
    bigrat abx = bigrat(a.x) - bigrat(b.x), aby = bigrat(a.y) - bigrat(b.y);
    bigrat cdx = bigrat(c.x) - bigrat(d.x), cdy = bigrat(c.y) - bigrat(d.y);
    bigrat diff = abx * abx + aby * aby - cdx * cdx - cdy * cdy;
    int s = diff.sign();
    return s > 0 ? sign_t::positive : (s < 0 ? sign_t::negative : sign_t::zero);
}

} // namespace sdgkit
