#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace sdgkit {

// Dense univariate polynomial with double coefficients, low degree first.
// Degrees stay small here (certificate polynomials of bounded-degree
// motions), so the quadratic-time operations are fine.
class polynomial {
public:
    polynomial() = default;
    explicit polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
    static polynomial constant(double v) { return polynomial({v}); }

    const std::vector<double>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }

    double operator()(double t) const {
        double v = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) v = v * t + c_[i];
        return v;
    }

    polynomial derivative() const {
        if (c_.size() <= 1) return polynomial();
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return polynomial(std::move(d));
    }

    friend polynomial operator+(const polynomial& a, const polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return polynomial(std::move(r));
    }
    friend polynomial operator-(const polynomial& a, const polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
        return polynomial(std::move(r));
    }
    friend polynomial operator*(const polynomial& a, const polynomial& b) {
        if (a.is_zero() || b.is_zero()) return polynomial();
        std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return polynomial(std::move(r));
    }
    friend polynomial operator*(double s, const polynomial& a) {
        std::vector<double> r = a.c_;
        for (double& v : r) v *= s;
        return polynomial(std::move(r));
    }
    friend polynomial operator-(const polynomial& a) { return -1.0 * a; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

namespace detail {

// Number of sign variations in the coefficient sequence of
// (1+x)^n p((a + b x)/(1 + x)), which bounds the count of roots of p in
// (a, b). Zero coefficients do not contribute.
inline int descartes_variations(const polynomial& p, double a, double b) {
    const auto& c = p.coeffs();
    std::size_t n = c.size();
    if (n == 0) return 0;
    // q(x) = p(a + (b-a) x), by Horner on polynomial arguments.
    std::vector<double> q(1, c[n - 1]);
    double w = b - a;
    for (std::size_t i = n - 1; i-- > 0;) {
        // q <- q * (a + w x) + c[i]
        std::vector<double> r(q.size() + 1, 0.0);
        for (std::size_t j = 0; j < q.size(); ++j) {
            r[j] += q[j] * a;
            r[j + 1] += q[j] * w;
        }
        r[0] += c[i];
        q = std::move(r);
    }
    // Reverse, then Taylor-shift by 1: coefficients of (1+x)^m q(1/(1+x)).
    std::reverse(q.begin(), q.end());
    for (std::size_t i = 1; i < q.size(); ++i)
        for (std::size_t j = q.size() - 1; j >= i; --j) q[j - 1] += q[j];
    int variations = 0;
    int last = 0;
    for (double v : q) {
        int s = (v > 0.0) - (v < 0.0);
        if (s != 0) {
            if (last != 0 && s != last) ++variations;
            last = s;
        }
    }
    return variations;
}

} // namespace detail

// Ascending roots of p in (a, b] at which p changes sign, each refined by
// bisection until the bracket is narrower than tol. Roots of even
// multiplicity are invisible to sign tests and are deliberately not
// reported; the kinetic layer treats motions that graze zero as
// non-generic. Isolation is Descartes subdivision; a window that keeps two
// or more candidate roots while already narrower than width_floor is
// reported as degenerate (two events too close to order).
inline std::vector<double> sign_changing_roots(const polynomial& p, double a, double b,
                                               double tol = 1e-10, double width_floor = 1e-12) {
    std::vector<double> roots;
    if (p.is_zero()) throw degenerate_motion("root isolation on the zero polynomial");
    if (p.degree() == 0 || !(a < b)) return roots;

    struct span { double lo, hi; };
    std::vector<span> work{{a, b}};
    std::vector<span> isolated;
    while (!work.empty()) {
        span s = work.back();
        work.pop_back();
        int v = detail::descartes_variations(p, s.lo, s.hi);
        if (v == 0) continue;
        double flo = p(s.lo), fhi = p(s.hi);
        if (v == 1) {
            if ((flo > 0.0 && fhi < 0.0) || (flo < 0.0 && fhi > 0.0)) {
                isolated.push_back(s);
                continue;
            }
            // One variation without an endpoint sign change: the root sits
            // at (or numerically on) an endpoint. Shrink to decide.
        }
        if (s.hi - s.lo < width_floor) {
            if ((flo > 0.0 && fhi < 0.0) || (flo < 0.0 && fhi > 0.0)) {
                isolated.push_back(s);
            } else if (v >= 2) {
                throw degenerate_motion("two polynomial roots closer than the resolvable width");
            }
            // Even-multiplicity graze: no certified sign change, no root.
            continue;
        }
        double mid = 0.5 * (s.lo + s.hi);
        if (p(mid) == 0.0) {
            // Exact hit. Peel off (t - mid) factors to find the multiplicity;
            // only an odd one changes sign. The division remainder is the
            // same Horner sum that certified the hit, so "divides exactly"
            // and "evaluates to zero" agree.
            std::vector<double> q = p.coeffs();
            int mult = 0;
            while (q.size() > 1) {
                std::vector<double> d(q.size() - 1);
                d.back() = q.back();
                for (std::size_t k = q.size() - 2; k >= 1; --k) d[k - 1] = q[k] + mid * d[k];
                double rem = q[0] + mid * d[0];
                if (rem != 0.0) break;
                ++mult;
                q = std::move(d);
            }
            if (mult % 2 == 1) roots.push_back(mid);
            double nudge = std::max(width_floor, (s.hi - s.lo) * 1e-6);
            work.push_back({s.lo, mid - nudge});
            work.push_back({mid + nudge, s.hi});
            continue;
        }
        work.push_back({s.lo, mid});
        work.push_back({mid, s.hi});
    }

    for (span s : isolated) {
        double lo = s.lo, hi = s.hi;
        double flo = p(lo);
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            double fm = p(mid);
            if (fm == 0.0) { lo = hi = mid; break; }
            if ((flo > 0.0) == (fm > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// Smallest sign-changing root strictly greater than `after` in (after, b].
inline std::optional<double> first_sign_changing_root(const polynomial& p, double after, double b,
                                                      double tol = 1e-10) {
    auto roots = sign_changing_roots(p, after, b, tol);
    for (double r : roots)
        if (r > after) return r;
    return std::nullopt;
}

} // namespace sdgkit
