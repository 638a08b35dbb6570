#pragma once

#include "hypotor/rational.hpp"

#include <cmath>

namespace hypotor {

/// Closed interval with exact rational endpoints. All operations are exact,
/// so containment certificates never degrade through arithmetic.
struct RatInterval {
    Rat lo, hi;

    RatInterval() = default;
    RatInterval(Rat point) : lo(point), hi(point) {}
    RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw PreconditionViolation("interval: lo > hi");
    }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) * Rat(1, 2); }
    bool is_point() const { return lo == hi; }
    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }

    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    RatInterval operator-() const { return {-hi, -lo}; }

    RatInterval operator*(const RatInterval& o) const {
        Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        Rat mn = a, mx = a;
        for (const Rat* p : {&b, &c, &d}) {
            if (*p < mn) mn = *p;
            if (*p > mx) mx = *p;
        }
        return {mn, mx};
    }

    RatInterval scale(const Rat& c) const {
        if (c.sign() >= 0) return {lo * c, hi * c};
        return {hi * c, lo * c};
    }

    RatInterval square() const {
        if (lo.sign() >= 0) return {lo * lo, hi * hi};
        if (hi.sign() <= 0) return {hi * hi, lo * lo};
        Rat m = std::max(lo * lo, hi * hi);
        return {Rat(0), m};
    }

    /// Outward rounding to dyadic endpoints with ~bits fractional bits;
    /// keeps endpoint sizes bounded during long refinements.
    RatInterval round_out(unsigned bits) const {
        Int scale = pow_int(Int(2), bits);
        Int l = floor_int(lo * Rat(scale));
        Int h = ceil_int(hi * Rat(scale));
        return {Rat(l, scale), Rat(h, scale)};
    }

    bool certainly_lt(const Rat& x) const { return hi < x; }
    bool certainly_gt(const Rat& x) const { return lo > x; }
    bool certainly_lt(const RatInterval& o) const { return hi < o.lo; }
};

/// Double interval with 1-ulp outward widening after every operation.
/// Used only as a fast pre-filter; decisions escalate to rational intervals.
struct DInterval {
    double lo, hi;

    static DInterval widen(double l, double h) {
        return {std::nextafter(l, -INFINITY), std::nextafter(h, INFINITY)};
    }
    static DInterval from_rat(const Rat& x) {
        double d = to_double(x);  // mpq_get_d truncates toward zero
        if (d >= 0) return {d, std::nextafter(d, INFINITY)};
        return {std::nextafter(d, -INFINITY), d};
    }
    static DInterval from_interval(const RatInterval& iv) {
        return {from_rat(iv.lo).lo, from_rat(iv.hi).hi};
    }
    static DInterval point(double x) { return {x, x}; }

    DInterval operator+(const DInterval& o) const { return widen(lo + o.lo, hi + o.hi); }
    DInterval operator-(const DInterval& o) const { return widen(lo - o.hi, hi - o.lo); }
    DInterval operator*(const DInterval& o) const {
        double a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return widen(std::min(std::min(a, b), std::min(c, d)),
                     std::max(std::max(a, b), std::max(c, d)));
    }
    DInterval square() const {
        if (lo >= 0) return widen(lo * lo, hi * hi);
        if (hi <= 0) return widen(hi * hi, lo * lo);
        return widen(0.0, std::max(lo * lo, hi * hi));
    }
    DInterval add_scaled(const DInterval& o, long k) const {
        double kk = static_cast<double>(k);
        if (k >= 0) return widen(lo + o.lo * kk, hi + o.hi * kk);
        return widen(lo + o.hi * kk, hi + o.lo * kk);
    }
};

}  // namespace hypotor
