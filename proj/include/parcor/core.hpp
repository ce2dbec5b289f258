#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

// Parabolic space-time primitives.  Points live in R^n x R with the
// parabolic metric dist((X,t),(Y,s)) = |X-Y| + |t-s|^{1/2}; "balls" of the
// companion gauge max(|X-Y|, |t-s|^{1/2}) are the parabolic cylinders
// C(X,t,r) = B(X,r) x (t-r^2, t+r^2).

namespace parcor {

inline constexpr int kMaxSpatialDim = 4;

// Small fixed-capacity spatial vector; dimension is a runtime value <= 4.
struct Vec {
    std::array<double, kMaxSpatialDim> v{};
    int n = 0;

    Vec() = default;
    explicit Vec(int dim) : n(dim) {}
    Vec(std::initializer_list<double> xs) : n(int(xs.size())) {
        int i = 0;
        for (double x : xs) v[i++] = x;
    }

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
    int dim() const { return n; }

    Vec operator+(const Vec& o) const {
        Vec r(n);
        for (int i = 0; i < n; ++i) r.v[i] = v[i] + o.v[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r(n);
        for (int i = 0; i < n; ++i) r.v[i] = v[i] - o.v[i];
        return r;
    }
    Vec operator*(double c) const {
        Vec r(n);
        for (int i = 0; i < n; ++i) r.v[i] = v[i] * c;
        return r;
    }
    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }

    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[i] * o.v[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec normalized() const {
        double m = norm();
        Vec r(n);
        if (m > 0)
            for (int i = 0; i < n; ++i) r.v[i] = v[i] / m;
        return r;
    }

    static Vec axis(int dim, int i, double scale = 1.0) {
        Vec r(dim);
        r.v[i] = scale;
        return r;
    }

    bool operator==(const Vec& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n; ++i)
            if (v[i] != o.v[i]) return false;
        return true;
    }
};

// A point (X,t) in R^n x R.  Spatial coordinates carry length units, the
// time coordinate carries length^2.
struct SpaceTimePoint {
    Vec x;
    double t = 0;

    SpaceTimePoint() = default;
    SpaceTimePoint(Vec x_, double t_) : x(std::move(x_)), t(t_) {}

    int dim() const { return x.dim(); }
    bool operator==(const SpaceTimePoint& o) const { return x == o.x && t == o.t; }
};

inline void require_same_dim(const SpaceTimePoint& p, const SpaceTimePoint& q) {
    if (p.dim() != q.dim())
        throw std::invalid_argument("space-time points have mismatched ambient dimension (" +
                                    std::to_string(p.dim()) + " vs " + std::to_string(q.dim()) + ")");
}

// Parabolic length ||(X,t)|| = |X| + |t|^{1/2}.
inline double par_norm(const Vec& x, double t) { return x.norm() + std::sqrt(std::abs(t)); }

// Parabolic distance |X-Y| + |t-s|^{1/2}.
inline double par_dist(const SpaceTimePoint& p, const SpaceTimePoint& q) {
    require_same_dim(p, q);
    return par_norm(p.x - q.x, p.t - q.t);
}

// Cylinder gauge max(|X-Y|, |t-s|^{1/2}); balls of this gauge are the
// parabolic cylinders C(X,t,r).  Comparable with par_dist within a factor 2.
inline double gauge_dist(const SpaceTimePoint& p, const SpaceTimePoint& q) {
    require_same_dim(p, q);
    return std::max((p.x - q.x).norm(), std::sqrt(std::abs(p.t - q.t)));
}

// Parabolic dilation (X,t) -> (aX, a^2 t).
inline SpaceTimePoint par_scale(const SpaceTimePoint& p, double a) {
    return {p.x * a, p.t * a * a};
}

// C(X,t,r) = {(Y,s): |Y-X| < r, |s-t| < r^2}.  The forward/backward halves
// C+ / C- partition C minus the time slice {s = t}.
struct ParabolicCylinder {
    SpaceTimePoint center;
    double radius = 0;

    ParabolicCylinder() = default;
    ParabolicCylinder(SpaceTimePoint c, double r) : center(std::move(c)), radius(r) {
        if (!(r > 0)) throw std::invalid_argument("parabolic cylinder needs radius > 0");
    }

    bool contains(const SpaceTimePoint& p) const {
        return (p.x - center.x).norm() < radius &&
               std::abs(p.t - center.t) < radius * radius;
    }
    // Closed version, used by delta() (smallest d with Sigma meeting the closure).
    bool contains_closed(const SpaceTimePoint& p) const {
        return (p.x - center.x).norm() <= radius &&
               std::abs(p.t - center.t) <= radius * radius;
    }
    bool contains_forward(const SpaceTimePoint& p) const { return contains(p) && p.t > center.t; }
    bool contains_backward(const SpaceTimePoint& p) const { return contains(p) && p.t < center.t; }

    ParabolicCylinder dilated(double a) const { return {center, radius * a}; }
};

inline double sqr(double x) { return x * x; }

}  // namespace parcor
