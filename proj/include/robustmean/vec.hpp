#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "robustmean/errors.hpp"

namespace robustmean {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;  // row-major

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double dist_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist_sq(a, b)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline Vec scaled(const Vec& a, double s) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
    return out;
}

// y += s * x
inline void add_scaled(Vec& y, double s, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

// Lower median: the element of 1-based rank ceil(n/2) in sorted order,
// i.e. the usual median for odd n and the smaller central value for even n.
inline double lower_median(std::vector<double> v) {
    if (v.empty()) throw invalid_parameter("lower_median: empty input");
    const std::size_t idx = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
    return v[idx];
}

// Maximum pairwise Euclidean distance; 0 for fewer than two points.
inline double diameter(const std::vector<Vec>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, dist_sq(pts[i], pts[j]));
    return std::sqrt(best);
}

struct Box {
    Vec lo;
    Vec hi;

    bool contains(const Vec& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

inline Box bounding_box(const std::vector<Vec>& pts, double pad = 0.0) {
    if (pts.empty()) throw invalid_parameter("bounding_box: empty input");
    Box box{pts[0], pts[0]};
    for (const Vec& p : pts)
        for (std::size_t i = 0; i < p.size(); ++i) {
            box.lo[i] = std::min(box.lo[i], p[i]);
            box.hi[i] = std::max(box.hi[i], p[i]);
        }
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
        box.lo[i] -= pad;
        box.hi[i] += pad;
    }
    return box;
}

inline Matrix identity_matrix(std::size_t d) {
    Matrix m(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline Vec mat_vec(const Matrix& m, const Vec& x) {
    Vec out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], x);
    return out;
}

// A * A^T
inline Matrix mat_mul_self_t(const Matrix& a) {
    const std::size_t d = a.size();
    Matrix out(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i][j] = dot(a[i], a[j]);
    return out;
}

}  // namespace robustmean
