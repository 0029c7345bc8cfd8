#include "pkns/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace pkns {

Eigen::ArrayXd solve_tridiagonal(const Eigen::ArrayXd& a,
                                 const Eigen::ArrayXd& b,
                                 const Eigen::ArrayXd& c,
                                 const Eigen::ArrayXd& rhs) {
    const Eigen::Index n = b.size();
    Eigen::ArrayXd cp(n);
    Eigen::ArrayXd dp(n);
    cp[0] = c[0] / b[0];
    dp[0] = rhs[0] / b[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        const double denom = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / denom;
        dp[i] = (rhs[i] - a[i] * dp[i - 1]) / denom;
    }
    Eigen::ArrayXd x(n);
    x[n - 1] = dp[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    return x;
}

MonotoneCubic::MonotoneCubic(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y)
    : x_(x), y_(y), d_(x.size()) {
    const Eigen::Index n = x.size();
    if (n < 2 || y.size() != n) {
        throw std::invalid_argument("MonotoneCubic needs matching arrays of size >= 2");
    }
    Eigen::ArrayXd h(n - 1);
    Eigen::ArrayXd s(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        s[i] = (y[i + 1] - y[i]) / h[i];
    }
    d_[0] = s[0];
    d_[n - 1] = s[n - 2];
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            // Weighted harmonic mean keeps the interpolant shape preserving.
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
}

double MonotoneCubic::operator()(double xq) const {
    const Eigen::Index n = x_.size();
    if (xq <= x_[0]) {
        return y_[0];
    }
    if (xq >= x_[n - 1]) {
        return y_[n - 1];
    }
    // Binary search for the containing interval.
    Eigen::Index lo = 0;
    Eigen::Index hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (x_[mid] <= xq ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (xq - x_[lo]) / h;
    const double y0 = y_[lo];
    const double y1 = y_[lo + 1];
    const double d0 = d_[lo];
    const double d1 = d_[lo + 1];
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * d0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1;
}

double least_squares_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    const double xm = x.mean();
    const double ym = y.mean();
    const double sxx = ((x - xm) * (x - xm)).sum();
    const double sxy = ((x - xm) * (y - ym)).sum();
    return sxy / sxx;
}

} // namespace pkns
