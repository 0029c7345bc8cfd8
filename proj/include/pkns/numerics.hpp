#pragma once

#include <Eigen/Dense>

namespace pkns {

// Solves the tridiagonal system with sub/main/super diagonals (a, b, c);
// a[0] and c[n-1] are ignored. Overwrites nothing; returns the solution.
Eigen::ArrayXd solve_tridiagonal(const Eigen::ArrayXd& a,
                                 const Eigen::ArrayXd& b,
                                 const Eigen::ArrayXd& c,
                                 const Eigen::ArrayXd& rhs);

// Shape-preserving cubic interpolant (Fritsch-Carlson slopes) through
// strictly increasing abscissae. Evaluation outside [x.front(), x.back()]
// clamps to the end values.
class MonotoneCubic {
public:
    MonotoneCubic(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);
    double operator()(double xq) const;

private:
    Eigen::ArrayXd x_, y_, d_;
};

// Least-squares slope of y against x.
double least_squares_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

} // namespace pkns
