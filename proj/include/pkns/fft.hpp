#pragma once

#include <complex>
#include <Eigen/Dense>

namespace pkns {

// Row-major layouts so that buffers can be handed to FFTW directly.
using RealField = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexField = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

//============================================================
// Real <-> half-complex transforms on an n x n periodic grid.
//
// Conventions:
//  * forward() returns discrete Fourier coefficients normalized by 1/n^2,
//    so coef(0,0) equals the grid mean and the inverse needs no scaling.
//  * The half spectrum has shape n x (n/2+1): rows run over the wrapped
//    first-axis mode, columns over second-axis modes 0..n/2.
//  * Plans are created once per (thread, n) and reused; execution copies
//    through workspace buffers owned by the plan, which keeps concurrent
//    transforms on distinct fields safe.
//============================================================
class Fft2D {
public:
    // Workspace for transforms of size n, cached per thread.
    static Fft2D& for_size(int n);

    ComplexField forward(const RealField& f);
    RealField inverse(const ComplexField& c);

    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;
    ~Fft2D();

private:
    explicit Fft2D(int n);

    int n_;
    double* real_buf_;
    void* complex_buf_;
    void* plan_forward_;
    void* plan_inverse_;
};

} // namespace pkns
