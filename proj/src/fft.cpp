#include "pkns/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace pkns {

namespace {
// The FFTW planner is not thread safe; executions of finished plans are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft2D::Fft2D(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_buf_ = fftw_alloc_real(static_cast<size_t>(n) * n);
    complex_buf_ = fftw_alloc_complex(static_cast<size_t>(n) * (n / 2 + 1));
    auto* cplx = static_cast<fftw_complex*>(complex_buf_);
    // FFTW_ESTIMATE: deterministic plans, no timing-based search.
    plan_forward_ = fftw_plan_dft_r2c_2d(n, n, real_buf_, cplx, FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_dft_c2r_2d(n, n, cplx, real_buf_, FFTW_ESTIMATE);
    if (plan_forward_ == nullptr || plan_inverse_ == nullptr) {
        throw std::runtime_error("fftw plan creation failed for n=" + std::to_string(n));
    }
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
}

Fft2D& Fft2D::for_size(int n) {
    thread_local std::map<int, std::unique_ptr<Fft2D>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::unique_ptr<Fft2D>(new Fft2D(n))).first;
    }
    return *it->second;
}

ComplexField Fft2D::forward(const RealField& f) {
    const int nc = n_ / 2 + 1;
    std::memcpy(real_buf_, f.data(), sizeof(double) * n_ * n_);
    fftw_execute(static_cast<fftw_plan>(plan_forward_));
    ComplexField out(n_, nc);
    std::memcpy(out.data(), complex_buf_, sizeof(fftw_complex) * n_ * nc);
    out *= 1.0 / (static_cast<double>(n_) * n_);
    return out;
}

RealField Fft2D::inverse(const ComplexField& c) {
    const int nc = n_ / 2 + 1;
    std::memcpy(complex_buf_, c.data(), sizeof(fftw_complex) * n_ * nc);
    fftw_execute(static_cast<fftw_plan>(plan_inverse_));
    RealField out(n_, n_);
    std::memcpy(out.data(), real_buf_, sizeof(double) * n_ * n_);
    return out;
}

} // namespace pkns
