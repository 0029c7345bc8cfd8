#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pkns/errors.hpp"
#include "pkns/spectral.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace pkns;

namespace {

RealField random_field(const TorusGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RealField f(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            f(i, j) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    return f;
}

// Full-spectrum coefficient by direct summation, the O(n^2)-per-mode
// definition the transforms must reproduce.
std::complex<double> dft_mode(const RealField& f, int m1, int m2) {
    const int n = static_cast<int>(f.rows());
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double phase = -2.0 * M_PI * (double(m1) * i + double(m2) * j) / n;
            acc += f(i, j) * std::polar(1.0, phase);
        }
    return acc / double(n * n);
}

} // namespace

TEST_CASE("grid validation and mode bookkeeping") {
    CHECK_THROWS_AS(make_torus_grid(0), ConfigError);
    CHECK_THROWS_AS(make_torus_grid(7), ConfigError);
    CHECK_THROWS_AS(make_torus_grid(48), ConfigError);
    CHECK_THROWS_AS(make_torus_grid(4), ConfigError);

    const TorusGrid grid = make_torus_grid(16);
    CHECK(grid.cols() == 9);
    CHECK(grid.row_mode(0) == 0);
    CHECK(grid.row_mode(7) == 7);
    CHECK(grid.row_mode(8) == -8);
    CHECK(grid.row_mode(15) == -1);
    CHECK(grid.wavenumber(3) == doctest::Approx(6.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("round trip and mean") {
    const TorusGrid grid = make_torus_grid(32);
    const RealField f = random_field(grid, 1);
    const SpectralScalar s = to_spectral(grid, f);
    const RealField back = to_physical(s);
    CHECK((back - f).abs().maxCoeff() < 1e-13);

    CHECK(mean(s) == doctest::Approx(f.mean()).epsilon(1e-14));
    CHECK(std::abs(s.coef(0, 0).imag()) < 1e-16);
}

TEST_CASE("coefficients match the direct transform") {
    const TorusGrid grid = make_torus_grid(16);
    const RealField f = random_field(grid, 2);
    const SpectralScalar s = to_spectral(grid, f);
    for (const auto [m1, m2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {3, 5}, {-3, 5}, {-7, -2},
                                {-8, 0}, {5, -8}, {-1, 4}}) {
        const std::complex<double> direct = dft_mode(f, m1, m2);
        const std::complex<double> stored = mode(s, m1, m2);
        CHECK(std::abs(direct - stored) < 1e-13);
    }
}

TEST_CASE("set_mode keeps the field real") {
    const TorusGrid grid = make_torus_grid(16);
    SpectralScalar s = zero_scalar(grid);
    set_mode(s, 3, 5, {0.4, -0.2});
    set_mode(s, 2, 0, {0.1, 0.3});  // column 0 needs the mirrored partner
    set_mode(s, -1, 8, {0.2, 0.7}); // Nyquist column likewise

    const RealField f = to_physical(s);
    double max_imag_defect = 0.0;
    for (const auto [m1, m2] : {std::pair{3, 5}, {2, 0}, {-1, 8}}) {
        const auto z = mode(s, m1, m2);
        const auto zc = mode(s, -m1, -m2);
        max_imag_defect = std::max(max_imag_defect, std::abs(z - std::conj(zc)));
    }
    CHECK(max_imag_defect == 0.0);

    // A field synthesized from conjugate pairs is 2 Re(z e^{i k.x}).
    SpectralScalar single = zero_scalar(grid);
    const std::complex<double> z{0.4, -0.2};
    set_mode(single, 3, 5, z);
    const RealField g = to_physical(single);
    double err = 0.0;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            const double phase = 2.0 * M_PI * (3.0 * i + 5.0 * j) / grid.n;
            err = std::max(err, std::abs(g(i, j) - 2.0 * std::real(z * std::polar(1.0, phase))));
        }
    CHECK(err < 1e-14);
    (void)f;
}

TEST_CASE("parseval holds against the grid sum") {
    const TorusGrid grid = make_torus_grid(64);
    const RealField f = random_field(grid, 3);
    const SpectralScalar s = to_spectral(grid, f);
    const double grid_sq = (f * f).mean();
    CHECK(l2_norm(s) * l2_norm(s) == doctest::Approx(grid_sq).epsilon(1e-13));
}

TEST_CASE("derivatives are exact on trigonometric data") {
    const TorusGrid grid = make_torus_grid(64);
    RealField f(grid.n, grid.n), d1(grid.n, grid.n), d2(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            const double x = i * grid.h(), y = j * grid.h();
            f(i, j) = std::sin(2.0 * M_PI * x) * std::cos(4.0 * M_PI * y);
            d1(i, j) = 2.0 * M_PI * std::cos(2.0 * M_PI * x) * std::cos(4.0 * M_PI * y);
            d2(i, j) = -4.0 * M_PI * std::sin(2.0 * M_PI * x) * std::sin(4.0 * M_PI * y);
        }
    const SpectralScalar s = to_spectral(grid, f);
    CHECK((to_physical(spectral_derivative(s, 0)) - d1).abs().maxCoeff() < 1e-11);
    CHECK((to_physical(spectral_derivative(s, 1)) - d2).abs().maxCoeff() < 1e-11);

    // The h^1 seminorm of this field is |k|^2/4 summed over 4 modes.
    const double ksq = 4.0 * M_PI * M_PI + 16.0 * M_PI * M_PI;
    CHECK(h1_seminorm_sq(s) == doctest::Approx(0.25 * ksq * 4.0 / 4.0).epsilon(1e-13));
}

TEST_CASE("poisson solve inverts the laplacian") {
    const TorusGrid grid = make_torus_grid(64);
    SpectralScalar f = zero_scalar(grid);
    set_mode(f, 1, 2, {0.3, 0.1});
    const SpectralScalar c = poisson_solve_zero_mean(f);

    const double ksq = 4.0 * M_PI * M_PI * 5.0;
    const std::complex<double> expected = std::complex<double>(0.3, 0.1) / ksq;
    CHECK(std::abs(mode(c, 1, 2) - expected) < 1e-16);
    CHECK(std::abs(c.coef(0, 0)) == 0.0);

    // Independent 5-point stencil oracle: -Lap_h c should reproduce f up
    // to the O(h^2) consistency error of the stencil.
    const RealField cp = to_physical(c);
    const RealField fp = to_physical(f);
    const int n = grid.n;
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double lap = (cp((i + 1) % n, j) + cp((i + n - 1) % n, j) +
                                cp(i, (j + 1) % n) + cp(i, (j + n - 1) % n) - 4.0 * cp(i, j)) /
                               (grid.h() * grid.h());
            err = std::max(err, std::abs(-lap - fp(i, j)));
        }
    const double stencil_consistency = ksq * (2.0 * M_PI / n) * (2.0 * M_PI / n); // ~ |k|^4 h^2 / 12
    CHECK(err < stencil_consistency);
}

TEST_CASE("leray projection removes exactly the gradient part") {
    const TorusGrid grid = make_torus_grid(32);
    SpectralVector u{to_spectral(grid, random_field(grid, 4)),
                     to_spectral(grid, random_field(grid, 5))};
    const SpectralVector p = leray_project(u);

    CHECK(l2_norm(divergence(p)) < 1e-13 * l2_norm(u.c1));

    const SpectralVector pp = leray_project(p);
    CHECK(l2_norm(SpectralScalar{grid, (pp.c1.coef - p.c1.coef).eval()}) < 1e-14);
    CHECK(l2_norm(SpectralScalar{grid, (pp.c2.coef - p.c2.coef).eval()}) < 1e-14);

    // Pure gradients are annihilated.
    SpectralScalar phi = to_spectral(grid, random_field(grid, 6));
    const SpectralVector g = gradient(phi);
    const SpectralVector pg = leray_project(g);
    CHECK(l2_norm(pg.c1) + l2_norm(pg.c2) < 1e-13 * (l2_norm(g.c1) + l2_norm(g.c2)));

    // Band-limited rotational fields pass through unchanged.
    dealias_inplace(phi);
    const SpectralVector rot{spectral_derivative(phi, 1),
                             SpectralScalar{grid, (-spectral_derivative(phi, 0).coef).eval()}};
    const SpectralVector prot = leray_project(rot);
    CHECK(l2_norm(SpectralScalar{grid, (prot.c1.coef - rot.c1.coef).eval()}) < 1e-13);
    CHECK(l2_norm(SpectralScalar{grid, (prot.c2.coef - rot.c2.coef).eval()}) < 1e-13);
}

TEST_CASE("biot savart reproduces the single-mode stream solution") {
    const TorusGrid grid = make_torus_grid(64);
    RealField w(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            w(i, j) = std::sin(2.0 * M_PI * i * grid.h());
    const SpectralScalar omega = to_spectral(grid, w);
    const SpectralVector u = biot_savart(omega);

    // omega = sin(2 pi x1) gives u = (0, -cos(2 pi x1) / (2 pi)).
    const RealField u1 = to_physical(u.c1);
    const RealField u2 = to_physical(u.c2);
    double err = 0.0;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            err = std::max(err, std::abs(u1(i, j)));
            err = std::max(err,
                           std::abs(u2(i, j) + std::cos(2.0 * M_PI * i * grid.h()) / (2.0 * M_PI)));
        }
    CHECK(err < 1e-14);

    SpectralScalar band = to_spectral(grid, random_field(grid, 7));
    band.coef(0, 0) = 0.0;
    dealias_inplace(band);
    const SpectralVector v = biot_savart(band);
    SpectralScalar back = curl(v);
    back.coef -= band.coef;
    CHECK(l2_norm(back) < 1e-13 * l2_norm(band));
    CHECK(l2_norm(divergence(v)) < 1e-13 * l2_norm(band));

    SpectralScalar with_mean = band;
    with_mean.coef(0, 0) = 1.0;
    CHECK_THROWS_AS(biot_savart(with_mean), NonzeroMeanVorticity);
}

TEST_CASE("dealiased products match the periodic convolution") {
    const int n = 16;
    const TorusGrid grid = make_torus_grid(n);
    std::mt19937_64 rng(8);
    auto band_field = [&]() {
        SpectralScalar s = zero_scalar(grid);
        for (int m1 = -5; m1 <= 5; ++m1)
            for (int m2 = 0; m2 <= 5; ++m2) {
                if (m2 == 0 && m1 <= 0)
                    continue;
                const double re = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
                const double im = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
                set_mode(s, m1, m2, {re, im});
            }
        s.coef(0, 0) = 0.5;
        return s;
    };
    const SpectralScalar f = band_field();
    const SpectralScalar g = band_field();

    SpectralScalar prod = to_spectral(grid, (to_physical(f) * to_physical(g)).eval());
    dealias_inplace(prod);

    // Brute-force convolution over the full spectrum, then the same
    // two-thirds truncation; grid products alias only outside the band.
    double err = 0.0;
    for (int m1 = -n / 2; m1 < n / 2; ++m1)
        for (int m2 = -n / 2; m2 < n / 2; ++m2) {
            std::complex<double> conv = 0.0;
            for (int a1 = -n / 2; a1 < n / 2; ++a1)
                for (int a2 = -n / 2; a2 < n / 2; ++a2) {
                    const int b1 = m1 - a1, b2 = m2 - a2;
                    if (b1 < -n / 2 || b1 >= n / 2 || b2 < -n / 2 || b2 >= n / 2)
                        continue;
                    conv += mode(f, a1, a2) * mode(g, b1, b2);
                }
            if (3 * std::abs(m1) > n || 3 * std::abs(m2) > n)
                conv = 0.0;
            err = std::max(err, std::abs(mode(prod, m1, m2) - conv));
        }
    CHECK(err < 1e-13);
}

TEST_CASE("dealias zeroes exactly the outer band") {
    const TorusGrid grid = make_torus_grid(16);
    SpectralScalar s = to_spectral(grid, random_field(grid, 9));
    dealias_inplace(s);
    for (int row = 0; row < grid.n; ++row)
        for (int col = 0; col < grid.cols(); ++col) {
            const bool outside = 3 * std::abs(grid.row_mode(row)) > grid.n || 3 * col > grid.n;
            if (outside)
                CHECK(std::abs(s.coef(row, col)) == 0.0);
            else
                CHECK(std::abs(s.coef(row, col)) > 0.0);
        }
}
