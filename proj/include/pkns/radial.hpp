#pragma once

#include <optional>

#include <Eigen/Dense>

#include "pkns/torus.hpp"

namespace pkns {

//============================================================
// Radially symmetric solver on the plane, finite volumes on annuli.
//
// For radial data the velocity is azimuthal and drops out of the density
// equation, the vorticity obeys a pure heat equation, and the chemical
// gradient comes from the cumulative mass:
//
//   dt n = (1/r) d_r ( r (d_r n - n d_r c) ),   d_r c = -m(r)/(2 pi r)
//   dt w = (1/r) d_r ( r d_r w )
//
// Cell centers sit at r_j = (j+1/2) h with h = r_max/n_r; fluxes live on
// the faces r = j h, with zero flux through both ends. Mass is therefore
// conserved to roundoff by construction.
//============================================================

struct RadialGrid {
    double r_max = 0.0;
    int n_r = 0;

    double h() const { return r_max / n_r; }
    double r_center(int j) const { return (j + 0.5) * h(); }
    double r_face(int j) const { return j * h(); }

    bool operator==(const RadialGrid&) const = default;
};

// Throws ConfigError unless r_max > 0 and n_r >= 64.
RadialGrid make_radial_grid(double r_max, int n_r);

struct RadialState {
    double t = 0.0;
    RadialGrid grid;
    Eigen::ArrayXd n;     // cell-center density
    Eigen::ArrayXd omega; // cell-center vorticity
};

// Cumulative mass at the n_r + 1 faces: m[0] = 0 and m[n_r] equals the
// telescoped total 2 pi sum n_j r_j h exactly.
Eigen::ArrayXd cumulative_mass(const Eigen::ArrayXd& n, const RadialGrid& grid);

double total_mass(const Eigen::ArrayXd& n, const RadialGrid& grid);

// d_r c at cell centers from the face cumulative mass.
Eigen::ArrayXd chemical_gradient_radial(const Eigen::ArrayXd& m_faces, const RadialGrid& grid);

// d_r c at faces (exact given the face masses); entry 0 is 0.
Eigen::ArrayXd chemical_gradient_faces(const Eigen::ArrayXd& m_faces, const RadialGrid& grid);

// Chemical c at cell centers, anchored by c(r_max) = -(M/2pi) log r_max
// and integrated inward.
Eigen::ArrayXd chemical_potential_radial(const Eigen::ArrayXd& n, const RadialGrid& grid);

// Azimuthal velocity at cell centers: u_theta(r) = (1/r) int_0^r w s ds.
Eigen::ArrayXd azimuthal_velocity(const Eigen::ArrayXd& omega, const RadialGrid& grid);

struct RadialRhsTerms {
    bool chemotaxis = true;
};

struct RadialTendency {
    Eigen::ArrayXd dn;
    Eigen::ArrayXd domega;
};

// Conservative flux-form tendencies with zero flux at r = 0 and r = r_max.
RadialTendency rhs_radial(const RadialState& state, const RadialRhsTerms& terms = {});

// Strang arrangement: half step of the explicit chemotactic flux, full
// implicit (Crank-Nicolson, tridiagonal) diffusion step for n and omega,
// second half step of the flux. Throws PositivityLoss on undershoot.
RadialState step_radial(const RadialState& state, double dt, const RadialRhsTerms& terms = {});

// Second moment V = 2 pi sum n_j r_j^3 h.
double second_moment_radial(const Eigen::ArrayXd& n, const RadialGrid& grid);

// Upper bound 8 pi V0 / (4 M (M - 8 pi)) for the concentration time of
// supercritical masses; empty for M <= 8 pi.
std::optional<double> blowup_time_estimate(double mass, double second_moment0);

// True when the outer 5% of cells stay below 1e-8 * ||n||_inf, i.e. the
// truncated domain still contains the solution.
bool radial_boundary_guard(const Eigen::ArrayXd& n, const RadialGrid& grid);

// Step limit from the explicit flux: advective CFL on d_r c plus the
// aggregation rate max(n) (the flux divergence contains n^2).
DtChoice adaptive_dt_radial(const RadialState& state, const StepControl& control);

} // namespace pkns
