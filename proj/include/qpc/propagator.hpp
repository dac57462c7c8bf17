#pragma once

// Closed-form evolution of Gaussian states through Gaussian slits: per-plane
// iterates, the c/d coupling vectors and the quadratic-form matrix H through
// which slit positions enter the detector wave function.

#include "qpc/numerics.hpp"
#include "qpc/setup.hpp"

#include <vector>

namespace qpc {

struct KernelParams {
    Real delta_t;      // seconds, > 0
    Complex prefactor; // sqrt(m / (2 pi i hbar dt))
    Real phase_scale;  // m / (2 hbar dt)
};

KernelParams make_kernel(const PhysicalConstants& consts, const Real& delta_t);

// Free propagation is the unit-b chirp special case of the linear canonical
// transform; kept as parameter bookkeeping with its unimodularity invariant.
struct LctParams {
    Real a, b, c, d;
    Real alpha, gamma, eta;

    Real unimodularity_defect() const { return a * d - b * c - 1; }
};

LctParams lct_for_leg(const PhysicalConstants& consts, const Real& delta_t);

// Per-plane iterates. Index 0 holds the source leg (A_0, B_0, chi_0); entries
// 1..N-1 hold the slit-plane quantities evaluated left to right.
struct PlaneStep {
    Real A, B;              // envelope/phase curvature after the plane
    Complex varsigma;       // denominator of the plane's Gaussian integral
    Complex xi;             // beta^2 m / varsigma
    Real varrho;
    Real zeta;
    Real zeta_c, zeta_d;    // linear-coefficient injections
    Complex p1, p2, p3;     // per-plane exponent couplings
    Real p4, p5;            // rotation entries of the (C, D) recursion
};

struct PlaneIterates {
    Real A0, B0;
    Complex chi0;
    std::vector<PlaneStep> steps; // size N-1, steps[j-1] is plane j

    const PlaneStep& plane(int j) const { return steps.at(j - 1); } // 1-based
    int plane_count() const { return static_cast<int>(steps.size()); }
};

// A_0, B_0, chi_0 from the freely propagated source Gaussian.
void initial_iterates(const PhysicalConstants& consts, const Real& sigma0, const Real& t01,
                      Real& A0, Real& B0, Complex& chi0);

// One plane step: window of half-width beta followed by free flight t_next.
// Regular at t_next = 0 (pure window); throws DegenerateGeometry when the
// zeta/varsigma denominators collapse.
PlaneStep propagate_plane(const Real& A_prev, const Real& B_prev, const Real& beta,
                          const Real& t_next, const PhysicalConstants& consts);

struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PlaneIterates compute_iterates(const SetupGeometry& geom, const PhysicalConstants& consts);
PlaneIterates compute_iterates(const SetupGeometry& geom, const PhysicalConstants& consts,
                               const TimeSchedule& schedule);

// Small dense complex matrix, row-major; sizes here are (N-1) x (N-1).
struct ComplexMatrix {
    int rows = 0, cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}
    Complex& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const Complex& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct CouplingModel {
    PlaneIterates iterates;
    std::vector<Real> c_vec;    // length N-1
    std::vector<Real> d_vec;    // length N-1
    ComplexMatrix H;            // full complex H = H_R + i H_I
    ComplexMatrix G;            // structural matrix (zero-padded E2 V_L block)
    Real A_last, B_last;        // A_{N-1}, B_{N-1}
    Real lambda_prefactor;      // |chi_0 prod sqrt(xi_j)|^2
    Complex chi_prefactor;      // chi_0 prod sqrt(xi_j)

    int dim() const { return H.rows; }
};

// Assembles c, d and H = diag(p1) + G^T diag(p2) G + E1^T diag(p3) G.
CouplingModel build_coupling(const PlaneIterates& its);
CouplingModel build_coupling(const SetupGeometry& geom, const PhysicalConstants& consts);

// Intermediate-plane coupling rows (c_j, d_j) for j in [1, N-1]; the scalar
// recursion oracle and G assembly both use these.
void coupling_vectors_at(const PlaneIterates& its, int j, std::vector<Real>& c_j,
                         std::vector<Real>& d_j);

// x^T H x.
Complex quadratic_form(const ComplexMatrix& H, std::span<const Real> x);

// Same quantity via the pointwise-product route
// sum_k p_k^T ((M_{1,k} x) . (M_{2,k} x)); equal to quadratic_form by the
// trace identity and kept as an independent evaluation path.
Complex quadratic_form_pointwise(const CouplingModel& cm, std::span<const Real> x);

// Single Gaussian-exponential state amp * exp(a x^2 + b x); the sequential
// evolution route used by the exotic extension and as a cross-check oracle
// for the structured recursions. log_amp tracks log(amp) to keep states with
// hundreds of orders of magnitude between them representable.
struct GaussianState {
    Complex log_amp{Real(0), Real(0)};
    Complex a; // Re(a) < 0 for normalizable states
    Complex b;

    Complex amplitude_at(const Real& x) const; // exp(log_amp + a x^2 + b x)
    Complex exponent_at(const Real& x) const;  // log_amp + a x^2 + b x
};

GaussianState source_state(const Real& sigma0);

// Multiplies by the window exp(-(x - center)^2 / (2 beta^2)).
void apply_window(GaussianState& st, const Real& center, const Real& beta);

// Free flight over delta_t via the closed-form Gaussian integral.
void apply_free_flight(GaussianState& st, const PhysicalConstants& consts, const Real& delta_t);

} // namespace qpc
