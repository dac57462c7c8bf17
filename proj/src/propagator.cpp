#include "qpc/propagator.hpp"

namespace qpc {

using boost::multiprecision::abs;
using boost::multiprecision::pow;
using boost::multiprecision::sqrt;

KernelParams make_kernel(const PhysicalConstants& consts, const Real& delta_t) {
    if (delta_t <= 0) throw std::invalid_argument("kernel: delta_t must be positive");
    KernelParams kp;
    kp.delta_t = delta_t;
    kp.phase_scale = consts.mass / (2 * consts.hbar * delta_t);
    // sqrt(m / (2 pi i hbar dt)) = sqrt(phi / pi) e^{-i pi/4}
    Real mag = sqrt(kp.phase_scale / pi_value());
    kp.prefactor = polar(mag, -pi_value() / 4);
    return kp;
}

LctParams lct_for_leg(const PhysicalConstants& consts, const Real& delta_t) {
    LctParams p;
    p.alpha = p.gamma = p.eta = consts.mass / (2 * pi_value() * consts.hbar * delta_t);
    p.a = p.gamma / p.eta;
    p.b = 1 / p.eta;
    p.c = (p.alpha * p.gamma - p.eta * p.eta) / p.eta;
    p.d = p.alpha / p.eta;
    return p;
}

void initial_iterates(const PhysicalConstants& consts, const Real& sigma0, const Real& t01,
                      Real& A0, Real& B0, Complex& chi0) {
    const Real& m = consts.mass;
    const Real& hb = consts.hbar;
    Real den = 2 * hb * hb * t01 * t01 + 2 * m * m * pow(sigma0, 4);
    A0 = -(m * m * sigma0 * sigma0) / den;
    B0 = (hb * m * t01) / den;
    chi0 = sqrt(Complex(m * sigma0) * inverse(Complex(m * sigma0 * sigma0, hb * t01))) /
           pow(pi_value(), Real("0.25"));
}

PlaneStep propagate_plane(const Real& A_prev, const Real& B_prev, const Real& beta,
                          const Real& t_next, const PhysicalConstants& consts) {
    const Real& m = consts.mass;
    const Real& hb = consts.hbar;
    const Real b2 = beta * beta;
    const Real b4 = b2 * b2;
    const Real ht = hb * t_next;

    PlaneStep s;
    // varsigma = beta^2 m + hbar t (2 beta^2 (B - iA) + i)
    s.varsigma = Complex(b2 * m + ht * 2 * b2 * B_prev, ht * (1 - 2 * b2 * A_prev));
    s.varrho = 4 * b4 * (A_prev * A_prev + B_prev * B_prev) - 4 * A_prev * b2 + 1;
    s.zeta = 4 * B_prev * b4 * hb * m * t_next + b4 * m * m + ht * ht * s.varrho;

    const Real digits = Real(static_cast<unsigned long>(Real::default_precision()));
    const Real rel_floor = pow(Real(10), -digits / 2);
    if (abs(s.zeta) < b4 * m * m * rel_floor)
        throw DegenerateGeometry("propagate_plane: degenerate plane (zeta ~ 0)");
    if (abs(s.varsigma) < b2 * m * rel_floor)
        throw DegenerateGeometry("propagate_plane: degenerate plane (varsigma ~ 0)");

    s.zeta_c = (2 * B_prev * hb * m * t_next * b2 + b2 * m * m) / s.zeta;
    s.zeta_d = ht * m * (2 * A_prev * b2 - 1) / s.zeta;
    s.A = b2 * m * m * (2 * A_prev * b2 - 1) / (2 * s.zeta);
    s.B = (2 * B_prev * b4 * m * m + hb * m * t_next * s.varrho) / (2 * s.zeta);

    // p1 = -(2 hbar t (A + iB) + i m) / (2 i varsigma)
    Complex num(2 * ht * A_prev, 2 * ht * B_prev + m);
    Complex two_i_vs(-2 * s.varsigma.im, 2 * s.varsigma.re);
    s.p1 = -(num / two_i_vs);
    s.p2 = -(Complex(b2 * ht) / two_i_vs);
    Complex i_vs(-s.varsigma.im, s.varsigma.re);
    s.p3 = -(Complex(ht) / i_vs);
    s.p4 = b2 * s.zeta_c;
    s.p5 = -2 * ht * s.A / m;
    s.xi = Complex(b2 * m) / s.varsigma;
    return s;
}

PlaneIterates compute_iterates(const SetupGeometry& geom, const PhysicalConstants& consts) {
    return compute_iterates(geom, consts, derive_schedule(geom, consts));
}

PlaneIterates compute_iterates(const SetupGeometry& geom, const PhysicalConstants& consts,
                               const TimeSchedule& schedule) {
    PlaneIterates its;
    initial_iterates(consts, geom.source_width, schedule.leg.at(0), its.A0, its.B0, its.chi0);
    Real A = its.A0, B = its.B0;
    for (int j = 1; j < geom.num_planes; ++j) {
        PlaneStep s = propagate_plane(A, B, geom.slit_half_widths[j - 1], schedule.leg.at(j), consts);
        if (!(s.A < 0))
            throw DegenerateGeometry("propagate_plane: non-negative envelope curvature at plane " +
                                     std::to_string(j));
        A = s.A;
        B = s.B;
        its.steps.push_back(std::move(s));
    }
    return its;
}

void coupling_vectors_at(const PlaneIterates& its, int j, std::vector<Real>& c_j,
                         std::vector<Real>& d_j) {
    c_j.assign(j, Real(0));
    d_j.assign(j, Real(0));
    for (int k = 0; k < j; ++k) {
        // v_{k,j} = (prod_{i=1}^{j-1-k} M_{j+1-i}) [zeta_{k+1,c}; zeta_{k+1,d}],
        // evaluated right-to-left so the product applies left to right.
        Real vc = its.plane(k + 1).zeta_c;
        Real vd = its.plane(k + 1).zeta_d;
        for (int i = j - 1 - k; i >= 1; --i) {
            const PlaneStep& s = its.plane(j + 1 - i);
            Real nc = s.p4 * vc + s.p5 * vd;
            Real nd = -s.p5 * vc + s.p4 * vd;
            vc = std::move(nc);
            vd = std::move(nd);
        }
        c_j[k] = vc;
        d_j[k] = vd;
    }
}

CouplingModel build_coupling(const PlaneIterates& its) {
    const int P = its.plane_count();
    if (P < 1) throw std::invalid_argument("build_coupling: need at least one slit plane");
    CouplingModel cm;
    cm.iterates = its;
    coupling_vectors_at(its, P, cm.c_vec, cm.d_vec);
    cm.A_last = its.plane(P).A;
    cm.B_last = its.plane(P).B;

    // G carries the intermediate-plane couplings: row j-1 (for plane j < P)
    // holds c_j + i d_j in its first j columns, final row zero.
    cm.G = ComplexMatrix(P, P);
    std::vector<Real> cj, dj;
    for (int j = 1; j < P; ++j) {
        coupling_vectors_at(its, j, cj, dj);
        for (int k = 0; k < j; ++k) cm.G.at(j - 1, k) = Complex(cj[k], dj[k]);
    }

    // H = diag(p1) + G^T diag(p2') G + E1^T diag(p3') G with p2'[r] = p_{2,r+2}
    // (plane r+2 couples the squared plane-(r+1) linear term), trailing zero.
    cm.H = ComplexMatrix(P, P);
    for (int j = 0; j < P; ++j) cm.H.at(j, j) += its.plane(j + 1).p1;
    for (int r = 0; r + 1 < P; ++r) {
        const Complex& p2 = its.plane(r + 2).p2;
        const Complex& p3 = its.plane(r + 2).p3;
        for (int a = 0; a <= r; ++a) {
            for (int b = 0; b <= r; ++b)
                cm.H.at(a, b) += cm.G.at(r, a) * p2 * cm.G.at(r, b);
            // E1^T diag(p3) G: (E1)_{r, r+1} = 1 shifts the row product onto column r+1
            cm.H.at(r + 1, a) += p3 * cm.G.at(r, a);
        }
    }

    Complex pref = its.chi0;
    for (int j = 1; j <= P; ++j) pref *= sqrt(its.plane(j).xi);
    cm.chi_prefactor = pref;
    cm.lambda_prefactor = norm(pref);
    return cm;
}

CouplingModel build_coupling(const SetupGeometry& geom, const PhysicalConstants& consts) {
    return build_coupling(compute_iterates(geom, consts));
}

Complex quadratic_form(const ComplexMatrix& H, std::span<const Real> x) {
    if (static_cast<int>(x.size()) != H.rows || H.rows != H.cols)
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    Complex acc;
    for (int a = 0; a < H.rows; ++a) {
        Complex row;
        for (int b = 0; b < H.cols; ++b) row += H.at(a, b) * x[b];
        acc += row * x[a];
    }
    return acc;
}

Complex quadratic_form_pointwise(const CouplingModel& cm, std::span<const Real> x) {
    const int P = cm.dim();
    if (static_cast<int>(x.size()) != P)
        throw std::invalid_argument("quadratic_form_pointwise: dimension mismatch");
    Complex acc;
    for (int j = 0; j < P; ++j) acc += cm.iterates.plane(j + 1).p1 * x[j] * x[j];
    // (G x)_r = c_{r+1} . x + i d_{r+1} . x ; E1 shift pairs it with x_{r+1}
    for (int r = 0; r + 1 < P; ++r) {
        Complex gx;
        for (int b = 0; b <= r; ++b) gx += cm.G.at(r, b) * x[b];
        acc += cm.iterates.plane(r + 2).p2 * gx * gx;
        acc += cm.iterates.plane(r + 2).p3 * gx * x[r + 1];
    }
    return acc;
}

Complex GaussianState::exponent_at(const Real& x) const {
    return log_amp + a * (x * x) + b * x;
}

Complex GaussianState::amplitude_at(const Real& x) const { return exp(exponent_at(x)); }

GaussianState source_state(const Real& sigma0) {
    GaussianState st;
    // amp = (sigma0^2 pi)^{-1/4}
    st.log_amp = Complex(-boost::multiprecision::log(sigma0 * sigma0 * pi_value()) / 4, Real(0));
    st.a = Complex(-1 / (2 * sigma0 * sigma0), Real(0));
    st.b = Complex();
    return st;
}

void apply_window(GaussianState& st, const Real& center, const Real& beta) {
    const Real b2 = beta * beta;
    st.log_amp.re -= center * center / (2 * b2);
    st.a.re -= 1 / (2 * b2);
    st.b.re += center / b2;
}

void apply_free_flight(GaussianState& st, const PhysicalConstants& consts, const Real& delta_t) {
    if (delta_t == 0) return;
    const Real phi = consts.mass / (2 * consts.hbar * delta_t);
    const Complex den = st.a + Complex(Real(0), phi); // Re < 0 for valid states
    // amp *= sqrt(phi / (i pi)) sqrt(-pi / den) exp(-b^2 / (4 den))
    //      = sqrt(phi) e^{-i pi/4} / sqrt(-den) * exp(...)
    Complex factor = -(st.b * st.b) / (4 * den);
    factor.re += boost::multiprecision::log(phi) / 2;
    factor.im -= pi_value() / 4;
    st.log_amp += factor - log(sqrt(-den));
    const Complex i_phi(Real(0), phi);
    st.a = i_phi * st.a / den;
    st.b = i_phi * st.b / den;
}

} // namespace qpc
