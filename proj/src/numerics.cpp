#include "qpc/numerics.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace qpc {

Real pi_value() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Complex& Complex::operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
}

Complex operator*(const Complex& a, const Complex& b) {
    return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}

Complex inverse(const Complex& z) {
    Real d = z.re * z.re + z.im * z.im;
    return Complex(z.re / d, -z.im / d);
}

Complex operator/(const Complex& a, const Complex& b) { return a * inverse(b); }

Real abs(const Complex& z) {
    using boost::multiprecision::hypot;
    return hypot(z.re, z.im);
}

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Complex exp(const Complex& z) {
    using boost::multiprecision::cos;
    using boost::multiprecision::exp;
    using boost::multiprecision::sin;
    Real m = exp(z.re);
    return Complex(m * cos(z.im), m * sin(z.im));
}

Complex polar(const Real& mag, const Real& phase) {
    using boost::multiprecision::cos;
    using boost::multiprecision::sin;
    return Complex(mag * cos(phase), mag * sin(phase));
}

Complex sqrt(const Complex& z) {
    using boost::multiprecision::sqrt;
    if (z.im == 0) {
        if (z.re >= 0)
            return Complex(sqrt(z.re), Real(0));
        return Complex(Real(0), sqrt(-z.re));
    }
    // principal branch via the half-angle identity, stable for all quadrants
    Real r = abs(z);
    Real u = sqrt((r + boost::multiprecision::abs(z.re)) / 2);
    Real v = boost::multiprecision::abs(z.im) / (2 * u);
    if (z.re >= 0)
        return Complex(u, z.im >= 0 ? v : -v);
    return Complex(v, z.im >= 0 ? u : -u);
}

Complex log(const Complex& z) {
    using boost::multiprecision::atan2;
    using boost::multiprecision::log;
    return Complex(log(abs(z)), atan2(z.im, z.re));
}

std::string to_string(const Real& x, unsigned digits) {
    return x.str(digits, std::ios_base::scientific);
}

std::string to_string_full(const Real& x) {
    return x.str(static_cast<int>(Real::default_precision()) + 3, std::ios_base::scientific);
}

namespace {

// Neumaier update: carries the rounding error of each addition in comp.
void neumaier_add(Real& sum, Real& comp, const Real& v) {
    using boost::multiprecision::abs;
    Real t = sum + v;
    if (abs(sum) >= abs(v))
        comp += (sum - t) + v;
    else
        comp += (v - t) + sum;
    sum = std::move(t);
}

} // namespace

Complex compensated_complex_sum(std::span<const Complex> terms) {
    std::vector<const Complex*> order(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) order[i] = &terms[i];
    // canonical ordering: ascending |z|^2, ties broken by components
    std::sort(order.begin(), order.end(), [](const Complex* a, const Complex* b) {
        Real na = norm(*a), nb = norm(*b);
        if (na != nb) return na < nb;
        if (a->re != b->re) return a->re < b->re;
        return a->im < b->im;
    });
    Real sr{0}, si{0}, cr{0}, ci{0};
    for (const Complex* t : order) {
        neumaier_add(sr, cr, t->re);
        neumaier_add(si, ci, t->im);
    }
    return Complex(sr + cr, si + ci);
}

void CompensatedAccumulator::add_one(Real& sum, Real& comp, const Real& v) {
    neumaier_add(sum, comp, v);
}

void CompensatedAccumulator::add(const Complex& term) {
    add_one(sum_re_, comp_re_, term.re);
    add_one(sum_im_, comp_im_, term.im);
}

void CompensatedAccumulator::merge(const CompensatedAccumulator& other) {
    add_one(sum_re_, comp_re_, other.sum_re_);
    comp_re_ += other.comp_re_;
    add_one(sum_im_, comp_im_, other.sum_im_);
    comp_im_ += other.comp_im_;
}

Complex CompensatedAccumulator::value() const {
    return Complex(sum_re_ + comp_re_, sum_im_ + comp_im_);
}

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transform with sign = +1 (IFFT phase convention).
void radix2(std::vector<Complex>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const Real two_pi = 2 * pi_value();
    for (std::size_t len = 2; len <= n; len <<= 1) {
        Real ang = sign * two_pi / Real(static_cast<unsigned long>(len));
        Complex wl = polar(Real(1), ang);
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(Real(1), Real(0));
            for (std::size_t j = 0; j < len / 2; ++j) {
                Complex u = a[i + j];
                Complex v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<Complex> dft(std::span<const Complex> samples, int sign) {
    const std::size_t M = samples.size();
    if (M == 0) throw std::invalid_argument("transform of empty input");
    std::vector<Complex> out;
    if (is_power_of_two(M)) {
        out.assign(samples.begin(), samples.end());
        radix2(out, sign);
    } else {
        // direct summation with exact twiddle indices k*p mod M
        out.assign(M, Complex());
        std::vector<Complex> tw(M);
        const Real two_pi = 2 * pi_value();
        for (std::size_t r = 0; r < M; ++r)
            tw[r] = polar(Real(1), sign * two_pi * Real(static_cast<unsigned long>(r)) /
                                       Real(static_cast<unsigned long>(M)));
        for (std::size_t p = 0; p < M; ++p) {
            Complex acc;
            for (std::size_t k = 0; k < M; ++k) acc += samples[k] * tw[(k * p) % M];
            out[p] = acc;
        }
    }
    using boost::multiprecision::sqrt;
    Real scale = 1 / sqrt(Real(static_cast<unsigned long>(M)));
    for (auto& z : out) z *= scale;
    return out;
}

} // namespace

std::vector<Complex> ifft_normalized(std::span<const Complex> samples) {
    return dft(samples, +1);
}

std::vector<Complex> fft_forward_normalized(std::span<const Complex> samples) {
    return dft(samples, -1);
}

unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                     unsigned threads) {
    if (count == 0) return;
    if (chunk == 0) chunk = 1;
    const std::size_t n_chunks = (count + chunk - 1) / chunk;
    if (threads == 0) threads = hardware_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    const unsigned digits = Real::default_precision();
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, digits] {
            Real::default_precision(digits);
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) break;
                fn(c, c * chunk, std::min(count, (c + 1) * chunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace qpc
