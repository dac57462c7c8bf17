#pragma once

// Configurable-precision real/complex arithmetic used by every module.
// Real is an MPFR-backed float whose working precision is set at runtime
// from the experiment configuration (QPC_PRECISION_DIGITS overrides).

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpc {

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0, boost::multiprecision::allocate_dynamic>,
    boost::multiprecision::et_off>;

struct PrecisionPolicy {
    unsigned decimal_digits = 64;   // significant decimal digits for amplitude arithmetic
    unsigned escalation_factor = 2; // digit multiplier for convergence re-checks

    void validate() const {
        if (decimal_digits < 16)
            throw std::invalid_argument("precision: decimal_digits must be >= 16");
        if (escalation_factor < 2)
            throw std::invalid_argument("precision: escalation_factor must be >= 2");
    }
};

// Sets the thread's default MPFR precision; restores the previous value on exit.
class ScopedPrecision {
  public:
    explicit ScopedPrecision(unsigned digits10)
        : previous_(Real::default_precision()) {
        Real::default_precision(digits10);
    }
    ~ScopedPrecision() { Real::default_precision(previous_); }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

  private:
    unsigned previous_;
};

Real pi_value();

// Complex value on the configured-precision reals. MPC is not available in
// this toolchain, so the handful of operations the recursions need are
// implemented here directly (principal branches throughout).
struct Complex {
    Real re{0};
    Real im{0};

    Complex() = default;
    Complex(Real r) : re(std::move(r)) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r) : re(r) {}
    Complex(double r, double i) : re(r), im(i) {}

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o);
    Complex& operator*=(const Real& s) {
        re *= s;
        im *= s;
        return *this;
    }
    Complex& operator/=(const Real& s) {
        re /= s;
        im /= s;
        return *this;
    }
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
inline bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }
Real abs(const Complex& z);       // hypot(re, im)
Real norm(const Complex& z);      // re^2 + im^2
Complex exp(const Complex& z);    // exp(re) * (cos im, sin im)
Complex sqrt(const Complex& z);   // principal branch
Complex log(const Complex& z);    // principal branch
Complex polar(const Real& mag, const Real& phase);
Complex inverse(const Complex& z);

std::string to_string(const Real& x, unsigned digits);
std::string to_string_full(const Real& x); // round-trips the working precision

// Sum with error bounded by one unit in the last configured digit.
// Terms are reordered internally into a canonical magnitude order, so the
// result is bit-for-bit independent of the caller's ordering.
Complex compensated_complex_sum(std::span<const Complex> terms);

// Streaming Neumaier accumulator for reductions too large to materialize.
// Feeding the same sequence in the same order always reproduces the same
// bits; parallel callers must combine partials in canonical chunk order.
class CompensatedAccumulator {
  public:
    void add(const Complex& term);
    void merge(const CompensatedAccumulator& other);
    Complex value() const;

  private:
    static void add_one(Real& sum, Real& comp, const Real& v);
    Real sum_re_{0}, sum_im_{0};
    Real comp_re_{0}, comp_im_{0};
};

// Normalized IFFT, output[p] = (1/sqrt(M)) sum_k samples[k] exp(+i 2 pi k p / M).
// Radix-2 when M is a power of two, direct summation otherwise; the M values
// that occur in period scans are a few hundred, so O(M^2) is acceptable.
std::vector<Complex> ifft_normalized(std::span<const Complex> samples);

// Conjugate-convention forward transform (round-trip partner of the above).
std::vector<Complex> fft_forward_normalized(std::span<const Complex> samples);

// Runs fn(begin, end) over [0, count) in fixed-size chunks on `threads`
// workers. Chunk boundaries do not depend on the thread count, so any
// chunk-indexed reduction built on top is schedule-independent.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t chunk_index, std::size_t begin, std::size_t end)>& fn,
                     unsigned threads = 0);

unsigned hardware_threads();

} // namespace qpc
