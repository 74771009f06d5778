#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace boxtimes {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_double(const Rational& q);
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);
Rational rational_floor(const Rational& q);

/// Nearest rational to x with denominator <= max_den (continued fractions),
/// accepted only if it reproduces x within tol.
std::optional<Rational> rationalize(double x, std::int64_t max_den = 1'000'000'000,
                                    double tol = 1e-9);

/// Element of Q(i).
struct GaussRat {
    Rational re, im;

    GaussRat() = default;
    GaussRat(Rational r) : re(std::move(r)) {}
    GaussRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussRat(long n) : re(n) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    Complex approx() const { return {to_double(re), to_double(im)}; }

    GaussRat operator-() const { return {-re, -im}; }
    GaussRat conj() const { return {re, -im}; }
    friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussRat operator/(const GaussRat& a, const GaussRat& b);
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
    friend bool operator<(const GaussRat& a, const GaussRat& b) {
        return a.re != b.re ? a.re < b.re : a.im < b.im;
    }
    std::string str() const;
};

/// Complex scalar that is either an exact Gaussian rational or a double-precision
/// complex. Arithmetic stays exact while both operands are exact and silently
/// degrades to floating point otherwise; a cached double approximation is kept
/// either way so magnitude tests and pivoting never touch the exact branch.
class Scalar {
public:
    Scalar() : exact_(true), f_(0.0, 0.0) {}
    Scalar(long n) : exact_(true), q_(n), f_(double(n), 0.0) {}
    Scalar(int n) : Scalar(long(n)) {}
    Scalar(double x) : exact_(false), f_(x, 0.0) {}
    Scalar(Complex z) : exact_(false), f_(z) {}
    Scalar(Rational q) : exact_(true), q_(std::move(q)) { f_ = q_.approx(); }
    Scalar(GaussRat q) : exact_(true), q_(std::move(q)) { f_ = q_.approx(); }

    bool exact() const { return exact_; }
    const GaussRat& rat() const {
        if (!exact_) throw MathError("Scalar: exact value requested from float scalar");
        return q_;
    }
    Complex approx() const { return f_; }
    double abs() const { return std::abs(f_); }
    bool is_zero() const { return exact_ ? q_.is_zero() : f_ == Complex(0.0, 0.0); }

    Scalar conj() const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    // Equality is exact on the stored representation (used for canonical forms).
    friend bool operator==(const Scalar& a, const Scalar& b);
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    std::string str() const;

private:
    bool exact_;
    GaussRat q_;
    Complex f_;
};

/// Exponent of a series variable: always carries a double approximation, and an
/// exact Gaussian-rational value when one is known. Exactness propagates through
/// sums, which is what keeps ladder membership d+m decidable in exact mode.
struct Exponent {
    Complex approx{0.0, 0.0};
    bool exact = true;
    GaussRat value;

    Exponent() = default;
    Exponent(long n) : approx(double(n), 0.0), exact(true), value(n) {}
    Exponent(int n) : Exponent(long(n)) {}
    Exponent(Rational q) : exact(true), value(std::move(q)) { approx = value.approx(); }
    Exponent(GaussRat q) : exact(true), value(std::move(q)) { approx = value.approx(); }
    explicit Exponent(Complex z) : approx(z), exact(false) {}
    explicit Exponent(double x) : approx(x, 0.0), exact(false) {}

    static Exponent from_scalar(const Scalar& s) {
        if (s.exact()) return Exponent(s.rat());
        return Exponent(s.approx());
    }
    Scalar to_scalar() const { return exact ? Scalar(value) : Scalar(approx); }

    friend Exponent operator+(const Exponent& a, const Exponent& b);
    friend Exponent operator-(const Exponent& a, const Exponent& b);
    Exponent operator+(long n) const { return *this + Exponent(n); }
    Exponent operator-(long n) const { return *this - Exponent(n); }

    /// If *this - other is an integer (exactly, or within tol in float mode),
    /// return it.
    std::optional<long> integer_difference(const Exponent& other, double tol) const;
    bool is_integer(double tol) const;
    std::string str() const;
};

/// Generalized binomial coefficient C(s, j) = s(s-1)...(s-j+1)/j!.
Scalar binomial(const Scalar& s, long j);
Rational binomial_rat(const Rational& s, long j);
Rational factorial_rat(long n);

/// Principal power z^s = exp(s Log z), Log the principal branch. Throws
/// RegionError when z lies on the cut R^{<=0}.
Complex pow_principal(Complex z, Complex s);
bool on_branch_cut(Complex z);

} // namespace boxtimes
