#include "boxtimes/scalar.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

namespace boxtimes {

using boost::multiprecision::cpp_int;

double to_double(const Rational& q) { return q.template convert_to<double>(); }

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

Rational parse_rational(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse rational '" + s + "'");
    }
}

Rational rational_floor(const Rational& q) {
    cpp_int n = numerator(q), d = denominator(q);
    cpp_int f = n / d;
    if (n < 0 && f * d != n) --f;
    return Rational(f);
}

std::optional<Rational> rationalize(double x, std::int64_t max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    double rem = x;
    std::int64_t p0 = 1, q0 = 0;
    std::int64_t p1 = std::int64_t(std::floor(rem)), q1 = 1;
    rem -= std::floor(rem);
    for (int it = 0; it < 64; ++it) {
        double approx = double(p1) / double(q1);
        if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x)))
            return Rational(p1, q1);
        if (rem < 1e-18) break;
        rem = 1.0 / rem;
        double a = std::floor(rem);
        if (a > double(max_den)) break;
        rem -= a;
        std::int64_t ai = std::int64_t(a);
        if (q1 > (std::numeric_limits<std::int64_t>::max() - q0) / std::max<std::int64_t>(ai, 1))
            break;
        std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if (q1 <= max_den && std::abs(double(p1) / double(q1) - x) <= tol * std::max(1.0, std::abs(x)))
        return Rational(p1, q1);
    return std::nullopt;
}

GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    if (b.is_zero()) throw MathError("GaussRat: division by zero");
    Rational n = b.re * b.re + b.im * b.im;
    GaussRat c = a * b.conj();
    return {c.re / n, c.im / n};
}

std::string GaussRat::str() const {
    if (im == 0) return to_string(re);
    std::ostringstream os;
    os << to_string(re) << (im < 0 ? "-" : "+") << to_string(im < 0 ? Rational(-im) : im)
       << "i";
    return os.str();
}

Scalar Scalar::conj() const {
    Scalar r = *this;
    if (exact_)
        r.q_ = q_.conj();
    r.f_ = std::conj(f_);
    return r;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    if (exact_) r.q_ = -q_;
    r.f_ = -f_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ = q_ + o.q_;
        f_ = q_.approx();
    } else {
        exact_ = false;
        f_ += o.f_;
        q_ = GaussRat();
    }
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ = q_ - o.q_;
        f_ = q_.approx();
    } else {
        exact_ = false;
        f_ -= o.f_;
        q_ = GaussRat();
    }
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ = q_ * o.q_;
        f_ = q_.approx();
    } else {
        exact_ = false;
        f_ *= o.f_;
        q_ = GaussRat();
    }
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ = q_ / o.q_;
        f_ = q_.approx();
    } else {
        if (o.f_ == Complex(0.0, 0.0)) throw MathError("Scalar: division by zero");
        exact_ = false;
        f_ /= o.f_;
        q_ = GaussRat();
    }
    return *this;
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.q_ == b.q_;
    return a.f_ == b.f_;
}

std::string Scalar::str() const {
    if (exact_) return q_.str();
    std::ostringstream os;
    os.precision(17);
    os << f_.real();
    if (f_.imag() != 0) os << (f_.imag() < 0 ? "-" : "+") << std::abs(f_.imag()) << "i";
    return os.str();
}

Exponent operator+(const Exponent& a, const Exponent& b) {
    Exponent r;
    r.approx = a.approx + b.approx;
    r.exact = a.exact && b.exact;
    if (r.exact) {
        r.value = a.value + b.value;
        r.approx = r.value.approx();
    }
    return r;
}

Exponent operator-(const Exponent& a, const Exponent& b) {
    Exponent r;
    r.approx = a.approx - b.approx;
    r.exact = a.exact && b.exact;
    if (r.exact) {
        r.value = a.value - b.value;
        r.approx = r.value.approx();
    }
    return r;
}

std::optional<long> Exponent::integer_difference(const Exponent& other, double tol) const {
    if (exact && other.exact) {
        GaussRat d = value - other.value;
        if (d.im != 0) return std::nullopt;
        if (denominator(d.re) != 1) return std::nullopt;
        cpp_int n = numerator(d.re);
        if (n > std::numeric_limits<long>::max() || n < std::numeric_limits<long>::min())
            return std::nullopt;
        return n.template convert_to<long>();
    }
    Complex d = approx - other.approx;
    double n = std::round(d.real());
    if (std::abs(d.imag()) <= tol && std::abs(d.real() - n) <= tol &&
        std::abs(n) < 9.0e15)
        return long(n);
    return std::nullopt;
}

bool Exponent::is_integer(double tol) const {
    return integer_difference(Exponent(0L), tol).has_value();
}

std::string Exponent::str() const {
    if (exact) return value.str();
    std::ostringstream os;
    os.precision(17);
    os << approx.real();
    if (approx.imag() != 0) os << (approx.imag() < 0 ? "-" : "+") << std::abs(approx.imag()) << "i";
    return os.str();
}

Scalar binomial(const Scalar& s, long j) {
    if (j < 0) return Scalar(0L);
    Scalar num(1L);
    for (long i = 0; i < j; ++i) num *= s - Scalar(i);
    return num / Scalar(factorial_rat(j));
}

Rational binomial_rat(const Rational& s, long j) {
    if (j < 0) return Rational(0);
    Rational num(1);
    for (long i = 0; i < j; ++i) num *= s - i;
    return num / factorial_rat(j);
}

Rational factorial_rat(long n) {
    cpp_int f = 1;
    for (long i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

bool on_branch_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

Complex pow_principal(Complex z, Complex s) {
    if (on_branch_cut(z))
        throw RegionError("principal power evaluated on the branch cut R^{<=0}");
    if (s == Complex(0.0, 0.0)) return {1.0, 0.0};
    return std::exp(s * std::log(z));
}

} // namespace boxtimes
