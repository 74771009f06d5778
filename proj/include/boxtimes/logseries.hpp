#pragma once

#include "boxtimes/scalar.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace boxtimes {

/// Ladder bases of a series: finitely many complex exponents, no two differing
/// by an integer. Every exponent that occurs is some base plus a nonnegative
/// offset. Merging is enforced on insertion (exactly in exact mode, within
/// `tol` otherwise).
class ExponentSet {
public:
    explicit ExponentSet(double tol = 1e-9) : tol_(tol) {}

    int size() const { return int(bases_.size()); }
    const Exponent& base(int i) const { return bases_[i]; }
    const std::vector<Exponent>& bases() const { return bases_; }
    double tol() const { return tol_; }

    /// Index of the ladder containing e. `offset` receives e - base(index),
    /// an integer (possibly negative if e sits below the current
    /// representative; LogPowerSeries rebases in that case).
    int find(const Exponent& e, long& offset) const;
    int insert(const Exponent& e, long& offset);
    /// Lower the representative of ladder i by `down` > 0 steps.
    void rebase_down(int i, long down);

private:
    std::vector<Exponent> bases_;
    double tol_;
};

struct EvalResult {
    Complex value;
    double tail_bound = 0.0; // |last retained band|, a truncation heuristic
};

/// Truncated series  sum  c * z^{d_i + m} * log^t(z)  in one variable, with
/// offsets m <= order and log powers t <= log_cap. Canonical form: zero
/// coefficients are never stored; equality is map equality.
class LogPowerSeries {
public:
    LogPowerSeries() = default;
    LogPowerSeries(std::string var, int order, int log_cap, double tol = 1e-9)
        : var_(std::move(var)), bases_(tol), order_(order), log_cap_(log_cap) {}

    static LogPowerSeries monomial(std::string var, const Scalar& c, const Exponent& e,
                                   int log_pow, int order, int log_cap);

    const std::string& var() const { return var_; }
    int order() const { return order_; }
    int log_cap() const { return log_cap_; }
    bool tail_dropped() const { return tail_dropped_; }
    bool empty() const { return c_.empty(); }
    const ExponentSet& exponents() const { return bases_; }

    using Key = std::tuple<int, long, int>; // (base index, offset, log power)
    const std::map<Key, Scalar>& terms() const { return c_; }

    void add_term(const Exponent& e, int log_pow, const Scalar& c);
    Scalar coeff(const Exponent& e, int log_pow) const;

    LogPowerSeries& operator+=(const LogPowerSeries& o);
    friend LogPowerSeries operator+(LogPowerSeries a, const LogPowerSeries& b) {
        return a += b;
    }
    friend LogPowerSeries operator-(const LogPowerSeries& a, const LogPowerSeries& b);
    friend LogPowerSeries operator*(const LogPowerSeries& a, const LogPowerSeries& b);
    LogPowerSeries operator*(const Scalar& s) const;

    /// d/dz; exact on exponents (no truncation loss).
    LogPowerSeries derive() const;
    /// multiply by z^e (e integer shifts stay on the same ladder)
    LogPowerSeries shift(const Exponent& e) const;
    /// z * d/dz
    LogPowerSeries theta() const { return derive().shift(Exponent(1L)); }

    EvalResult eval(Complex z) const;

    /// largest |coefficient| with the given offset (used for residuals/bands)
    double band_norm(long m) const;
    double max_abs() const;

private:
    void check_var(const LogPowerSeries& o) const;

    std::string var_ = "z";
    ExponentSet bases_;
    std::map<Key, Scalar> c_;
    int order_ = 0;
    int log_cap_ = 0;
    bool tail_dropped_ = false;
};

/// Expansion flavor of a two-variable monomial series: which ordering any
/// infinite binomial expansion used.
enum class Iota { none, xy, y_xmy };

/// Finite sum of  c * x^a * y^b * (x-y)^e * log^h(x) log^k(y) log^j(x-y).
/// Exponents are exact Gaussian rationals so terms can be keyed canonically.
class MonomialSeries2 {
public:
    struct Key {
        GaussRat a, b, e;
        int h = 0, k = 0, j = 0;
        friend bool operator<(const Key& x, const Key& y) {
            if (x.a != y.a) return x.a < y.a;
            if (x.b != y.b) return x.b < y.b;
            if (x.e != y.e) return x.e < y.e;
            return std::tie(x.h, x.k, x.j) < std::tie(y.h, y.k, y.j);
        }
    };

    MonomialSeries2() = default;
    explicit MonomialSeries2(Iota flavor, int order = 64) : flavor_(flavor), order_(order) {}
    static MonomialSeries2 constant(const Scalar& c, int order = 64);
    static MonomialSeries2 monomial(const Scalar& c, GaussRat a, GaussRat b, GaussRat e,
                                    int h = 0, int k = 0, int j = 0, Iota flavor = Iota::none,
                                    int order = 64);

    Iota flavor() const { return flavor_; }
    int order() const { return order_; }
    bool tail_dropped() const { return tail_dropped_; }
    bool empty() const { return t_.empty(); }
    const std::map<Key, Scalar>& terms() const { return t_; }

    void add_term(const Key& k, const Scalar& c);

    MonomialSeries2& operator+=(const MonomialSeries2& o);
    friend MonomialSeries2 operator+(MonomialSeries2 a, const MonomialSeries2& b) {
        return a += b;
    }
    friend MonomialSeries2 operator*(const MonomialSeries2& a, const MonomialSeries2& b);
    MonomialSeries2 operator*(const Scalar& s) const;

    /// Value at a numeric point (principal branches).
    Complex eval(Complex x, Complex y) const;

    /// Convergence-region validity of the flavor at (x, y).
    bool flavor_valid_at(Complex x, Complex y) const;

private:
    long expansion_degree(const Key& k) const;

    Iota flavor_ = Iota::none;
    std::map<Key, Scalar> t_;
    int order_ = 64;
    bool tail_dropped_ = false;
};

/// iota_{x,y}{(x-y)^s} = sum_{j<=M} C(s,j) x^{s-j} (-y)^j; exact for s in N, M >= s.
MonomialSeries2 iota_xy(const Scalar& s_coeff, const GaussRat& s, int m);
/// iota_{y,x-y}{x^s} = sum_{j<=M} C(s,j) y^{s-j} (x-y)^j.
MonomialSeries2 iota_y_xmy(const Scalar& s_coeff, const GaussRat& s, int m);
inline MonomialSeries2 iota_xy(const GaussRat& s, int m) { return iota_xy(Scalar(1L), s, m); }
inline MonomialSeries2 iota_y_xmy(const GaussRat& s, int m) {
    return iota_y_xmy(Scalar(1L), s, m);
}

/// Truncation of p(x,y) = sum_{j>=0} (-1)^j/(j+1) ((x-y)/y)^{j+1} + log(y),
/// the series that replaces log(x) when assembling principal-branch expansions
/// around x = y.
MonomialSeries2 log_x_substitute(int m);

} // namespace boxtimes
