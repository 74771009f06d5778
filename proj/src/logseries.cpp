#include "boxtimes/logseries.hpp"

#include <algorithm>
#include <cmath>

namespace boxtimes {

int ExponentSet::find(const Exponent& e, long& offset) const {
    for (int i = 0; i < int(bases_.size()); ++i) {
        if (auto d = e.integer_difference(bases_[i], tol_)) {
            offset = *d;
            return i;
        }
    }
    return -1;
}

int ExponentSet::insert(const Exponent& e, long& offset) {
    int i = find(e, offset);
    if (i >= 0) return i;
    bases_.push_back(e);
    offset = 0;
    return int(bases_.size()) - 1;
}

void ExponentSet::rebase_down(int i, long down) {
    bases_[i] = bases_[i] - down;
}

LogPowerSeries LogPowerSeries::monomial(std::string var, const Scalar& c, const Exponent& e,
                                        int log_pow, int order, int log_cap) {
    LogPowerSeries s(std::move(var), order, log_cap);
    s.add_term(e, log_pow, c);
    return s;
}

void LogPowerSeries::add_term(const Exponent& e, int log_pow, const Scalar& c) {
    if (c.is_zero()) return;
    if (log_pow > log_cap_) {
        tail_dropped_ = true;
        return;
    }
    long off = 0;
    int idx = bases_.insert(e, off);
    if (off < 0) {
        // new exponent sits below the ladder representative: rebase the ladder
        long down = -off;
        bases_.rebase_down(idx, down);
        std::map<Key, Scalar> moved;
        for (auto& [key, v] : c_) {
            auto [bi, m, t] = key;
            if (bi == idx) {
                if (m + down <= order_)
                    moved[{bi, m + down, t}] = v;
                else
                    tail_dropped_ = true;
            } else {
                moved[key] = v;
            }
        }
        c_ = std::move(moved);
        off = 0;
    }
    if (off > order_) {
        tail_dropped_ = true;
        return;
    }
    Key key{idx, off, log_pow};
    auto it = c_.find(key);
    if (it == c_.end()) {
        c_.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) c_.erase(it);
    }
}

Scalar LogPowerSeries::coeff(const Exponent& e, int log_pow) const {
    long off = 0;
    int idx = bases_.find(e, off);
    if (idx < 0 || off < 0) return Scalar(0L);
    auto it = c_.find({idx, off, log_pow});
    return it == c_.end() ? Scalar(0L) : it->second;
}

void LogPowerSeries::check_var(const LogPowerSeries& o) const {
    if (var_ != o.var_)
        throw MathError("LogPowerSeries: variable mismatch ('" + var_ + "' vs '" + o.var_ +
                        "')");
}

LogPowerSeries& LogPowerSeries::operator+=(const LogPowerSeries& o) {
    check_var(o);
    order_ = std::min(order_, o.order_);
    log_cap_ = std::max(log_cap_, o.log_cap_);
    tail_dropped_ = tail_dropped_ || o.tail_dropped_;
    std::map<Key, Scalar> kept;
    for (auto& [key, v] : c_) {
        if (std::get<1>(key) <= order_)
            kept[key] = v;
        else
            tail_dropped_ = true;
    }
    c_ = std::move(kept);
    for (const auto& [key, v] : o.c_) {
        auto [bi, m, t] = key;
        add_term(o.bases_.base(bi) + m, t, v);
    }
    return *this;
}

LogPowerSeries operator-(const LogPowerSeries& a, const LogPowerSeries& b) {
    return a + b * Scalar(-1L);
}

LogPowerSeries LogPowerSeries::operator*(const Scalar& s) const {
    LogPowerSeries r(var_, order_, log_cap_, bases_.tol());
    r.tail_dropped_ = tail_dropped_;
    if (s.is_zero()) return r;
    for (const auto& [key, v] : c_) {
        auto [bi, m, t] = key;
        r.add_term(bases_.base(bi) + m, t, v * s);
    }
    return r;
}

LogPowerSeries operator*(const LogPowerSeries& a, const LogPowerSeries& b) {
    a.check_var(b);
    LogPowerSeries r(a.var_, std::min(a.order_, b.order_), std::max(a.log_cap_, b.log_cap_),
                     a.bases_.tol());
    r.tail_dropped_ = a.tail_dropped_ || b.tail_dropped_;
    for (const auto& [ka, va] : a.c_) {
        auto [ai, am, at] = ka;
        Exponent ea = a.bases_.base(ai) + am;
        for (const auto& [kb, vb] : b.c_) {
            auto [bi, bm, bt] = kb;
            r.add_term(ea + (b.bases_.base(bi) + bm), at + bt, va * vb);
        }
    }
    return r;
}

LogPowerSeries LogPowerSeries::derive() const {
    LogPowerSeries r(var_, order_, log_cap_, bases_.tol());
    r.tail_dropped_ = tail_dropped_;
    for (const auto& [key, v] : c_) {
        auto [bi, m, t] = key;
        Exponent e = bases_.base(bi) + m;
        r.add_term(e - 1L, t, v * e.to_scalar());
        if (t > 0) r.add_term(e - 1L, t - 1, v * Scalar(long(t)));
    }
    return r;
}

LogPowerSeries LogPowerSeries::shift(const Exponent& e) const {
    LogPowerSeries r(var_, order_, log_cap_, bases_.tol());
    r.tail_dropped_ = tail_dropped_;
    for (const auto& [key, v] : c_) {
        auto [bi, m, t] = key;
        r.add_term(bases_.base(bi) + m + e, t, v);
    }
    return r;
}

EvalResult LogPowerSeries::eval(Complex z) const {
    if (z == Complex(0.0, 0.0)) throw RegionError("series evaluation at z = 0");
    if (on_branch_cut(z)) throw RegionError("series evaluation on the branch cut");
    Complex lz = std::log(z);
    EvalResult res{Complex(0.0, 0.0), 0.0};
    long last_band = -1;
    for (const auto& [key, v] : c_) last_band = std::max(last_band, std::get<1>(key));
    for (const auto& [key, v] : c_) {
        auto [bi, m, t] = key;
        Complex e = bases_.base(bi).approx + Complex(double(m), 0.0);
        Complex term = v.approx() * std::exp(e * lz);
        for (int i = 0; i < t; ++i) term *= lz;
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
            throw MathError("series evaluation overflow");
        res.value += term;
        if (m == last_band) res.tail_bound += std::abs(term);
    }
    return res;
}

double LogPowerSeries::band_norm(long m) const {
    double n = 0;
    for (const auto& [key, v] : c_)
        if (std::get<1>(key) == m) n = std::max(n, v.abs());
    return n;
}

double LogPowerSeries::max_abs() const {
    double n = 0;
    for (const auto& [key, v] : c_) n = std::max(n, v.abs());
    return n;
}

// ---------------------------------------------------------------------------

MonomialSeries2 MonomialSeries2::constant(const Scalar& c, int order) {
    MonomialSeries2 s(Iota::none, order);
    s.add_term({}, c);
    return s;
}

MonomialSeries2 MonomialSeries2::monomial(const Scalar& c, GaussRat a, GaussRat b, GaussRat e,
                                          int h, int k, int j, Iota flavor, int order) {
    MonomialSeries2 s(flavor, order);
    s.add_term({std::move(a), std::move(b), std::move(e), h, k, j}, c);
    return s;
}

long MonomialSeries2::expansion_degree(const Key& k) const {
    // Degree in the expansion variable of the flavor; non-integer or negative
    // exponents never count against the truncation order.
    const GaussRat* g = nullptr;
    if (flavor_ == Iota::xy)
        g = &k.b;
    else if (flavor_ == Iota::y_xmy)
        g = &k.e;
    else
        return 0;
    if (g->im != 0 || denominator(g->re) != 1) return 0;
    auto n = numerator(g->re);
    if (n < 0) return 0;
    if (n > 1'000'000) return 1'000'000;
    return n.template convert_to<long>();
}

void MonomialSeries2::add_term(const Key& k, const Scalar& c) {
    if (c.is_zero()) return;
    if (expansion_degree(k) > order_) {
        tail_dropped_ = true;
        return;
    }
    auto it = t_.find(k);
    if (it == t_.end()) {
        t_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

MonomialSeries2& MonomialSeries2::operator+=(const MonomialSeries2& o) {
    if (flavor_ == Iota::none) flavor_ = o.flavor_;
    if (o.flavor_ != Iota::none && o.flavor_ != flavor_)
        throw MathError("MonomialSeries2: mixing expansion flavors");
    order_ = std::min(order_, o.order_);
    tail_dropped_ = tail_dropped_ || o.tail_dropped_;
    for (const auto& [k, v] : o.t_) add_term(k, v);
    return *this;
}

MonomialSeries2 operator*(const MonomialSeries2& a, const MonomialSeries2& b) {
    Iota flavor = a.flavor_ == Iota::none ? b.flavor_ : a.flavor_;
    if (b.flavor_ != Iota::none && a.flavor_ != Iota::none && a.flavor_ != b.flavor_)
        throw MathError("MonomialSeries2: mixing expansion flavors");
    MonomialSeries2 r(flavor, std::min(a.order_, b.order_));
    r.tail_dropped_ = a.tail_dropped_ || b.tail_dropped_;
    for (const auto& [ka, va] : a.t_)
        for (const auto& [kb, vb] : b.t_) {
            MonomialSeries2::Key k{ka.a + kb.a, ka.b + kb.b, ka.e + kb.e,
                                   ka.h + kb.h, ka.k + kb.k, ka.j + kb.j};
            r.add_term(k, va * vb);
        }
    return r;
}

MonomialSeries2 MonomialSeries2::operator*(const Scalar& s) const {
    MonomialSeries2 r(flavor_, order_);
    r.tail_dropped_ = tail_dropped_;
    if (s.is_zero()) return r;
    for (const auto& [k, v] : t_) r.add_term(k, v * s);
    return r;
}

Complex MonomialSeries2::eval(Complex x, Complex y) const {
    Complex xy = x - y;
    Complex res(0.0, 0.0);
    for (const auto& [k, v] : t_) {
        Complex term = v.approx();
        if (!(k.a == GaussRat())) term *= pow_principal(x, k.a.approx());
        if (!(k.b == GaussRat())) term *= pow_principal(y, k.b.approx());
        if (!(k.e == GaussRat())) term *= pow_principal(xy, k.e.approx());
        for (int i = 0; i < k.h; ++i) term *= std::log(x);
        for (int i = 0; i < k.k; ++i) term *= std::log(y);
        for (int i = 0; i < k.j; ++i) term *= std::log(xy);
        res += term;
    }
    return res;
}

bool MonomialSeries2::flavor_valid_at(Complex x, Complex y) const {
    switch (flavor_) {
    case Iota::xy: return std::abs(y) < std::abs(x);
    case Iota::y_xmy: return std::abs(x - y) < std::abs(y);
    default: return true;
    }
}

MonomialSeries2 iota_xy(const Scalar& c, const GaussRat& s, int m) {
    MonomialSeries2 r(Iota::xy, m);
    Scalar sc(s);
    for (int j = 0; j <= m; ++j) {
        Scalar coef = c * binomial(sc, j);
        if (j % 2) coef = -coef;
        r.add_term({s - GaussRat(long(j)), GaussRat(long(j)), GaussRat(), 0, 0, 0}, coef);
    }
    return r;
}

MonomialSeries2 iota_y_xmy(const Scalar& c, const GaussRat& s, int m) {
    MonomialSeries2 r(Iota::y_xmy, m);
    Scalar sc(s);
    for (int j = 0; j <= m; ++j) {
        Scalar coef = c * binomial(sc, j);
        r.add_term({GaussRat(), s - GaussRat(long(j)), GaussRat(long(j)), 0, 0, 0}, coef);
    }
    return r;
}

MonomialSeries2 log_x_substitute(int m) {
    if (m < 1) throw MathError("log_x_substitute: order must be >= 1");
    MonomialSeries2 r(Iota::y_xmy, m);
    for (int j = 0; j + 1 <= m; ++j) {
        Scalar coef = Scalar(Rational(1, j + 1));
        if (j % 2) coef = -coef;
        r.add_term({GaussRat(), GaussRat(-long(j) - 1), GaussRat(long(j) + 1), 0, 0, 0}, coef);
    }
    r.add_term({GaussRat(), GaussRat(), GaussRat(), 0, 1, 0}, Scalar(1L));
    return r;
}

} // namespace boxtimes
