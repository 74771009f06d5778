#include "boxtimes/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace boxtimes {

namespace {
constexpr int kMaxGrade = 32;

std::string partition_key(const Partition& p) {
    std::ostringstream os;
    for (int x : p.parts) os << x << ',';
    return os.str();
}
} // namespace

int Partition::sum() const {
    int s = 0;
    for (int p : parts) s += p;
    return s;
}

int Partition::multiplicity(int part) const {
    return int(std::count(parts.begin(), parts.end(), part));
}

Partition Partition::with_part(int p) const {
    Partition q = *this;
    auto it = std::lower_bound(q.parts.begin(), q.parts.end(), p, std::greater<int>());
    q.parts.insert(it, p);
    return q;
}

Partition Partition::without_part(int p) const {
    Partition q = *this;
    auto it = std::find(q.parts.begin(), q.parts.end(), p);
    if (it == q.parts.end()) throw MathError("Partition: removing absent part");
    q.parts.erase(it);
    return q;
}

PartitionTable::PartitionTable() {
    table_.resize(kMaxGrade + 1);
    table_[0].push_back(Partition{});
    for (int n = 1; n <= kMaxGrade; ++n) {
        // parts descending; enumerate by largest part
        std::vector<Partition> out;
        std::vector<int> stack;
        auto rec = [&](auto&& self, int rem, int maxpart) -> void {
            if (rem == 0) {
                Partition p;
                p.parts = stack;
                out.push_back(std::move(p));
                return;
            }
            for (int p = std::min(rem, maxpart); p >= 1; --p) {
                stack.push_back(p);
                self(self, rem - p, p);
                stack.pop_back();
            }
        };
        rec(rec, n, n);
        table_[n] = std::move(out);
    }
    for (int n = 0; n <= kMaxGrade; ++n)
        for (int i = 0; i < int(table_[n].size()); ++i)
            index_[partition_key(table_[n][i])] = i;
}

const PartitionTable& PartitionTable::instance() {
    static PartitionTable t;
    return t;
}

int PartitionTable::count(int n) const {
    if (n < 0) return 0;
    if (n > kMaxGrade) throw MathError("PartitionTable: grade beyond table");
    return int(table_[n].size());
}

const Partition& PartitionTable::at(int n, int idx) const { return table_[n][idx]; }

int PartitionTable::index_of(const Partition& p) const {
    auto it = index_.find(partition_key(p));
    if (it == index_.end()) throw MathError("PartitionTable: partition beyond table");
    return it->second;
}

// ---------------------------------------------------------------------------

GradeVec GradedModule::mode_action(const VoaElem& alpha, long j, const GradeVec& v) const {
    GradeVec out;
    out.grade = v.grade + alpha.weight() - int(j) - 1;
    for (auto& [i, c] : v.c) {
        GradeVec w = mode_action(alpha, j, v.grade, i);
        out.grade = w.grade;
        for (auto& [k, s] : w.c) out.add(k, s * c);
    }
    return out;
}

GradeVec GradedModule::dual_mode_action(const VoaElem& alpha, long j,
                                        const GradeVec& v) const {
    GradeVec out;
    out.grade = v.grade - alpha.weight() + int(j) + 1;
    for (auto& [i, c] : v.c) {
        GradeVec w = dual_mode_action(alpha, j, v.grade, i);
        out.grade = w.grade;
        for (auto& [k, s] : w.c) out.add(k, s * c);
    }
    return out;
}

FockModule::FockModule(Rational momentum, int cutoff)
    : mom_(std::move(momentum)), cutoff_(cutoff) {
    if (cutoff < 0 || cutoff > kMaxGrade)
        throw ConfigError("FockModule: grade cutoff out of range");
}

int FockModule::dim(int grade) const {
    if (grade < 0 || grade > cutoff_) return 0;
    return PartitionTable::instance().count(grade);
}

GradeVec FockModule::oscillator(long n, int grade, int idx) const {
    const auto& tab = PartitionTable::instance();
    const Partition& p = tab.at(grade, idx);
    GradeVec out;
    out.grade = grade - int(n);
    if (n == 0) {
        out.grade = grade;
        out.add(idx, Scalar(mom_));
        return out;
    }
    if (out.grade < 0 || out.grade > cutoff_) return out;
    if (n < 0) {
        out.add(tab.index_of(p.with_part(int(-n))), Scalar(1L));
    } else {
        int mult = p.multiplicity(int(n));
        if (mult > 0)
            out.add(tab.index_of(p.without_part(int(n))), Scalar(n) * Scalar(long(mult)));
    }
    return out;
}

GradeVec FockModule::oscillator(long n, const GradeVec& v) const {
    GradeVec out;
    out.grade = v.grade - int(n);
    for (auto& [i, c] : v.c) {
        GradeVec w = oscillator(n, v.grade, i);
        out.grade = w.grade;
        for (auto& [k, s] : w.c) out.add(k, s * c);
    }
    return out;
}

GradeVec FockModule::dual_oscillator(long n, int grade, int idx) const {
    // <(a_n)^T theta, e> = <theta, a_n e>: transpose by scanning the source grade
    const auto& tab = PartitionTable::instance();
    GradeVec out;
    out.grade = grade + int(n);
    if (out.grade < 0 || out.grade > cutoff_) return out;
    const Partition& mu = tab.at(grade, idx);
    if (n == 0) {
        out.grade = grade;
        out.add(idx, Scalar(mom_));
        return out;
    }
    if (n < 0) {
        // a_{-m} adds a part: theta_mu pulls back to mu minus that part
        int m = int(-n);
        if (mu.has_part(m)) out.add(tab.index_of(mu.without_part(m)), Scalar(1L));
    } else {
        // a_m removes a part with coefficient m*mult
        int m = int(n);
        Partition src = mu.with_part(m);
        out.add(tab.index_of(src), Scalar(n) * Scalar(long(src.multiplicity(m))));
    }
    return out;
}

GradeVec FockModule::virasoro(long m, int grade, int idx) const {
    GradeVec out;
    out.grade = grade - int(m);
    if (out.grade < 0 || out.grade > cutoff_) return out;
    GradeVec start;
    start.grade = grade;
    start.add(idx, Scalar(1L));
    if (m == 0) {
        // L(0) = a_0^2/2 + sum_{j>=1} a_{-j} a_j  (eigenvalue mom^2/2 + grade)
        out.add(idx, Scalar(mom_ * mom_ / 2) + Scalar(long(grade)));
        return out;
    }
    Scalar half = Scalar(Rational(1, 2));
    for (long j = -long(cutoff_) - std::abs(m) - 1; j <= long(cutoff_) + std::abs(m) + 1;
         ++j) {
        // :a_{m-j} a_j:, indices commute since m != 0
        long p = m - j;
        long lo = std::min(p, j), hi = std::max(p, j);
        GradeVec t = oscillator(hi, start);
        if (t.empty()) continue;
        t = oscillator(lo, t);
        for (auto& [k, s] : t.c) out.add(k, s * half);
    }
    return out;
}

GradeVec FockModule::virasoro(long m, const GradeVec& v) const {
    GradeVec out;
    out.grade = v.grade - int(m);
    for (auto& [i, c] : v.c) {
        GradeVec w = virasoro(m, v.grade, i);
        out.grade = w.grade;
        for (auto& [k, s] : w.c) out.add(k, s * c);
    }
    return out;
}

GradeVec FockModule::dual_virasoro(long m, int grade, int idx) const {
    GradeVec out;
    out.grade = grade + int(m);
    if (out.grade < 0 || out.grade > cutoff_) return out;
    for (int src = 0; src < dim(out.grade); ++src) {
        GradeVec w = virasoro(m, out.grade, src);
        auto it = w.c.find(idx);
        if (it != w.c.end()) out.add(src, it->second);
    }
    return out;
}

GradeVec FockModule::mode_action(const VoaElem& alpha, long j, int grade, int idx) const {
    GradeVec out;
    out.grade = grade + alpha.weight() - int(j) - 1;
    switch (alpha.kind) {
    case VoaElem::vacuum:
        if (j == -1) {
            out.add(idx, Scalar(1L));
        }
        return out;
    case VoaElem::oscillator: {
        // (a_{-k}1)_j = (-1)^{k-1} C(j, k-1) a_{j-k+1}
        Scalar c = Scalar(binomial_rat(Rational(j), alpha.k - 1));
        if (alpha.k % 2 == 0) c = -c;
        if (c.is_zero()) return out;
        GradeVec t = oscillator(j - alpha.k + 1, grade, idx);
        for (auto& [i, s] : t.c) out.add(i, s * c);
        return out;
    }
    case VoaElem::omega: return virasoro(j - 1, grade, idx);
    }
    return out;
}

GradeVec FockModule::dual_mode_action(const VoaElem& alpha, long j, int grade,
                                      int idx) const {
    GradeVec out;
    out.grade = grade - alpha.weight() + int(j) + 1;
    switch (alpha.kind) {
    case VoaElem::vacuum:
        if (j == -1) out.add(idx, Scalar(1L));
        return out;
    case VoaElem::oscillator: {
        Scalar c = Scalar(binomial_rat(Rational(j), alpha.k - 1));
        if (alpha.k % 2 == 0) c = -c;
        if (c.is_zero()) return out;
        GradeVec t = dual_oscillator(j - alpha.k + 1, grade, idx);
        for (auto& [i, s] : t.c) out.add(i, s * c);
        return out;
    }
    case VoaElem::omega: return dual_virasoro(j - 1, grade, idx);
    }
    return out;
}

bool FockModule::in_complement(int grade, int) const { return grade == 0; }

std::vector<C1Term> FockModule::c1_rewrite(int grade, int idx) const {
    if (grade == 0) return {};
    const auto& tab = PartitionTable::instance();
    const Partition& p = tab.at(grade, idx);
    int k = p.parts.front(); // eliminate the largest part
    C1Term t;
    t.gen = VoaElem::osc(k);
    Partition rest = p.without_part(k);
    t.lower.grade = grade - k;
    t.lower.add(tab.index_of(rest), Scalar(1L));
    t.coeff = Scalar(1L);
    return {t};
}

// ---------------------------------------------------------------------------

namespace {
uint64_t pack3(int a, int b, int c) {
    return (uint64_t(uint32_t(a)) << 42) | (uint64_t(uint32_t(b)) << 21) |
           uint64_t(uint32_t(c));
}
} // namespace

Rational Intertwiner::z_exponent(const Partition& mu, const Partition& nu,
                                 const Partition& la) const {
    return a_ * b_ + mu.sum() - nu.sum() - la.sum();
}

Scalar Intertwiner::elem(const Partition& mu, const Partition& nu,
                         const Partition& la) const {
    const auto& tab = PartitionTable::instance();
    uint64_t key = pack3(PartitionTable::pack(mu.sum(), tab.index_of(mu)),
                         PartitionTable::pack(nu.sum(), tab.index_of(nu)),
                         PartitionTable::pack(la.sum(), tab.index_of(la)));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    Scalar result(0L);
    if (!nu.empty()) {
        // Y(a_{-n} v', z) = sum_j C(n+j-1,j) [ z^j a_{-n-j} Y(v',z)
        //                   + (-1)^{n+1} z^{-n-j} Y(v',z) a_j ]
        int n = nu.parts.front();
        Partition nup = nu.without_part(n);
        for (int j = 0; n + j <= mu.sum(); ++j) {
            if (!mu.has_part(n + j)) continue;
            Scalar c = Scalar(binomial_rat(Rational(n + j - 1), j));
            result += c * elem(mu.without_part(n + j), nup, la);
        }
        Scalar sign = (n % 2 == 0) ? Scalar(-1L) : Scalar(1L);
        result += sign * Scalar(b_) * elem(mu, nup, la); // j = 0 zero mode
        for (int j = 1; j <= la.sum(); ++j) {
            int mult = la.multiplicity(j);
            if (mult == 0) continue;
            Scalar c = Scalar(binomial_rat(Rational(n + j - 1), j)) * Scalar(long(j)) *
                       Scalar(long(mult));
            result += sign * c * elem(mu, nup, la.without_part(j));
        }
    } else if (!la.empty()) {
        // Gamma_a(z) a_{-n} = a_{-n} Gamma_a(z) - a z^{-n} Gamma_a(z)
        int n = la.parts.front();
        Partition lap = la.without_part(n);
        if (mu.has_part(n)) result += elem(mu.without_part(n), nu, lap);
        result -= Scalar(a_) * elem(mu, nu, lap);
    } else {
        // <theta_mu, Gamma_a(z)|b>: grade-|mu| part of exp(a sum a_{-n} z^n / n)
        result = Scalar(1L);
        int i = 0;
        while (i < int(mu.parts.size())) {
            int part = mu.parts[i];
            int mult = mu.multiplicity(part);
            Scalar f = Scalar(a_) / Scalar(long(part));
            Scalar pw(1L);
            for (int t = 0; t < mult; ++t) pw *= f;
            result *= pw / Scalar(factorial_rat(mult));
            i += mult;
        }
    }
    memo_.emplace(key, result);
    return result;
}

const Intertwiner& IntertwinerCache::get(const Rational& a, const Rational& b) const {
    auto key = std::make_pair(a, b);
    auto it = cache_.find(key);
    if (it == cache_.end())
        it = cache_.emplace(key, std::make_unique<Intertwiner>(a, b)).first;
    return *it->second;
}

// ---------------------------------------------------------------------------

Complex closed_form_4pt(const Rational& a, const Rational& b, const Rational& c, Complex x,
                        Complex y) {
    if (!(std::abs(y) > 0 && std::abs(y) < std::abs(x)))
        throw RegionError("closed_form_4pt: requires 0 < |y| < |x|");
    return pow_principal(x, Complex(to_double(a * c), 0)) *
           pow_principal(y, Complex(to_double(b * c), 0)) *
           pow_principal(x - y, Complex(to_double(a * b), 0));
}

Complex closed_form_5pt(const Rational& a, const Rational& b, const Rational& c,
                        const Rational& d, Complex x, Complex y, Complex z) {
    return pow_principal(x, Complex(to_double(a * d), 0)) *
           pow_principal(y, Complex(to_double(b * d), 0)) *
           pow_principal(z, Complex(to_double(c * d), 0)) *
           pow_principal(x - y, Complex(to_double(a * b), 0)) *
           pow_principal(x - z, Complex(to_double(a * c), 0)) *
           pow_principal(y - z, Complex(to_double(b * c), 0));
}

bool operator<(const BasisQuadruple& a, const BasisQuadruple& b) {
    return std::tie(a.tg, a.ti, a.vg, a.vi, a.ug, a.ui, a.wg, a.wi) <
           std::tie(b.tg, b.ti, b.vg, b.vi, b.ug, b.ui, b.wg, b.wi);
}

FockTriple::FockTriple(Rational a_, Rational b_, Rational c_, int cutoff_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), cutoff(cutoff_) {
    mod_a = std::make_shared<FockModule>(a, cutoff);
    mod_b = std::make_shared<FockModule>(b, cutoff);
    mod_c = std::make_shared<FockModule>(c, cutoff);
    mod_bc = std::make_shared<FockModule>(b + c, cutoff);
    mod_target = std::make_shared<FockModule>(a + b + c, cutoff);
}

ModeSumResult FockTriple::direct_mode_sum(const BasisQuadruple& q, Complex x, Complex y,
                                          int band_cap) const {
    const auto& tab = PartitionTable::instance();
    const Intertwiner& y1 = intertwiners.get(a, b + c);
    const Intertwiner& y2 = intertwiners.get(b, c);
    const Partition& mu = tab.at(q.tg, q.ti);
    const Partition& nu = tab.at(q.vg, q.vi);
    const Partition& lu = tab.at(q.ug, q.ui);
    const Partition& lw = tab.at(q.wg, q.wi);

    double x_exp0 = to_double(a * (b + c)) + q.tg - q.vg;
    double y_exp0 = to_double(b * c) - q.ug - q.wg;
    ModeSumResult res;
    double last_band = 0;
    int gmax = std::min(band_cap, cutoff);
    for (int g = 0; g <= gmax; ++g) {
        Complex band(0.0, 0.0);
        for (int i = 0; i < tab.count(g); ++i) {
            const Partition& e = tab.at(g, i);
            Scalar c1 = y1.elem(mu, nu, e);
            if (c1.is_zero()) continue;
            Scalar c2 = y2.elem(e, lu, lw);
            if (c2.is_zero()) continue;
            band += c1.approx() * c2.approx();
        }
        if (band == Complex(0.0, 0.0)) continue;
        Complex term = band * pow_principal(x, Complex(x_exp0 - g, 0)) *
                       pow_principal(y, Complex(y_exp0 + g, 0));
        res.value += term;
        last_band = std::abs(term);
    }
    double r = std::abs(y / x);
    res.tail = (r < 1.0) ? last_band * r / (1.0 - r) : HUGE_VAL;
    return res;
}

ModeSumResult FockTriple::direct_mode_sum_ab_c(const BasisQuadruple& q, Complex x,
                                               Complex y, int band_cap) const {
    const auto& tab = PartitionTable::instance();
    const Intertwiner& outer = intertwiners.get(a + b, c);
    const Intertwiner& inner = intertwiners.get(a, b);
    const Partition& mu = tab.at(q.tg, q.ti);
    const Partition& nu = tab.at(q.vg, q.vi);
    const Partition& lu = tab.at(q.ug, q.ui);
    const Partition& lw = tab.at(q.wg, q.wi);

    Complex xy = x - y;
    double y_exp0 = to_double((a + b) * c) + q.tg - q.wg;
    double w_exp0 = to_double(a * b) - q.vg - q.ug;
    ModeSumResult res;
    double last_band = 0;
    int gmax = std::min(band_cap, cutoff);
    for (int g = 0; g <= gmax; ++g) {
        Complex band(0.0, 0.0);
        for (int i = 0; i < tab.count(g); ++i) {
            const Partition& e = tab.at(g, i);
            Scalar c1 = outer.elem(mu, e, lw);
            if (c1.is_zero()) continue;
            Scalar c2 = inner.elem(e, nu, lu);
            if (c2.is_zero()) continue;
            band += c1.approx() * c2.approx();
        }
        if (band == Complex(0.0, 0.0)) continue;
        Complex term = band * pow_principal(y, Complex(y_exp0 - g, 0)) *
                       pow_principal(xy, Complex(w_exp0 + g, 0));
        res.value += term;
        last_band = std::abs(term);
    }
    double r = std::abs(xy / y);
    res.tail = (r < 1.0) ? last_band * r / (1.0 - r) : HUGE_VAL;
    return res;
}

// ---------------------------------------------------------------------------

namespace {

// scalar coefficient identity checks for (I1)-(I3); everything is a matrix
// element between fixed homogeneous vectors, so each check is one Scalar.
struct AxiomContext {
    FockModule ma, mb, mc; // A = F_a source of v, B = F_b source of u, C = F_{a+b}
    Intertwiner y;
    AxiomContext(const Rational& a, const Rational& b, int cap)
        : ma(a, cap), mb(b, cap), mc(a + b, cap), y(a, b) {}

    Scalar pair(const GradeVec& th, const GradeVec& v, const GradeVec& u) const {
        const auto& tab = PartitionTable::instance();
        Scalar acc(0L);
        for (auto& [ti, tc] : th.c)
            for (auto& [vi, vc] : v.c)
                for (auto& [ui, uc] : u.c)
                    acc += tc * vc * uc *
                           y.elem(tab.at(th.grade, ti), tab.at(v.grade, vi),
                                  tab.at(u.grade, ui));
        return acc;
    }
};

GradeVec unit(int grade, int idx) {
    GradeVec g;
    g.grade = grade;
    g.add(idx, Scalar(1L));
    return g;
}

} // namespace

AxiomReport check_intertwiner_axioms(const Rational& a, const Rational& b,
                                     const VoaElem& alpha, int grade_cap) {
    AxiomContext ctx(a, b, grade_cap);
    const auto& tab = PartitionTable::instance();
    AxiomReport rep;
    int la_cap = std::min(grade_cap, 3);
    int nu_cap = std::min(grade_cap, 2);
    int wt = alpha.weight();

    for (int tg = 0; tg <= grade_cap; ++tg)
        for (int ti = 0; ti < tab.count(tg); ++ti)
            for (int vg = 0; vg <= nu_cap; ++vg)
                for (int vi = 0; vi < tab.count(vg); ++vi)
                    for (int ug = 0; ug <= la_cap; ++ug)
                        for (int ui = 0; ui < tab.count(ug); ++ui) {
                            GradeVec th = unit(tg, ti), v = unit(vg, vi), u = unit(ug, ui);
                            for (long m = -4; m <= grade_cap + 2; ++m) {
                                // (I1): <alpha_m^T th, Y(v)u> - <th, Y(v) alpha_m u>
                                //     = sum_j C(m,j) <th, Y(alpha_j v) u>   (x z^{m-j})
                                Scalar lhs =
                                    ctx.pair(ctx.mc.dual_mode_action(alpha, m, th), v, u) -
                                    ctx.pair(th, v, ctx.mb.mode_action(alpha, m, u));
                                Scalar rhs(0L);
                                for (long j = 0; j <= vg + wt + 1; ++j) {
                                    Scalar c = binomial(Scalar(m), j);
                                    if (c.is_zero()) continue;
                                    rhs += c * ctx.pair(th, ctx.ma.mode_action(alpha, j, v), u);
                                }
                                rep.commutativity =
                                    std::max(rep.commutativity, (lhs - rhs).abs());

                                // (I2): <th, Y(alpha_m v) u> = sum_j C(m,j)(-1)^j
                                //   { <alpha_{m-j}^T th, Y(v)u> - (-1)^m <th, Y(v) alpha_j u> }
                                Scalar lhs2 = ctx.pair(th, ctx.ma.mode_action(alpha, m, v), u);
                                Scalar rhs2(0L);
                                long jmax = long(tg + ug + 2 * wt + 4 + std::abs(m));
                                for (long j = 0; j <= jmax; ++j) {
                                    Scalar c = binomial(Scalar(m), j);
                                    if (j % 2) c = -c;
                                    if (c.is_zero()) continue;
                                    Scalar t1 = ctx.pair(
                                        ctx.mc.dual_mode_action(alpha, m - j, th), v, u);
                                    Scalar t2 =
                                        ctx.pair(th, v, ctx.mb.mode_action(alpha, j, u));
                                    rhs2 += c * (t1 - (m % 2 ? -t2 : t2));
                                }
                                rep.associativity =
                                    std::max(rep.associativity, (lhs2 - rhs2).abs());
                            }
                            // (I3): elem(mu, L(-1)nu, la) = exponent * elem(mu, nu, la)
                            Scalar lhs3 = ctx.pair(th, ctx.ma.virasoro(-1, v), u);
                            Rational expo = a * b + Rational(tg) - Rational(vg) - Rational(ug);
                            Scalar rhs3 = Scalar(expo) * ctx.pair(th, v, u);
                            rep.derivative = std::max(rep.derivative, (lhs3 - rhs3).abs());
                        }
    return rep;
}

// ---------------------------------------------------------------------------

double PentagonValues::max_pair_dev() const {
    std::vector<Complex> v{a_b_cd, a_bc_d, abc_d, ab_c_d, ab_cd};
    double scale = 0;
    for (Complex z : v) scale = std::max(scale, std::abs(z));
    double dev = 0;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j)
            dev = std::max(dev, std::abs(v[i] - v[j]));
    return scale > 0 ? dev / scale : dev;
}

PentagonValues pentagon_values(const Rational& a, const Rational& b, const Rational& c,
                               const Rational& d, Complex x, Complex y, Complex z,
                               int band_cap) {
    const auto& tab = PartitionTable::instance();
    IntertwinerCache iw;
    Partition hw; // empty partition everywhere
    int G = std::min(band_cap, kMaxGrade);

    PentagonValues out;
    out.oracle = closed_form_5pt(a, b, c, d, x, y, z);

    // (1) <th, Y(v,x) Y(u,y) Y(w,z) d>: intermediates F_{c+d} (grade g2) and
    //     F_{b+c+d} (grade g1)
    {
        const Intertwiner& y1 = iw.get(a, b + c + d);
        const Intertwiner& y2 = iw.get(b, c + d);
        const Intertwiner& y3 = iw.get(c, d);
        Complex acc(0, 0);
        for (int g1 = 0; g1 <= G; ++g1)
            for (int i1 = 0; i1 < tab.count(g1); ++i1) {
                const Partition& e1 = tab.at(g1, i1);
                Scalar c1 = y1.elem(hw, hw, e1);
                if (c1.is_zero()) continue;
                for (int g2 = 0; g2 <= G; ++g2)
                    for (int i2 = 0; i2 < tab.count(g2); ++i2) {
                        const Partition& e2 = tab.at(g2, i2);
                        Scalar c2 = y2.elem(e1, hw, e2);
                        if (c2.is_zero()) continue;
                        Scalar c3 = y3.elem(e2, hw, hw);
                        if (c3.is_zero()) continue;
                        acc += c1.approx() * c2.approx() * c3.approx() *
                               pow_principal(x, Complex(to_double(a * (b + c + d)) - g1, 0)) *
                               pow_principal(y, Complex(to_double(b * (c + d)) + g1 - g2, 0)) *
                               pow_principal(z, Complex(to_double(c * d) + g2, 0));
                    }
            }
        out.a_b_cd = acc;
    }

    // (2) <th, Y(v,x) Y(Y(u,y-z)w, z) d>: intermediates F_{b+c+d} (g1), F_{b+c} (g2)
    {
        const Intertwiner& y1 = iw.get(a, b + c + d);
        const Intertwiner& y2 = iw.get(b + c, d);
        const Intertwiner& y3 = iw.get(b, c);
        Complex acc(0, 0);
        for (int g1 = 0; g1 <= G; ++g1)
            for (int i1 = 0; i1 < tab.count(g1); ++i1) {
                const Partition& e1 = tab.at(g1, i1);
                Scalar c1 = y1.elem(hw, hw, e1);
                if (c1.is_zero()) continue;
                for (int g2 = 0; g2 <= G; ++g2)
                    for (int i2 = 0; i2 < tab.count(g2); ++i2) {
                        const Partition& e2 = tab.at(g2, i2);
                        Scalar c2 = y2.elem(e1, e2, hw);
                        if (c2.is_zero()) continue;
                        Scalar c3 = y3.elem(e2, hw, hw);
                        if (c3.is_zero()) continue;
                        acc += c1.approx() * c2.approx() * c3.approx() *
                               pow_principal(x, Complex(to_double(a * (b + c + d)) - g1, 0)) *
                               pow_principal(z, Complex(to_double((b + c) * d) + g1 - g2, 0)) *
                               pow_principal(y - z, Complex(to_double(b * c) + g2, 0));
                    }
            }
        out.a_bc_d = acc;
    }

    // (3) <th, Y(Y(v,x-z)Y(u,y-z)w, z) d>: intermediates F_{a+b+c} (g1), F_{b+c} (g2)
    {
        const Intertwiner& y1 = iw.get(a + b + c, d);
        const Intertwiner& y2 = iw.get(a, b + c);
        const Intertwiner& y3 = iw.get(b, c);
        Complex acc(0, 0);
        for (int g1 = 0; g1 <= G; ++g1)
            for (int i1 = 0; i1 < tab.count(g1); ++i1) {
                const Partition& e1 = tab.at(g1, i1);
                Scalar c1 = y1.elem(hw, e1, hw);
                if (c1.is_zero()) continue;
                for (int g2 = 0; g2 <= G; ++g2)
                    for (int i2 = 0; i2 < tab.count(g2); ++i2) {
                        const Partition& e2 = tab.at(g2, i2);
                        Scalar c2 = y2.elem(e1, hw, e2);
                        if (c2.is_zero()) continue;
                        Scalar c3 = y3.elem(e2, hw, hw);
                        if (c3.is_zero()) continue;
                        acc += c1.approx() * c2.approx() * c3.approx() *
                               pow_principal(z, Complex(to_double((a + b + c) * d) - g1, 0)) *
                               pow_principal(x - z, Complex(to_double(a * (b + c)) + g1 - g2, 0)) *
                               pow_principal(y - z, Complex(to_double(b * c) + g2, 0));
                    }
            }
        out.abc_d = acc;
    }

    // (4) <th, Y(Y(Y(v,x-y)u, y-z)w, z) d>: intermediates F_{a+b+c} (g1), F_{a+b} (g2)
    {
        const Intertwiner& y1 = iw.get(a + b + c, d);
        const Intertwiner& y2 = iw.get(a + b, c);
        const Intertwiner& y3 = iw.get(a, b);
        Complex acc(0, 0);
        for (int g1 = 0; g1 <= G; ++g1)
            for (int i1 = 0; i1 < tab.count(g1); ++i1) {
                const Partition& e1 = tab.at(g1, i1);
                Scalar c1 = y1.elem(hw, e1, hw);
                if (c1.is_zero()) continue;
                for (int g2 = 0; g2 <= G; ++g2)
                    for (int i2 = 0; i2 < tab.count(g2); ++i2) {
                        const Partition& e2 = tab.at(g2, i2);
                        Scalar c2 = y2.elem(e1, e2, hw);
                        if (c2.is_zero()) continue;
                        Scalar c3 = y3.elem(e2, hw, hw);
                        if (c3.is_zero()) continue;
                        acc += c1.approx() * c2.approx() * c3.approx() *
                               pow_principal(z, Complex(to_double((a + b + c) * d) - g1, 0)) *
                               pow_principal(y - z, Complex(to_double((a + b) * c) + g1 - g2, 0)) *
                               pow_principal(x - y, Complex(to_double(a * b) + g2, 0));
                    }
            }
        out.ab_c_d = acc;
    }

    // (5) <th, Y(Y(v,x-y)u, y) Y(w,z) d>: intermediates F_{a+b} (g1), F_{c+d} (g2)
    {
        const Intertwiner& y1 = iw.get(a + b, c + d);
        const Intertwiner& y2 = iw.get(a, b);
        const Intertwiner& y3 = iw.get(c, d);
        Complex acc(0, 0);
        for (int g1 = 0; g1 <= G; ++g1)
            for (int i1 = 0; i1 < tab.count(g1); ++i1) {
                const Partition& e1 = tab.at(g1, i1);
                Scalar c2 = y2.elem(e1, hw, hw);
                if (c2.is_zero()) continue;
                for (int g2 = 0; g2 <= G; ++g2)
                    for (int i2 = 0; i2 < tab.count(g2); ++i2) {
                        const Partition& e2 = tab.at(g2, i2);
                        Scalar c1 = y1.elem(hw, e1, e2);
                        if (c1.is_zero()) continue;
                        Scalar c3 = y3.elem(e2, hw, hw);
                        if (c3.is_zero()) continue;
                        acc += c1.approx() * c2.approx() * c3.approx() *
                               pow_principal(y, Complex(to_double((a + b) * (c + d)) - g1 - g2, 0)) *
                               pow_principal(x - y, Complex(to_double(a * b) + g1, 0)) *
                               pow_principal(z, Complex(to_double(c * d) + g2, 0));
                    }
            }
        out.ab_cd = acc;
    }

    return out;
}

bool in_d2(Complex x, Complex y) {
    Complex xy = x - y;
    if (on_branch_cut(x) || on_branch_cut(y) || on_branch_cut(xy)) return false;
    return std::abs(xy) > 0 && std::abs(xy) < std::abs(y) && std::abs(y) < std::abs(x);
}

bool in_d3(Complex x, Complex y, Complex z) {
    for (Complex w : {x, y, z, x - y, x - z, y - z})
        if (on_branch_cut(w)) return false;
    return std::abs(x) > std::abs(y) && std::abs(y) > std::abs(z) &&
           std::abs(z) > std::abs(x - z) && std::abs(x - z) > std::abs(y - z) &&
           std::abs(y - z) > std::abs(x - y) && std::abs(x - y) > 0;
}

} // namespace boxtimes
