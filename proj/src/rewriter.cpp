#include "boxtimes/rewriter.hpp"

#include <algorithm>

namespace boxtimes {

void LinearCombination::add(const TermKey& key, const MonomialSeries2& coeff) {
    if (coeff.empty()) return;
    auto it = t_.find(key);
    if (it == t_.end()) {
        t_.emplace(key, coeff);
    } else {
        it->second += coeff;
        if (it->second.empty()) t_.erase(it);
    }
}

void LinearCombination::add_scaled(const LinearCombination& other, const Scalar& c, int h,
                                   int k) {
    for (const auto& [key, coeff] : other.terms()) {
        TermKey shifted = key;
        shifted.h += h;
        shifted.k += k;
        add(shifted, coeff * c);
    }
}

QuadBasis default_quad_basis(const FockTriple& t, int n_cap, bool enlarge) {
    const auto& tab = PartitionTable::instance();
    QuadBasis b;
    b.n_cap = n_cap;
    for (int g = 0; g <= n_cap; ++g)
        for (int i = 0; i < tab.count(g); ++i) {
            b.theta.push_back({g, i});
            b.theta_scale.push_back(Scalar(1L));
        }
    // P = {hw}; the default enlargement adds the image of the weight-1 current
    std::vector<std::pair<int, int>> p{{0, 0}};
    if (enlarge) p.push_back({1, 0});
    b.pa = b.pb = b.pc = p;
    b.pc_scale.assign(b.pc.size(), Scalar(1L));
    return b;
}

Rewriter::Rewriter(std::shared_ptr<const FockTriple> triple, int coeff_order, int k1, int k2)
    : triple_(std::move(triple)), coeff_order_(coeff_order), k1_(k1), k2_(k2) {}

const GradedModule& Rewriter::module_of_slot(int slot) const {
    switch (slot) {
    case 2: return *triple_->mod_a;
    case 3: return *triple_->mod_b;
    case 4: return *triple_->mod_c;
    default: throw MathError("module_of_slot: slot out of range");
    }
}

bool Rewriter::is_basis(const BasisQuadruple& q) const {
    return triple_->mod_a->in_complement(q.vg, q.vi) &&
           triple_->mod_b->in_complement(q.ug, q.ui) &&
           triple_->mod_c->in_complement(q.wg, q.wi);
}

std::pair<uint64_t, uint64_t> Rewriter::quad_key(const BasisQuadruple& q, Flavor f) {
    uint64_t a = (uint64_t(uint32_t(PartitionTable::pack(q.tg, q.ti))) << 32) |
                 uint32_t(PartitionTable::pack(q.vg, q.vi));
    uint64_t b = (uint64_t(uint32_t(PartitionTable::pack(q.ug, q.ui))) << 32) |
                 uint32_t(PartitionTable::pack(q.wg, q.wi));
    return {a, b * 4 + uint64_t(f)};
}

void Rewriter::expand_monomial(LinearCombination& out, const TermKey& key, const Scalar& c,
                               long px, long py, long pe, Chain side, Flavor flavor) const {
    if (c.is_zero()) return;
    const int m = coeff_order_;
    auto mono = [&](const Scalar& cc, long ax, long ay, long ae, Iota fl) {
        return MonomialSeries2::monomial(cc, GaussRat(ax), GaussRat(ay), GaussRat(ae), 0, 0,
                                         0, fl, m);
    };

    if (flavor == Flavor::y_norm || (flavor == Flavor::plain && side == Chain::a_side)) {
        if (flavor == Flavor::y_norm && py < 0)
            throw MathError("reduction produced a negative y power in the y flavor");
        if (pe == 0) {
            out.add(key, mono(c, px, py, 0, flavor == Flavor::y_norm ? Iota::xy : Iota::none));
        } else if (pe > 0) {
            // finite binomial (x-y)^pe
            for (long i = 0; i <= pe; ++i) {
                Scalar cc = c * Scalar(binomial_rat(Rational(pe), i));
                if (i % 2) cc = -cc;
                out.add(key, mono(cc, px + pe - i, py + i, 0,
                                  flavor == Flavor::y_norm ? Iota::xy : Iota::none));
            }
        } else {
            // iota_{x,y}{(x-y)^pe}: series in y/x
            for (long i = 0; i <= m; ++i) {
                Scalar cc = c * Scalar(binomial_rat(Rational(pe), i));
                if (i % 2) cc = -cc;
                out.add(key, mono(cc, px + pe - i, py + i, 0, Iota::xy));
            }
        }
        return;
    }

    if (flavor == Flavor::xmy_norm || (flavor == Flavor::plain && side == Chain::b_side)) {
        if (flavor == Flavor::xmy_norm && pe < 0)
            throw MathError("reduction produced a negative x-y power in the x-y flavor");
        if (px == 0) {
            out.add(key,
                    mono(c, 0, py, pe, flavor == Flavor::xmy_norm ? Iota::y_xmy : Iota::none));
        } else {
            // x^px = (y + (x-y))^px: finite for px > 0, iota_{y,x-y} otherwise
            long top = px > 0 ? px : m;
            for (long i = 0; i <= top; ++i) {
                Scalar cc = c * Scalar(binomial_rat(Rational(px), i));
                out.add(key, mono(cc, 0, py + px - i, pe + i, Iota::y_xmy));
            }
        }
        return;
    }
}

void Rewriter::apply_identity(LinearCombination& out, int slot, long n, const VoaElem& alpha,
                              const BasisQuadruple& xi, Chain side, Flavor flavor,
                              const MonomialSeries2& base) const {
    const int wt = alpha.weight();
    const FockModule& ma = *triple_->mod_a;
    const FockModule& mb = *triple_->mod_b;
    const FockModule& mc = *triple_->mod_c;
    const FockModule& mt = *triple_->mod_target;
    const long lhs_gr_shift = (slot == 1) ? 0 : wt - n - 1; // gr234 change of the LHS

    struct Piece {
        int target_slot;
        long mode;       // alpha_mode (adjoint when target_slot == 1)
        Scalar c;
        long px, py, pe;
    };
    std::vector<Piece> pieces;
    auto cnj = [&](long j) { return Scalar(binomial_rat(Rational(n), j)); };
    auto sgn = [](long p) { return (p % 2 == 0) ? Scalar(1L) : Scalar(-1L); };
    // grade bound for module modes: target grade must stay inside the cutoff
    auto mode_range = [&](int grade, auto&& f) {
        for (long j = 0;; ++j) {
            long tg = grade + wt - j - 1;
            if (tg < 0) break;
            f(j);
        }
    };

    switch (slot) {
    case 1:
        mode_range(xi.vg, [&](long j) { pieces.push_back({2, j, cnj(j), n - j, 0, 0}); });
        mode_range(xi.ug, [&](long j) { pieces.push_back({3, j, cnj(j), 0, n - j, 0}); });
        pieces.push_back({4, n, Scalar(1L), 0, 0, 0});
        break;
    case 2:
        for (long j = 0;; ++j) { // adjoint modes (alpha_{n-j})* on theta
            long tg = xi.tg - wt + (n - j) + 1;
            if (tg < 0) break;
            if (tg > mt.cutoff())
                throw MathError("borcherds identity: adjoint term leaves the grade window");
            pieces.push_back({1, n - j, cnj(j) * sgn(j), j, 0, 0});
        }
        mode_range(xi.ug, [&](long j) {
            pieces.push_back({3, j, -(cnj(j) * sgn(n + j)), 0, 0, n - j});
        });
        mode_range(xi.wg, [&](long j) {
            pieces.push_back({4, j, -(cnj(j) * sgn(n + j)), n - j, 0, 0});
        });
        break;
    case 3:
        for (long j = 0;; ++j) {
            long tg = xi.tg - wt + (n - j) + 1;
            if (tg < 0) break;
            if (tg > mt.cutoff())
                throw MathError("borcherds identity: adjoint term leaves the grade window");
            pieces.push_back({1, n - j, cnj(j) * sgn(j), 0, j, 0});
        }
        mode_range(xi.vg, [&](long j) { pieces.push_back({2, j, -cnj(j), 0, 0, n - j}); });
        mode_range(xi.wg, [&](long j) {
            pieces.push_back({4, j, -(cnj(j) * sgn(n + j)), 0, n - j, 0});
        });
        break;
    case 4:
        pieces.push_back({1, n, Scalar(1L), 0, 0, 0});
        mode_range(xi.vg, [&](long j) { pieces.push_back({2, j, -cnj(j), n - j, 0, 0}); });
        mode_range(xi.ug, [&](long j) { pieces.push_back({3, j, -cnj(j), 0, n - j, 0}); });
        break;
    default: throw MathError("apply_identity: slot out of range");
    }

    for (const Piece& p : pieces) {
        if (p.c.is_zero()) continue;
        GradeVec image;
        BasisQuadruple q = xi;
        switch (p.target_slot) {
        case 1: image = mt.dual_mode_action(alpha, p.mode, xi.tg, xi.ti); break;
        case 2: image = ma.mode_action(alpha, p.mode, xi.vg, xi.vi); break;
        case 3: image = mb.mode_action(alpha, p.mode, xi.ug, xi.ui); break;
        case 4: image = mc.mode_action(alpha, p.mode, xi.wg, xi.wi); break;
        }
        if (image.empty()) continue;
        if (image.grade < 0) continue;

        long rhs_gr_shift = (p.target_slot == 1) ? 0 : wt - p.mode - 1;
        long q_shift = lhs_gr_shift - rhs_gr_shift;
        long px = p.px, py = p.py, pe = p.pe;
        if (flavor == Flavor::y_norm) py += q_shift;
        if (flavor == Flavor::xmy_norm) pe += q_shift;

        for (const auto& [idx, cc] : image.c) {
            switch (p.target_slot) {
            case 1: q.tg = image.grade; q.ti = idx; break;
            case 2: q.vg = image.grade; q.vi = idx; break;
            case 3: q.ug = image.grade; q.ui = idx; break;
            case 4: q.wg = image.grade; q.wi = idx; break;
            }
            LinearCombination piece_out(flavor == Flavor::plain ? Flavor::plain : flavor);
            expand_monomial(piece_out, {q, 0, 0}, p.c * cc, px, py, pe, side, flavor);
            for (const auto& [key, mono] : piece_out.terms()) out.add(key, mono * base);
        }
    }
}

LinearCombination Rewriter::borcherds_expand(int slot, long n, const VoaElem& alpha,
                                             const BasisQuadruple& xi, Chain side,
                                             Flavor flavor) const {
    if (slot < 1 || slot > 4) throw ConfigError("borcherds_expand: slot must be 1..4");
    LinearCombination out(flavor);
    apply_identity(out, slot, n, alpha, xi, side, flavor,
                   MonomialSeries2::constant(Scalar(1L), coeff_order_));
    ++stats_.expansions;
    return out;
}

const LinearCombination& Rewriter::reduce_to_basis(const BasisQuadruple& xi,
                                                   Flavor flavor) const {
    if (flavor == Flavor::plain)
        throw ConfigError("reduce_to_basis: choose the y or x-y normalization");
    auto key = quad_key(xi, flavor);
    if (auto it = reduce_cache_.find(key); it != reduce_cache_.end()) return it->second;

    LinearCombination result(flavor);
    // active terms keyed by quadruple, processed by descending total grade
    std::map<BasisQuadruple, MonomialSeries2> pending;
    pending.emplace(xi, MonomialSeries2::constant(Scalar(1L), coeff_order_));

    while (!pending.empty()) {
        // deterministic max-grade selection, ties by quadruple order
        auto pick = pending.begin();
        for (auto it = std::next(pending.begin()); it != pending.end(); ++it)
            if (it->first.total_grade() > pick->first.total_grade()) pick = it;
        BasisQuadruple q = pick->first;
        MonomialSeries2 coeff = std::move(pick->second);
        pending.erase(pick);

        if (is_basis(q)) {
            result.add({q, 0, 0}, coeff);
            continue;
        }
        ++stats_.steps;

        int slot = !triple_->mod_a->in_complement(q.vg, q.vi)   ? 2
                   : !triple_->mod_b->in_complement(q.ug, q.ui) ? 3
                                                                : 4;
        const GradedModule& mod = module_of_slot(slot);
        int grade = slot == 2 ? q.vg : slot == 3 ? q.ug : q.wg;
        int idx = slot == 2 ? q.vi : slot == 3 ? q.ui : q.wi;

        for (const C1Term& t : mod.c1_rewrite(grade, idx)) {
            for (const auto& [li, lc] : t.lower.c) {
                BasisQuadruple hat = q;
                switch (slot) {
                case 2: hat.vg = t.lower.grade; hat.vi = li; break;
                case 3: hat.ug = t.lower.grade; hat.ui = li; break;
                case 4: hat.wg = t.lower.grade; hat.wi = li; break;
                }
                LinearCombination expansion(flavor);
                apply_identity(expansion, slot, -1, t.gen, hat, Chain::a_side, flavor,
                               coeff * (t.coeff * lc));
                for (const auto& [key2, mono] : expansion.terms()) {
                    if (key2.q.total_grade() >= q.total_grade()) stats_.grade_monotone = false;
                    auto it = pending.find(key2.q);
                    if (it == pending.end())
                        pending.emplace(key2.q, mono);
                    else {
                        it->second += mono;
                        if (it->second.empty()) pending.erase(it);
                    }
                }
            }
        }
    }

    return reduce_cache_.emplace(key, std::move(result)).first->second;
}

LinearCombination Rewriter::derivative_recursion(const BasisQuadruple& xi, int h, int k,
                                                 Flavor flavor) const {
    if (flavor == Flavor::plain)
        throw ConfigError("derivative_recursion: choose the y or x-y normalization");
    if (h > k1_ || k > k2_) throw ConfigError("derivative_recursion: log index beyond cap");
    LinearCombination row(flavor);

    // L(-1) acting in coordinate 2 (x-y flavor) or 3 (y flavor)
    int slot = flavor == Flavor::xmy_norm ? 2 : 3;
    const FockModule& mod = static_cast<const FockModule&>(module_of_slot(slot));
    int grade = slot == 2 ? xi.vg : xi.ug;
    int idx = slot == 2 ? xi.vi : xi.ui;
    GradeVec lm = mod.virasoro(-1, grade, idx);
    for (const auto& [li, lc] : lm.c) {
        BasisQuadruple q = xi;
        if (slot == 2) {
            q.vg = lm.grade;
            q.vi = li;
        } else {
            q.ug = lm.grade;
            q.ui = li;
        }
        if (is_basis(q)) {
            row.add({q, h, k}, MonomialSeries2::constant(lc, coeff_order_));
        } else {
            row.add_scaled(reduce_to_basis(q, flavor), lc, h, k);
        }
    }

    // diagonal gr234 term
    row.add({xi, h, k}, MonomialSeries2::constant(Scalar(long(xi.gr234())), coeff_order_));

    // log-index shift; beyond the declared cap the component is zero
    if (flavor == Flavor::y_norm && k + 1 <= k2_) {
        row.add({xi, h, k + 1},
                MonomialSeries2::constant(Scalar(-long(k) - 1), coeff_order_));
    }
    if (flavor == Flavor::xmy_norm && h + 1 <= k1_) {
        // -(h+1) (x-y) iota_{y,x-y}{x^{-1}}
        MonomialSeries2 shift = iota_y_xmy(Scalar(-long(h) - 1), GaussRat(-1L), coeff_order_);
        shift = shift * MonomialSeries2::monomial(Scalar(1L), GaussRat(), GaussRat(),
                                                  GaussRat(1L), 0, 0, 0, Iota::y_xmy,
                                                  coeff_order_);
        row.add({xi, h + 1, k}, shift);
    }
    return row;
}

namespace {

Scalar pow_int(const Scalar& base, long n) {
    if (n == 0) return Scalar(1L);
    Scalar b = n > 0 ? base : Scalar(1L) / base;
    long e = n > 0 ? n : -n;
    Scalar acc(1L);
    for (long i = 0; i < e; ++i) acc *= b;
    return acc;
}

std::vector<Scalar> specialize(const MonomialSeries2& coeff, Flavor flavor,
                               const Scalar& basepoint, int order) {
    std::vector<Scalar> out(size_t(order) + 1);
    for (const auto& [key, c] : coeff.terms()) {
        if (key.h || key.k || key.j)
            throw MathError("connection matrix entry carries a logarithm");
        auto as_long = [](const GaussRat& g) -> long {
            if (g.im != 0 || denominator(g.re) != 1)
                throw MathError("connection matrix entry with non-integer exponent");
            return numerator(g.re).template convert_to<long>();
        };
        long pa = as_long(key.a), pb = as_long(key.b), pe = as_long(key.e);
        if (flavor == Flavor::y_norm) {
            // series in y at x = x0: all x-y powers were expanded away
            if (pe != 0) throw MathError("unexpanded x-y power in y-flavor entry");
            if (pb < 0) throw MathError("negative y power in y-flavor entry");
            if (pb > order) continue;
            out[pb] += c * pow_int(basepoint, pa);
        } else {
            if (pa != 0) throw MathError("unexpanded x power in x-y-flavor entry");
            if (pe < 0) throw MathError("negative x-y power in x-y-flavor entry");
            if (pe > order) continue;
            out[pe] += c * pow_int(basepoint, pb);
        }
    }
    return out;
}

} // namespace

MatrixSeries Rewriter::connection_matrix(const QuadBasis& basis, Flavor flavor,
                                         const Scalar& basepoint, int order) const {
    if (flavor == Flavor::plain)
        throw ConfigError("connection_matrix: choose the y or x-y normalization");
    // enumerate J_N x P~_A x P~_B x P~_C x K^2
    struct Entry {
        BasisQuadruple q;
        int h, k;
        Scalar scale;
    };
    std::vector<Entry> idx;
    std::map<TermKey, int> position;
    for (size_t it = 0; it < basis.theta.size(); ++it)
        for (auto& [vg, vi] : basis.pa)
            for (auto& [ug, ui] : basis.pb)
                for (size_t iw = 0; iw < basis.pc.size(); ++iw)
                    for (int h = 0; h <= k1_; ++h)
                        for (int k = 0; k <= k2_; ++k) {
                            BasisQuadruple q{basis.theta[it].first, basis.theta[it].second,
                                             vg, vi, ug, ui, basis.pc[iw].first,
                                             basis.pc[iw].second};
                            Scalar s = basis.theta_scale[it] * basis.pc_scale[iw];
                            position[{q, h, k}] = int(idx.size());
                            idx.push_back({q, h, k, s});
                        }

    const int r = int(idx.size());
    MatrixSeries lambda(r, basepoint, basepoint.abs(), order);
    for (int row = 0; row < r; ++row) {
        LinearCombination lc = derivative_recursion(idx[row].q, idx[row].h, idx[row].k, flavor);
        for (const auto& [key, coeff] : lc.terms()) {
            auto pos = position.find(key);
            if (pos == position.end()) {
                // reduction lands in J^0_N which must embed in the chosen basis
                throw MathError("connection_matrix: reduction left the basis "
                                "(complement vector missing from the P~ lists)");
            }
            int col = pos->second;
            // rescaled basis: G-hat = s G, so Lambda-hat = D Lambda D^{-1}
            Scalar factor = idx[row].scale / idx[col].scale;
            std::vector<Scalar> series = specialize(coeff, flavor, basepoint, order);
            for (int m = 0; m <= order; ++m) {
                if (series[m].is_zero()) continue;
                lambda.coeff[m](row, col) += series[m] * factor;
            }
        }
    }
    return lambda;
}

ExponentSet Rewriter::exponent_set(const Mat& lambda0, double tol) const {
    ExponentSet set(tol);
    for (Complex ev : eigenvalues_numeric(lambda0)) {
        long off = 0;
        set.insert(Exponent(ev), off);
    }
    return set;
}

Complex Rewriter::eval_g(const BasisQuadruple& q, Complex x, Complex y, int y_cap) const {
    // G^y band g has y-exponent bc + gr(v) + g: cap g at y_cap - gr(v)
    int cap = y_cap - q.vg;
    if (cap < 0) return {0, 0};
    ModeSumResult res = triple_->direct_mode_sum(q, x, y, cap);
    return res.value * pow_principal(y, Complex(double(q.gr234()), 0));
}

Complex Rewriter::eval_combination(const LinearCombination& lc, Complex x, Complex y,
                                   int y_cap) const {
    if (lc.flavor() != Flavor::y_norm)
        throw ConfigError("eval_combination: band-aligned evaluation is y-flavored");
    Complex acc(0, 0);
    for (const auto& [key, coeff] : lc.terms()) {
        if (key.h || key.k) throw ConfigError("eval_combination: log-free testbed only");
        for (const auto& [mk, c] : coeff.terms()) {
            if (mk.e != GaussRat() || mk.h || mk.k || mk.j)
                throw MathError("eval_combination: unexpanded coefficient term");
            if (mk.b.im != 0 || denominator(mk.b.re) != 1)
                throw MathError("eval_combination: non-integer y power in coefficient");
            long pb = numerator(mk.b.re).template convert_to<long>();
            Complex monom = c.approx() *
                            pow_principal(x, mk.a.approx()) *
                            pow_principal(y, mk.b.approx());
            acc += monom * eval_g(key.q, x, y, y_cap - int(pb));
        }
    }
    return acc;
}

} // namespace boxtimes
