#include "boxtimes/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace boxtimes {

int GVector::position(const TermKey& key) const {
    for (int i = 0; i < size(); ++i)
        if (!(index[i] < key) && !(key < index[i])) return i;
    throw MathError("GVector: component not found");
}

Complex GVector::eval_at(int i, Complex x_or_y) const {
    if (flavor == Flavor::y_norm) {
        return components[i].eval(x_or_y).value;
    }
    // flavor x-y: series in 1/x times (x-y0)^{gr234}
    Complex x = x_or_y;
    Complex v = components[i].eval(1.0 / x).value;
    return v * pow_principal(x - basepoint, Complex(double(gr234[i]), 0));
}

GVector build_gvector(const Rewriter& rw, const QuadBasis& basis, Flavor flavor,
                      Complex basepoint, int band_cap) {
    if (flavor == Flavor::plain) throw ConfigError("build_gvector: pick a normalization");
    if (on_branch_cut(basepoint))
        throw RegionError("build_gvector: basepoint on the branch cut");
    const FockTriple& t = rw.triple();
    const auto& tab = PartitionTable::instance();
    const Intertwiner& y1 = t.intertwiners.get(t.a, t.b + t.c);
    const Intertwiner& y2 = t.intertwiners.get(t.b, t.c);

    GVector g;
    g.flavor = flavor;
    g.basepoint = basepoint;
    for (size_t it = 0; it < basis.theta.size(); ++it)
        for (auto& [vg, vi] : basis.pa)
            for (auto& [ug, ui] : basis.pb)
                for (size_t iw = 0; iw < basis.pc.size(); ++iw) {
                    BasisQuadruple q{basis.theta[it].first, basis.theta[it].second, vg, vi,
                                     ug, ui, basis.pc[iw].first, basis.pc[iw].second};
                    g.index.push_back({q, 0, 0});
                    g.scale.push_back(basis.theta_scale[it] * basis.pc_scale[iw]);
                    g.gr234.push_back(q.gr234());
                }

    double bc = to_double(t.b * t.c);
    double abc = to_double(t.a * (t.b + t.c));
    for (int i = 0; i < g.size(); ++i) {
        const BasisQuadruple& q = g.index[i].q;
        const Partition& mu = tab.at(q.tg, q.ti);
        const Partition& nu = tab.at(q.vg, q.vi);
        const Partition& lu = tab.at(q.ug, q.ui);
        const Partition& lw = tab.at(q.wg, q.wi);
        int cap = std::min(band_cap, t.cutoff);

        if (flavor == Flavor::y_norm) {
            // series in y at x = x0: band g carries y^{bc + gr(v) + g} after the
            // y^{gr234} normalization
            LogPowerSeries s("y", cap + q.gr234(), 0);
            for (int band = 0; band <= cap; ++band) {
                Complex acc(0, 0);
                for (int e = 0; e < tab.count(band); ++e) {
                    const Partition& mid = tab.at(band, e);
                    Scalar c1 = y1.elem(mu, nu, mid);
                    if (c1.is_zero()) continue;
                    Scalar c2 = y2.elem(mid, lu, lw);
                    if (c2.is_zero()) continue;
                    acc += c1.approx() * c2.approx();
                }
                if (acc == Complex(0, 0)) continue;
                double xe = abc + q.tg - q.vg - band;
                Complex coeff = acc * pow_principal(basepoint, Complex(xe, 0));
                s.add_term(Exponent(Complex(bc + q.vg + band, 0)), 0,
                           Scalar(coeff * g.scale[i].approx()));
            }
            g.components.push_back(std::move(s));
        } else {
            // series in 1/x at y = y0: band g carries x^{a(b+c)+gr(theta)-gr(v)-g}
            LogPowerSeries s("x^-1", cap + q.tg, 0);
            for (int band = 0; band <= cap; ++band) {
                Complex acc(0, 0);
                for (int e = 0; e < tab.count(band); ++e) {
                    const Partition& mid = tab.at(band, e);
                    Scalar c1 = y1.elem(mu, nu, mid);
                    if (c1.is_zero()) continue;
                    Scalar c2 = y2.elem(mid, lu, lw);
                    if (c2.is_zero()) continue;
                    acc += c1.approx() * c2.approx();
                }
                if (acc == Complex(0, 0)) continue;
                double ye = bc + band - q.ug - q.wg;
                Complex coeff = acc * pow_principal(basepoint, Complex(ye, 0));
                // exponent of 1/x
                s.add_term(Exponent(Complex(-(abc + q.tg - q.vg) + band, 0)), 0,
                           Scalar(coeff * g.scale[i].approx()));
            }
            g.components.push_back(std::move(s));
        }
    }
    return g;
}

ConnectionResult solve_connection(const GVector& g, const FundamentalSolutionSet& phi,
                                  Complex x1, Complex x1b, double tol) {
    if (g.flavor != Flavor::xmy_norm)
        throw ConfigError("solve_connection: expects the x-y normalized G-vector");
    const int n = phi.size();
    if (g.size() != n) throw MathError("solve_connection: dimension mismatch");
    Complex y0 = g.basepoint;

    auto solve_at = [&](Complex xp) {
        Mat m = phi.eval(xp - y0);
        std::vector<Scalar> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = Scalar(g.eval_at(i, xp));
        std::vector<Scalar> c = solve(m, rhs);
        // residual
        double num = 0, den = 0;
        std::vector<Scalar> mc = mat_vec(m, c);
        for (int i = 0; i < n; ++i) {
            num = std::max(num, (mc[i] - rhs[i]).abs());
            den = std::max(den, rhs[i].abs());
        }
        return std::make_pair(c, den > 0 ? num / den : num);
    };

    ConnectionResult res;
    res.x1 = x1;
    res.x1b = x1b;
    auto [c1, r1] = solve_at(x1);
    auto [c2, r2] = solve_at(x1b);
    res.solve_residual = std::max(r1, r2);
    double dev = 0, scale = 0;
    for (int i = 0; i < n; ++i) {
        dev = std::max(dev, (c1[i] - c2[i]).abs());
        scale = std::max(scale, c1[i].abs());
    }
    res.match_deviation = scale > 0 ? dev / scale : dev;
    if (res.match_deviation > tol)
        throw MathError("solve_connection: matching points disagree (ill-conditioned "
                        "fundamental matrix at both overlap points)");
    res.c.reserve(n);
    for (int i = 0; i < n; ++i) res.c.push_back(c1[i].approx());
    return res;
}

BranchAssembly assemble_principal_branch(const FundamentalSolutionSet& phi,
                                         const std::vector<Complex>& c, const GVector& g,
                                         const BasisQuadruple& xi0,
                                         const ExponentSet& delta_prime, Complex y0,
                                         int max_gr_pc, int log_x_order) {
    BranchAssembly out;
    out.y0 = y0;
    out.gr234 = xi0.gr234();

    // p(x, y0): the log(x) replacement as a numeric series in x-y0
    auto p_series = [&](int order, int log_cap) {
        LogPowerSeries p("x-y0", order, log_cap);
        p.add_term(Exponent(0L), 0, Scalar(std::log(y0)));
        for (int j = 0; j + 1 <= order; ++j) {
            Complex coef = std::pow(-1.0, j) / double(j + 1) *
                           std::pow(y0, Complex(-double(j) - 1, 0));
            p.add_term(Exponent(long(j) + 1), 0, Scalar(coef));
        }
        return p;
    };

    int order = 0, log_cap = 0;
    for (const auto& col : phi.columns)
        for (const auto& comp : col) {
            order = std::max(order, comp.order());
            log_cap = std::max(log_cap, comp.log_cap());
        }
    LogPowerSeries acc("x-y0", order, log_cap);

    // all (h,k) rows of the xi0 block: multiply by log^h(x) log^k(y0) and
    // substitute p(x,y0) for log(x)
    for (int i = 0; i < g.size(); ++i) {
        if (!(g.index[i].q == xi0)) continue;
        int h = g.index[i].h, k = g.index[i].k;
        LogPowerSeries comb("x-y0", order, log_cap);
        for (int j = 0; j < int(c.size()); ++j) {
            if (c[j] == Complex(0, 0)) continue;
            LogPowerSeries term = phi.columns[j][i];
            comb += term * Scalar(c[j]);
        }
        Scalar logy_pow(1L);
        for (int t = 0; t < k; ++t) logy_pow *= Scalar(std::log(y0));
        comb = comb * logy_pow;
        if (h > 0) {
            LogPowerSeries p = p_series(order, log_cap);
            for (int t = 0; t < h; ++t) comb = comb * p;
        }
        // divide by the scale that entered the G-vector and undo y^... none for x-y flavor
        comb = comb * (Scalar(1L) / g.scale[i]);
        acc += comb;
    }
    (void)log_x_order;

    // undo the (x-y)^{gr234} normalization
    out.series = acc.shift(Exponent(-long(out.gr234)));

    // ladder certificate: every exponent must lie in
    // Delta' - max gr(P_C) - gr(v) - gr(u) + N
    for (const auto& [key, v] : out.series.terms()) {
        (void)v;
        Exponent e = out.series.exponents().base(std::get<0>(key)) + std::get<1>(key);
        bool ok = false;
        for (const Exponent& d : delta_prime.bases()) {
            auto diff = e.integer_difference(d, delta_prime.tol());
            if (diff && *diff + max_gr_pc + xi0.vg + xi0.ug >= 0) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            out.ladder_ok = false;
            throw MathError("assemble_principal_branch: exponent outside the ladder "
                            "Delta - gr(v) - gr(u) + N");
        }
    }
    return out;
}

namespace {

Complex relative_dev(Complex a, Complex b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0 ? (a - b) / scale : Complex(0, 0);
}

} // namespace

AssocReport check_associativity(const Rational& a, const Rational& b, const Rational& c,
                                const std::vector<std::pair<Complex, Complex>>& points,
                                const PipelineConfig& cfg) {
    if (points.empty()) throw ConfigError("check_associativity: empty point list");
    AssocReport rep;
    rep.a = a;
    rep.b = b;
    rep.c = c;

    auto triple = std::make_shared<const FockTriple>(a, b, c, cfg.grade_cutoff);
    Rewriter rw(triple, cfg.coeff_order, 0, 0);
    QuadBasis basis = default_quad_basis(*triple, cfg.n_cap, cfg.enlarge_basis);
    SpectralOptions sopt;
    sopt.cluster_tol = cfg.eig_cluster_tol;
    sopt.rank_tol = cfg.rank_tol;

    BasisQuadruple xi0{}; // highest-weight quadruple

    for (auto& [x, y] : points) {
        if (!in_d2(x, y))
            throw RegionError("check_associativity: point outside D^2");
        AssocPoint pt;
        pt.x = x;
        pt.y = y;

        // (D2) system at y0 = y; exact entries when y is exactly representable
        Scalar y0s = [&]() -> Scalar {
            if (y.imag() == 0.0) {
                if (auto q = rationalize(y.real(), 1'000'000, 1e-12)) return Scalar(*q);
            }
            return Scalar(y);
        }();
        MatrixSeries lambda = rw.connection_matrix(basis, Flavor::xmy_norm, y0s,
                                                   cfg.series_order);
        ExponentSet dp = rw.exponent_set(lambda.a0(), 1e-6);
        for (const Exponent& e : dp.bases()) pt.exponent_ladder.push_back(e.approx);

        FundamentalSolutionSet phi = fuchsian_solve(lambda, cfg.series_order, sopt);

        GVector g = build_gvector(rw, basis, Flavor::xmy_norm, y, cfg.grade_cutoff);
        Complex x1 = 1.75 * y, x1b = 1.625 * y;
        ConnectionResult conn = solve_connection(g, phi, x1, x1b, cfg.tol_connection);
        pt.connection_residual = conn.solve_residual;
        pt.match_deviation = conn.match_deviation;

        BranchAssembly asmbl =
            assemble_principal_branch(phi, conn.c, g, xi0, dp, y, 0, cfg.series_order);
        EvalResult ev = asmbl.series.eval(x - y);
        pt.f_pipeline = ev.value;
        pt.tail_estimate = ev.tail_bound;

        ModeSumResult direct = triple->direct_mode_sum_ab_c(xi0, x, y, cfg.grade_cutoff);
        pt.f_direct = direct.value;
        pt.tail_estimate = std::max(pt.tail_estimate, direct.tail);
        pt.f_closed = closed_form_4pt(a, b, c, x, y);

        pt.rel_dev_sides = std::abs(relative_dev(pt.f_pipeline, pt.f_direct));
        pt.rel_dev_closed = std::max(std::abs(relative_dev(pt.f_pipeline, pt.f_closed)),
                                     std::abs(relative_dev(pt.f_direct, pt.f_closed)));
        rep.max_rel_dev_sides = std::max(rep.max_rel_dev_sides, pt.rel_dev_sides);
        rep.max_rel_dev_closed = std::max(rep.max_rel_dev_closed, pt.rel_dev_closed);
        rep.points.push_back(std::move(pt));
    }
    rep.pass = rep.max_rel_dev_sides <= cfg.tol_check &&
               rep.max_rel_dev_closed <= cfg.tol_check;
    return rep;
}

PentagonReport check_pentagon(const Rational& a, const Rational& b, const Rational& c,
                              const Rational& d, Complex x, Complex y, Complex z,
                              const PipelineConfig& cfg) {
    if (!in_d3(x, y, z)) throw RegionError("check_pentagon: point outside D^3");
    PentagonReport rep;
    rep.a = a;
    rep.b = b;
    rep.c = c;
    rep.d = d;
    rep.x = x;
    rep.y = y;
    rep.z = z;
    rep.values = pentagon_values(a, b, c, d, x, y, z, cfg.grade_cutoff);
    rep.max_pair_dev = rep.values.max_pair_dev();
    double scale = std::abs(rep.values.oracle);
    double worst = 0;
    for (Complex v : {rep.values.a_b_cd, rep.values.a_bc_d, rep.values.abc_d,
                      rep.values.ab_c_d, rep.values.ab_cd})
        worst = std::max(worst, std::abs(v - rep.values.oracle));
    rep.dev_oracle = scale > 0 ? worst / scale : worst;
    rep.pass = rep.max_pair_dev <= cfg.tol_check && rep.dev_oracle <= cfg.tol_check;
    return rep;
}

} // namespace boxtimes
