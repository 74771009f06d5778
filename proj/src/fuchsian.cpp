#include "boxtimes/fuchsian.hpp"

#include <algorithm>
#include <cmath>

namespace boxtimes {

Mat MatrixSeries::eval(Complex dz) const {
    Mat m(r, r);
    Complex p(1.0, 0.0);
    for (const Mat& a : coeff) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (!a(i, j).is_zero()) m(i, j) += Scalar(a(i, j).approx() * p);
        p *= dz;
    }
    return m;
}

MatrixSeries operator+(const MatrixSeries& a, const MatrixSeries& b) {
    if (a.r != b.r) throw MathError("MatrixSeries: size mismatch");
    MatrixSeries s(a.r, a.z0, std::min(a.radius, b.radius),
                   std::min(a.order(), b.order()));
    for (int k = 0; k <= s.order(); ++k) s.coeff[k] = a.coeff[k] + b.coeff[k];
    return s;
}

MatrixSeries operator*(const MatrixSeries& a, const MatrixSeries& b) {
    if (a.r != b.r) throw MathError("MatrixSeries: size mismatch");
    MatrixSeries s(a.r, a.z0, std::min(a.radius, b.radius),
                   std::min(a.order(), b.order()));
    for (int k = 0; k <= s.order(); ++k)
        for (int i = 0; i <= k; ++i) s.coeff[k] += a.coeff[i] * b.coeff[k - i];
    return s;
}

MatrixSeries MatrixSeries::derived_times_z() const {
    MatrixSeries s(r, z0, radius, order());
    for (int k = 1; k <= order(); ++k) s.coeff[k] = Scalar(long(k)) * coeff[k];
    return s;
}

MatrixSeries MatrixSeries::truncated(int order_) const {
    MatrixSeries s(r, z0, radius, order_);
    for (int k = 0; k <= std::min(order_, order()); ++k) s.coeff[k] = coeff[k];
    return s;
}

Mat FundamentalSolutionSet::eval(Complex dz) const {
    int n = size();
    Mat m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = Scalar(columns[j][i].eval(dz).value);
    return m;
}

DunfordPair dunford(const Mat& a0, const SpectralOptions& opt) {
    JordanForm jf = jordan_decompose(a0, opt);
    int n = a0.rows();
    Mat d(n, n);
    int pos = 0;
    for (const auto& blk : jf.blocks) {
        for (int i = 0; i < blk.size; ++i) d(pos + i, pos + i) = blk.lambda;
        pos += blk.size;
    }
    DunfordPair p;
    p.s = jf.q * d * jf.q_inv;
    p.n = a0 - p.s;
    p.degraded = jf.spec.degraded;
    return p;
}

FundamentalSolutionSet euler_fundamental(const Mat& a0, const Scalar& z0,
                                         const SpectralOptions& opt, int order,
                                         int log_cap) {
    const int n = a0.rows();
    JordanForm jf = jordan_decompose(a0, opt);
    if (log_cap < 0) log_cap = n;
    FundamentalSolutionSet fs;
    fs.z0 = z0;
    fs.radius = std::numeric_limits<double>::infinity();
    int col0 = 0;
    for (const auto& blk : jf.blocks) {
        Exponent lam = Exponent::from_scalar(blk.lambda);
        long off = 0;
        fs.ladder.insert(lam, off);
        // z^J on one block: column t of e^{N log z} has entries log^{t-i}/ (t-i)!
        for (int t = 0; t < blk.size; ++t) {
            std::vector<LogPowerSeries> column(
                n, LogPowerSeries(fs.var, order, log_cap, opt.cluster_tol));
            for (int i = 0; i <= t; ++i) {
                // block-local row (col0+i) carries log^{t-i}(z) / (t-i)!
                Scalar c = Scalar(1L) / Scalar(factorial_rat(t - i));
                for (int row = 0; row < n; ++row) {
                    Scalar qv = jf.q(row, col0 + i);
                    if (qv.is_zero()) continue;
                    column[row].add_term(lam, t - i, qv * c);
                }
            }
            fs.columns.push_back(std::move(column));
        }
        col0 += blk.size;
    }
    return fs;
}

Mat shift_l(const Mat& b0s, const SpectralOptions& opt) {
    JordanForm jf = jordan_decompose(b0s, opt);
    const int n = b0s.rows();
    Mat d(n, n);
    int pos = 0;
    for (const auto& blk : jf.blocks) {
        if (blk.size != 1)
            throw MathError("shift_l: input is not semisimple");
        Scalar lam = blk.lambda;
        long l;
        if (lam.exact()) {
            l = long(rational_floor(lam.rat().re).template convert_to<long>());
        } else {
            double re = lam.approx().real();
            double snapped = std::round(re);
            if (std::abs(re - snapped) < opt.cluster_tol) re = snapped;
            l = long(std::floor(re));
        }
        d(pos, pos) = Scalar(l);
        ++pos;
    }
    return jf.q * d * jf.q_inv;
}

namespace {

// Spectral layout of the Jordan basis: for each column, the cluster index.
std::vector<int> cluster_of_column(const JordanForm& jf, const SpectralOptions& opt) {
    std::vector<int> cl;
    for (const auto& blk : jf.blocks) {
        int ci = -1;
        for (int i = 0; i < int(jf.spec.clusters.size()); ++i) {
            if (std::abs(jf.spec.clusters[i].lambda.approx() - blk.lambda.approx()) <=
                2 * opt.cluster_tol * std::max(1.0, std::abs(blk.lambda.approx())) ) {
                ci = i;
                break;
            }
        }
        if (ci < 0) throw MathError("to_levelt: Jordan block without spectral cluster");
        for (int i = 0; i < blk.size; ++i) cl.push_back(ci);
    }
    return cl;
}

} // namespace

LeveltSystem to_levelt(const MatrixSeries& a, const SpectralOptions& opt) {
    const int n = a.r;
    const int order = a.order();
    LeveltSystem out;
    out.a0_jordan = jordan_decompose(a.a0(), opt);
    const JordanForm& jf = out.a0_jordan;
    std::vector<int> col_cluster = cluster_of_column(jf, opt);

    // integer eigenvalue differences lambda_I - lambda_J = k decide resonance
    const auto& cls = jf.spec.clusters;
    auto diff_integer = [&](int i, int j) -> std::optional<long> {
        Exponent di = Exponent::from_scalar(cls[i].lambda);
        Exponent dj = Exponent::from_scalar(cls[j].lambda);
        return di.integer_difference(dj, opt.cluster_tol);
    };

    // work in the Jordan coordinates of A0
    std::vector<Mat> at(order + 1);
    for (int k = 0; k <= order; ++k) at[k] = jf.q_inv * a.coeff[k] * jf.q;
    Mat j0 = jf.j_matrix();
    Mat n0 = j0; // nilpotent part in Jordan coordinates
    for (int i = 0; i < n; ++i) n0(i, i) = Scalar(0L);

    std::vector<Mat> bt(order + 1, Mat(n, n)), dt(order + 1, Mat(n, n));
    bt[0] = j0;
    dt[0] = Mat::identity(n);

    for (int k = 1; k <= order; ++k) {
        // defect R_k = sum_{i=1..k} A_i D_{k-i} - sum_{i=1..k-1} D_{k-i} B_i
        Mat rk(n, n);
        for (int i = 1; i <= k; ++i) rk += at[i] * dt[k - i];
        for (int i = 1; i < k; ++i) rk -= dt[k - i] * bt[i];

        Mat bk(n, n), dk(n, n);
        for (int ci = 0; ci < int(cls.size()); ++ci) {
            for (int cj = 0; cj < int(cls.size()); ++cj) {
                auto d = diff_integer(ci, cj);
                bool resonant = d && *d == k;
                // gather the (ci, cj) block
                if (resonant) {
                    for (int r_ = 0; r_ < n; ++r_)
                        for (int c_ = 0; c_ < n; ++c_)
                            if (col_cluster[r_] == ci && col_cluster[c_] == cj)
                                bk(r_, c_) = rk(r_, c_);
                } else {
                    // solve (k - (li - lj)) X - (N_i X - X N_j) = R block by a
                    // terminating Neumann iteration in the nilpotent part
                    Scalar denom = Scalar(long(k)) -
                                   (cls[ci].lambda - cls[cj].lambda);
                    Mat rblk(n, n);
                    bool nonzero = false;
                    for (int r_ = 0; r_ < n; ++r_)
                        for (int c_ = 0; c_ < n; ++c_)
                            if (col_cluster[r_] == ci && col_cluster[c_] == cj &&
                                !rk(r_, c_).is_zero()) {
                                rblk(r_, c_) = rk(r_, c_);
                                nonzero = true;
                            }
                    if (!nonzero) continue;
                    Scalar inv = Scalar(1L) / denom;
                    Mat x(n, n);
                    Mat term = inv * rblk;
                    for (int it = 0; it <= 2 * n; ++it) {
                        x += term;
                        Mat adn = n0 * term - term * n0;
                        bool z = true;
                        for (int r_ = 0; r_ < n && z; ++r_)
                            for (int c_ = 0; c_ < n && z; ++c_)
                                if (!adn(r_, c_).is_zero()) z = false;
                        if (z) break;
                        term = inv * adn;
                    }
                    for (int r_ = 0; r_ < n; ++r_)
                        for (int c_ = 0; c_ < n; ++c_)
                            if (col_cluster[r_] == ci && col_cluster[c_] == cj)
                                dk(r_, c_) += x(r_, c_);
                }
            }
        }
        bt[k] = bk;
        dt[k] = dk;
    }

    out.b = MatrixSeries(n, a.z0, a.radius, order);
    out.gauge = MatrixSeries(n, a.z0, a.radius, order);
    for (int k = 0; k <= order; ++k) {
        out.b.coeff[k] = jf.q * bt[k] * jf.q_inv;
        out.gauge.coeff[k] = jf.q * dt[k] * jf.q_inv;
    }
    out.b0_dunford = dunford(out.b.a0(), opt);
    out.shift = shift_l(out.b0_dunford.s, opt);
    return out;
}

std::vector<LogPowerSeries> apply_series_matrix(const MatrixSeries& a,
                                                const std::vector<LogPowerSeries>& v) {
    std::vector<LogPowerSeries> out;
    out.reserve(v.size());
    for (int i = 0; i < a.r; ++i) {
        LogPowerSeries acc = v[0] * Scalar(0L);
        for (int k = 0; k <= a.order(); ++k)
            for (int j = 0; j < a.r; ++j) {
                const Scalar& c = a.coeff[k](i, j);
                if (c.is_zero()) continue;
                acc += v[j].shift(Exponent(long(k))) * c;
            }
        out.push_back(std::move(acc));
    }
    return out;
}

FundamentalSolutionSet fuchsian_solve(const MatrixSeries& a, int order,
                                      const SpectralOptions& opt) {
    LeveltSystem lv = to_levelt(a.truncated(order), opt);
    const int n = a.r;

    // The Levelt coefficient is a polynomial: B_k = 0 beyond the largest
    // integer spectral spread. If the requested order cannot contain it the
    // resonant ladders were not separated.
    long max_diff = 0;
    const auto& cls = lv.a0_jordan.spec.clusters;
    for (size_t i = 0; i < cls.size(); ++i)
        for (size_t j = 0; j < cls.size(); ++j) {
            auto d = Exponent::from_scalar(cls[i].lambda)
                         .integer_difference(Exponent::from_scalar(cls[j].lambda),
                                             opt.cluster_tol);
            if (d && *d > max_diff) max_diff = *d;
        }
    if (max_diff > order)
        throw MathError("fuchsian_solve: truncation order too small to separate "
                        "resonant ladders");

    // Euler reduction: tilde Y = z^{-L} Y satisfies dY = (B(1)-L)/z Y
    Mat b1(n, n);
    for (const Mat& bk : lv.b.coeff) b1 += bk;
    Mat c = b1 - lv.shift;

    FundamentalSolutionSet euler = euler_fundamental(c, a.z0, opt, order, n);

    // multiply by z^L: decompose L into integer eigenprojections
    JordanForm ljf = jordan_decompose(lv.shift, opt);
    std::vector<long> lvals;
    for (const auto& blk : ljf.blocks) {
        double lv_ = blk.lambda.approx().real();
        lvals.push_back(long(std::llround(lv_)));
    }

    FundamentalSolutionSet fs;
    fs.z0 = a.z0;
    fs.radius = a.radius;
    fs.var = euler.var;
    for (int colj = 0; colj < n; ++colj) {
        // coordinates of the Euler column in the L eigenbasis
        std::vector<LogPowerSeries> comp = euler.columns[colj];
        std::vector<LogPowerSeries> coords;
        for (int i = 0; i < n; ++i) {
            LogPowerSeries acc = comp[0] * Scalar(0L);
            for (int j = 0; j < n; ++j) {
                const Scalar& c_ = ljf.q_inv(i, j);
                if (!c_.is_zero()) acc += comp[j] * c_;
            }
            coords.push_back(std::move(acc));
        }
        std::vector<LogPowerSeries> shifted;
        for (int i = 0; i < n; ++i) {
            LogPowerSeries acc = comp[0] * Scalar(0L);
            for (int jb = 0; jb < n; ++jb) {
                const Scalar& c_ = ljf.q(i, jb);
                if (!c_.is_zero())
                    acc += coords[jb].shift(Exponent(lvals[jb])) * c_;
            }
            shifted.push_back(std::move(acc));
        }
        fs.columns.push_back(apply_series_matrix(lv.gauge, shifted));
    }
    for (const auto& col : fs.columns)
        for (const auto& s : col)
            for (int i = 0; i < s.exponents().size(); ++i) {
                long off;
                fs.ladder.insert(s.exponents().base(i), off);
            }
    return fs;
}

double residual(const MatrixSeries& a, const FundamentalSolutionSet& y) {
    double worst = 0;
    for (const auto& col : y.columns) {
        std::vector<LogPowerSeries> ay = apply_series_matrix(a, col);
        for (size_t i = 0; i < col.size(); ++i) {
            LogPowerSeries def = col[i].theta() - ay[i];
            // bands above the data order are incomplete; skip them
            long complete = std::min(long(a.order()), long(col[i].order()));
            for (const auto& [key, v] : def.terms()) {
                if (std::get<1>(key) <= complete) worst = std::max(worst, v.abs());
            }
        }
    }
    return worst;
}

MatrixSeries gauge_transform(const MatrixSeries& a, const MatrixSeries& delta) {
    // solve Delta B = A Delta - z Delta' order by order
    const int n = a.r;
    int order = std::min(a.order(), delta.order());
    MatrixSeries rhs = a * delta;
    MatrixSeries zd = delta.derived_times_z();
    MatrixSeries b(n, a.z0, std::min(a.radius, delta.radius), order);
    Mat d0inv = inverse(delta.coeff[0]);
    for (int k = 0; k <= order; ++k) {
        Mat acc = rhs.coeff[k] - zd.coeff[k];
        for (int i = 1; i <= k; ++i) acc -= delta.coeff[i] * b.coeff[k - i];
        b.coeff[k] = d0inv * acc;
    }
    return b;
}

} // namespace boxtimes
