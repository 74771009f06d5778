#include "boxtimes/smatrix.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace boxtimes {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Scalar(1L);
    return m;
}

bool Mat::all_exact() const {
    return std::all_of(a_.begin(), a_.end(), [](const Scalar& s) { return s.exact(); });
}

Mat Mat::transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::conj_transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j).conj();
    return t;
}

double Mat::norm_inf() const {
    double m = 0;
    for (const Scalar& s : a_) m = std::max(m, s.abs());
    return m;
}

Mat Mat::operator-() const {
    Mat m(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = -a_[i];
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    Mat m = a;
    m += b;
    return m;
}

Mat operator-(const Mat& a, const Mat& b) {
    Mat m = a;
    m -= b;
    return m;
}

Mat& Mat::operator+=(const Mat& b) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& b) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw MathError("Mat: dimension mismatch in product");
    Mat m(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Scalar& aik = a(i, k);
            if (aik.is_zero()) continue;
            for (int j = 0; j < b.cols(); ++j) {
                if (b(k, j).is_zero()) continue;
                m(i, j) += aik * b(k, j);
            }
        }
    return m;
}

Mat operator*(const Scalar& s, const Mat& a) {
    Mat m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = s * a(i, j);
    return m;
}

std::vector<Scalar> Mat::col(int j) const {
    std::vector<Scalar> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Mat::set_col(int j, const std::vector<Scalar>& v) {
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

std::vector<Scalar> mat_vec(const Mat& a, const std::vector<Scalar>& v) {
    std::vector<Scalar> out(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!a(i, j).is_zero() && !v[j].is_zero()) out[i] += a(i, j) * v[j];
    return out;
}

int row_reduce(Mat& m, double tol_abs, std::vector<int>* pivot_cols) {
    int rank = 0;
    int rows = m.rows(), cols = m.cols();
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        double best = tol_abs;
        for (int i = rank; i < rows; ++i) {
            double v = m(i, col).abs();
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = 0; j < cols; ++j) std::swap(m(rank, j), m(piv, j));
        Scalar inv = Scalar(1L) / m(rank, col);
        for (int j = col; j < cols; ++j) m(rank, j) *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == rank || m(i, col).is_zero()) continue;
            Scalar f = m(i, col);
            for (int j = col; j < cols; ++j) m(i, j) -= f * m(rank, j);
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

std::vector<std::vector<Scalar>> kernel(const Mat& m, double tol_abs) {
    Mat red = m;
    std::vector<int> piv;
    int rank = row_reduce(red, tol_abs, &piv);
    std::vector<bool> is_piv(m.cols(), false);
    for (int c : piv) is_piv[c] = true;
    std::vector<std::vector<Scalar>> basis;
    for (int free = 0; free < m.cols(); ++free) {
        if (is_piv[free]) continue;
        std::vector<Scalar> v(m.cols());
        v[free] = Scalar(1L);
        for (int k = 0; k < rank; ++k) v[piv[k]] = -red(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

Mat solve(const Mat& m, const Mat& rhs) {
    if (m.rows() != m.cols() || m.rows() != rhs.rows())
        throw MathError("solve: dimension mismatch");
    int n = m.rows(), k = rhs.cols();
    Mat aug(n, n + k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        for (int j = 0; j < k; ++j) aug(i, n + j) = rhs(i, j);
    }
    std::vector<int> piv;
    int rank = row_reduce(aug, 0.0, &piv);
    if (rank < n || piv[n - 1] >= n) throw MathError("solve: singular matrix");
    Mat x(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) x(i, j) = aug(i, n + j);
    return x;
}

std::vector<Scalar> solve(const Mat& m, const std::vector<Scalar>& rhs) {
    Mat b(m.rows(), 1);
    for (int i = 0; i < m.rows(); ++i) b(i, 0) = rhs[i];
    return solve(m, b).col(0);
}

Mat inverse(const Mat& m) { return solve(m, Mat::identity(m.rows())); }

Scalar determinant(Mat m) {
    if (m.rows() != m.cols()) throw MathError("determinant: not square");
    int n = m.rows();
    Scalar det(1L);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        double best = 0.0;
        for (int i = col; i < n; ++i) {
            double v = m(i, col).abs();
            if (v > best || (piv < 0 && !m(i, col).is_zero())) {
                best = v;
                piv = i;
            }
        }
        if (piv < 0) return Scalar(0L);
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
            det = -det;
        }
        det *= m(col, col);
        Scalar inv = Scalar(1L) / m(col, col);
        for (int i = col + 1; i < n; ++i) {
            if (m(i, col).is_zero()) continue;
            Scalar f = m(i, col) * inv;
            for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
        }
    }
    return det;
}

std::vector<Complex> eigenvalues_numeric(const Mat& m) {
    int n = m.rows();
    Eigen::MatrixXcd em(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) em(i, j) = m(i, j).approx();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(em, false);
    if (es.info() != Eigen::Success) throw MathError("eigenvalue iteration failed");
    std::vector<Complex> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

namespace {

// det(A - lambda I) == 0, checked exactly.
bool verify_exact_eigenvalue(const Mat& m, const GaussRat& lambda) {
    Mat shifted = m;
    for (int i = 0; i < m.rows(); ++i) shifted(i, i) -= Scalar(lambda);
    return determinant(shifted).is_zero();
}

std::optional<GaussRat> snap_gauss(Complex z, double tol) {
    auto re = rationalize(z.real(), 1'000'000'000, tol);
    auto im = rationalize(z.imag(), 1'000'000'000, tol);
    if (!re || !im) return std::nullopt;
    return GaussRat(*re, *im);
}

} // namespace

Spectrum spectrum_of(const Mat& m, const SpectralOptions& opt) {
    double scale = std::max(1.0, m.norm_inf());
    double tol = opt.cluster_tol * scale;
    std::vector<Complex> ev = eigenvalues_numeric(m);

    // Greedy clustering; eigenvalues of a single matrix cluster transitively at
    // this tolerance for any sane input.
    std::vector<std::pair<Complex, int>> clusters;
    for (Complex v : ev) {
        bool found = false;
        for (auto& [rep, mult] : clusters) {
            if (std::abs(v - rep) <= 2 * tol) {
                rep = (rep * double(mult) + v) / double(mult + 1);
                ++mult;
                found = true;
                break;
            }
        }
        if (!found) clusters.push_back({v, 1});
    }

    Spectrum spec;
    bool exact_ok = opt.prefer_exact && m.all_exact();
    for (auto& [rep, mult] : clusters) {
        EigenCluster c;
        c.mult = mult;
        if (exact_ok) {
            auto snapped = snap_gauss(rep, std::max(opt.cluster_tol, 1e-7));
            if (snapped && verify_exact_eigenvalue(m, *snapped)) {
                c.lambda = Scalar(*snapped);
            } else {
                exact_ok = false;
                c.lambda = Scalar(rep);
            }
        } else {
            c.lambda = Scalar(rep);
        }
        spec.clusters.push_back(std::move(c));
    }
    if (exact_ok) {
        // a failed snap earlier in the loop leaves a mixed list; redo uniformly
        spec.certified_exact = true;
    } else if (opt.prefer_exact && m.all_exact()) {
        for (auto& c : spec.clusters)
            if (c.lambda.exact()) c.lambda = Scalar(c.lambda.approx());
    }

    // Degraded-precision flag: distinct clusters closer than 10x resolution.
    for (size_t i = 0; i < spec.clusters.size(); ++i)
        for (size_t j = i + 1; j < spec.clusters.size(); ++j)
            if (std::abs(spec.clusters[i].lambda.approx() - spec.clusters[j].lambda.approx()) <
                20 * tol)
                spec.degraded = true;

    std::sort(spec.clusters.begin(), spec.clusters.end(),
              [](const EigenCluster& a, const EigenCluster& b) {
                  Complex x = a.lambda.approx(), y = b.lambda.approx();
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() > y.imag();
              });
    return spec;
}

Mat JordanForm::j_matrix() const {
    Mat j(dim(), dim());
    int pos = 0;
    for (const Block& b : blocks) {
        for (int i = 0; i < b.size; ++i) {
            j(pos + i, pos + i) = b.lambda;
            if (i + 1 < b.size) j(pos + i, pos + i + 1) = Scalar(1L);
        }
        pos += b.size;
    }
    return j;
}

int JordanForm::dim() const {
    int n = 0;
    for (const Block& b : blocks) n += b.size;
    return n;
}

namespace {

Mat mat_pow(const Mat& m, int k) {
    Mat p = Mat::identity(m.rows());
    for (int i = 0; i < k; ++i) p = p * m;
    return p;
}

// Rank of [fixed | candidate] treated column-wise.
int stacked_rank(const std::vector<std::vector<Scalar>>& cols, int n, double tol) {
    if (cols.empty()) return 0;
    Mat m(n, int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j) m.set_col(j, cols[j]);
    return row_reduce(m, tol);
}

} // namespace

JordanForm jordan_decompose(const Mat& m, const SpectralOptions& opt) {
    if (m.rows() != m.cols()) throw MathError("jordan_decompose: not square");
    const int n = m.rows();
    JordanForm jf;
    jf.spec = spectrum_of(m, opt);
    const bool exact = m.all_exact() && jf.spec.certified_exact;
    double scale = std::max(1.0, m.norm_inf());
    double tol = exact ? 0.0 : opt.rank_tol * scale;

    std::vector<std::vector<Scalar>> q_cols;
    for (const EigenCluster& cl : jf.spec.clusters) {
        Mat b = m;
        for (int i = 0; i < n; ++i) b(i, i) -= cl.lambda;

        // kernel dimension profile d_k = dim ker(B^k)
        std::vector<int> dims{0};
        std::vector<std::vector<std::vector<Scalar>>> kers;
        int kmax = 0;
        double ptol = tol;
        for (int k = 1; k <= n; ++k) {
            Mat bk = mat_pow(b, k);
            // powers of a float matrix grow; rescale the pivot threshold
            double pk = exact ? 0.0 : opt.rank_tol * std::max(1.0, bk.norm_inf());
            auto ker = kernel(bk, pk);
            ptol = pk;
            dims.push_back(int(ker.size()));
            kers.push_back(std::move(ker));
            kmax = k;
            if (dims[k] >= cl.mult) break;
            if (dims[k] == dims[k - 1])
                throw MathError("jordan_decompose: defective-precision input "
                                "(kernel profile stalled)");
        }
        if (dims[kmax] != cl.mult)
            throw MathError("jordan_decompose: generalized eigenspace dimension "
                            "does not match algebraic multiplicity");

        // number of blocks of size >= k
        std::vector<int> ge(kmax + 2, 0);
        for (int k = 1; k <= kmax; ++k) ge[k] = dims[k] - dims[k - 1];

        // Choose chain tops height by height (tallest first). Independence is
        // tracked at the eigenvector level: the bottoms B^{k-1} v of all chains
        // must be independent.
        std::vector<std::vector<Scalar>> bottoms;       // accumulated eigenvectors
        std::vector<std::pair<int, std::vector<Scalar>>> tops; // (height, top)
        for (int k = kmax; k >= 1; --k) {
            int want = ge[k] - ge[k + 1];
            if (want <= 0) continue;
            Mat bk1 = mat_pow(b, k - 1);
            for (const auto& cand : kers[k - 1]) {
                if (want == 0) break;
                std::vector<Scalar> bottom = mat_vec(bk1, cand);
                double bn = 0;
                for (const Scalar& s : bottom) bn = std::max(bn, s.abs());
                if (bn <= (exact ? 0.0 : std::sqrt(ptol))) continue; // height < k
                std::vector<Scalar> cand_scaled = cand;
                if (!exact && bn > 0) {
                    // rescale for conditioning of the independence test
                    Scalar inv(1.0 / bn);
                    for (Scalar& s : bottom) s *= inv;
                    for (Scalar& s : cand_scaled) s *= inv;
                }
                auto trial = bottoms;
                trial.push_back(bottom);
                if (stacked_rank(trial, n, exact ? 0.0 : opt.rank_tol) == int(trial.size())) {
                    bottoms.push_back(std::move(bottom));
                    tops.push_back({k, cand_scaled});
                    --want;
                }
            }
            if (want != 0)
                throw MathError("jordan_decompose: could not complete Jordan chains "
                                "(defective-precision input)");
        }

        // Emit chains bottom-to-top so that A q_i = lambda q_i + q_{i-1}.
        for (auto& [height, top] : tops) {
            std::vector<std::vector<Scalar>> chain(height);
            chain[height - 1] = top;
            for (int i = height - 2; i >= 0; --i) chain[i] = mat_vec(b, chain[i + 1]);
            for (auto& v : chain) q_cols.push_back(std::move(v));
            jf.blocks.push_back({cl.lambda, height});
        }
    }

    jf.q = Mat(n, n);
    for (int j = 0; j < n; ++j) jf.q.set_col(j, q_cols[j]);
    jf.q_inv = inverse(jf.q);
    return jf;
}

} // namespace boxtimes
