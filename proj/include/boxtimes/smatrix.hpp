#pragma once

#include "boxtimes/scalar.hpp"

#include <vector>

namespace boxtimes {

/// Dense matrix over Scalar. Deliberately small: the engine's matrices are
/// desk-scale (r <= a few hundred) and must support exact arithmetic, so the
/// structural algorithms live here rather than behind a float-only library.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}
    static Mat identity(int n);
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    int rows() const { return r_; }
    int cols() const { return c_; }
    Scalar& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
    const Scalar& operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    bool all_exact() const;
    Mat conj_transpose() const;
    Mat transpose() const;
    double norm_inf() const; // max |entry|

    Mat operator-() const;
    friend Mat operator+(const Mat& a, const Mat& b);
    friend Mat operator-(const Mat& a, const Mat& b);
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Mat operator*(const Scalar& s, const Mat& a);
    Mat& operator+=(const Mat& b);
    Mat& operator-=(const Mat& b);

    std::vector<Scalar> col(int j) const;
    void set_col(int j, const std::vector<Scalar>& v);

private:
    int r_ = 0, c_ = 0;
    std::vector<Scalar> a_;
};

std::vector<Scalar> mat_vec(const Mat& a, const std::vector<Scalar>& v);

struct SpectralOptions {
    double cluster_tol = 1e-9;  // eigenvalue equality / integer-difference detection
    double rank_tol = 1e-8;     // pivot threshold, relative to matrix scale
    bool prefer_exact = true;   // snap-and-verify exact eigenvalues on exact input
};

/// Row-reduce (Gaussian elimination, partial pivoting on |approx|) in place.
/// Returns the rank; pivot_cols receives the pivot column of each step.
int row_reduce(Mat& m, double tol_abs, std::vector<int>* pivot_cols = nullptr);

/// Basis of the null space of m (column vectors), via column-pivoted elimination.
std::vector<std::vector<Scalar>> kernel(const Mat& m, double tol_abs);

Mat inverse(const Mat& m);
std::vector<Scalar> solve(const Mat& m, const std::vector<Scalar>& rhs);
Mat solve(const Mat& m, const Mat& rhs);
Scalar determinant(Mat m);

/// One spectral cluster: a representative eigenvalue and its algebraic multiplicity.
struct EigenCluster {
    Scalar lambda;
    int mult = 0;
};

/// Clustered spectrum, sorted by descending Re, ties by descending Im.
/// `certified_exact` is set when every eigenvalue was verified exactly.
struct Spectrum {
    std::vector<EigenCluster> clusters;
    bool certified_exact = false;
    bool degraded = false; // eigenvalue cluster diameter near resolution
};

std::vector<Complex> eigenvalues_numeric(const Mat& m);
Spectrum spectrum_of(const Mat& m, const SpectralOptions& opt);

/// Jordan decomposition A = Q J Q^{-1}; J is encoded by `blocks` laid out in
/// column order of Q, each block upper bidiagonal (lambda on the diagonal,
/// ones on the superdiagonal).
struct JordanForm {
    struct Block {
        Scalar lambda;
        int size;
    };
    Mat q, q_inv;
    std::vector<Block> blocks;
    Spectrum spec;

    Mat j_matrix() const;
    int dim() const;
};

JordanForm jordan_decompose(const Mat& m, const SpectralOptions& opt);

} // namespace boxtimes
