#pragma once

#include "boxtimes/logseries.hpp"
#include "boxtimes/smatrix.hpp"

#include <vector>

namespace boxtimes {

/// Holomorphic coefficient A(z) = sum_k A_k (z-z0)^k of a Fuchsian system
/// dY/dz = A(z)/(z-z0) Y, with a declared radius of convergence.
struct MatrixSeries {
    int r = 0;
    Scalar z0;
    double radius = 1.0;
    std::vector<Mat> coeff; // A_0 .. A_M

    MatrixSeries() = default;
    MatrixSeries(int r_, Scalar z0_, double radius_, int order)
        : r(r_), z0(std::move(z0_)), radius(radius_), coeff(size_t(order) + 1, Mat(r_, r_)) {}

    int order() const { return int(coeff.size()) - 1; }
    const Mat& a0() const { return coeff[0]; }
    Mat eval(Complex dz) const; // value at z = z0 + dz

    friend MatrixSeries operator+(const MatrixSeries& a, const MatrixSeries& b);
    friend MatrixSeries operator*(const MatrixSeries& a, const MatrixSeries& b);
    MatrixSeries derived_times_z() const; // z * d/dz applied termwise
    MatrixSeries truncated(int order) const;
};

struct DunfordPair {
    Mat s, n;
    bool degraded = false; // eigenvalue clusters near resolution
};

/// Fuchsian system in Levelt normal form together with the holomorphic gauge
/// that produced it: z dDelta/dz = A Delta - Delta B, Delta(0) invertible,
/// ad(B_{0,s}) B_k = k B_k, and the integer-spectrum shift L.
struct LeveltSystem {
    MatrixSeries b;
    MatrixSeries gauge;
    Mat shift; // L
    JordanForm a0_jordan;
    DunfordPair b0_dunford;
};

/// Fundamental solution columns, each a vector of log-power series in the
/// local variable z - z0 with exponents on the ladders d_j - l_j + l_i + m.
struct FundamentalSolutionSet {
    std::vector<std::vector<LogPowerSeries>> columns;
    ExponentSet ladder{1e-9};
    Scalar z0;
    double radius = 1.0;
    std::string var = "z";

    int size() const { return int(columns.size()); }
    /// Value matrix Phi(z0 + dz); column j evaluates to column j.
    Mat eval(Complex dz) const;
};

DunfordPair dunford(const Mat& a0, const SpectralOptions& opt = {});

/// Fundamental solution of the Euler system dY/dz = A0/(z-z0) Y: columns
/// (z-z0)^a e^{N log(z-z0)} per Jordan block, conjugated by the Jordan basis.
FundamentalSolutionSet euler_fundamental(const Mat& a0, const Scalar& z0,
                                         const SpectralOptions& opt = {}, int order = 0,
                                         int log_cap = -1);

/// Unique integer-spectrum semisimple L commuting with b0s such that every
/// eigenvalue mu of b0s - L has Re(mu) in [0,1).
Mat shift_l(const Mat& b0s, const SpectralOptions& opt = {});

/// Holomorphic gauge to Levelt normal form, built order by order: resonant
/// parts of the defect feed B_k, the rest inverts ad(A0) - k.
LeveltSystem to_levelt(const MatrixSeries& a, const SpectralOptions& opt = {});

FundamentalSolutionSet fuchsian_solve(const MatrixSeries& a, int order,
                                      const SpectralOptions& opt = {});

/// max |coefficient| of z Y' - A Y over all columns through the common order.
double residual(const MatrixSeries& a, const FundamentalSolutionSet& y);

/// B with z dDelta/dz = A Delta - Delta B, i.e. the coefficient after the
/// holomorphic gauge Delta (Delta_0 invertible).
MatrixSeries gauge_transform(const MatrixSeries& a, const MatrixSeries& delta);

std::vector<LogPowerSeries> apply_series_matrix(const MatrixSeries& a,
                                                const std::vector<LogPowerSeries>& v);

} // namespace boxtimes
