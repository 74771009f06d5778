#pragma once

#include "boxtimes/rewriter.hpp"

namespace boxtimes {

/// Vector of normalized correlator components over J_N x K^2, expandable and
/// evaluable in the convergent mode-sum regime. Flavor y stores series in y
/// (at fixed x0); flavor x-y stores the |y0| < |x| expansions as series in
/// 1/x (at fixed y0), which is the natural variable of the mode sums there.
struct GVector {
    Flavor flavor = Flavor::y_norm;
    Complex basepoint; // x0 for flavor y, y0 for flavor x-y
    std::vector<TermKey> index;
    std::vector<Scalar> scale;
    std::vector<LogPowerSeries> components;
    std::vector<int> gr234;

    int size() const { return int(index.size()); }
    Complex eval_at(int i, Complex xy_var) const;
    int position(const TermKey& key) const;
};

GVector build_gvector(const Rewriter& rw, const QuadBasis& basis, Flavor flavor,
                      Complex basepoint, int band_cap);

struct ConnectionResult {
    std::vector<Complex> c;
    double solve_residual = 0; // |Phi(x1) c - g| / |g|
    double match_deviation = 0; // against the cross-check point
    Complex x1, x1b;
};

/// Match the mode-sum G-vector against the fundamental solutions at a point of
/// the overlap region; cross-checked at a second point.
ConnectionResult solve_connection(const GVector& g, const FundamentalSolutionSet& phi,
                                  Complex x1, Complex x1b, double tol);

/// Principal-branch expansion of one correlator component around x = y0:
/// the (4.5)-shaped series in x-y0 with the exponent-ladder certificate.
struct BranchAssembly {
    LogPowerSeries series; // variable x-y0
    Complex y0;
    int gr234 = 0;
    bool ladder_ok = true;
};

BranchAssembly assemble_principal_branch(const FundamentalSolutionSet& phi,
                                         const std::vector<Complex>& c,
                                         const GVector& g, const BasisQuadruple& xi0,
                                         const ExponentSet& delta_prime, Complex y0,
                                         int max_gr_pc, int log_x_order);

struct PipelineConfig {
    int grade_cutoff = 12;  // G_max
    int series_order = 24;  // M
    int coeff_order = 64;
    int n_cap = 0;          // dual-grade window for the differential system
    bool enlarge_basis = true;
    double tol_connection = 1e-8;
    double eig_cluster_tol = 1e-9;
    double rank_tol = 1e-8;
    double tol_check = 1e-6;
};

struct AssocPoint {
    Complex x, y;
    Complex f_pipeline, f_direct, f_closed;
    double rel_dev_sides = 0;  // pipeline vs direct composition
    double rel_dev_closed = 0; // worst of both against the closed form
    double tail_estimate = 0;
    double connection_residual = 0;
    double match_deviation = 0;
    std::vector<Complex> exponent_ladder;
};

struct AssocReport {
    Rational a, b, c;
    std::vector<AssocPoint> points;
    double max_rel_dev_sides = 0;
    double max_rel_dev_closed = 0;
    bool pass = false;
};

/// Thm-4.1-style check: the A(BC)-side correlator is carried across the
/// connection problem to the x = y expansion and compared, at each point of
/// D^2, against the direct (AB)C-side composition and the closed form.
AssocReport check_associativity(const Rational& a, const Rational& b, const Rational& c,
                                const std::vector<std::pair<Complex, Complex>>& points,
                                const PipelineConfig& cfg);

struct PentagonReport {
    Rational a, b, c, d;
    Complex x, y, z;
    PentagonValues values;
    double max_pair_dev = 0;
    double dev_oracle = 0;
    bool pass = false;
};

PentagonReport check_pentagon(const Rational& a, const Rational& b, const Rational& c,
                              const Rational& d, Complex x, Complex y, Complex z,
                              const PipelineConfig& cfg);

} // namespace boxtimes
