#pragma once

#include "boxtimes/fuchsian.hpp"
#include "boxtimes/heisenberg.hpp"
#include "boxtimes/logseries.hpp"

#include <map>
#include <memory>
#include <unordered_map>

namespace boxtimes {

/// Normalization of a correlator symbol: G^{:y} = F y^{gr234},
/// G^{:x-y} = F (x-y)^{gr234}, or the raw F itself.
enum class Flavor { y_norm, xmy_norm, plain };

/// Which composition the symbols refer to. Both chains satisfy the same
/// Borcherds identities with the same coefficients; only the binomial
/// expansion of those coefficients differs (iota_{x,y} on the A-chain,
/// iota_{y,x-y} on the B-chain).
enum class Chain { a_side, b_side };

struct TermKey {
    BasisQuadruple q;
    int h = 0, k = 0;
    friend bool operator<(const TermKey& a, const TermKey& b) {
        if (!(a.q == b.q)) return a.q < b.q;
        return std::tie(a.h, a.k) < std::tie(b.h, b.k);
    }
};

/// Finite combination of correlator symbols F_{h,k}(xi) (or their normalized
/// G versions) with coefficients in the two-variable monomial ring.
class LinearCombination {
public:
    LinearCombination() = default;
    explicit LinearCombination(Flavor f) : flavor_(f) {}

    Flavor flavor() const { return flavor_; }
    const std::map<TermKey, MonomialSeries2>& terms() const { return t_; }
    bool empty() const { return t_.empty(); }

    void add(const TermKey& key, const MonomialSeries2& coeff);
    /// this += other * (scalar * var^{shift}) with var chosen by the flavor
    void add_scaled(const LinearCombination& other, const Scalar& c, int h, int k);

private:
    Flavor flavor_ = Flavor::plain;
    std::map<TermKey, MonomialSeries2> t_;
};

/// Basis data for the differential systems: J_N x P~_A x P~_B x P~_C with
/// optional rescalings of the dual and P_C vectors (admissible basis changes
/// whose effect on the connection spectra is tested, not assumed).
struct QuadBasis {
    int n_cap = 0;
    std::vector<std::pair<int, int>> theta; // (grade, idx) in the target dual
    std::vector<Scalar> theta_scale;
    std::vector<std::pair<int, int>> pa, pb, pc; // P~ lists; must contain P
    std::vector<Scalar> pc_scale;

    int size() const { return int(theta.size() * pa.size() * pb.size() * pc.size()); }
};

QuadBasis default_quad_basis(const FockTriple& t, int n_cap, bool enlarge = true);

struct ReduceStats {
    long steps = 0;
    long expansions = 0;
    bool grade_monotone = true; // every rewrite strictly lowered the total grade
};

/// Borcherds-identity reduction engine over a concrete module triple:
/// expresses correlator symbols with C1 elements in coordinates 2-4 as
/// combinations over the complement basis, and assembles the connection
/// matrices of the two Fuchsian systems in x-y and y.
class Rewriter {
public:
    Rewriter(std::shared_ptr<const FockTriple> triple, int coeff_order = 64, int k1 = 0,
             int k2 = 0);

    const FockTriple& triple() const { return *triple_; }
    int coeff_order() const { return coeff_order_; }
    const ReduceStats& stats() const { return stats_; }
    void reset_stats() { stats_ = {}; }

    bool is_basis(const BasisQuadruple& q) const;

    /// RHS of the Borcherds identity for F(alpha_n^{[slot]} xi) (slot 1 means
    /// the adjoint (alpha_n)* acting on theta). Coefficients are expanded per
    /// `side`; `flavor` plain returns the raw identity, normalized flavors are
    /// only meaningful on the n = -1 reduction path.
    LinearCombination borcherds_expand(int slot, long n, const VoaElem& alpha,
                                       const BasisQuadruple& xi, Chain side,
                                       Flavor flavor = Flavor::plain) const;

    /// Iterated reduction of G_{0,0}(xi) onto quadruples with all module
    /// coordinates in the designated complements. Cached per (xi, flavor).
    const LinearCombination& reduce_to_basis(const BasisQuadruple& xi, Flavor flavor) const;

    /// Row combination of the differential system for G_{h,k}(xi):
    /// the L(-1) reduction term, the gr234 diagonal term and the log-index
    /// shift term, i.e. everything multiplying 1/y (flavor y) or 1/(x-y0)
    /// (flavor x-y) in d/dvar G.
    LinearCombination derivative_recursion(const BasisQuadruple& xi, int h, int k,
                                           Flavor flavor) const;

    /// Connection matrix Lambda^{34}(x0, y) (flavor y; series in y) or
    /// Lambda^{23}(x, y0) (flavor x-y; series in x-y0) over the given basis.
    /// An exact basepoint yields exact matrix entries.
    MatrixSeries connection_matrix(const QuadBasis& basis, Flavor flavor,
                                   const Scalar& basepoint, int order) const;

    /// Eigenvalues of a constant connection matrix, canonicalized mod Z.
    ExponentSet exponent_set(const Mat& lambda0, double tol = 1e-9) const;

    /// Band-aligned point evaluation: both a single normalized symbol and a
    /// reduced combination, summing exactly the y-exponent window
    /// [min, bc + y_cap]. On this window the reduction identities are exact,
    /// so the two evaluations agree to rounding.
    Complex eval_g(const BasisQuadruple& q, Complex x, Complex y, int y_cap) const;
    Complex eval_combination(const LinearCombination& lc, Complex x, Complex y,
                             int y_cap) const;

    const GradedModule& module_of_slot(int slot) const;

private:
    struct QuadHash {
        size_t operator()(const std::pair<uint64_t, uint64_t>& k) const {
            return std::hash<uint64_t>()(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
        }
    };
    static std::pair<uint64_t, uint64_t> quad_key(const BasisQuadruple& q, Flavor f);

    void expand_monomial(LinearCombination& out, const TermKey& key, const Scalar& c,
                         long px, long py, long pe, Chain side, Flavor flavor) const;
    void apply_identity(LinearCombination& out, int slot, long n, const VoaElem& alpha,
                        const BasisQuadruple& xi, Chain side, Flavor flavor,
                        const MonomialSeries2& base) const;

    std::shared_ptr<const FockTriple> triple_;
    int coeff_order_;
    int k1_, k2_;
    mutable std::unordered_map<std::pair<uint64_t, uint64_t>, LinearCombination, QuadHash>
        reduce_cache_;
    mutable ReduceStats stats_;
};

} // namespace boxtimes
