#pragma once

#include "boxtimes/module.hpp"

#include <memory>
#include <unordered_map>

namespace boxtimes {

/// Integer partition, parts descending. Partitions index the oscillator basis
/// a_{-p1} a_{-p2} ... |momentum> of a Fock module.
struct Partition {
    std::vector<int> parts;

    int sum() const;
    int multiplicity(int part) const;
    Partition with_part(int p) const;    // insert one part
    Partition without_part(int p) const; // remove one occurrence (must exist)
    bool has_part(int p) const { return multiplicity(p) > 0; }
    bool empty() const { return parts.empty(); }
    friend bool operator==(const Partition& a, const Partition& b) {
        return a.parts == b.parts;
    }
};

/// Canonical enumeration of all partitions of each grade, shared process-wide.
class PartitionTable {
public:
    static const PartitionTable& instance();

    int count(int n) const; // p(n)
    const Partition& at(int n, int idx) const;
    int index_of(const Partition& p) const;
    static int pack(int grade, int idx) { return grade * (1 << 16) + idx; }

private:
    PartitionTable();
    std::vector<std::vector<Partition>> table_;
    std::unordered_map<std::string, int> index_;
};

/// Rank-1 free-boson Fock module of rational momentum: basis indexed by
/// partitions, weight a^2/2 + |lambda|, C1-complement the highest-weight
/// vector. Oscillators obey [a_m, a_n] = m delta_{m+n,0}, a_0 = momentum.
class FockModule : public GradedModule {
public:
    FockModule(Rational momentum, int cutoff);

    const Rational& momentum() const { return mom_; }
    int cutoff() const override { return cutoff_; }
    int dim(int grade) const override;
    Rational weight_offset() const override { return mom_ * mom_ / 2; }

    GradeVec oscillator(long n, int grade, int idx) const; // a_n
    GradeVec oscillator(long n, const GradeVec& v) const;
    GradeVec dual_oscillator(long n, int grade, int idx) const;
    GradeVec virasoro(long m, int grade, int idx) const; // L(m)
    GradeVec virasoro(long m, const GradeVec& v) const;
    GradeVec dual_virasoro(long m, int grade, int idx) const;

    GradeVec mode_action(const VoaElem& alpha, long j, int grade, int idx) const override;
    GradeVec dual_mode_action(const VoaElem& alpha, long j, int grade,
                              int idx) const override;
    bool in_complement(int grade, int idx) const override;
    std::vector<C1Term> c1_rewrite(int grade, int idx) const override;

private:
    Rational mom_;
    int cutoff_;
};

/// Matrix coefficients of the free-boson intertwining operator
/// Y(v, z): F_b -> F_{a+b}, built from the normal-ordered exponential
/// E^-(a,z) E^+(a,z) e^a z^{a a_0} and normalized so the mode of degree
/// -ab-1 sends hw (x) hw to hw with coefficient 1 (so <hw', Y(hw,z) hw> = z^{ab}).
///
/// elem(mu, nu, la) is the scalar with
///   <theta_mu, Y(e_nu, z) e_la> = elem * z^{ab + |mu| - |nu| - |la|}.
class Intertwiner {
public:
    Intertwiner(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

    const Rational& left_momentum() const { return a_; }
    const Rational& right_momentum() const { return b_; }
    Rational target_momentum() const { return a_ + b_; }

    Scalar elem(const Partition& mu, const Partition& nu, const Partition& la) const;
    /// z-exponent carried by elem(mu, nu, la)
    Rational z_exponent(const Partition& mu, const Partition& nu,
                        const Partition& la) const;

private:
    Rational a_, b_;
    mutable std::unordered_map<uint64_t, Scalar> memo_;
};

/// Shared cache of intertwiners per momentum pair.
class IntertwinerCache {
public:
    const Intertwiner& get(const Rational& a, const Rational& b) const;

private:
    mutable std::map<std::pair<Rational, Rational>, std::unique_ptr<Intertwiner>> cache_;
};

/// x^{ac} y^{bc} (x-y)^{ab} under principal branches; requires 0<|y|<|x| off the cut.
Complex closed_form_4pt(const Rational& a, const Rational& b, const Rational& c, Complex x,
                        Complex y);

/// x^{ad} y^{bd} z^{cd} (x-y)^{ab} (x-z)^{ac} (y-z)^{bc}, principal branches.
Complex closed_form_5pt(const Rational& a, const Rational& b, const Rational& c,
                        const Rational& d, Complex x, Complex y, Complex z);

struct ModeSumResult {
    Complex value{0.0, 0.0};
    double tail = 0.0; // geometric estimate from the last retained band
};

/// Quadruple of homogeneous basis labels: theta in the restricted dual of the
/// iterated-fusion target, (v, u, w) in A, B, C.
struct BasisQuadruple {
    int tg = 0, ti = 0; // theta: grade, index
    int vg = 0, vi = 0;
    int ug = 0, ui = 0;
    int wg = 0, wi = 0;

    int gr234() const { return vg + ug + wg; }
    int total_grade() const { return tg + gr234(); }
    friend bool operator==(const BasisQuadruple& a, const BasisQuadruple& b) {
        return a.tg == b.tg && a.ti == b.ti && a.vg == b.vg && a.vi == b.vi &&
               a.ug == b.ug && a.ui == b.ui && a.wg == b.wg && a.wi == b.wi;
    }
    friend bool operator<(const BasisQuadruple& a, const BasisQuadruple& b);
};

/// The concrete A (x) (B (x) C) testbed: Fock modules of momenta (a, b, c),
/// the intermediate module F_{b+c} and target F_{a+b+c}.
struct FockTriple {
    Rational a, b, c;
    int cutoff;
    std::shared_ptr<FockModule> mod_a, mod_b, mod_c, mod_bc, mod_target;
    IntertwinerCache intertwiners;

    FockTriple(Rational a_, Rational b_, Rational c_, int cutoff_);

    /// <theta, Y1(v,x) Y2(u,y) w> summed over intermediate grades <= band_cap
    /// (band g carries y-exponent bc + gr(v) + g - |mu-part shifts|).
    ModeSumResult direct_mode_sum(const BasisQuadruple& q, Complex x, Complex y,
                                  int band_cap) const;
    /// <theta', Y^{(AB)C}(Y^{AB}(v,x-y)u, y) w>, the (x-y)-side composition.
    ModeSumResult direct_mode_sum_ab_c(const BasisQuadruple& q, Complex x, Complex y,
                                       int band_cap) const;
    Complex closed_form(Complex x, Complex y) const {
        return closed_form_4pt(a, b, c, x, y);
    }
};

/// Truncated intertwining-operator axioms (I1)-(I3), checked coefficient-wise
/// through the cutoff. Returns the largest violation found (0 in exact mode
/// when the axioms hold).
struct AxiomReport {
    double commutativity = 0; // (I1)
    double associativity = 0; // (I2)
    double derivative = 0;    // (I3)
    double max() const { return std::max({commutativity, associativity, derivative}); }
};

AxiomReport check_intertwiner_axioms(const Rational& a, const Rational& b,
                                     const VoaElem& alpha, int grade_cap);

/// The five bracketings of the five-point correlator of highest-weight vectors
/// at momenta (a,b,c,d), composed from two-step intertwiner expansions.
struct PentagonValues {
    Complex a_b_cd;   // <theta, Y(v,x) Y(u,y) Y(w,z) d>
    Complex a_bc_d;   // <theta, Y(v,x) Y(Y(u,y-z)w, z) d>
    Complex abc_d;    // <theta, Y(Y(v,x-z)Y(u,y-z)w, z) d>
    Complex ab_c_d;   // <theta, Y(Y(Y(v,x-y)u, y-z)w, z) d>
    Complex ab_cd;    // <theta, Y(Y(v,x-y)u, y) Y(w,z) d>
    Complex oracle;   // closed_form_5pt
    double max_pair_dev() const;
};

PentagonValues pentagon_values(const Rational& a, const Rational& b, const Rational& c,
                               const Rational& d, Complex x, Complex y, Complex z,
                               int band_cap);

bool in_d2(Complex x, Complex y);
bool in_d3(Complex x, Complex y, Complex z);

} // namespace boxtimes
