#pragma once

#include "boxtimes/scalar.hpp"

#include <map>
#include <vector>

namespace boxtimes {

/// Element of the acting vertex algebra, restricted to what the engine needs:
/// the vacuum, the single-oscillator states a_{-k}1 (the strong generators of
/// the rank-1 Heisenberg algebra and the images the C1 oracle produces), and
/// the conformal vector omega.
struct VoaElem {
    enum Kind { vacuum, oscillator, omega } kind = oscillator;
    int k = 1; // a_{-k}1 when kind == oscillator

    static VoaElem vac() { return {vacuum, 0}; }
    static VoaElem osc(int k) { return {oscillator, k}; }
    static VoaElem conformal() { return {omega, 0}; }

    int weight() const { return kind == vacuum ? 0 : (kind == omega ? 2 : k); }
    friend bool operator==(const VoaElem& a, const VoaElem& b) {
        return a.kind == b.kind && a.k == b.k;
    }
};

/// Homogeneous vector: components over the basis of one grade.
struct GradeVec {
    int grade = 0;
    std::map<int, Scalar> c;

    bool empty() const { return c.empty(); }
    void add(int idx, const Scalar& v) {
        if (v.is_zero()) return;
        auto it = c.find(idx);
        if (it == c.end()) {
            c.emplace(idx, v);
        } else {
            it->second += v;
            if (it->second.is_zero()) c.erase(it);
        }
    }
    GradeVec scaled(const Scalar& s) const {
        GradeVec g{grade, {}};
        if (s.is_zero()) return g;
        for (auto& [i, v] : c) g.add(i, v * s);
        return g;
    }
};

/// One C1-rewrite: w = sum_i coeff_i * (gen_i)_{-1} lower_i.
struct C1Term {
    VoaElem gen;
    GradeVec lower;
    Scalar coeff;
};

/// N-graded module with finite-dimensional graded pieces, mode actions of the
/// acting algebra, a designated complement of C1(W), and the rewrite oracle
/// expressing everything above the complement through (-1)-modes.
class GradedModule {
public:
    virtual ~GradedModule() = default;

    virtual int cutoff() const = 0;
    virtual int dim(int grade) const = 0;
    /// L(0) eigenvalue of grade-0 states (the weight offset d(W)).
    virtual Rational weight_offset() const = 0;

    /// alpha_j applied to basis vector (grade, idx); empty when the target
    /// grade falls outside [0, cutoff].
    virtual GradeVec mode_action(const VoaElem& alpha, long j, int grade, int idx) const = 0;
    /// transpose action on the restricted dual basis
    virtual GradeVec dual_mode_action(const VoaElem& alpha, long j, int grade,
                                      int idx) const = 0;

    virtual bool in_complement(int grade, int idx) const = 0;
    virtual std::vector<C1Term> c1_rewrite(int grade, int idx) const = 0;

    GradeVec mode_action(const VoaElem& alpha, long j, const GradeVec& v) const;
    GradeVec dual_mode_action(const VoaElem& alpha, long j, const GradeVec& v) const;
};

} // namespace boxtimes
