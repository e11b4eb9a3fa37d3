#ifndef QLOOP_INTERTWINE_HPP
#define QLOOP_INTERTWINE_HPP

#include <functional>
#include <map>
#include <memory>
#include <random>

#include "qloop/rep.hpp"

namespace qloop {

struct SolveOptions {
    unsigned long seed = 20240901;
    double annulus_lo = 0.5, annulus_hi = 2.0;  // sample ratios live here
    int pole_k_max = 8;                         // avoid |z q^k| = 1 for |k| <= this
    double pole_margin = 0.03;
    int max_num_halfwidth = 14;  // largest polynomial window tried
    int max_den_terms = 9;       // largest denominator coefficient count (trace recovery)
    double fit_tol = 1e-9;       // holdout validation threshold
    int holdout = 2;
};

struct SolveDiagnostics {
    double residual = 0.0;        // smallest singular value of the graded system, relative
    double degeneracy_gap = 0.0;  // second singular value, relative
    bool degenerate = false;
    double holdout_err = 0.0;     // validation error at fresh sample ratios
    int den_terms = 0;
    int num_lo = 0, num_hi = 0;
    int n_samples = 0;
};

// A solved intertwiner in polynomial-normalized form: num(z)/den(z) is the
// anchored solution (hw (x) hw entry = 1); num is the cleared-denominator
// Laurent representative (sparse coefficients) and den its anchor entry.
struct RationalOp {
    int num_lo = 0;
    std::vector<SpMatC> num_coeffs;
    LaurentPoly<Cx> den;
    SolveDiagnostics diag;

    Eigen::Index dim() const { return num_coeffs.empty() ? 0 : num_coeffs.front().rows(); }
    SpMatC eval_num_sparse(Cx z) const {
        SpMatC acc(dim(), dim());
        Cx zp = std::pow(z, Cx(double(num_lo)));
        for (const auto& c : num_coeffs) {
            acc += SpMatC(zp * c);
            zp *= z;
        }
        acc.prune(Cx(0));
        return acc;
    }
    LaurentOp<Cx> num_dense() const {
        std::vector<MatC> cs;
        for (const auto& c : num_coeffs) cs.push_back(MatC(c));
        return LaurentOp<Cx>(num_lo, cs);
    }
    MatC eval(Cx z) const { return MatC(eval_num_sparse(z)) / den.eval(z); }
};

// z-samples on an annulus avoiding the resonance radii |z q^k| = 1.
class SampleSource {
  public:
    SampleSource(const QParams& p, const SolveOptions& o);
    Cx next();

  private:
    SolveOptions opts_;
    std::mt19937_64 rng_;
    double qabs_;
};

// The intertwining problem Dop(a; z) X(z) = X(z) D(a; z) on V1 (x) V2 for the
// generator set of the pair (full for R, e/Cartan only for L), restricted to
// weight-conserving unknowns; z = zeta_1/zeta_2.  Solved in z-coefficient
// space over the minimal polynomial window, so truncation boundary effects
// cannot leak into the interior.
class PairProblem {
  public:
    PairProblem(const QParams& p, const Rep& r1, const Rep& r2, bool borel);

    Eigen::Index dim() const { return dim_; }
    const Rep& left() const { return *r1_; }
    const Rep& right() const { return *r2_; }

    RationalOp solve(const SolveOptions& opts = {}) const;

    // anchored pointwise value num(z)/den(z) of the cached solution
    SpMatC solve_at(Cx z, SolveDiagnostics* diag = nullptr) const;

    double pair_residual(const MatC& X, Cx z, int safe_margin) const;

  private:
    void build_blocks();

    const QParams* p_;
    std::shared_ptr<const Rep> r1_, r2_;
    bool borel_ = false;
    Eigen::Index dim_ = 0;

    std::vector<int> block_of_;
    std::vector<std::vector<Eigen::Index>> blocks_;
    std::vector<char> interior_;  // rows anchored at truncation-boundary states are dropped
    std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns_;  // weight-conserving (row, col)
    std::map<long long, Eigen::Index> unknown_index_;
    Eigen::Index anchor_ = 0;

    mutable std::shared_ptr<RationalOp> cached_;
};

// Generic rational recovery from samples of a matrix-valued function of z
// (used for traced chain operators; validated on held-out samples).
RationalOp recover_rational(const std::function<MatC(Cx)>& sample_fn, Eigen::Index dim,
                            const QParams& p, const SolveOptions& opts);

// R-matrix on rep1 (x) rep2 (full generator set: both reps must represent f_i).
RationalOp solve_R(const QParams& p, const Rep& r1, const Rep& r2, const SolveOptions& opts = {});

// L-operator: Borel generator set only (oscillator or shifted rep on the left).
RationalOp solve_L(const QParams& p, const Rep& osc_rep, const Rep& r2, const SolveOptions& opts = {});

// Max over generators of the relative intertwining residual of X at ratio z.
// safe_margin > 0 restricts rows and columns to states at least that far from
// a truncation boundary (where a truncated solve is necessarily undetermined).
double intertwining_residual(const QParams& p, const Rep& r1, const Rep& r2, bool borel,
                             const MatC& X, Cx z, int safe_margin = 0);

}  // namespace qloop

#endif
