#ifndef QLOOP_GLMOD_HPP
#define QLOOP_GLMOD_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

#include "qloop/laurent.hpp"
#include "qloop/qparams.hpp"

namespace qloop {

using SpMatC = Eigen::SparseMatrix<Cx>;

// Highest weight of U_q(gl_n), n = 2 or 3; components may be any complex
// numbers, finite-dimensional quotients additionally need integral dominance.
struct Weight {
    int n = 2;
    std::array<Cx, 3> comp{};  // lambda_1..lambda_n (unused slots zero)

    static Weight gl2(Cx l1, Cx l2) { return {2, {l1, l2, 0.0}}; }
    static Weight gl3(Cx l1, Cx l2, Cx l3) { return {3, {l1, l2, l3}}; }

    bool dominant_integral(double tol = 1e-9) const;
    std::string str() const;
};

enum class ModuleKind { finite, verma };

// A concrete highest-weight U_q(gl_n)-module: truncated Verma or the
// finite-dimensional quotient.  Basis states are indexed by the powers of the
// negative root vectors, graded-lexicographically in (k1, k3, k2) for n = 3
// and by the single power k for n = 2.  Simple generators are E[0..n-2],
// F[0..n-2]; for n = 3 the composite root vectors are stored as E[2], F[2].
struct GLModule {
    int n = 2;
    Weight weight;
    ModuleKind kind = ModuleKind::verma;
    int K_trunc = 0;    // truncation depth for verma kind (construction depth otherwise)
    int safe_depth = 0; // states of total degree <= safe_depth have exact images
    Eigen::Index dim = 0;

    std::vector<std::array<int, 3>> states;  // multi-index per basis state
    std::vector<std::array<Cx, 3>> g_exp;    // q^{nu G_i} eigen-exponents per state

    std::vector<SpMatC> E, F;

    int degree(Eigen::Index s) const {
        return states[size_t(s)][0] + states[size_t(s)][1] + states[size_t(s)][2];
    }
    // diagonal exponent vector for a linear form sum_i c_i G_i
    VecC cartan_exponents(const std::array<Cx, 3>& c) const;
    // q^{sum_i c_i G_i} as a diagonal matrix
    MatC cartan_diag(const QParams& p, const std::array<Cx, 3>& c, Cx scale = 1.0) const;
};

GLModule build_gl2(const QParams& p, const Weight& w, ModuleKind kind, int K_trunc = 0);
GLModule build_gl3(const QParams& p, const Weight& w, ModuleKind kind, int K_trunc = 0);

// Max relative residual of the defining relations (3.2), (3.3) and the Serre
// relations on truncation-safe states.
double check_gl_relations(const QParams& p, const GLModule& m);

}  // namespace qloop

#endif
