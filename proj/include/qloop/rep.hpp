#ifndef QLOOP_REP_HPP
#define QLOOP_REP_HPP

#include <array>
#include <string>
#include <vector>

#include "qloop/glmod.hpp"

namespace qloop {

struct GradationS {
    std::vector<int> s;  // s_0..s_{n-1}
    int total = 0;

    static GradationS uniform(int n) {
        GradationS g;
        g.s.assign(size_t(n), 1);
        g.total = n;
        return g;
    }
    static GradationS of(std::vector<int> si);
};

struct TwistPhi {
    std::vector<Cx> phi;  // phi_0..phi_{n-1}, sum must vanish

    void validate(double tol = 1e-12) const;
    int n() const { return int(phi.size()); }
};

// One represented generator: constant matrix times zeta^{zexp}.
struct GenImage {
    SpMatC mat;
    int zexp = 0;
};

// A represented quantum-affine (Borel) algebra on a finite basis, with exact
// zeta-exponent bookkeeping.  Covers evaluation representations (full algebra),
// their shifted variants and the q-oscillator representations (Borel only).
struct Rep {
    int n = 2;             // rank of the underlying sl_n
    Eigen::Index dim = 0;
    bool borel_only = false;
    GradationS grad;

    std::vector<GenImage> e;  // e_0..e_{n-1}
    std::vector<GenImage> f;  // empty when borel_only
    std::vector<VecC> h_exp;  // q^{nu h_i} = diag(qpow(nu * h_exp[i])) (shift included)
    std::vector<Cx> xi;       // recorded shift xi(h_i) (zero when unshifted)

    // trace bookkeeping: grading multi-index per state along n_axes axes and
    // the truncation depth (0 for exact finite-dimensional modules)
    int n_axes = 0;
    std::vector<std::array<int, 3>> states;
    int K_trunc = 0;
    bool axis_truncated = false;  // Fock factors truncate per axis, Verma by total degree
    int safe_depth = 1 << 30;

    std::string tag;

    int depth(Eigen::Index s) const {
        return states.empty() ? 0
                              : states[size_t(s)][0] + states[size_t(s)][1] + states[size_t(s)][2];
    }
    MatC e_at(const QParams& p, int i, Cx zeta) const;  // zeta^{s_i} * mat
    MatC f_at(const QParams& p, int i, Cx zeta) const;
    MatC cartan(const QParams& p, int i, Cx nu) const;  // q^{nu h_i}
    // Twist image pi(t), t = q^{sum_i phi_i h_i / n}
    VecC twist_exponents(const TwistPhi& t) const;      // sum_i phi_i h_exp[i] / n
    MatC twist_diag(const QParams& p, const TwistPhi& t) const;
};

// Automorphism index maps on generator labels (sigma^n = id, tau^2 = id).
int sigma_label(int n, int i, int power);  // alpha_i -> alpha_{i+power mod n}
int tau_label(int n, int i);               // alpha_i -> alpha_{n-i mod n}, alpha_0 fixed

}  // namespace qloop

#endif
