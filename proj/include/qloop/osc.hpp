#ifndef QLOOP_OSC_HPP
#define QLOOP_OSC_HPP

#include "qloop/affine.hpp"
#include "qloop/rep.hpp"

namespace qloop {

// Fock representation of the q-oscillator algebra on v_0..v_K:
// q^{nu N} v_k = q^{nu k} v_k, bdag v_k = v_{k+1}, b v_k = [k]_q v_{k-1}.
struct FockModule {
    int K = 0;
    Eigen::Index dim = 0;
    SpMatC b, bdag;
    VecC n_exp;  // N-eigenvalues 0..K
};

FockModule build_fock(const QParams& p, int K);

// Image of a Borel generator under the homomorphism theta into Osc_q^{(n-1)}
// on the given Fock factor(s).  Requesting an f-generator throws
// std::domain_error: the oscillator representations exist only on B_+.
MatC theta_image(const QParams& p, int n, const FockModule& fk, AffGen kind, int i, Cx nu = 1.0);

// Borel representation rho_{i,zeta} (barred: rhobar_{i,zeta}) built from the
// twisted homomorphism theta_i = theta o sigma^{-i} (theta o tau o sigma^{-i+1})
// composed with the gradation.
Rep build_osc_rep(const QParams& p, int n, int i, bool barred, const GradationS& grad, int K);

}  // namespace qloop

#endif
