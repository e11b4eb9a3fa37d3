#ifndef QLOOP_AFFINE_HPP
#define QLOOP_AFFINE_HPP

#include "qloop/rep.hpp"

namespace qloop {

// Label of a quantum-affine generator for Jimbo-image queries.
enum class AffGen { e, f, cartan };

// Jimbo's homomorphism U_q(L(sl_n)) -> U_q(gl_n) applied in the module m:
// returns the image matrix of e_i / f_i, or of q^{nu h_i} for cartan.
MatC jimbo_image(const QParams& p, const GLModule& m, AffGen kind, int i, Cx nu = 1.0);

// Evaluation representation (pi o jimbo o Gamma_zeta) with exact exponent
// bookkeeping; barred applies the diagram automorphism tau before Jimbo's map;
// xi shifts the Cartan images per (4.9)-style shifted representations and
// makes the result Borel-only.
Rep eval_rep(const QParams& p, const GLModule& m, const GradationS& grad, bool barred = false,
             const std::vector<Cx>& xi = {});

// Max relative residual of the quantum-affine relations evaluated at
// `n_samples` random spectral points (e-side only for Borel-only reps).
double check_affine_relations(const QParams& p, const Rep& r, int n_samples = 3,
                              unsigned long seed = 12345);

// Generalized Cartan matrix of type A^{(1)}_{n-1}: a(i,j) with i,j in 0..n-1.
int affine_cartan(int n, int i, int j);

}  // namespace qloop

#endif
