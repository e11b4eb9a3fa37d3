#ifndef QLOOP_QPARAMS_HPP
#define QLOOP_QPARAMS_HPP

#include <complex>
#include <stdexcept>

namespace qloop {

using Cx = std::complex<double>;

// Deformation data: q = exp(hbar) for a complex number hbar, so that traces
// over representation spaces are plain complex numbers.  Fractional powers
// q^x are always exp(hbar*x); there is no branch choice anywhere downstream.
struct QParams {
    Cx hbar{};
    Cx q{};
    Cx kappa_q{};  // q - q^{-1}

    static QParams from_hbar(Cx hbar);

    // q must stay away from roots of unity for the module formulas and the
    // trace denominators to make sense: requires |q^k - 1| > eps, k = 1..k_max.
    void require_generic(int k_max = 64, double eps = 1e-8) const;
};

// q-number [nu]_q = (q^nu - q^{-nu}) / (q - q^{-1}), entire in nu.
Cx qnum(const QParams& p, Cx nu);

// Gaussian binomial [m choose k]_q in the stable product form
// prod_{j=1..k} [m-j+1]_q / [j]_q.  Throws std::domain_error unless 0<=k<=m.
Cx qbinom(const QParams& p, long m, long k);

// q^x := exp(hbar * x), single-valued by construction.
Cx qpow(const QParams& p, Cx x);

}  // namespace qloop

#endif
