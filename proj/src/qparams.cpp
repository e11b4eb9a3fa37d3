#include "qloop/qparams.hpp"

#include <cmath>
#include <string>

namespace qloop {

QParams QParams::from_hbar(Cx hbar) {
    QParams p;
    p.hbar = hbar;
    p.q = std::exp(hbar);
    p.kappa_q = p.q - 1.0 / p.q;
    if (std::abs(p.kappa_q) < 1e-14)
        throw std::invalid_argument("QParams: kappa_q = q - q^{-1} vanishes (hbar too close to i*pi*Z)");
    return p;
}

void QParams::require_generic(int k_max, double eps) const {
    Cx qk = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        qk *= q;
        if (std::abs(qk - 1.0) <= eps)
            throw std::invalid_argument("QParams: q is within " + std::to_string(eps) +
                                        " of a root of unity of order " + std::to_string(k));
    }
}

Cx qnum(const QParams& p, Cx nu) {
    const Cx w = p.hbar * nu;
    return (std::exp(w) - std::exp(-w)) / p.kappa_q;
}

Cx qbinom(const QParams& p, long m, long k) {
    if (k < 0 || m < 0 || k > m) throw std::domain_error("qbinom: need 0 <= k <= m");
    if (2 * k > m) k = m - k;  // symmetry keeps the product short
    Cx r = 1.0;
    for (long j = 1; j <= k; ++j) r *= qnum(p, Cx(double(m - j + 1))) / qnum(p, Cx(double(j)));
    return r;
}

Cx qpow(const QParams& p, Cx x) { return std::exp(p.hbar * x); }

}  // namespace qloop
