#include "qloop/osc.hpp"

namespace qloop {

namespace {

using Trip = Eigen::Triplet<Cx>;

SpMatC diag_qpow(const QParams& p, const VecC& exps, Cx nu) {
    SpMatC d(exps.size(), exps.size());
    d.reserve(Eigen::VectorXi::Constant(int(exps.size()), 1));
    for (Eigen::Index s = 0; s < exps.size(); ++s) d.insert(s, s) = qpow(p, nu * exps[s]);
    d.makeCompressed();
    return d;
}

SpMatC sp_kron(const SpMatC& a, const SpMatC& b) {
    std::vector<Trip> t;
    t.reserve(size_t(a.nonZeros()) * size_t(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SpMatC::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SpMatC::InnerIterator ib(b, kb); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
    SpMatC r(a.rows() * b.rows(), a.cols() * b.cols());
    r.setFromTriplets(t.begin(), t.end());
    r.makeCompressed();
    return r;
}

}  // namespace

FockModule build_fock(const QParams& p, int K) {
    if (K < 1) throw std::invalid_argument("build_fock: K_trunc must be >= 1");
    FockModule f;
    f.K = K;
    f.dim = K + 1;
    f.n_exp = VecC::Zero(f.dim);
    std::vector<Trip> tb, tbd;
    for (int k = 0; k <= K; ++k) {
        f.n_exp[k] = double(k);
        if (k + 1 <= K) tbd.emplace_back(k + 1, k, Cx(1.0));       // bdag v_k = v_{k+1}
        if (k >= 1) tb.emplace_back(k - 1, k, qnum(p, double(k)));  // b v_k = [k]_q v_{k-1}
    }
    f.b = SpMatC(f.dim, f.dim);
    f.b.setFromTriplets(tb.begin(), tb.end());
    f.bdag = SpMatC(f.dim, f.dim);
    f.bdag.setFromTriplets(tbd.begin(), tbd.end());
    return f;
}

MatC theta_image(const QParams& p, int n, const FockModule& fk, AffGen kind, int i, Cx nu) {
    if (kind == AffGen::f)
        throw std::domain_error("theta_image: rho is a representation of B_+ only; f_" +
                                std::to_string(i) + " cannot be represented");
    if (i < 0 || i >= n) throw std::invalid_argument("theta_image: generator index out of range");
    if (n == 2) {
        if (kind == AffGen::cartan) return MatC(diag_qpow(p, (i == 0 ? 2.0 : -2.0) * fk.n_exp, nu));
        if (i == 0) return MatC(fk.bdag);
        return (1.0 / p.kappa_q) * MatC(fk.b) * MatC(diag_qpow(p, -fk.n_exp, 1.0));
    }
    if (n != 3) throw std::invalid_argument("theta_image: only n = 2, 3 supported");
    const Eigen::Index d = fk.dim;
    SpMatC id(d, d);
    id.setIdentity();
    auto qN = [&](Cx c) { return diag_qpow(p, fk.n_exp, c); };
    if (kind == AffGen::cartan) {
        // exponents: h_0 -> 2N1+N2, h_1 -> -N1+N2, h_2 -> -N1-2N2
        Cx a, b;
        if (i == 0) {
            a = 2.0;
            b = 1.0;
        } else if (i == 1) {
            a = -1.0;
            b = 1.0;
        } else {
            a = -1.0;
            b = -2.0;
        }
        return MatC(sp_kron(diag_qpow(p, fk.n_exp, nu * a), diag_qpow(p, fk.n_exp, nu * b)));
    }
    if (i == 0) return MatC(sp_kron(fk.bdag, qN(-1.0)));  // bdag_1 q^{-N_2}
    if (i == 1)                                           // -b_1 bdag_2 q^{-N_1+N_2+1}
        return -p.q * MatC(sp_kron(SpMatC(fk.b * qN(-1.0)), SpMatC(fk.bdag * qN(1.0))));
    return (1.0 / p.kappa_q) * MatC(sp_kron(id, SpMatC(fk.b * qN(-1.0))));  // kappa^{-1} b_2 q^{-N_2}
}

Rep build_osc_rep(const QParams& p, int n, int i, bool barred, const GradationS& grad, int K) {
    if (i < 1 || i > n) throw std::invalid_argument("build_osc_rep: index i must lie in 1..n");
    if (int(grad.s.size()) != n) throw std::invalid_argument("build_osc_rep: gradation rank mismatch");
    FockModule fk = build_fock(p, K);

    Rep r;
    r.n = n;
    r.dim = n == 2 ? fk.dim : fk.dim * fk.dim;
    r.borel_only = true;
    r.grad = grad;
    r.n_axes = n - 1;
    r.K_trunc = K;
    r.axis_truncated = true;
    r.safe_depth = K - 4;
    r.xi.assign(size_t(n), Cx(0.0));
    r.states.resize(size_t(r.dim));
    if (n == 2) {
        for (int k = 0; k <= K; ++k) r.states[size_t(k)] = {k, 0, 0};
    } else {
        for (int k1 = 0; k1 <= K; ++k1)
            for (int k2 = 0; k2 <= K; ++k2) r.states[size_t(k1 * (K + 1) + k2)] = {k1, k2, 0};
    }

    r.e.resize(size_t(n));
    r.h_exp.resize(size_t(n));
    for (int j = 0; j < n; ++j) {
        // theta_i(x) = theta(sigma^{-i}(x)); thetabar_i(x) = theta(tau(sigma^{-i+1}(x)))
        int l = barred ? tau_label(n, sigma_label(n, j, -i + 1)) : sigma_label(n, j, -i);
        r.e[size_t(j)] = {theta_image(p, n, fk, AffGen::e, l).sparseView(), grad.s[size_t(j)]};
        if (n == 2) {
            r.h_exp[size_t(j)] = (l == 0 ? 2.0 : -2.0) * fk.n_exp;
        } else {
            VecC he(r.dim);
            for (int k1 = 0; k1 <= K; ++k1)
                for (int k2 = 0; k2 <= K; ++k2) {
                    Cx v;
                    if (l == 0) v = 2.0 * k1 + 1.0 * k2;
                    else if (l == 1) v = -1.0 * k1 + 1.0 * k2;
                    else v = -1.0 * k1 - 2.0 * k2;
                    he[k1 * (K + 1) + k2] = v;
                }
            r.h_exp[size_t(j)] = he;
        }
    }
    r.tag = std::string(barred ? "rho_bar" : "rho") + "[n=" + std::to_string(n) + ",i=" + std::to_string(i) +
            ",K=" + std::to_string(K) + "]";
    return r;
}

}  // namespace qloop
