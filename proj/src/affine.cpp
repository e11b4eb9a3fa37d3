#include "qloop/affine.hpp"

#include <random>

namespace qloop {

GradationS GradationS::of(std::vector<int> si) {
    GradationS g;
    g.s = std::move(si);
    g.total = 0;
    for (int v : g.s) g.total += v;
    if (g.total == 0) throw std::invalid_argument("GradationS: total s must be nonzero");
    return g;
}

void TwistPhi::validate(double tol) const {
    Cx sum = 0.0;
    for (Cx v : phi) sum += v;
    if (std::abs(sum) > tol)
        throw std::invalid_argument("TwistPhi: the components must satisfy sum phi_i = 0");
}

int sigma_label(int n, int i, int power) {
    int r = (i + power) % n;
    return r < 0 ? r + n : r;
}

int tau_label(int n, int i) { return (n - (i % n)) % n; }

int affine_cartan(int n, int i, int j) {
    if (i == j) return 2;
    if (n == 2) return -2;
    int d = std::abs(i - j);
    return (d == 1 || d == n - 1) ? -1 : 0;
}

MatC Rep::e_at(const QParams& p, int i, Cx zeta) const {
    (void)p;
    return std::pow(zeta, Cx(double(e[size_t(i)].zexp))) * MatC(e[size_t(i)].mat);
}

MatC Rep::f_at(const QParams& p, int i, Cx zeta) const {
    (void)p;
    if (borel_only) throw std::domain_error("Rep: f-generators are not represented (Borel-only)");
    return std::pow(zeta, Cx(double(f[size_t(i)].zexp))) * MatC(f[size_t(i)].mat);
}

MatC Rep::cartan(const QParams& p, int i, Cx nu) const {
    MatC d = MatC::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) d(s, s) = qpow(p, nu * h_exp[size_t(i)][s]);
    return d;
}

VecC Rep::twist_exponents(const TwistPhi& t) const {
    VecC v = VecC::Zero(dim);
    for (int i = 0; i < n; ++i) v += (t.phi[size_t(i)] / double(n)) * h_exp[size_t(i)];
    return v;
}

MatC Rep::twist_diag(const QParams& p, const TwistPhi& t) const {
    VecC e = twist_exponents(t);
    MatC d = MatC::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) d(s, s) = qpow(p, e[s]);
    return d;
}

MatC jimbo_image(const QParams& p, const GLModule& m, AffGen kind, int i, Cx nu) {
    const int n = m.n;
    if (i < 0 || i >= n) throw std::invalid_argument("jimbo_image: generator index out of range");
    auto dense = [&](const SpMatC& s) { return MatC(s); };
    if (kind == AffGen::cartan) {
        // h_0 = G_n - G_1 (loop closure), h_i = G_i - G_{i+1}
        std::array<Cx, 3> c{};
        if (i == 0) {
            c[size_t(n - 1)] = nu;
            c[0] -= nu;
        } else {
            c[size_t(i - 1)] = nu;
            c[size_t(i)] -= nu;
        }
        return m.cartan_diag(p, c);
    }
    if (n == 2) {
        if (kind == AffGen::e)
            return i == 0 ? MatC(dense(m.F[0]) * m.cartan_diag(p, {-1.0, -1.0, 0.0})) : dense(m.E[0]);
        return i == 0 ? MatC(dense(m.E[0]) * m.cartan_diag(p, {1.0, 1.0, 0.0})) : dense(m.F[0]);
    }
    // n = 3: composite root vectors enter through the affine node
    if (kind == AffGen::e) {
        if (i == 0) return dense(m.F[2]) * m.cartan_diag(p, {-1.0, 0.0, -1.0});
        return dense(m.E[size_t(i - 1)]);
    }
    if (i == 0) return dense(m.E[2]) * m.cartan_diag(p, {1.0, 0.0, 1.0});
    return dense(m.F[size_t(i - 1)]);
}

Rep eval_rep(const QParams& p, const GLModule& m, const GradationS& grad, bool barred,
             const std::vector<Cx>& xi) {
    const int n = m.n;
    if (int(grad.s.size()) != n) throw std::invalid_argument("eval_rep: gradation rank mismatch");
    Rep r;
    r.n = n;
    r.dim = m.dim;
    r.grad = grad;
    r.states = m.states;
    r.n_axes = (m.kind == ModuleKind::verma) ? (n == 2 ? 1 : 3) : 0;
    r.K_trunc = (m.kind == ModuleKind::verma) ? m.K_trunc : 0;
    r.safe_depth = m.safe_depth;
    r.xi.assign(size_t(n), Cx(0.0));

    bool shifted = false;
    for (size_t i = 0; i < xi.size(); ++i) {
        r.xi[i] = xi[i];
        if (xi[i] != Cx(0.0)) shifted = true;
    }
    r.borel_only = shifted;

    r.e.resize(size_t(n));
    r.h_exp.resize(size_t(n));
    if (!shifted) r.f.resize(size_t(n));
    for (int j = 0; j < n; ++j) {
        const int l = barred ? tau_label(n, j) : j;
        r.e[size_t(j)] = {jimbo_image(p, m, AffGen::e, l).sparseView(), grad.s[size_t(j)]};
        if (!shifted) r.f[size_t(j)] = {jimbo_image(p, m, AffGen::f, l).sparseView(), -grad.s[size_t(j)]};
        // exponent vector of h_l in the module, plus the shift
        std::array<Cx, 3> c{};
        if (l == 0) {
            c[size_t(n - 1)] = 1.0;
            c[0] -= 1.0;
        } else {
            c[size_t(l - 1)] = 1.0;
            c[size_t(l)] -= 1.0;
        }
        VecC he = m.cartan_exponents(c);
        he.array() += r.xi[size_t(j)];
        r.h_exp[size_t(j)] = he;
    }
    r.tag = std::string(barred ? "eval_bar" : "eval") + "[n=" + std::to_string(n) + ",w=" + m.weight.str() +
            (m.kind == ModuleKind::verma ? ",K=" + std::to_string(m.K_trunc) : ",fin") + "]";
    return r;
}

double check_affine_relations(const QParams& p, const Rep& r, int n_samples, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rad(0.75, 1.35), ang(0.0, 2.0 * M_PI);

    const int n = r.n;
    const Eigen::Index d = r.dim;
    const int margin = n == 2 ? 4 : 3;  // longest relation word raises depth by <= 1 per letter
    std::vector<Eigen::Index> safe;
    for (Eigen::Index s = 0; s < d; ++s)
        if (r.K_trunc == 0 || r.depth(s) + margin <= r.K_trunc) safe.push_back(s);
    if (safe.empty()) return 0.0;

    auto restrict_cols = [&](const MatC& a) {
        MatC out(d, Eigen::Index(safe.size()));
        for (Eigen::Index j = 0; j < Eigen::Index(safe.size()); ++j) out.col(j) = a.col(safe[size_t(j)]);
        return out;
    };
    double worst = 0.0;
    auto compare = [&](const MatC& lhs, const MatC& rhs) {
        MatC L = restrict_cols(lhs), R = restrict_cols(rhs);
        double scale = std::max({L.cwiseAbs().maxCoeff(), R.cwiseAbs().maxCoeff(), 1.0});
        worst = std::max(worst, (L - R).cwiseAbs().maxCoeff() / scale);
    };

    // central-charge triviality: sum_i h_i acts by zero (exact bookkeeping)
    {
        VecC tot = VecC::Zero(d);
        Cx xs = 0.0;
        for (int i = 0; i < n; ++i) {
            tot += r.h_exp[size_t(i)];
            xs += r.xi[size_t(i)];
        }
        tot.array() -= xs;  // the shift is not part of the charge
        worst = std::max(worst, tot.cwiseAbs().maxCoeff());
    }

    for (int t = 0; t < n_samples; ++t) {
        Cx zeta = std::polar(rad(rng), ang(rng));
        std::vector<MatC> E, F, H, Hi;
        E.resize(size_t(n));
        H.resize(size_t(n));
        Hi.resize(size_t(n));
        for (int i = 0; i < n; ++i) {
            E[size_t(i)] = r.e_at(p, i, zeta);
            H[size_t(i)] = r.cartan(p, i, 1.0);
            Hi[size_t(i)] = r.cartan(p, i, -1.0);
        }
        if (!r.borel_only) {
            F.resize(size_t(n));
            for (int i = 0; i < n; ++i) F[size_t(i)] = r.f_at(p, i, zeta);
        }

        // (3.9)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Cx c = qpow(p, double(affine_cartan(n, j, i)));
                compare(H[size_t(j)] * E[size_t(i)] * Hi[size_t(j)], c * E[size_t(i)]);
                if (!r.borel_only)
                    compare(H[size_t(j)] * F[size_t(i)] * Hi[size_t(j)], (1.0 / c) * F[size_t(i)]);
            }

        // (3.10)
        if (!r.borel_only)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    MatC lhs = E[size_t(i)] * F[size_t(j)] - F[size_t(j)] * E[size_t(i)];
                    MatC rhs = (i == j) ? MatC((H[size_t(i)] - Hi[size_t(i)]) / p.kappa_q)
                                        : MatC(MatC::Zero(d, d));
                    compare(lhs, rhs);
                }

        // (3.11)/(3.12) q-Serre, residual relative to the largest single term
        auto serre = [&](const std::vector<MatC>& G) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const int m_ord = 1 - affine_cartan(n, i, j);
                    MatC acc = MatC::Zero(d, d);
                    double tscale = 1e-300;
                    for (int k = 0; k <= m_ord; ++k) {
                        MatC term = G[size_t(j)];
                        for (int a = 0; a < m_ord - k; ++a) term = G[size_t(i)] * term;
                        for (int a = 0; a < k; ++a) term = term * G[size_t(i)];
                        term *= double(k % 2 ? -1 : 1) * qbinom(p, m_ord, k);
                        tscale = std::max(tscale, restrict_cols(term).cwiseAbs().maxCoeff());
                        acc += term;
                    }
                    worst = std::max(worst, restrict_cols(acc).cwiseAbs().maxCoeff() / tscale);
                }
        };
        serre(E);
        if (!r.borel_only) serre(F);
    }
    return worst;
}

}  // namespace qloop
