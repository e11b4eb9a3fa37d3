#include "qloop/chain.hpp"

#include <Eigen/QR>

#include <numeric>
#include <sstream>

#include "qloop/affine.hpp"
#include "qloop/calibrate.hpp"
#include "qloop/sparse_util.hpp"

namespace qloop {

namespace {

using Trip = Eigen::Triplet<Cx>;

Weight fundamental(int n) { return n == 2 ? Weight::gl2(1.0, 0.0) : Weight::gl3(1.0, 0.0, 0.0); }

GLModule build_module(const QParams& p, const Weight& w, ModuleKind kind, int K) {
    return w.n == 2 ? build_gl2(p, w, kind, K) : build_gl3(p, w, kind, K);
}

std::string weight_tag(const Weight& w) { return w.str(); }

// 1D truncated geometric sum  sum_{k=0}^{K} r^k
Cx geom_partial(Cx r, int K) {
    if (std::abs(r - 1.0) < 1e-9) {
        Cx acc = 0.0, t = 1.0;
        for (int k = 0; k <= K; ++k) {
            acc += t;
            t *= r;
        }
        return acc;
    }
    return (1.0 - std::pow(r, Cx(double(K + 1)))) / (1.0 - r);
}

}  // namespace

ChainSpec ChainSpec::make(int n, int N, TwistPhi twist) {
    ChainSpec s;
    s.n = n;
    s.N = N;
    s.grad = GradationS::uniform(n);
    s.twist = std::move(twist);
    s.inhom.assign(size_t(N), Cx(1.0));
    s.site_weights.assign(size_t(N), fundamental(n));
    return s;
}

void ChainSpec::validate(const QParams& p) const {
    if (n != 2 && n != 3) throw std::invalid_argument("ChainSpec: rank n must be 2 or 3");
    if (N < 0) throw std::invalid_argument("ChainSpec: N must be >= 0");
    if (int(grad.s.size()) != n || grad.total == 0)
        throw std::invalid_argument("ChainSpec: gradation must have n components with nonzero total");
    if (twist.n() != n) throw std::invalid_argument("ChainSpec: twist must have n components");
    twist.validate();
    if (int(inhom.size()) != N || int(site_weights.size()) != N)
        throw std::invalid_argument("ChainSpec: need one inhomogeneity and weight per site");
    for (Cx z : inhom)
        if (z == Cx(0)) throw std::invalid_argument("ChainSpec: inhomogeneities must be nonzero");
    p.require_generic();
}

void scan_twist_regime(const QParams& p, const ChainSpec& spec) {
    const int n = spec.n;
    // Verma descent ratios along the simple lowering directions
    for (int j = 1; j < n; ++j) {
        Cx acc = 0.0;
        for (int i = 0; i < n; ++i) acc += spec.twist.phi[size_t(i)] * double(affine_cartan(n, i, j));
        double r = std::abs(std::exp(-p.hbar * acc / double(n)));
        if (r > 0.75)
            throw std::invalid_argument(
                "twist regime: Verma trace ratio " + std::to_string(r) +
                " along direction " + std::to_string(j) + " exceeds 0.75; traces will not converge");
    }
    // Fock trace ratios must stay away from the geometric poles 1 - q^m r = 0
    for (int i = 1; i <= n; ++i)
        for (bool barred : {false, true}) {
            Rep r = build_osc_rep(p, n, i, barred, spec.grad, 2);
            VecC ex = r.twist_exponents(spec.twist);
            for (int ax = 0; ax < r.n_axes; ++ax) {
                std::array<int, 3> unit{};
                unit[size_t(ax)] = 1;
                Eigen::Index s_unit = -1, s_zero = -1;
                for (Eigen::Index s = 0; s < r.dim; ++s) {
                    if (r.states[size_t(s)] == unit) s_unit = s;
                    if (r.states[size_t(s)] == std::array<int, 3>{0, 0, 0}) s_zero = s;
                }
                Cx tau = ex[s_unit] - ex[s_zero];
                for (int m = -12; m <= 12; ++m) {
                    Cx ratio = std::exp(p.hbar * (tau + double(m)));
                    if (std::abs(ratio - 1.0) < 1e-4)
                        throw std::invalid_argument(
                            "twist regime: Fock trace ratio hits a geometric pole (index " +
                            std::to_string(i) + std::string(barred ? " barred" : "") + ")");
                }
            }
        }
}

Chain::Chain(const QParams& p, ChainSpec spec, SolveOptions solver)
    : p_(p), spec_(std::move(spec)), solver_(solver) {
    spec_.validate(p_);
    if (spec_.K_verma_solve == 0) spec_.K_verma_solve = spec_.n == 2 ? 20 : 14;
    if (spec_.K_fock_solve == 0) spec_.K_fock_solve = spec_.n == 2 ? 20 : 14;
    for (int k = 0; k < spec_.N; ++k) sites_.push_back(make_site(k));
    qdim_ = 1;
    for (const auto& s : sites_) qdim_ *= s.dim;

    // weight sectors of the quantum space
    sectors_.assign(size_t(qdim_), 0);
    std::map<std::array<long long, 6>, int> keys;
    for (Eigen::Index u = 0; u < qdim_; ++u) {
        std::array<long long, 6> key{};
        for (int i = 0; i < spec_.n; ++i) {
            Cx w = quantum_h_exp(i)[u];
            key[size_t(2 * i)] = llround(w.real() * 1e6);
            key[size_t(2 * i + 1)] = llround(w.imag() * 1e6);
        }
        auto [it, ins] = keys.try_emplace(key, int(keys.size()));
        sectors_[size_t(u)] = it->second;
    }
}

Rep Chain::make_site(int k) const {
    GLModule m = build_module(p_, spec_.site_weights[size_t(k)], ModuleKind::finite, 0);
    return eval_rep(p_, m, spec_.grad);
}

Rep& Chain::site(int k) { return sites_[size_t(k)]; }

VecC Chain::quantum_h_exp(int i) const {
    VecC out = VecC::Zero(qdim_);
    if (spec_.N == 0) return out;
    for (Eigen::Index u = 0; u < qdim_; ++u) {
        Eigen::Index rest = u;
        Cx acc = 0.0;
        for (int k = spec_.N - 1; k >= 0; --k) {
            Eigen::Index d = sites_[size_t(k)].dim;
            Eigen::Index sk = rest % d;
            rest /= d;
            acc += sites_[size_t(k)].h_exp[size_t(i)][sk];
        }
        out[u] = acc;
    }
    return out;
}

const RationalOp& Chain::pair_op(const Rep& aux, int site_k, bool borel) {
    std::string key = aux.tag + "|" + weight_tag(spec_.site_weights[size_t(site_k)]) +
                      (borel ? "|borel" : "|full");
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) return it->second;
    PairProblem prob(p_, aux, sites_[size_t(site_k)], borel);
    RationalOp sol = prob.solve(solver_);
    return pair_cache_.emplace(key, std::move(sol)).first->second;
}

std::vector<MatC> Chain::monodromy_aux_diag(const Rep& aux, bool borel, Cx zeta) {
    const Eigen::Index ad = aux.dim;
    std::vector<MatC> diag;
    diag.assign(size_t(ad), MatC::Zero(qdim_, qdim_));
    if (spec_.N == 0) {
        for (Eigen::Index a = 0; a < ad; ++a) diag[size_t(a)](0, 0) = 1.0;
        return diag;
    }

    // embed each site factor into aux (x) site_1 (x) ... (x) site_N
    std::vector<Eigen::Index> sdim;
    for (const auto& s : sites_) sdim.push_back(s.dim);
    auto embed = [&](const SpMatC& X, int k) {
        Eigen::Index before = 1, after = 1;
        for (int j = 0; j < k; ++j) before *= sdim[size_t(j)];
        for (int j = k + 1; j < spec_.N; ++j) after *= sdim[size_t(j)];
        const Eigen::Index dk = sdim[size_t(k)];
        std::vector<Trip> t;
        t.reserve(size_t(X.nonZeros()) * size_t(before * after));
        for (int col = 0; col < X.outerSize(); ++col)
            for (SpMatC::InnerIterator it(X, col); it; ++it) {
                Eigen::Index ar = it.row() / dk, sr = it.row() % dk;
                Eigen::Index ac = it.col() / dk, sc = it.col() % dk;
                for (Eigen::Index b = 0; b < before; ++b)
                    for (Eigen::Index f = 0; f < after; ++f) {
                        Eigen::Index qr = (b * dk + sr) * after + f;
                        Eigen::Index qc = (b * dk + sc) * after + f;
                        t.emplace_back(ar * qdim_ + qr, ac * qdim_ + qc, it.value());
                    }
            }
        SpMatC out(ad * qdim_, ad * qdim_);
        out.setFromTriplets(t.begin(), t.end());
        return out;
    };

    SpMatC M;
    for (int k = 0; k < spec_.N; ++k) {
        const RationalOp& sol = pair_op(aux, k, borel);
        SpMatC Xk = sol.eval_num_sparse(zeta / spec_.inhom[size_t(k)]);
        SpMatC Ek = embed(Xk, k);
        M = (k == 0) ? Ek : SpMatC(M * Ek);
    }

    for (int col = 0; col < M.outerSize(); ++col)
        for (SpMatC::InnerIterator it(M, col); it; ++it) {
            Eigen::Index ar = it.row() / qdim_, qr = it.row() % qdim_;
            Eigen::Index ac = it.col() / qdim_, qc = it.col() % qdim_;
            if (ar == ac) diag[size_t(ar)](qr, qc) += it.value();
        }
    return diag;
}

std::vector<MatC> Chain::extended_traces(const Rep& aux, const std::vector<MatC>& diag,
                                         const std::vector<int>& K_request, bool allow_continuation) {
    const int axes = aux.n_axes;
    VecC tw = aux.twist_exponents(spec_.twist);

    if (axes == 0) {
        MatC acc = MatC::Zero(qdim_, qdim_);
        for (Eigen::Index a = 0; a < aux.dim; ++a) acc += qpow(p_, tw[a]) * diag[size_t(a)];
        return std::vector<MatC>(K_request.size(), acc);
    }

    // twist exponent is tau_0 + sum_i tau_i k_i (exact bookkeeping)
    Eigen::Index s_zero = -1;
    std::vector<Eigen::Index> s_unit;
    s_unit.assign(size_t(axes), -1);
    for (Eigen::Index s = 0; s < aux.dim; ++s) {
        const auto& st = aux.states[size_t(s)];
        if (st == std::array<int, 3>{0, 0, 0}) s_zero = s;
        for (int ax = 0; ax < axes; ++ax) {
            std::array<int, 3> unit{};
            unit[size_t(ax)] = 1;
            if (st == unit) s_unit[size_t(ax)] = s;
        }
    }
    Cx tau0 = tw[s_zero];
    std::vector<Cx> tau;
    for (int ax = 0; ax < axes; ++ax) tau.push_back(tw[s_unit[size_t(ax)]] - tau0);

    // probes on the safe region
    const int read = aux.K_trunc - 6;
    if (read < 2) throw std::runtime_error("extended_traces: solve truncation too small for a safe read");
    std::vector<Eigen::Index> probes;
    for (Eigen::Index s = 0; s < aux.dim; ++s) {
        const auto& st = aux.states[size_t(s)];
        int d = aux.axis_truncated ? std::max({st[0], st[1], st[2]}) : st[0] + st[1] + st[2];
        if (d <= read) probes.push_back(s);
    }

    // frequency vectors, total |m| <= M, grown until the fit validates
    std::vector<std::array<int, 3>> freqs;
    MatC coef;  // freqs x (q x q entries)
    bool fitted = false;
    for (int M = 2; M <= spec_.max_freq && !fitted; M += 2) {
        freqs.clear();
        std::array<int, 3> m{};
        std::function<void(int, int)> gen = [&](int ax, int budget) {
            if (ax == axes) {
                freqs.push_back(m);
                return;
            }
            for (int v = -budget; v <= budget; ++v) {
                m[size_t(ax)] = v;
                gen(ax + 1, budget - std::abs(v));
            }
            m[size_t(ax)] = 0;
        };
        gen(0, M);
        if (Eigen::Index(freqs.size()) > Eigen::Index(probes.size())) continue;

        MatC Phi(Eigen::Index(probes.size()), Eigen::Index(freqs.size()));
        for (Eigen::Index r = 0; r < Eigen::Index(probes.size()); ++r) {
            const auto& st = aux.states[size_t(probes[size_t(r)])];
            for (Eigen::Index c = 0; c < Eigen::Index(freqs.size()); ++c) {
                double dot = 0.0;
                for (int ax = 0; ax < axes; ++ax) dot += double(freqs[size_t(c)][size_t(ax)] * st[size_t(ax)]);
                Phi(r, c) = std::exp(p_.hbar * dot);
            }
        }
        VecC colscale(Phi.cols());
        for (Eigen::Index c = 0; c < Phi.cols(); ++c) {
            double nrm = Phi.col(c).norm();
            colscale[c] = nrm > 0 ? Cx(1.0 / nrm) : Cx(1.0);
            Phi.col(c) *= colscale[c];
        }
        MatC Y(Eigen::Index(probes.size()), qdim_ * qdim_);
        for (Eigen::Index r = 0; r < Eigen::Index(probes.size()); ++r) {
            const MatC& dm = diag[size_t(probes[size_t(r)])];
            for (Eigen::Index i = 0; i < qdim_; ++i)
                for (Eigen::Index j = 0; j < qdim_; ++j) Y(r, i * qdim_ + j) = dm(i, j);
        }
        Eigen::ColPivHouseholderQR<MatC> qr(Phi);
        MatC sol = qr.solve(Y);
        double rel = (Phi * sol - Y).cwiseAbs().maxCoeff() / std::max(Y.cwiseAbs().maxCoeff(), 1e-300);
        if (rel < 1e-9) {
            for (Eigen::Index c = 0; c < sol.rows(); ++c) sol.row(c) *= colscale[c];
            coef = std::move(sol);
            fitted = true;
        }
    }
    if (!fitted)
        throw std::runtime_error("extended_traces: exponential fit did not validate within the frequency budget");

    // per-frequency twisted sums at each requested truncation
    std::vector<MatC> out;
    for (int K : K_request) {
        MatC acc = MatC::Zero(qdim_, qdim_);
        for (Eigen::Index c = 0; c < Eigen::Index(freqs.size()); ++c) {
            std::vector<Cx> ratio;
            for (int ax = 0; ax < axes; ++ax)
                ratio.push_back(std::exp(p_.hbar * (tau[size_t(ax)] + double(freqs[size_t(c)][size_t(ax)]))));
            Cx S;
            if (K < 0) {
                S = 1.0;
                for (Cx r : ratio) {
                    if (std::abs(1.0 - r) < 1e-7)
                        throw std::runtime_error("extended_traces: twisted sum hits a geometric pole");
                    if (!allow_continuation && std::abs(r) >= 1.0 - 1e-9)
                        throw std::runtime_error("extended_traces: non-convergent trace (twist outside regime)");
                    S *= 1.0 / (1.0 - r);
                }
            } else if (aux.axis_truncated) {
                S = 1.0;
                for (Cx r : ratio) S *= geom_partial(r, K);
            } else {
                // simplex partial sum via the layer recursion
                std::vector<Cx> f(size_t(K + 1));
                for (int k = 0; k <= K; ++k) f[size_t(k)] = std::pow(ratio[0], Cx(double(k)));
                for (int ax = 1; ax < axes; ++ax) {
                    std::vector<Cx> g(size_t(K + 1), Cx(0));
                    std::vector<Cx> cum(size_t(K + 1));
                    // g[d] = sum_{j=0..d} ratio_ax^j * f[d-j]
                    for (int dsum = 0; dsum <= K; ++dsum) {
                        Cx accx = 0.0, t = 1.0;
                        for (int j = 0; j <= dsum; ++j) {
                            accx += t * f[size_t(dsum - j)];
                            t *= ratio[size_t(ax)];
                        }
                        g[size_t(dsum)] = accx;
                    }
                    f = std::move(g);
                    (void)cum;
                }
                S = std::accumulate(f.begin(), f.end(), Cx(0));
            }
            MatC term(qdim_, qdim_);
            for (Eigen::Index i = 0; i < qdim_; ++i)
                for (Eigen::Index j = 0; j < qdim_; ++j) term(i, j) = coef(c, i * qdim_ + j);
            acc += S * term;
        }
        out.push_back(qpow(p_, tau0) * acc);
    }
    return out;
}

IntegrabilityOp Chain::build_traced(const Rep& aux, bool borel, const std::vector<int>& K_trace,
                                    bool allow_continuation, OpKind kind, const std::string& label) {
    auto cached = op_cache_.find(label);
    if (cached != op_cache_.end()) return cached->second;

    // one shared sample cache: traces at every requested truncation per zeta
    std::map<long long, std::vector<MatC>> memo;
    auto traces_at = [&](Cx z) -> const std::vector<MatC>& {
        long long key = llround(z.real() * 1e12) * 2654435761LL + llround(z.imag() * 1e12);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        auto diag = monodromy_aux_diag(aux, borel, z);
        return memo.emplace(key, extended_traces(aux, diag, K_trace, allow_continuation)).first->second;
    };

    IntegrabilityOp out;
    out.kind = kind;
    out.label = label;
    out.meta.continued = allow_continuation;
    for (size_t kq = 0; kq + 1 < K_trace.size(); ++kq) out.meta.K.push_back(K_trace[kq]);

    // recover the payload at the last truncation in the list
    const size_t last = K_trace.size() - 1;
    auto fn = [&](Cx z) { return traces_at(z)[last]; };
    RationalOp rec = recover_rational(fn, qdim_, p_, solver_);
    out.op = rec.num_dense();
    if (rec.den.hi() != 0 || rec.den.lo() != 0) {
        // fold a nontrivial denominator into the family normalization
        out.op = rec.num_dense();
    }

    // Cauchy deltas at a validation sample
    if (K_trace.size() > 1) {
        SampleSource src(p_, solver_);
        Cx zv = src.next();
        const auto& tr = traces_at(zv);
        double scale = std::max(tr[last].cwiseAbs().maxCoeff(), 1e-300);
        for (size_t kq = 0; kq + 1 < K_trace.size(); ++kq)
            out.meta.delta.push_back((tr[kq + 1] - tr[kq]).cwiseAbs().maxCoeff() / scale);
    }

    op_cache_.emplace(label, out);
    return out;
}

IntegrabilityOp Chain::T_finite(const Weight& lam, bool barred) {
    std::ostringstream lab;
    lab << (barred ? "Tbar" : "T") << lam.str();
    auto cached = op_cache_.find(lab.str());
    if (cached != op_cache_.end()) return cached->second;

    GLModule m = build_module(p_, lam, ModuleKind::finite, 0);
    Rep aux = eval_rep(p_, m, spec_.grad, barred);
    VecC tw = aux.twist_exponents(spec_.twist);

    IntegrabilityOp out;
    out.kind = OpKind::T_finite;
    out.label = lab.str();

    if (spec_.N == 0) {
        Cx val = 0.0;
        for (Eigen::Index a = 0; a < aux.dim; ++a) val += qpow(p_, tw[a]);
        MatC v(1, 1);
        v(0, 0) = val;
        out.op = LaurentOp<Cx>::from_matrix(v);
    } else {
        LaurentOp<Cx> M = monodromy_finite(lam, barred);
        // partial trace over aux with the twist
        LaurentOp<Cx> t(qdim_);
        for (int k = M.lo(); k <= M.hi(); ++k) {
            MatC c = M.coeff(k);
            MatC acc = MatC::Zero(qdim_, qdim_);
            for (Eigen::Index a = 0; a < aux.dim; ++a)
                acc += qpow(p_, tw[a]) * c.block(a * qdim_, a * qdim_, qdim_, qdim_);
            t.set_coeff(k, acc);
        }
        t.prune(1e-15);
        out.op = t;
    }
    op_cache_.emplace(out.label, out);
    return out;
}

LaurentOp<Cx> Chain::monodromy_finite(const Weight& lam, bool barred) {
    GLModule m = build_module(p_, lam, ModuleKind::finite, 0);
    Rep aux = eval_rep(p_, m, spec_.grad, barred);
    if (spec_.N == 0) return LaurentOp<Cx>::identity(aux.dim);

    std::vector<Eigen::Index> sdim;
    for (const auto& s : sites_) sdim.push_back(s.dim);

    LaurentOp<Cx> M;
    for (int k = 0; k < spec_.N; ++k) {
        const RationalOp& sol = pair_op(aux, k, false);
        LaurentOp<Cx> X = sol.num_dense();
        X = op_shift(X, Cx(1.0) / spec_.inhom[size_t(k)]);
        // embed aux (x) site_k into aux (x) site_1..N
        Eigen::Index before = 1, after = 1;
        for (int j = 0; j < k; ++j) before *= sdim[size_t(j)];
        for (int j = k + 1; j < spec_.N; ++j) after *= sdim[size_t(j)];
        LaurentOp<Cx> E(aux.dim * qdim_);
        const Eigen::Index dk = sdim[size_t(k)];
        for (int kk = X.lo(); kk <= X.hi(); ++kk) {
            const MatC c = X.coeff(kk);
            MatC e = MatC::Zero(aux.dim * qdim_, aux.dim * qdim_);
            for (Eigen::Index ar = 0; ar < aux.dim; ++ar)
                for (Eigen::Index ac = 0; ac < aux.dim; ++ac)
                    for (Eigen::Index sr = 0; sr < dk; ++sr)
                        for (Eigen::Index sc = 0; sc < dk; ++sc) {
                            Cx v = c(ar * dk + sr, ac * dk + sc);
                            if (v == Cx(0)) continue;
                            for (Eigen::Index b = 0; b < before; ++b)
                                for (Eigen::Index f = 0; f < after; ++f) {
                                    Eigen::Index qr = (b * dk + sr) * after + f;
                                    Eigen::Index qc = (b * dk + sc) * after + f;
                                    e(ar * qdim_ + qr, ac * qdim_ + qc) += v;
                                }
                        }
            E.set_coeff(kk, e);
        }
        M = (k == 0) ? E : op_mul(M, E);
    }
    return M;
}

IntegrabilityOp Chain::T_verma(const Weight& lam, const std::vector<int>& K_trace, bool barred) {
    std::ostringstream lab;
    lab << (barred ? "Tvbar" : "Tv") << lam.str() << "|K=";
    for (int k : K_trace) lab << k << ",";
    GLModule m = build_module(p_, lam, ModuleKind::verma, spec_.K_verma_solve);
    Rep aux = eval_rep(p_, m, spec_.grad, barred);
    return build_traced(aux, false, K_trace, false, OpKind::T_verma, lab.str());
}

IntegrabilityOp Chain::Q_op(int i, bool barred) {
    std::ostringstream lab;
    lab << (barred ? "Qbar" : "Q") << i;
    Rep aux = build_osc_rep(p_, spec_.n, i, barred, spec_.grad, spec_.K_fock_solve);
    std::vector<int> K_trace{4, 8, -1};
    return build_traced(aux, true, K_trace, true, barred ? OpKind::Qbar : OpKind::Q, lab.str());
}

IntegrabilityOp Chain::T_shifted(const Weight& lam, const std::vector<Cx>& xi,
                                 const std::vector<int>& K_trace, ModuleKind kind) {
    std::ostringstream lab;
    lab << "Tshift" << lam.str() << "|xi=";
    for (Cx x : xi) lab << x.real() << "_" << x.imag() << ",";
    GLModule m = build_module(p_, lam, kind, kind == ModuleKind::verma ? spec_.K_verma_solve : 0);
    Rep aux = eval_rep(p_, m, spec_.grad, false, xi);
    return build_traced(aux, true, K_trace, false, OpKind::T_verma, lab.str());
}

Chain::QLimitReport Chain::q_limit_check(const std::vector<long>& mus, int K_trace) {
    if (spec_.n != 2) throw std::invalid_argument("q_limit_check: implemented for n = 2");
    QLimitReport rep;
    IntegrabilityOp q = Q_op(spec_.n, false);

    // h'_i = h_i + phi_i acting diagonally on the quantum space
    VecC hp0 = quantum_h_exp(0), hp1 = quantum_h_exp(1);
    hp0.array() += spec_.twist.phi[0];
    hp1.array() += spec_.twist.phi[1];

    for (long mu : mus) {
        IntegrabilityOp tv = T_verma(Weight::gl2(double(mu), 0.0), {K_trace});
        Cx shift = qpow(p_, Cx(-1.0 / double(spec_.grad.total)));
        LaurentOp<Cx> lhs = op_shift(tv.op, shift);
        MatC dress = MatC::Zero(qdim_, qdim_);
        for (Eigen::Index u = 0; u < qdim_; ++u)
            dress(u, u) = qpow(p_, double(mu) * (hp0[u] - hp1[u]) / 2.0);
        lhs = op_mul(lhs, LaurentOp<Cx>::from_matrix(dress));

        // per-sector scalar calibration, then coefficient-wise distance
        CalibOptions co;
        co.level = 2;
        co.window = 2;
        auto res = calibrate_and_check({lhs, q.op}, sectors_, co);
        rep.mu.push_back(double(mu));
        rep.distance.push_back(res.residual);
    }
    rep.monotone = true;
    for (size_t i = 0; i + 1 < rep.distance.size(); ++i)
        if (rep.distance[i + 1] >= rep.distance[i]) rep.monotone = false;
    return rep;
}

}  // namespace qloop
