#include "qloop/glmod.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/LU>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace qloop {

namespace {

long as_nonneg_int(Cx v, const char* what, double tol = 1e-9) {
    double re = v.real();
    long r = std::lround(re);
    if (std::abs(v.imag()) > tol || std::abs(re - double(r)) > tol || r < 0)
        throw std::invalid_argument(std::string(what) + ": expected a non-negative integer, got " +
                                    std::to_string(re) + (v.imag() != 0 ? "+i*..." : ""));
    return r;
}

using Trip = Eigen::Triplet<Cx>;

SpMatC from_triplets(Eigen::Index dim, const std::vector<Trip>& ts) {
    SpMatC m(dim, dim);
    m.setFromTriplets(ts.begin(), ts.end());
    m.makeCompressed();
    return m;
}

}  // namespace

bool Weight::dominant_integral(double tol) const {
    for (int i = 0; i + 1 < n; ++i) {
        Cx d = comp[size_t(i)] - comp[size_t(i) + 1];
        long r = std::lround(d.real());
        if (std::abs(d.imag()) > tol || std::abs(d.real() - double(r)) > tol || r < 0) return false;
    }
    return true;
}

std::string Weight::str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < n; ++i) {
        if (i) os << ",";
        os << comp[size_t(i)].real();
        if (comp[size_t(i)].imag() != 0) os << (comp[size_t(i)].imag() > 0 ? "+" : "") << comp[size_t(i)].imag() << "i";
    }
    os << ")";
    return os.str();
}

VecC GLModule::cartan_exponents(const std::array<Cx, 3>& c) const {
    VecC v(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        Cx acc = 0.0;
        for (int i = 0; i < n; ++i) acc += c[size_t(i)] * g_exp[size_t(s)][size_t(i)];
        v[s] = acc;
    }
    return v;
}

MatC GLModule::cartan_diag(const QParams& p, const std::array<Cx, 3>& c, Cx scale) const {
    VecC e = cartan_exponents(c);
    MatC d = MatC::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) d(s, s) = scale * qpow(p, e[s]);
    return d;
}

GLModule build_gl2(const QParams& p, const Weight& w, ModuleKind kind, int K_trunc) {
    if (w.n != 2) throw std::invalid_argument("build_gl2: weight rank must be 2");
    GLModule m;
    m.n = 2;
    m.weight = w;
    m.kind = kind;
    const Cx l1 = w.comp[0], l2 = w.comp[1];
    const Cx lam = l1 - l2;

    long top = 0;
    if (kind == ModuleKind::finite) {
        if (!w.dominant_integral())
            throw std::invalid_argument("build_gl2: finite kind needs lambda_1 - lambda_2 in Z_{>=0}, got " + w.str());
        top = as_nonneg_int(lam, "build_gl2");
        m.K_trunc = int(top);
        m.safe_depth = 1 << 30;  // exact module, no truncation boundary
    } else {
        if (K_trunc < 1) throw std::invalid_argument("build_gl2: verma kind needs K_trunc >= 1");
        top = K_trunc;
        m.K_trunc = K_trunc;
        m.safe_depth = K_trunc - 3;
    }

    m.dim = top + 1;
    m.states.resize(size_t(m.dim));
    m.g_exp.resize(size_t(m.dim));
    for (long k = 0; k <= top; ++k) {
        m.states[size_t(k)] = {int(k), 0, 0};
        m.g_exp[size_t(k)] = {l1 - double(k), l2 + double(k), 0.0};
    }

    std::vector<Trip> tF, tE;
    for (long k = 0; k <= top; ++k) {
        if (k + 1 <= top) tF.emplace_back(k + 1, k, Cx(1.0));  // F v_k = v_{k+1}
        if (k >= 1) tE.emplace_back(k - 1, k, qnum(p, double(k)) * qnum(p, lam - double(k) + 1.0));
    }
    m.F.push_back(from_triplets(m.dim, tF));
    m.E.push_back(from_triplets(m.dim, tE));
    return m;
}

namespace {

struct Gl3Basis {
    std::vector<std::array<int, 3>> states;  // (k1, k3, k2), graded-lex
    std::map<std::array<int, 3>, Eigen::Index> index;

    explicit Gl3Basis(int K) {
        for (int d = 0; d <= K; ++d)
            for (int k1 = d; k1 >= 0; --k1)
                for (int k3 = d - k1; k3 >= 0; --k3) {
                    int k2 = d - k1 - k3;
                    states.push_back({k1, k3, k2});
                }
        std::sort(states.begin(), states.end(), [](const auto& a, const auto& b) {
            int da = a[0] + a[1] + a[2], db = b[0] + b[1] + b[2];
            if (da != db) return da < db;
            return a < b;
        });
        for (Eigen::Index i = 0; i < Eigen::Index(states.size()); ++i) index[states[size_t(i)]] = i;
    }

    Eigen::Index find(int k1, int k3, int k2) const {
        if (k1 < 0 || k3 < 0 || k2 < 0) return -1;
        auto it = index.find({k1, k3, k2});
        return it == index.end() ? -1 : it->second;
    }
};

// Verma-module generator matrices of U_q(gl_3) on the degree-truncated basis
// F_1^{k1} F_3^{k3} F_2^{k2} v_0 with F_3 = F_2 F_1 - q F_1 F_2.
GLModule build_gl3_verma(const QParams& p, const Weight& w, int K) {
    GLModule m;
    m.n = 3;
    m.weight = w;
    m.kind = ModuleKind::verma;
    m.K_trunc = K;
    m.safe_depth = K - 4;

    Gl3Basis basis(K);
    m.states = basis.states;
    m.dim = Eigen::Index(m.states.size());
    const Cx l1 = w.comp[0], l2 = w.comp[1], l3 = w.comp[2];
    const Cx l12 = l1 - l2, l13 = l1 - l3, l23 = l2 - l3;

    m.g_exp.resize(size_t(m.dim));
    for (Eigen::Index s = 0; s < m.dim; ++s) {
        auto [k1, k3, k2] = m.states[size_t(s)];
        m.g_exp[size_t(s)] = {l1 - double(k1) - double(k3), l2 + double(k1) - double(k2),
                              l3 + double(k2) + double(k3)};
    }

    std::vector<Trip> tF1, tF2, tF3, tE1, tE2, tE3;
    auto add = [&](std::vector<Trip>& t, Eigen::Index col, Eigen::Index row, Cx val) {
        if (row >= 0 && val != Cx(0)) t.emplace_back(row, col, val);
    };

    for (Eigen::Index s = 0; s < m.dim; ++s) {
        auto [k1, k3, k2] = m.states[size_t(s)];
        const double K1 = k1, K3 = k3, K2 = k2;

        add(tF1, s, basis.find(k1 + 1, k3, k2), 1.0);
        add(tF2, s, basis.find(k1, k3, k2 + 1), qpow(p, K1 - K3));
        add(tF2, s, basis.find(k1 - 1, k3 + 1, k2), qnum(p, K1));
        add(tF3, s, basis.find(k1, k3 + 1, k2), qpow(p, -K1));

        add(tE1, s, basis.find(k1 - 1, k3, k2), qnum(p, l12 - K1 + K2 - K3 + 1.0) * qnum(p, K1));
        add(tE1, s, basis.find(k1, k3 - 1, k2 + 1), -qpow(p, l12 + K2 - K3 + 2.0) * qnum(p, K3));

        add(tE2, s, basis.find(k1, k3, k2 - 1), qnum(p, l23 - K2 + 1.0) * qnum(p, K2));
        add(tE2, s, basis.find(k1 + 1, k3 - 1, k2), qpow(p, -l23 + 2.0 * K2) * qnum(p, K3));

        add(tE3, s, basis.find(k1, k3 - 1, k2),
            qpow(p, K1) * qnum(p, l13 - K1 - K2 - K3 + 1.0) * qnum(p, K3));
        add(tE3, s, basis.find(k1 - 1, k3, k2 - 1),
            -qpow(p, -l12 + K1 - K2 + K3 - 1.0) * qnum(p, l23 - K2 + 1.0) * qnum(p, K1) * qnum(p, K2));
    }

    m.F = {from_triplets(m.dim, tF1), from_triplets(m.dim, tF2), from_triplets(m.dim, tF3)};
    m.E = {from_triplets(m.dim, tE1), from_triplets(m.dim, tE2), from_triplets(m.dim, tE3)};
    return m;
}

// The finite-dimensional quotient: span of singular-vector descendants is the
// radical of the contravariant form; kept states are rank-revealing pivots of
// its weight blocks.
GLModule build_gl3_finite(const QParams& p, const Weight& w) {
    if (!w.dominant_integral())
        throw std::invalid_argument("build_gl3: finite kind needs integral dominant weight, got " + w.str());
    const long a = as_nonneg_int(w.comp[0] - w.comp[1], "build_gl3");
    const long b = as_nonneg_int(w.comp[1] - w.comp[2], "build_gl3");
    const int K = int(2 * (a + b)) + 2;

    GLModule big = build_gl3_verma(p, w, K);
    const Eigen::Index N = big.dim;

    // Contravariant Gram rows r_k = (E1^T)^{k1} (Et3^T)^{k3} (E2^T)^{k2} e_0,
    // Et3 = omega(F_3) = E1 E2 - q E2 E1.
    MatC E1 = MatC(big.E[0]), E2 = MatC(big.E[1]);
    MatC Et3 = E1 * E2 - p.q * E2 * E1;
    MatC E1t = E1.transpose(), E2t = E2.transpose(), Et3t = Et3.transpose();

    MatC B(N, N);
    B.setZero();
    B(0, 0) = 1.0;
    std::vector<VecC> rows;
    rows.resize(size_t(N));
    rows[0] = VecC::Zero(N);
    rows[0][0] = 1.0;
    // rscale tracks the largest intermediate along each recursion path; it is
    // the cancellation scale against which a numerically-zero row is judged.
    std::vector<double> rscale(size_t(N), 1.0);
    Gl3Basis basis(K);
    for (Eigen::Index s = 1; s < N; ++s) {
        auto [k1, k3, k2] = big.states[size_t(s)];
        Eigen::Index prev;
        const MatC* op;
        double opscale;
        if (k1 > 0) {
            prev = basis.find(k1 - 1, k3, k2);
            op = &E1t;
            opscale = E1t.cwiseAbs().maxCoeff();
        } else if (k3 > 0) {
            prev = basis.find(0, k3 - 1, k2);
            op = &Et3t;
            opscale = Et3t.cwiseAbs().maxCoeff();
        } else {
            prev = basis.find(0, 0, k2 - 1);
            op = &E2t;
            opscale = E2t.cwiseAbs().maxCoeff();
        }
        rows[size_t(s)] = (*op) * rows[size_t(prev)];
        rscale[size_t(s)] = std::max(rscale[size_t(prev)] * std::max(opscale, 1.0),
                                     rows[size_t(s)].cwiseAbs().maxCoeff());
        B.row(s) = rows[size_t(s)].transpose();
    }

    // Weight blocks keyed by the root-lattice depth (m1, m2).
    std::map<std::pair<int, int>, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index s = 0; s < N; ++s) {
        auto [k1, k3, k2] = big.states[size_t(s)];
        blocks[{k1 + k3, k3 + k2}].push_back(s);
    }

    std::vector<Eigen::Index> kept;                       // Verma indices of quotient basis
    std::map<std::pair<int, int>, MatC> proj;             // per-block projector onto kept along radical
    std::map<std::pair<int, int>, std::vector<Eigen::Index>> kept_local;  // kept positions in block

    for (auto& [key, idx] : blocks) {
        const int bd = int(idx.size());
        MatC Bb(bd, bd);
        for (int i = 0; i < bd; ++i)
            for (int j = 0; j < bd; ++j) Bb(i, j) = B(idx[size_t(i)], idx[size_t(j)]);
        Eigen::JacobiSVD<MatC> svd(Bb, Eigen::ComputeFullU | Eigen::ComputeFullV);
        double pathscale = 1.0;
        for (auto s : idx) pathscale = std::max(pathscale, rscale[size_t(s)]);
        const double tau = 1e-11 * pathscale;  // roundoff floor of the Gram recursion
        int rank = 0;
        for (int i = 0; i < bd; ++i)
            if (svd.singularValues()[i] > tau) ++rank;
        if (rank == 0) continue;

        // kept states: first (graded-lex) unit vectors completing the radical to a basis
        const int nullity = bd - rank;
        MatC ker = nullity > 0 ? MatC(svd.matrixV().rightCols(nullity)) : MatC::Zero(bd, 0);
        std::vector<Eigen::Index> loc;
        MatC acc = ker;
        for (int i = 0; i < bd && int(loc.size()) < rank; ++i) {
            MatC trial(bd, acc.cols() + 1);
            trial.leftCols(acc.cols()) = acc;
            trial.col(acc.cols()).setZero();
            trial(i, acc.cols()) = 1.0;
            Eigen::ColPivHouseholderQR<MatC> q2(trial);
            q2.setThreshold(1e-10);
            if (q2.rank() == trial.cols()) {
                loc.push_back(i);
                acc = trial;
            }
        }

        // projector: solve [C | kernel] x = v, keep the C-part
        MatC M(bd, bd);
        M.setZero();
        for (int i = 0; i < rank; ++i) M(loc[size_t(i)], i) = 1.0;
        if (nullity > 0) M.rightCols(nullity) = ker;
        MatC Minv = M.fullPivLu().inverse();
        proj[key] = Minv.topRows(rank);
        kept_local[key] = loc;
        for (int i = 0; i < rank; ++i) kept.push_back(idx[size_t(loc[size_t(i)])]);
    }
    std::sort(kept.begin(), kept.end());

    std::map<Eigen::Index, Eigen::Index> verma_to_q;
    for (Eigen::Index i = 0; i < Eigen::Index(kept.size()); ++i) verma_to_q[kept[size_t(i)]] = i;

    GLModule m;
    m.n = 3;
    m.weight = w;
    m.kind = ModuleKind::finite;
    m.K_trunc = K;
    m.safe_depth = 1 << 30;
    m.dim = Eigen::Index(kept.size());
    m.states.reserve(size_t(m.dim));
    m.g_exp.reserve(size_t(m.dim));
    for (auto s : kept) {
        m.states.push_back(big.states[size_t(s)]);
        m.g_exp.push_back(big.g_exp[size_t(s)]);
    }

    // push each generator through the quotient
    auto project_column = [&](const VecC& col) {
        VecC out = VecC::Zero(m.dim);
        std::map<std::pair<int, int>, bool> touched;
        for (Eigen::Index r = 0; r < N; ++r) {
            if (col[r] == Cx(0)) continue;
            auto [k1, k3, k2] = big.states[size_t(r)];
            touched[{k1 + k3, k3 + k2}] = true;
        }
        for (auto& [key, flag] : touched) {
            auto itp = proj.find(key);
            auto& idx = blocks[key];
            VecC v(idx.size());
            for (size_t i = 0; i < idx.size(); ++i) v[Eigen::Index(i)] = col[idx[i]];
            if (itp == proj.end()) continue;  // block entirely radical
            VecC coeff = itp->second * v;
            auto& loc = kept_local[key];
            for (size_t i = 0; i < loc.size(); ++i) {
                Eigen::Index verma_idx = idx[size_t(loc[i])];
                out[verma_to_q[verma_idx]] += coeff[Eigen::Index(i)];
            }
        }
        return out;
    };

    auto push = [&](const SpMatC& g) {
        std::vector<Trip> t;
        for (Eigen::Index c = 0; c < m.dim; ++c) {
            VecC col = VecC::Zero(N);
            col[kept[size_t(c)]] = 1.0;
            VecC img = g * col;
            VecC qcol = project_column(img);
            for (Eigen::Index r = 0; r < m.dim; ++r)
                if (std::abs(qcol[r]) > 1e-13 * std::max(1.0, qcol.cwiseAbs().maxCoeff()))
                    t.emplace_back(r, c, qcol[r]);
        }
        return from_triplets(m.dim, t);
    };

    for (int i = 0; i < 3; ++i) {
        m.E.push_back(push(big.E[size_t(i)]));
        m.F.push_back(push(big.F[size_t(i)]));
    }
    return m;
}

}  // namespace

GLModule build_gl3(const QParams& p, const Weight& w, ModuleKind kind, int K_trunc) {
    if (w.n != 3) throw std::invalid_argument("build_gl3: weight rank must be 3");
    if (kind == ModuleKind::verma) {
        if (K_trunc < 1) throw std::invalid_argument("build_gl3: verma kind needs K_trunc >= 1");
        return build_gl3_verma(p, w, K_trunc);
    }
    return build_gl3_finite(p, w);
}

double check_gl_relations(const QParams& p, const GLModule& m) {
    const Eigen::Index d = m.dim;
    std::vector<Eigen::Index> safe;
    for (Eigen::Index s = 0; s < d; ++s)
        if (m.degree(s) <= m.safe_depth) safe.push_back(s);
    if (safe.empty()) return 0.0;

    auto restrict_cols = [&](const MatC& a) {
        MatC r(d, Eigen::Index(safe.size()));
        for (Eigen::Index j = 0; j < Eigen::Index(safe.size()); ++j) r.col(j) = a.col(safe[size_t(j)]);
        return r;
    };
    double worst = 0.0;
    auto compare = [&](const MatC& lhs, const MatC& rhs) {
        MatC L = restrict_cols(lhs), R = restrict_cols(rhs);
        double scale = std::max({L.cwiseAbs().maxCoeff(), R.cwiseAbs().maxCoeff(), 1.0});
        worst = std::max(worst, (L - R).cwiseAbs().maxCoeff() / scale);
    };

    const int nsimple = m.n - 1;
    std::vector<MatC> E(nsimple), F(nsimple);
    for (int i = 0; i < nsimple; ++i) {
        E[size_t(i)] = MatC(m.E[size_t(i)]);
        F[size_t(i)] = MatC(m.F[size_t(i)]);
    }

    // (3.2): q^{G_j} E_i q^{-G_j} = q^{alpha_i(G_j)} E_i, alpha_i(G_j) = c_{ji}
    for (int j = 1; j <= m.n; ++j) {
        std::array<Cx, 3> c{};
        c[size_t(j - 1)] = 1.0;
        MatC qg = m.cartan_diag(p, c);
        MatC qgi = qg.diagonal().cwiseInverse().asDiagonal();
        for (int i = 1; i <= nsimple; ++i) {
            double cji = (j == i) ? 1.0 : (j == i + 1 ? -1.0 : 0.0);
            compare(qg * E[size_t(i - 1)] * qgi, qpow(p, cji) * E[size_t(i - 1)]);
            compare(qg * F[size_t(i - 1)] * qgi, qpow(p, -cji) * F[size_t(i - 1)]);
        }
    }

    // (3.3): [E_i, F_j] = delta_ij kappa^{-1} (q^{G_i - G_{i+1}} - q^{G_{i+1} - G_i})
    for (int i = 1; i <= nsimple; ++i)
        for (int j = 1; j <= nsimple; ++j) {
            MatC lhs = E[size_t(i - 1)] * F[size_t(j - 1)] - F[size_t(j - 1)] * E[size_t(i - 1)];
            MatC rhs = MatC::Zero(d, d);
            if (i == j) {
                std::array<Cx, 3> c{};
                c[size_t(i - 1)] = 1.0;
                c[size_t(i)] = -1.0;
                std::array<Cx, 3> cm{};
                cm[size_t(i - 1)] = -1.0;
                cm[size_t(i)] = 1.0;
                rhs = (m.cartan_diag(p, c) - m.cartan_diag(p, cm)) / p.kappa_q;
            }
            compare(lhs, rhs);
        }

    // (3.5)/(3.6): Serre relations with the [2]_q coefficient (n = 3 only)
    if (m.n == 3) {
        Cx two = qnum(p, 2.0);
        for (int i = 0; i < 2; ++i) {
            int j = 1 - i;
            compare(E[size_t(i)] * E[size_t(i)] * E[size_t(j)] - two * E[size_t(i)] * E[size_t(j)] * E[size_t(i)] +
                        E[size_t(j)] * E[size_t(i)] * E[size_t(i)],
                    MatC::Zero(d, d));
            compare(F[size_t(i)] * F[size_t(i)] * F[size_t(j)] - two * F[size_t(i)] * F[size_t(j)] * F[size_t(i)] +
                        F[size_t(j)] * F[size_t(i)] * F[size_t(i)],
                    MatC::Zero(d, d));
        }
    }
    return worst;
}

}  // namespace qloop
