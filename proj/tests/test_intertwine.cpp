#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qloop/intertwine.hpp"
#include "qloop/osc.hpp"

using namespace qloop;

namespace {

const QParams P = QParams::from_hbar(Cx(0.35, 0.0));

Rep fund_rep(const QParams& p, int n) {
    if (n == 2) return eval_rep(p, build_gl2(p, Weight::gl2(1.0, 0.0), ModuleKind::finite), GradationS::uniform(2));
    return eval_rep(p, build_gl3(p, Weight::gl3(1.0, 0.0, 0.0), ModuleKind::finite), GradationS::uniform(3));
}

// embed a two-site operator into positions (i,j) of a 3-fold product of d-dim spaces
MatC embed3(const MatC& R, int i, int j, Eigen::Index d) {
    Eigen::Index D = d * d * d;
    MatC out = MatC::Zero(D, D);
    auto idx = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) { return (a * d + b) * d + c; };
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index c = 0; c < d; ++c)
                for (Eigen::Index ap = 0; ap < d; ++ap)
                    for (Eigen::Index bp = 0; bp < d; ++bp)
                        for (Eigen::Index cp = 0; cp < d; ++cp) {
                            std::array<Eigen::Index, 3> r{a, b, c}, s{ap, bp, cp};
                            int spec = 3 - i - j;
                            if (r[size_t(spec)] != s[size_t(spec)]) continue;
                            out(idx(a, b, c), idx(ap, bp, cp)) +=
                                R(r[size_t(i)] * d + r[size_t(j)], s[size_t(i)] * d + s[size_t(j)]);
                        }
    return out;
}

}  // namespace

TEST_CASE("fundamental R-matrix, n = 2: structure and intertwining") {
    auto v = fund_rep(P, 2);
    auto R = solve_R(P, v, v);
    CHECK(!R.diag.degenerate);
    CHECK(R.diag.holdout_err < 1e-9);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.85, 1.25), a(0.0, 2 * M_PI);
    for (int t = 0; t < 5; ++t) {
        Cx z = std::polar(u(rng), a(rng));
        MatC X = R.eval(z);
        CHECK(intertwining_residual(P, v, v, false, X, z) < 1e-9);
        // invertible away from singular ratios
        MatC XX = X * X.inverse();
        CHECK((XX - MatC::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
        // weight conservation forces exactly 6 nonzero entries
        int nz = 0;
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j)
                if (std::abs(X(i, j)) > 1e-10 * X.cwiseAbs().maxCoeff()) ++nz;
        CHECK(nz == 6);
    }

    // anchor convention: the hw (x) hw entry of the anchored solution is 1,
    // i.e. num(0,0)/den = 1 identically
    auto p00 = R.num_dense().entry(0, 0);
    LaurentPoly<Cx> diff = p00 - R.den;
    CHECK(diff.max_abs() < 1e-10 * R.den.max_abs());
}

TEST_CASE("held-out ratio reproduces a direct solve") {
    auto v = fund_rep(P, 2);
    auto R = solve_R(P, v, v);
    PairProblem prob(P, v, v, false);
    Cx z(1.07, 0.21);
    MatC direct = MatC(prob.solve_at(z));
    MatC rec = R.eval(z);
    CHECK((direct - rec).cwiseAbs().maxCoeff() < 1e-9 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("Yang-Baxter equation for fundamental triples") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.9, 1.2), a(0.0, 2 * M_PI);
    for (int n : {2, 3}) {
        auto v = fund_rep(P, n);
        auto R = solve_R(P, v, v);
        Eigen::Index d = v.dim;
        for (int t = 0; t < 5; ++t) {
            Cx z1 = std::polar(u(rng), a(rng)), z2 = std::polar(u(rng), a(rng)), z3 = std::polar(u(rng), a(rng));
            MatC R12 = embed3(R.eval(z1 / z2), 0, 1, d);
            MatC R13 = embed3(R.eval(z1 / z3), 0, 2, d);
            MatC R23 = embed3(R.eval(z2 / z3), 1, 2, d);
            MatC lhs = R12 * R13 * R23, rhs = R23 * R13 * R12;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * rhs.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("R at equal arguments is permutation-like") {
    auto v = fund_rep(P, 2);
    auto R = solve_R(P, v, v);
    MatC X = R.eval(Cx(1.0, 0.0));
    MatC Perm = MatC::Zero(4, 4);
    Perm(0, 0) = Perm(3, 3) = Perm(1, 2) = Perm(2, 1) = 1.0;
    Cx scale = X(0, 0);
    CHECK((X / scale - Perm).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("L-operator on Fock (x) fundamental, n = 2") {
    auto v = fund_rep(P, 2);
    auto rho = build_osc_rep(P, 2, 2, false, GradationS::uniform(2), 14);
    auto L = solve_L(P, rho, v);
    CHECK(L.diag.holdout_err < 1e-9);

    Cx z(0.94, 0.18);
    MatC X = L.eval(z);
    CHECK(intertwining_residual(P, rho, v, true, X, z, 4) < 1e-8);

    // block structure over Fock space: entries shift the Fock level by at most 1,
    // in step with the site weight (checked away from the truncation boundary)
    double xscale = 0.0;
    for (Eigen::Index u = 0; u < (rho.dim - 4) * 2; ++u)
        for (Eigen::Index w = 0; w < (rho.dim - 4) * 2; ++w) xscale = std::max(xscale, std::abs(X(u, w)));
    for (Eigen::Index u = 0; u < (rho.dim - 4) * 2; ++u)
        for (Eigen::Index w = 0; w < (rho.dim - 4) * 2; ++w) {
            if (std::abs(X(u, w)) < 1e-9 * xscale) continue;
            int ku = int(u / 2), au = int(u % 2), kw = int(w / 2), aw = int(w % 2);
            CHECK(std::abs(ku - kw) <= 1);
            CHECK((kw - ku) + (aw - au) == 0);  // h-weight conservation
        }

    // anchor entry equals 1 after normalization
    auto p00 = L.num_dense().entry(0, 0);
    LaurentPoly<Cx> diff = p00 - L.den;
    CHECK(diff.max_abs() < 1e-9 * L.den.max_abs());
}

TEST_CASE("Verma-auxiliary R: interior entries are truncation-stable") {
    Weight w = Weight::gl2(Cx(1.31, 0.42), Cx(-0.27, 0.11));
    auto v = fund_rep(P, 2);
    Cx z(1.11, 0.13);

    auto mk = [&](int K) {
        auto aux = eval_rep(P, build_gl2(P, w, ModuleKind::verma, K), GradationS::uniform(2));
        PairProblem prob(P, aux, v, false);
        return MatC(prob.solve_at(z));
    };
    MatC a = mk(12), b = mk(16);
    double scale = 0.0;
    for (Eigen::Index u = 0; u < 7 * 2; ++u)
        for (Eigen::Index t = 0; t < 7 * 2; ++t) scale = std::max(scale, std::abs(a(u, t)));
    // entries supported on depth <= 6 states are read-margin safe
    for (Eigen::Index u = 0; u < 7 * 2; ++u)
        for (Eigen::Index t = 0; t < 7 * 2; ++t) CHECK(std::abs(a(u, t) - b(u, t)) < 1e-9 * scale);
}

TEST_CASE("solve_R rejects Borel-only inputs") {
    auto v = fund_rep(P, 2);
    auto rho = build_osc_rep(P, 2, 2, false, GradationS::uniform(2), 8);
    CHECK_THROWS_AS((void)solve_R(P, rho, v), std::invalid_argument);
}
