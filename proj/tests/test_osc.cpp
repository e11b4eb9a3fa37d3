#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qloop/osc.hpp"

using namespace qloop;

namespace {
const QParams P = QParams::from_hbar(Cx(0.35, 0.0));
const QParams Pc = QParams::from_hbar(Cx(0.22, 0.14));
}  // namespace

TEST_CASE("Fock module relations") {
    auto f = build_fock(Pc, 12);
    MatC b = MatC(f.b), bd = MatC(f.bdag);
    CHECK(b.col(0).cwiseAbs().maxCoeff() == 0.0);  // b v_0 = 0

    // bdag b = [N]_q everywhere; b bdag = [N+1]_q away from the top state
    MatC nb = bd * b, bn = b * bd;
    for (int k = 0; k <= 12; ++k) {
        CHECK(std::abs(nb(k, k) - qnum(Pc, double(k))) < 1e-12);
        if (k < 12) CHECK(std::abs(bn(k, k) - qnum(Pc, double(k + 1))) < 1e-12);
    }

    // q^{nu N} b q^{-nu N} = q^{-nu} b on safe states
    Cx nu(0.7, 0.2);
    MatC qn = MatC::Zero(f.dim, f.dim), qni = qn;
    for (Eigen::Index s = 0; s < f.dim; ++s) {
        qn(s, s) = qpow(Pc, nu * f.n_exp[s]);
        qni(s, s) = qpow(Pc, -nu * f.n_exp[s]);
    }
    MatC lhs = qn * b * qni, rhs = qpow(Pc, -nu) * b;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());
    MatC lhs2 = qn * bd * qni, rhs2 = qpow(Pc, nu) * bd;
    CHECK((lhs2 - rhs2).cwiseAbs().maxCoeff() < 1e-12 * rhs2.cwiseAbs().maxCoeff());
}

TEST_CASE("theta tables") {
    auto f = build_fock(Pc, 8);
    // n = 2: theta(e_0) = bdag
    CHECK((theta_image(Pc, 2, f, AffGen::e, 0) - MatC(f.bdag)).cwiseAbs().maxCoeff() == 0.0);
    // q^{nu h_0} q^{nu h_1} = 1
    Cx nu(0.4, -0.3);
    MatC prod = theta_image(Pc, 2, f, AffGen::cartan, 0, nu) * theta_image(Pc, 2, f, AffGen::cartan, 1, nu);
    CHECK((prod - MatC::Identity(f.dim, f.dim)).cwiseAbs().maxCoeff() < 1e-13);
    // n = 3: q^{nu(h_0+h_1+h_2)} = 1 realizes q^{nu c} = 1
    MatC prod3 = theta_image(Pc, 3, f, AffGen::cartan, 0, nu) * theta_image(Pc, 3, f, AffGen::cartan, 1, nu) *
                 theta_image(Pc, 3, f, AffGen::cartan, 2, nu);
    CHECK((prod3 - MatC::Identity(f.dim * f.dim, f.dim * f.dim)).cwiseAbs().maxCoeff() < 1e-13);
    // f-generators are a Borel violation
    CHECK_THROWS_AS((void)theta_image(Pc, 2, f, AffGen::f, 0), std::domain_error);
}

TEST_CASE("basic oscillator representation matches theta directly") {
    const int K = 9;
    auto f = build_fock(Pc, K);
    for (int n : {2, 3}) {
        auto r = build_osc_rep(Pc, n, n, false, GradationS::uniform(n), K);  // sigma^{-n} = id
        for (int j = 0; j < n; ++j) {
            CHECK((MatC(r.e[size_t(j)].mat) - theta_image(Pc, n, f, AffGen::e, j)).cwiseAbs().maxCoeff() == 0.0);
            CHECK(r.e[size_t(j)].zexp == 1);
        }
    }
}

TEST_CASE("n = 2 oscillator matrix elements") {
    const int K = 10;
    auto r = build_osc_rep(Pc, 2, 2, false, GradationS::uniform(2), K);
    // e_1 v_k = kappa^{-1} q^{-k} [k]_q v_{k-1}; the zeta power sits in zexp
    MatC e1 = MatC(r.e[1].mat);
    for (int k = 1; k <= K; ++k)
        CHECK(std::abs(e1(k - 1, k) - qnum(Pc, double(k)) * qpow(Pc, -double(k)) / Pc.kappa_q) < 1e-13);
    // barred objects at n = 2 are the e_0 <-> e_1 relabeling
    auto rb = build_osc_rep(Pc, 2, 2, true, GradationS::uniform(2), K);
    auto r1 = build_osc_rep(Pc, 2, 1, false, GradationS::uniform(2), K);
    for (int j = 0; j < 2; ++j) {
        CHECK((MatC(rb.e[size_t(j)].mat) - MatC(r1.e[size_t(j)].mat)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((rb.h_exp[size_t(j)] - r1.h_exp[size_t(j)]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Borel relations hold for all oscillator representations") {
    for (int n : {2, 3}) {
        const int K = n == 2 ? 14 : 9;
        for (int i = 1; i <= n; ++i)
            for (bool barred : {false, true}) {
                auto r = build_osc_rep(P, n, i, barred, GradationS::uniform(n), K);
                CHECK(check_affine_relations(P, r) < 1e-9);
            }
    }
}
