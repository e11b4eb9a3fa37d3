#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qloop/glmod.hpp"

using namespace qloop;

namespace {

const QParams P = QParams::from_hbar(Cx(0.35, 0.0));
const QParams Pc = QParams::from_hbar(Cx(0.23, 0.11));

// Weyl dimension formula for gl_3 (cross-check oracle)
long weyl_dim3(long a, long b) { return (1 + a) * (1 + b) * (2 + a + b) / 2; }

MatC dense(const SpMatC& s) { return MatC(s); }

}  // namespace

TEST_CASE("gl2 module actions") {
    Weight w = Weight::gl2(Cx(2.3, 0.4), Cx(-0.7, 0.1));  // generic
    auto m = build_gl2(Pc, w, ModuleKind::verma, 10);
    MatC E = dense(m.E[0]), F = dense(m.F[0]);

    // E v_0 = 0, E v_1 = [lambda_1 - lambda_2]_q v_0, F v_k = v_{k+1}
    CHECK(E.col(0).cwiseAbs().maxCoeff() == 0.0);
    Cx lam = w.comp[0] - w.comp[1];
    CHECK(std::abs(E(0, 1) - qnum(Pc, lam)) < 1e-13);
    CHECK(std::abs(F(5, 4) - 1.0) < 1e-15);

    // q^{nu G_1} v_k = q^{nu(lambda_1 - k)} v_k
    CHECK(std::abs(m.g_exp[3][0] - (w.comp[0] - 3.0)) < 1e-13);
    CHECK(std::abs(m.g_exp[3][1] - (w.comp[1] + 3.0)) < 1e-13);
}

TEST_CASE("gl2 finite quotient") {
    auto m = build_gl2(P, Weight::gl2(1.0, 0.0), ModuleKind::finite);
    CHECK(m.dim == 2);
    CHECK(dense(m.F[0]).col(1).cwiseAbs().maxCoeff() == 0.0);  // F v_1 = 0 in the quotient
    // E F v_1 = [1]_q [0]_q v_1 = 0: consistent with the quotient
    MatC EF = dense(m.E[0]) * dense(m.F[0]);
    CHECK(EF.col(1).cwiseAbs().maxCoeff() == 0.0);

    auto m5 = build_gl2(P, Weight::gl2(Cx(4.5, 0.0), Cx(0.5, 0.0)), ModuleKind::finite);
    CHECK(m5.dim == 5);  // dimension = lambda_1 - lambda_2 + 1

    CHECK_THROWS_AS((void)build_gl2(P, Weight::gl2(Cx(1.5, 0.0), Cx(0.0, 0.0)), ModuleKind::finite),
                    std::invalid_argument);
}

TEST_CASE("gl2 relations") {
    CHECK(check_gl_relations(P, build_gl2(P, Weight::gl2(3.0, 0.0), ModuleKind::finite)) < 1e-10);
    CHECK(check_gl_relations(Pc, build_gl2(Pc, Weight::gl2(Cx(1.2, 0.7), Cx(-0.3, 0.2)), ModuleKind::verma, 12)) <
          1e-10);
}

TEST_CASE("gl3 Verma actions match the module relation formulas") {
    Weight w = Weight::gl3(Cx(1.7, 0.3), Cx(0.4, -0.2), Cx(-0.9, 0.1));
    auto m = build_gl3(Pc, w, ModuleKind::verma, 8);

    // q^{nu G_1} v_k = q^{nu(lambda_1 - k1 - k3)} v_k
    for (Eigen::Index s = 0; s < m.dim; ++s) {
        auto [k1, k3, k2] = m.states[size_t(s)];
        CHECK(std::abs(m.g_exp[size_t(s)][0] - (w.comp[0] - double(k1) - double(k3))) < 1e-13);
        CHECK(std::abs(m.g_exp[size_t(s)][1] - (w.comp[1] + double(k1) - double(k2))) < 1e-13);
        CHECK(std::abs(m.g_exp[size_t(s)][2] - (w.comp[2] + double(k2) + double(k3))) < 1e-13);
    }

    // E_2 v_{(0,0,1)} = [lambda_2 - lambda_3]_q [1]_q v_0
    Eigen::Index s001 = -1, s0 = -1;
    for (Eigen::Index s = 0; s < m.dim; ++s) {
        if (m.states[size_t(s)] == std::array<int, 3>{0, 0, 1}) s001 = s;
        if (m.states[size_t(s)] == std::array<int, 3>{0, 0, 0}) s0 = s;
    }
    REQUIRE(s001 >= 0);
    MatC E2 = dense(m.E[1]);
    CHECK(std::abs(E2(s0, s001) - qnum(Pc, w.comp[1] - w.comp[2]) * qnum(Pc, 1.0)) < 1e-12);

    // E_3 v_0 = 0
    CHECK(dense(m.E[2]).col(s0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gl3 composite root vectors are consistent with the simple ones") {
    Weight w = Weight::gl3(Cx(0.9, 0.2), Cx(-0.1, 0.4), Cx(-1.3, -0.3));
    auto m = build_gl3(Pc, w, ModuleKind::verma, 9);
    MatC F1 = dense(m.F[0]), F2 = dense(m.F[1]), F3 = dense(m.F[2]);
    MatC E1 = dense(m.E[0]), E2 = dense(m.E[1]), E3 = dense(m.E[2]);

    MatC dF = F2 * F1 - Pc.q * F1 * F2 - F3;
    MatC dE = E1 * E2 - (1.0 / Pc.q) * E2 * E1 - E3;
    double scale = std::max(F3.cwiseAbs().maxCoeff(), E3.cwiseAbs().maxCoeff());
    for (Eigen::Index s = 0; s < m.dim; ++s) {
        if (m.degree(s) > m.K_trunc - 2) continue;  // products need two free levels
        CHECK(dF.col(s).cwiseAbs().maxCoeff() < 1e-11 * scale);
        CHECK(dE.col(s).cwiseAbs().maxCoeff() < 1e-11 * scale);
    }
}

TEST_CASE("gl3 Verma relations on safe states") {
    Weight w = Weight::gl3(Cx(1.1, 0.5), Cx(0.2, -0.6), Cx(-0.8, 0.2));
    CHECK(check_gl_relations(Pc, build_gl3(Pc, w, ModuleKind::verma, 8)) < 1e-10);
}

TEST_CASE("relation checker is sensitive to corruption") {
    auto m = build_gl2(P, Weight::gl2(2.0, 0.0), ModuleKind::finite);
    m.E[0].coeffRef(0, 1) += Cx(0.5, 0.0);
    CHECK(check_gl_relations(P, m) > 0.1);
}

TEST_CASE("gl3 finite quotients have the Weyl dimensions and exact relations") {
    struct Case {
        long l1, l2, l3;
    };
    for (auto c : {Case{1, 0, 0}, Case{1, 1, 0}, Case{2, 1, 0}, Case{2, 0, 0}}) {
        auto w = Weight::gl3(double(c.l1), double(c.l2), double(c.l3));
        auto m = build_gl3(P, w, ModuleKind::finite);
        CHECK(m.dim == weyl_dim3(c.l1 - c.l2, c.l2 - c.l3));
        CHECK(check_gl_relations(P, m) < 1e-10);
    }
    CHECK_THROWS_AS((void)build_gl3(P, Weight::gl3(0.0, 1.0, 0.0), ModuleKind::finite), std::invalid_argument);
}

TEST_CASE("gl3 finite quotient at shifted weights (half-integer components)") {
    auto m = build_gl3(P, Weight::gl3(1.5, 0.5, -0.5), ModuleKind::finite);
    CHECK(m.dim == weyl_dim3(1, 1));
    CHECK(check_gl_relations(P, m) < 1e-10);
}
