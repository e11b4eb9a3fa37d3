#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qloop/affine.hpp"

using namespace qloop;

namespace {
const QParams P = QParams::from_hbar(Cx(0.35, 0.0));
const QParams Pc = QParams::from_hbar(Cx(0.27, 0.12));
}  // namespace

TEST_CASE("automorphism index maps") {
    for (int n : {2, 3}) {
        CHECK(sigma_label(n, n - 1, 1) == 0);  // sigma: alpha_{n-1} -> alpha_0
        for (int i = 0; i < n; ++i) {
            CHECK(sigma_label(n, i, n) == i);               // sigma^n = id
            CHECK(tau_label(n, tau_label(n, i)) == i);      // tau^2 = id
        }
        CHECK(tau_label(n, 0) == 0);
    }
    CHECK(tau_label(3, 1) == 2);
    CHECK(tau_label(3, 2) == 1);
}

TEST_CASE("Jimbo images, n = 2") {
    auto m = build_gl2(Pc, Weight::gl2(Cx(1.3, 0.2), Cx(-0.4, 0.1)), ModuleKind::verma, 8);
    MatC E = MatC(m.E[0]), F = MatC(m.F[0]);
    CHECK((jimbo_image(Pc, m, AffGen::e, 1) - E).cwiseAbs().maxCoeff() == 0.0);
    MatC e0 = jimbo_image(Pc, m, AffGen::e, 0);
    MatC expect = F * m.cartan_diag(Pc, {-1.0, -1.0, 0.0});
    CHECK((e0 - expect).cwiseAbs().maxCoeff() == 0.0);
    MatC f0 = jimbo_image(Pc, m, AffGen::f, 0);
    CHECK((f0 - E * m.cartan_diag(Pc, {1.0, 1.0, 0.0})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Jimbo images, n = 3") {
    auto m = build_gl3(Pc, Weight::gl3(Cx(0.9, 0.1), Cx(0.0, -0.3), Cx(-1.1, 0.2)), ModuleKind::verma, 6);
    MatC f0 = jimbo_image(Pc, m, AffGen::f, 0);
    MatC expect = MatC(m.E[2]) * m.cartan_diag(Pc, {1.0, 0.0, 1.0});
    CHECK((f0 - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluation representation bookkeeping") {
    auto m = build_gl2(Pc, Weight::gl2(Cx(1.0, 0.0), Cx(0.0, 0.0)), ModuleKind::finite);
    auto r = eval_rep(Pc, m, GradationS::uniform(2));
    CHECK(r.e[1].zexp == 1);
    CHECK(r.f[1].zexp == -1);
    // e_1 at zeta is zeta^{s_1} E
    Cx zeta(1.2, 0.4);
    CHECK((r.e_at(Pc, 1, zeta) - zeta * MatC(m.E[0])).cwiseAbs().maxCoeff() < 1e-15);
    // gradation covariance: exact factor c^{s_i}
    Cx c(0.8, 0.3);
    MatC lhs = r.e_at(Pc, 0, c * zeta);
    MatC rhs = c * r.e_at(Pc, 0, zeta);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14 * rhs.cwiseAbs().maxCoeff());

    // q^{nu h_1} v_k = q^{nu(lambda_1 - lambda_2 - 2k)} v_k
    for (Eigen::Index s = 0; s < r.dim; ++s)
        CHECK(std::abs(r.h_exp[1][s] - (1.0 - 2.0 * double(s))) < 1e-13);
}

TEST_CASE("zero shift is the identity on representations") {
    auto m = build_gl2(Pc, Weight::gl2(Cx(0.7, 0.3), Cx(-0.2, 0.1)), ModuleKind::verma, 6);
    auto r0 = eval_rep(Pc, m, GradationS::uniform(2));
    auto rs = eval_rep(Pc, m, GradationS::uniform(2), false, {Cx(0.0), Cx(0.0)});
    REQUIRE(rs.borel_only == false);
    for (int i = 0; i < 2; ++i) {
        CHECK((MatC(rs.e[size_t(i)].mat) - MatC(r0.e[size_t(i)].mat)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((rs.h_exp[size_t(i)] - r0.h_exp[size_t(i)]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("affine relations hold on evaluation representations") {
    auto m2 = build_gl2(P, Weight::gl2(1.0, 0.0), ModuleKind::finite);
    CHECK(check_affine_relations(P, eval_rep(P, m2, GradationS::uniform(2))) < 1e-10);

    auto m2v = build_gl2(Pc, Weight::gl2(Cx(1.4, 0.6), Cx(-0.2, -0.1)), ModuleKind::verma, 12);
    CHECK(check_affine_relations(Pc, eval_rep(Pc, m2v, GradationS::uniform(2))) < 1e-10);

    auto m3 = build_gl3(Pc, Weight::gl3(Cx(1.2, 0.4), Cx(0.1, -0.5), Cx(-0.9, 0.1)), ModuleKind::verma, 8);
    CHECK(check_affine_relations(Pc, eval_rep(Pc, m3, GradationS::uniform(3))) < 1e-10);

    auto m3f = build_gl3(P, Weight::gl3(1.0, 0.0, 0.0), ModuleKind::finite);
    CHECK(check_affine_relations(P, eval_rep(P, m3f, GradationS::uniform(3))) < 1e-10);

    // barred representations satisfy the same relations
    CHECK(check_affine_relations(P, eval_rep(P, m3f, GradationS::uniform(3), true)) < 1e-10);
}

TEST_CASE("mixed commutators vanish identically") {
    auto m = build_gl2(P, Weight::gl2(2.0, 0.0), ModuleKind::finite);
    auto r = eval_rep(P, m, GradationS::uniform(2));
    Cx zeta(0.9, 0.2);
    MatC e0 = r.e_at(P, 0, zeta), f1 = r.f_at(P, 1, zeta);
    MatC comm = e0 * f1 - f1 * e0;
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-14 * e0.cwiseAbs().maxCoeff() * f1.cwiseAbs().maxCoeff());
}

TEST_CASE("shifted representations are Borel-only with shifted Cartans") {
    auto m = build_gl2(Pc, Weight::gl2(Cx(0.9, 0.2), Cx(-0.3, 0.4)), ModuleKind::verma, 8);
    std::vector<Cx> xi{Cx(0.4, 0.2), Cx(-0.1, 0.3)};
    auto rs = eval_rep(Pc, m, GradationS::uniform(2), false, xi);
    CHECK(rs.borel_only);
    CHECK_THROWS_AS((void)rs.f_at(Pc, 0, Cx(1.0, 0.0)), std::domain_error);
    auto r0 = eval_rep(Pc, m, GradationS::uniform(2));
    for (int i = 0; i < 2; ++i) {
        VecC d = rs.h_exp[size_t(i)] - r0.h_exp[size_t(i)];
        for (Eigen::Index s = 0; s < rs.dim; ++s) CHECK(std::abs(d[s] - xi[size_t(i)]) < 1e-14);
    }
    // e-side relations still hold
    CHECK(check_affine_relations(Pc, rs) < 1e-10);
}

TEST_CASE("checker flags corrupted representations") {
    auto m = build_gl2(P, Weight::gl2(2.0, 0.0), ModuleKind::finite);
    auto r = eval_rep(P, m, GradationS::uniform(2));
    r.e[1].mat.coeffRef(0, 1) += Cx(0.3, 0.0);
    CHECK(check_affine_relations(P, r) > 1e-3);
}
