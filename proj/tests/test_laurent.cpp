#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qloop/laurent.hpp"

using namespace qloop;

namespace {

std::mt19937_64 rng(987654321);

Cx rand_cx(double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng)};
}

LaurentOp<Cx> random_op(Eigen::Index dim, int lo, int hi) {
    LaurentOp<Cx> r(dim);
    for (int k = lo; k <= hi; ++k) {
        MatC m(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rand_cx();
        r.set_coeff(k, m);
    }
    return r;
}

}  // namespace

TEST_CASE("LaurentPoly windows, eval, shift") {
    LaurentPoly<Cx> p;
    p.set_coeff(-2, Cx(1, 0));
    p.set_coeff(1, Cx(0, 2));
    CHECK(p.lo() == -2);
    CHECK(p.hi() == 1);
    Cx z(0.3, 0.7);
    Cx direct = Cx(1, 0) * std::pow(z, Cx(-2.0)) + Cx(0, 2) * z;
    CHECK(std::abs(p.eval(z) - direct) < 1e-13);

    Cx c(1.2, -0.4);
    CHECK(std::abs(p.shifted(c).eval(z) - p.eval(c * z)) < 1e-13);

    LaurentPoly<Cx> tiny;
    tiny.set_coeff(0, Cx(1, 0));
    tiny.set_coeff(5, Cx(1e-16, 0));
    tiny.prune();
    CHECK(tiny.hi() == 0);
}

TEST_CASE("op_shift identity and eval consistency") {
    auto a = random_op(3, -2, 3);
    CHECK(rel_distance(op_shift(a, Cx(1, 0)), a) == 0.0);
    for (int t = 0; t < 5; ++t) {
        Cx c = rand_cx(0.5, 1.5), z = rand_cx(0.5, 1.5);
        MatC lhs = op_eval(op_shift(a, c), z);
        MatC rhs = op_eval(a, c * z);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("op_mul against pointwise evaluation") {
    auto a = random_op(4, -1, 2);
    auto b = random_op(4, 0, 3);
    CHECK(rel_distance(op_mul(a, LaurentOp<Cx>::identity(4)), a) < 1e-15);
    auto ab = op_mul(a, b);
    for (int t = 0; t < 10; ++t) {
        Cx z = rand_cx(0.6, 1.4);
        MatC lhs = op_eval(ab, z);
        MatC rhs = op_eval(a, z) * op_eval(b, z);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("dimension mismatch is a structural error") {
    auto a = random_op(2, 0, 1);
    auto b = random_op(3, 0, 1);
    CHECK_THROWS_AS((void)op_mul(a, b), std::invalid_argument);
    CHECK_THROWS_AS((void)op_shift(a, Cx(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS((void)op_eval(a, Cx(0, 0)), std::invalid_argument);
}

TEST_CASE("kron matches evaluation") {
    auto a = random_op(2, -1, 1);
    auto b = random_op(3, 0, 2);
    auto k = kron(a, b);
    Cx z = rand_cx(0.7, 1.3);
    MatC lhs = op_eval(k, z);
    MatC rhs = kron(op_eval(a, z), op_eval(b, z));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11 * rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("entry view and pruning") {
    auto a = random_op(3, -1, 2);
    auto p = a.entry(1, 2);
    Cx z = rand_cx(0.8, 1.2);
    CHECK(std::abs(p.eval(z) - op_eval(a, z)(1, 2)) < 1e-11);

    LaurentOp<Cx> s(2);
    s.set_coeff(0, MatC::Identity(2, 2));
    MatC eps = MatC::Constant(2, 2, Cx(1e-16, 0));
    s.set_coeff(7, eps);
    s.prune();
    CHECK(s.hi() == 0);
}
