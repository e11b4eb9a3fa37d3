#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qloop/qparams.hpp"

using namespace qloop;

namespace {

// Independent oracle: Gaussian-binomial Pascal recursion
// [m,k] = q^k [m-1,k] + q^{k-m} [m-1,k-1], [m,0] = [m,m] = 1.
Cx qbinom_recursive(const QParams& p, long m, long k) {
    if (k == 0 || k == m) return 1.0;
    return qpow(p, Cx(double(k))) * qbinom_recursive(p, m - 1, k) +
           qpow(p, Cx(double(k - m))) * qbinom_recursive(p, m - 1, k - 1);
}

}  // namespace

TEST_CASE("qnum basics") {
    auto p = QParams::from_hbar(Cx(0.35, 0.0));
    CHECK(std::abs(qnum(p, 0.0)) < 1e-15);
    CHECK(std::abs(qnum(p, 1.0) - 1.0) < 1e-14);
    CHECK(std::abs(qnum(p, 2.0) - (p.q + 1.0 / p.q)) < 1e-14);
}

TEST_CASE("qnum is antisymmetric in nu") {
    auto p = QParams::from_hbar(Cx(0.21, 0.13));
    std::mt19937_64 rng(20240531);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        Cx nu(u(rng), u(rng));
        CHECK(std::abs(qnum(p, nu) + qnum(p, -nu)) < 1e-12);
    }
}

TEST_CASE("qbinom examples") {
    auto p = QParams::from_hbar(Cx(std::log(1.1), 0.0));  // q = 1.1
    CHECK(std::abs(qbinom(p, 5, 0) - 1.0) < 1e-14);
    CHECK(std::abs(qbinom(p, 2, 1) - (p.q + 1.0 / p.q)) < 1e-14);
    // (4,2): product form against the recursion oracle
    Cx expect = qnum(p, 4.0) * qnum(p, 3.0) / (qnum(p, 1.0) * qnum(p, 2.0));
    CHECK(std::abs(qbinom(p, 4, 2) - expect) < 1e-13);
    CHECK(std::abs(qbinom(p, 4, 2) - qbinom_recursive(p, 4, 2)) < 1e-13);
    CHECK_THROWS_AS((void)qbinom(p, 3, 4), std::domain_error);
}

TEST_CASE("qbinom satisfies the q-Pascal recurrence up to m = 12") {
    auto p = QParams::from_hbar(Cx(0.17, 0.09));
    for (long m = 1; m <= 12; ++m)
        for (long k = 0; k <= m; ++k) {
            Cx lhs = qbinom(p, m, k);
            Cx rhs = (k < m ? qpow(p, Cx(double(k))) * qbinom(p, m - 1, k) : Cx(0)) +
                     (k > 0 ? qpow(p, Cx(double(k - m))) * qbinom(p, m - 1, k - 1) : Cx(0));
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
}

TEST_CASE("qpow is the exponential homomorphism") {
    auto p = QParams::from_hbar(Cx(0.4, -0.2));
    CHECK(std::abs(qpow(p, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(qpow(p, 1.0) - p.q) < 1e-15);
    Cx h = qpow(p, 0.5);
    CHECK(std::abs(h * h - p.q) < 1e-14);
}

TEST_CASE("root-of-unity guard") {
    auto p = QParams::from_hbar(Cx(0.0, M_PI / 3.0));  // q = exp(i pi/3), order 6
    CHECK_THROWS_AS(p.require_generic(), std::invalid_argument);
    auto ok = QParams::from_hbar(Cx(0.35, 0.0));
    CHECK_NOTHROW(ok.require_generic());
}
