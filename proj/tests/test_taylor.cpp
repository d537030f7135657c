#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fd_oracles.hpp"
#include "gstpinn/taylor.hpp"

using namespace gstpinn;

TEST_CASE("jet layout enumerates multi-indices degree-major") {
    using L2 = JetLayout<2, 3>;
    STATIC_REQUIRE(JetLayout<2, 0>::count == 1);
    STATIC_REQUIRE(JetLayout<2, 1>::count == 3);
    STATIC_REQUIRE(JetLayout<2, 2>::count == 6);
    STATIC_REQUIRE(JetLayout<2, 3>::count == 10);
    STATIC_REQUIRE(JetLayout<1, 3>::count == 4);

    const std::array<std::array<int, 2>, 10> want = {{{0, 0},
                                                      {1, 0},
                                                      {0, 1},
                                                      {2, 0},
                                                      {1, 1},
                                                      {0, 2},
                                                      {3, 0},
                                                      {2, 1},
                                                      {1, 2},
                                                      {0, 3}}};
    for (int k = 0; k < 10; ++k) {
        REQUIRE(L2::exponents[k] == want[k]);
        REQUIRE(L2::index_of(want[k]) == k);
    }
    REQUIRE(L2::index_of({4, 0}) == -1);

    // factorial scale: alpha! converts coefficients to derivatives
    REQUIRE(L2::factorial[L2::index_of({0, 0})] == 1.0);
    REQUIRE(L2::factorial[L2::index_of({2, 0})] == 2.0);
    REQUIRE(L2::factorial[L2::index_of({1, 1})] == 1.0);
    REQUIRE(L2::factorial[L2::index_of({0, 3})] == 6.0);
    REQUIRE(L2::factorial[L2::index_of({2, 1})] == 2.0);
}

TEST_CASE("multiplication table covers exactly the admissible pairs") {
    // pairs (beta, gamma) with beta+gamma of total degree <= 3 in two vars
    STATIC_REQUIRE(JetLayout<2, 3>::mul_table.size() == 35);
    STATIC_REQUIRE(JetLayout<2, 2>::mul_table.size() == 15);
    STATIC_REQUIRE(JetLayout<2, 1>::mul_table.size() == 5);
    STATIC_REQUIRE(JetLayout<1, 3>::mul_table.size() == 10);

    using L = JetLayout<2, 3>;
    for (const MulTriple& t : L::mul_table) {
        REQUIRE(L::exponents[t.a][0] + L::exponents[t.b][0] == L::exponents[t.out][0]);
        REQUIRE(L::exponents[t.a][1] + L::exponents[t.b][1] == L::exponents[t.out][1]);
    }
}

TEST_CASE("polynomial jets reproduce exact derivatives") {
    // u(t,x) = t^2 x at (t,x) = (3, 5); all derivatives are small integers.
    using J = Jet<2, 3>;
    const J jt = J::variable(3.0, 0), jx = J::variable(5.0, 1);
    const J u = jt * jt * jx;
    REQUIRE(u.value() == 45.0);
    REQUIRE(u.deriv({1, 0}) == 30.0);   // 2tx
    REQUIRE(u.deriv({0, 1}) == 9.0);    // t^2
    REQUIRE(u.deriv({2, 0}) == 10.0);   // 2x
    REQUIRE(u.deriv({1, 1}) == 6.0);    // 2t
    REQUIRE(u.deriv({0, 2}) == 0.0);
    REQUIRE(u.deriv({2, 1}) == 2.0);
    REQUIRE(u.deriv({3, 0}) == 0.0);

    // (u + 2)^2 at the same point, checked against the expanded polynomial
    const J v = (u + 2.0) * (u + 2.0);
    REQUIRE(v.value() == 47.0 * 47.0);
    REQUIRE(v.deriv({1, 0}) == 2.0 * 47.0 * 30.0);
    REQUIRE(v.deriv({1, 1}) == Catch::Approx(2.0 * (9.0 * 30.0 + 47.0 * 6.0)).epsilon(1e-14));
}

TEST_CASE("one-variable jets match univariate Taylor arithmetic") {
    using J = Jet<1, 3>;
    const J x = J::variable(2.0, 0);
    const J p = x * x * x;  // x^3: derivs 12, 12, 6 at x=2
    REQUIRE(p.value() == 8.0);
    REQUIRE(p.deriv({1}) == 12.0);
    REQUIRE(p.deriv({2}) == 12.0);
    REQUIRE(p.deriv({3}) == 6.0);
}

TEST_CASE("tanh value agrees with an independent exponential formula") {
    // tanh z = expm1(2z) / (expm1(2z) + 2), a different libm code path
    for (double z0 : {-2.0, -0.3, 0.0, 0.5, 1.0, 3.0}) {
        const auto y = tanh(Jet<2, 3>::constant(z0));
        const double e = std::expm1(2.0 * z0);
        REQUIRE(y.value() == Catch::Approx(e / (e + 2.0)).epsilon(1e-15).margin(1e-15));
    }
    REQUIRE(tanh(Jet<2, 0>::constant(1.0)).value() ==
            Catch::Approx(0.7615941559557649).epsilon(1e-12));
}

TEST_CASE("tanh jet derivatives match finite differences of the composition") {
    // f(t,x) = tanh(a t + b x + c): derivatives up to total order 3
    const double a = 0.7, b = -1.3, c = 0.2;
    auto f = [&](double t, double x) { return std::tanh(a * t + b * x + c); };
    const double t0 = 0.4, x0 = -0.6;

    using J = Jet<2, 3>;
    const J z = a * J::variable(t0, 0) + b * J::variable(x0, 1) + J::constant(c);
    const J y = tanh(z);

    for (int at = 0; at <= 3; ++at)
        for (int ax = 0; ax + at <= 3; ++ax) {
            const double want = fd::mixed(f, t0, x0, at, ax, 1e-2);
            const double got = y.deriv({at, ax});
            INFO("order (" << at << "," << ax << "): got " << got << " want " << want);
            REQUIRE(fd::close_rel(got, want, 1e-7));
        }
}

TEST_CASE("tanh jet handles nonlinear inner series") {
    // f(t,x) = tanh(t*x + x^2): inner jet has nontrivial high-order coefficients
    auto f = [](double t, double x) { return std::tanh(t * x + x * x); };
    const double t0 = 0.3, x0 = 0.8;
    using J = Jet<2, 3>;
    const J jt = J::variable(t0, 0), jx = J::variable(x0, 1);
    const J y = tanh(jt * jx + jx * jx);
    for (int at = 0; at <= 3; ++at)
        for (int ax = 0; ax + at <= 3; ++ax) {
            const double want = fd::mixed(f, t0, x0, at, ax, 1e-2);
            INFO("order (" << at << "," << ax << ")");
            REQUIRE(fd::close_rel(y.deriv({at, ax}), want, 1e-6));
        }
}

TEST_CASE("tanh_pullback matches finite differences in coefficient space") {
    using J = Jet<2, 3>;
    const J jt = J::variable(0.45, 0), jx = J::variable(-0.2, 1);
    const J z0 = jt * jx * 0.8 + jx * jx - 0.3 * jt + J::constant(0.1);

    // L = sum_k w_k y.c[k] with fixed pseudo-random weights
    std::array<double, J::size> w{};
    for (int k = 0; k < J::size; ++k) w[k] = std::sin(3.0 * k + 1.0);
    auto loss_of = [&](const J& z) {
        const J y = tanh(z);
        double L = 0;
        for (int k = 0; k < J::size; ++k) L += w[k] * y.c[k];
        return L;
    };

    J ybar;
    for (int k = 0; k < J::size; ++k) ybar.c[k] = w[k];
    const J zbar = tanh_pullback(z0, tanh(z0), ybar);

    for (int m = 0; m < J::size; ++m) {
        auto f = [&](double v) {
            J z = z0;
            z.c[m] = v;
            return loss_of(z);
        };
        const double want = fd::d1(f, z0.c[m], 1e-3);
        INFO("coefficient " << m);
        REQUIRE(fd::close_rel(zbar.c[m], want, 1e-8));
    }
}

TEST_CASE("tanh_pullback at order zero is the plain chain rule") {
    using J = Jet<2, 0>;
    const J z = J::constant(0.7);
    const J y = tanh(z);
    J ybar;
    ybar.c[0] = 2.5;
    const double S = 1.0 - y.value() * y.value();
    REQUIRE(tanh_pullback(z, y, ybar).c[0] == Catch::Approx(2.5 * S).epsilon(1e-15));
}
