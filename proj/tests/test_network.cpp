#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>

#include "fd_oracles.hpp"
#include "gstpinn/network.hpp"

using namespace gstpinn;

namespace {
Network net_1_1_1_identity() {
    Network n = Network::zeros({1, 1, 1});
    n.weights[0][0] = 1.0;
    n.weights[1][0] = 1.0;
    return n;  // u(x) = tanh(x)
}
}  // namespace

TEST_CASE("network construction and parameter layout") {
    const Network n = Network::zeros({2, 32, 32, 32, 32, 1});
    REQUIRE(n.param_count() == 3297);  // 3168 weights + 129 biases
    REQUIRE(n.input_dim() == 2);
    REQUIRE(n.output_dim() == 1);
    REQUIRE(n.layer_count() == 5);

    REQUIRE_THROWS_AS(Network::zeros({3}), DimensionError);
    REQUIRE_THROWS_AS(Network::zeros({2, 0, 1}), DimensionError);
}

TEST_CASE("glorot init is seeded, bounded, and leaves biases at zero") {
    const Network a = Network::glorot({2, 16, 1}, 7);
    const Network b = Network::glorot({2, 16, 1}, 7);
    const Network c = Network::glorot({2, 16, 1}, 8);
    REQUIRE(a.flatten() == b.flatten());
    REQUIRE(a.flatten() != c.flatten());
    for (const auto& bias : a.biases)
        for (double v : bias) REQUIRE(v == 0.0);
    const double lim0 = std::sqrt(6.0 / (2 + 16));
    for (double w : a.weights[0]) {
        REQUIRE(w >= -lim0);
        REQUIRE(w <= lim0);
    }
}

TEST_CASE("flatten/unflatten round-trips and rejects bad sizes") {
    Network n = Network::glorot({2, 5, 3, 1}, 42);
    const auto flat = n.flatten();
    REQUIRE(static_cast<long>(flat.size()) == n.param_count());
    Network m = Network::zeros({2, 5, 3, 1});
    m.unflatten(flat);
    REQUIRE(m.flatten() == flat);
    std::vector<double> wrong(flat.size() + 1, 0.0);
    REQUIRE_THROWS_AS(m.unflatten(wrong), DimensionError);
}

TEST_CASE("single-chain network evaluates tanh") {
    const Network n = net_1_1_1_identity();
    const double zero = 0.0, one = 1.0;
    REQUIRE(forward(n, std::span(&zero, 1)) == 0.0);
    REQUIRE(forward(n, std::span(&one, 1)) == Catch::Approx(0.7615941559557649).epsilon(1e-14));
    const double two[2] = {0.0, 0.0};
    REQUIRE_THROWS_AS(forward(n, std::span(two, 2)), DimensionError);
}

TEST_CASE("affine network (no hidden layer) is exact") {
    Network n = Network::zeros({2, 1});
    n.weights[0][0] = 2.0;   // t coefficient
    n.weights[0][1] = -1.0;  // x coefficient
    n.biases[0][0] = -0.5;
    const double p[2] = {0.5, 0.5};
    REQUIRE(forward(n, std::span(p, 2)) == 0.0);  // 1 - 0.5 - 0.5 exactly

    const MultiIndex want[] = {{1, 0}, {0, 1}, {0, 2}, {1, 1}};
    const DerivativeJet j = input_jet(n, std::span(p, 2), std::span(want, 4));
    REQUIRE(j.value == 0.0);
    REQUIRE(j.at({1, 0}) == 2.0);
    REQUIRE(j.at({0, 1}) == -1.0);
    REQUIRE(j.at({0, 2}) == 0.0);
    REQUIRE(j.at({1, 1}) == 0.0);
    REQUIRE_THROWS_AS(j.at({3, 0}), MissingJetEntry);
}

TEST_CASE("input_jet on the tanh chain reproduces known derivatives") {
    const Network n = net_1_1_1_identity();
    const double x0 = 0.0;
    const MultiIndex want[] = {{1, 0}, {2, 0}, {3, 0}};
    const DerivativeJet j = input_jet(n, std::span(&x0, 1), std::span(want, 3));
    REQUIRE(j.value == 0.0);
    REQUIRE(j.at({1, 0}) == Catch::Approx(1.0).epsilon(1e-14));  // sech^2(0)
    REQUIRE(j.at({2, 0}) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(j.at({3, 0}) == Catch::Approx(-2.0).epsilon(1e-12));  // d3 tanh at 0

    REQUIRE_THROWS_AS(input_jet(n, std::span(&x0, 1), std::span(want, 3)).at({0, 1}),
                      MissingJetEntry);
    const MultiIndex bad_axis[] = {{0, 1}};
    REQUIRE_THROWS_AS(input_jet(n, std::span(&x0, 1), std::span(bad_axis, 1)), DimensionError);
    const MultiIndex too_deep[] = {{2, 2}};
    const double p2[2] = {0.1, 0.2};
    const Network n2 = Network::glorot({2, 4, 1}, 1);
    REQUIRE_THROWS_AS(input_jet(n2, std::span(p2, 2), std::span(too_deep, 1)), DimensionError);
}

TEST_CASE("jet derivatives of random networks match finite differences") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Network n = Network::glorot({2, 12, 10, 1}, seed);
        auto f = [&](double t, double x) {
            const double p[2] = {t, x};
            return forward(n, std::span(p, 2));
        };
        const double t0 = 0.35 + 0.1 * seed / 16.0, x0 = 0.6 - 0.2 * seed / 16.0;

        JetEvaluator<2, 3> ev(n);
        const auto& y = ev.forward({t0, x0});
        REQUIRE(y.value() == Catch::Approx(f(t0, x0)).epsilon(1e-14));
        for (int at = 0; at <= 3; ++at)
            for (int ax = 0; ax + at <= 3; ++ax) {
                const double want = fd::mixed(f, t0, x0, at, ax, 2e-2);
                const double got = y.deriv({at, ax});
                INFO("seed " << seed << " order (" << at << "," << ax << "): got " << got
                             << " want " << want);
                REQUIRE(fd::close_rel(got, want, 1e-5));
            }
    }
}

TEST_CASE("parameter backward matches finite differences") {
    const Network n = Network::glorot({2, 6, 5, 1}, 99);
    using J = Jet<2, 3>;

    // L(theta) = sum_k w_k y_theta.c[k]: covers value and every derivative slot
    std::array<double, J::size> w{};
    for (int k = 0; k < J::size; ++k) w[k] = std::cos(2.0 * k + 0.5);
    const std::array<double, 2> pt = {0.3, -0.4};
    auto loss_at = [&](const Network& net) {
        JetEvaluator<2, 3> ev(net);
        const J& y = ev.forward(pt);
        double L = 0;
        for (int k = 0; k < J::size; ++k) L += w[k] * y.c[k];
        return L;
    };

    JetEvaluator<2, 3> ev(n);
    ev.forward(pt);
    J ybar;
    for (int k = 0; k < J::size; ++k) ybar.c[k] = w[k];
    std::vector<double> grad(n.param_count(), 0.0);
    ev.backward(ybar, grad);

    const std::vector<double> theta = n.flatten();
    Network scratch = n;
    for (size_t i = 0; i < theta.size(); i += 3) {  // every 3rd parameter
        auto f = [&](double v) {
            std::vector<double> th = theta;
            th[i] = v;
            scratch.unflatten(th);
            return loss_at(scratch);
        };
        const double want = fd::d1(f, theta[i], 1e-4);
        INFO("parameter " << i << ": got " << grad[i] << " want " << want);
        REQUIRE(fd::close_rel(grad[i], want, 1e-6));
    }
}

TEST_CASE("backward accumulates across calls") {
    const Network n = Network::glorot({2, 4, 1}, 5);
    JetEvaluator<2, 1> ev(n);
    ev.forward({0.2, 0.7});
    Jet<2, 1> ybar;
    ybar.c[0] = 1.0;
    std::vector<double> g1(n.param_count(), 0.0), g2(n.param_count(), 0.0);
    ev.backward(ybar, g1);
    ev.backward(ybar, g2);
    ev.backward(ybar, g2);
    for (size_t i = 0; i < g1.size(); ++i) REQUIRE(g2[i] == Catch::Approx(2.0 * g1[i]).margin(1e-18));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    namespace fs = std::filesystem;
    const fs::path p = fs::temp_directory_path() / "gstpinn_test_ckpt.bin";
    const Network n = Network::glorot({2, 9, 4, 1}, 314);
    save_checkpoint(p.string(), n, {.seed = 314, .config_hash = 0xabcdef12345678ULL});

    ArtifactMeta meta;
    const Network m = load_checkpoint(p.string(), &meta);
    REQUIRE(m.layer_sizes == n.layer_sizes);
    REQUIRE(m.flatten() == n.flatten());  // bitwise
    REQUIRE(meta.seed == 314);
    REQUIRE(meta.config_hash == 0xabcdef12345678ULL);

    SECTION("truncated file is rejected") {
        const auto size = fs::file_size(p);
        fs::resize_file(p, size - 8);
        REQUIRE_THROWS_AS(load_checkpoint(p.string()), IoError);
    }
    SECTION("wrong magic is rejected") {
        std::ofstream f(p, std::ios::binary);
        f << "something-else 1 2 1 1 seed 0 hash 0\n";
        f.close();
        REQUIRE_THROWS_AS(load_checkpoint(p.string()), IoError);
    }
    fs::remove(p);
}
