#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qgt/derivatives.hpp"
#include "qgt/derivatives_io.hpp"
#include "qgt/surgery.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using Catch::Approx;
using namespace qgt;

TEST_CASE("interval derivatives match the closed forms", "[derivatives]") {
    auto g = testsupport::interval(1.0, 1.0, 0.0);
    auto grad = gradient(g);
    CHECK(grad.d_by_length.at("e0") == Approx(3.0).epsilon(1e-12));
    CHECK(grad.d_by_strength.at("v0") == Approx(-1.0).epsilon(1e-12));
    CHECK(grad.d_by_strength.at("v1") == Approx(-2.25).epsilon(1e-12));

    // one free end: d/dL (L^3/3 + L^2/a) = L^2 + 2L/a and -g(0)^2 = -(L/a)^2
    const double L = 1.5, a = 2.0;
    auto one = testsupport::interval(L, a, 0.0);
    CHECK(dT_dlength(one, "e0") == Approx(L * L + 2.0 * L / a).epsilon(1e-12));
    CHECK(dT_dstrength(one, "v0") == Approx(-(L / a) * (L / a)).epsilon(1e-12));
}

TEST_CASE("flower derivatives match the closed forms", "[derivatives]") {
    auto g = testsupport::flower({1.0}, 1.0);
    CHECK(dT_dlength(g, "e0") == Approx(0.25 + 2.0).epsilon(1e-12));
    CHECK(dT_dstrength(g, "v0") == Approx(-1.0).epsilon(1e-12));

    // two loops: d/dl_e (sum l^3/12 + F^2/a) = l_e^2/4 + 2F/a, F = total length
    auto two = testsupport::flower({1.0, 2.0}, 1.5);
    auto grad = gradient(two);
    CHECK(grad.d_by_length.at("e0") == Approx(0.25 + 4.0).epsilon(1e-12));
    CHECK(grad.d_by_length.at("e1") == Approx(1.0 + 4.0).epsilon(1e-12));
    CHECK(grad.d_by_strength.at("v0") == Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("derivatives at Dirichlet vertices are absent", "[derivatives]") {
    auto g = testsupport::interval(1.0, 1.0, 0.0, /*dirichlet_head=*/true);
    CHECK_THROWS_AS(dT_dstrength(g, "v1"), DirichletUnsupported);
    auto grad = gradient(g);
    CHECK(grad.d_by_strength.count("v0") == 1);
    CHECK(grad.d_by_strength.count("v1") == 0);
    CHECK(grad.d_by_length.at("e0") > 0.0);
}

TEST_CASE("gradient propagates solver failures", "[derivatives]") {
    auto g = testsupport::flower({1.0}, 0.0);
    CHECK_THROWS_AS(gradient(g), NoTorsion);
    CHECK_THROWS_AS(dT_dlength(g, "e0"), NoTorsion);
}

TEST_CASE("finite differences agree with the analytic gradient", "[derivatives]") {
    std::mt19937_64 rng(314159);
    oracle::RandomGraphConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracle::random_graph(rng, cfg);
        auto grad = gradient(g);
        auto fd = fd_gradient(g);
        for (const auto& [id, exact] : grad.d_by_length) {
            CHECK(fd.d_by_length.at(id) ==
                  Approx(exact).epsilon(1e-5).margin(1e-7));
        }
        for (const auto& [id, exact] : grad.d_by_strength) {
            CHECK(fd.d_by_strength.at(id) ==
                  Approx(exact).epsilon(1e-5).margin(1e-7));
        }
    }
}

TEST_CASE("finite differences agree on signed and pinned graphs", "[derivatives]") {
    std::mt19937_64 rng(271828);
    oracle::RandomGraphConfig cfg;
    cfg.signed_strengths = true;
    int used = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto g = oracle::random_graph(rng, cfg);
        Gradient grad;
        TorsionFunction tf;
        try {
            tf = solve_torsion(g);
            grad = gradient(g);
        } catch (const NoTorsion&) {
            continue;
        }
        // near-singular systems have huge vertex values and curvature that
        // swamps second-order finite differences; skip those instances
        double scale = 0.0;
        for (const auto& [id, v] : tf.vertex_values) scale = std::max(scale, std::abs(v));
        if (scale > 30.0) continue;
        ++used;
        auto fd = fd_gradient(g);
        for (const auto& [id, exact] : grad.d_by_length)
            CHECK(fd.d_by_length.at(id) == Approx(exact).epsilon(1e-4).margin(1e-6));
        for (const auto& [id, exact] : grad.d_by_strength)
            CHECK(fd.d_by_strength.at(id) == Approx(exact).epsilon(1e-4).margin(1e-6));
    }
    CHECK(used >= 40);

    auto pinned = testsupport::path({1.0, 0.5}, {VertexCondition::delta(1.0),
                                                 VertexCondition::delta(0.5),
                                                 VertexCondition::dirichlet()});
    auto grad = gradient(pinned);
    auto fd = fd_gradient(pinned);
    for (const auto& [id, exact] : grad.d_by_length)
        CHECK(fd.d_by_length.at(id) == Approx(exact).epsilon(1e-5).margin(1e-7));
    for (const auto& [id, exact] : grad.d_by_strength)
        CHECK(fd.d_by_strength.at(id) == Approx(exact).epsilon(1e-5).margin(1e-7));
}

TEST_CASE("length derivatives are positive, strength derivatives nonpositive", "[derivatives]") {
    std::mt19937_64 rng(161803);
    oracle::RandomGraphConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracle::random_graph(rng, cfg);
        auto tf = solve_torsion(g);
        auto grad = gradient(g);
        for (const auto& [id, d] : grad.d_by_length) CHECK(d > 0.0);
        for (const auto& [id, d] : grad.d_by_strength) {
            CHECK(d <= 0.0);
            if (std::abs(tf.vertex_values.at(id)) > 1e-12) CHECK(d < 0.0);
        }
    }
}

TEST_CASE("gradients obey the scaling chain rule", "[derivatives]") {
    std::mt19937_64 rng(173205);
    oracle::RandomGraphConfig cfg;
    const double t = 2.0;
    for (int trial = 0; trial < 30; ++trial) {
        auto g = oracle::random_graph(rng, cfg);
        auto grad = gradient(g);
        auto scaled = gradient(apply(g, Scale{t}));
        for (const auto& [id, d] : grad.d_by_length)
            CHECK(scaled.d_by_length.at(id) == Approx(t * t * d).epsilon(1e-10));
        for (const auto& [id, d] : grad.d_by_strength)
            CHECK(scaled.d_by_strength.at(id) == Approx(t * t * t * t * d).epsilon(1e-10));
    }
}

TEST_CASE("gradients serialize to JSON keyed by ids", "[derivatives]") {
    auto g = testsupport::interval(1.0, 1.0, 0.0);
    auto j = gradient_to_json(gradient(g));
    CHECK(j.at("d_by_length").at("e0").get<double>() == Approx(3.0));
    CHECK(j.at("d_by_strength").at("v0").get<double>() == Approx(-1.0));
    CHECK(j.at("d_by_strength").at("v1").get<double>() == Approx(-2.25));
    const std::string text = serialize_gradient(gradient(g));
    CHECK(text.find("\"d_by_length\"") != std::string::npos);
    CHECK(text.back() == '\n');
}
