#include <gtest/gtest.h>

#include "cvnn/verify.hpp"

using namespace cvnn;

namespace {
const Grid grid = make_grid(cplx{0.0}, 1.0, 9);
}

TEST(InvariantKind, Parse) {
    EXPECT_EQ(InvariantKind::parse("dbar").type, InvariantKind::Type::dbar_vanishes);
    EXPECT_EQ(InvariantKind::parse("d_vanishes").type, InvariantKind::Type::d_vanishes);
    auto k = InvariantKind::parse("laplacian_power_vanishes(3)");
    EXPECT_EQ(k.type, InvariantKind::Type::laplacian_power_vanishes);
    EXPECT_EQ(k.m, 3);
    EXPECT_EQ(InvariantKind::parse("laplacian:2").m, 2);
    EXPECT_EQ(k.to_string(), "laplacian_power_vanishes(3)");
    for (const char* bad : {"", "laplace", "laplacian:x", "laplacian_power_vanishes(2", "laplacian:-1"})
        EXPECT_THROW(InvariantKind::parse(bad), std::invalid_argument) << bad;
}

TEST(Invariants, HolomorphicNetworksStayHolomorphic) {
    for (const char* n : {"sin", "tanh", "sinh"})
        for (int L = 1; L <= 3; ++L) {
            auto rep = check_network_invariant(find_activation(n), L, InvariantKind{}, grid);
            EXPECT_LE(rep.max_residual, 1e-5) << n << " L=" << L;
            EXPECT_EQ(rep.networks_tested, 20);
        }
}

TEST(Invariants, ConjugationAlternatesWithDepth) {
    auto s = find_activation("conj_sin");
    InvariantKind d{InvariantKind::Type::d_vanishes, 1};
    EXPECT_LE(check_network_invariant(s, 1, d, grid).max_residual, 1e-5);
    EXPECT_LE(check_network_invariant(s, 2, InvariantKind{}, grid).max_residual, 1e-5);
    EXPECT_GT(check_network_invariant(s, 1, InvariantKind{}, grid).max_residual, 1e-2);
}

TEST(Invariants, PolynomialNetworksArePolyharmonic) {
    EXPECT_LE(check_network_invariant(find_activation("poly_zzbar"), 1, InvariantKind::laplacian(2), grid).max_residual, 1e-4);
    EXPECT_LE(check_network_invariant(find_activation("poly_zzbar"), 2, InvariantKind::laplacian(2), grid).max_residual, 1e-4);
    EXPECT_LE(check_network_invariant(find_activation("abs2"), 1, InvariantKind::laplacian(3), grid).max_residual, 1e-4);
    EXPECT_LE(check_network_invariant(find_activation("abs2"), 2, InvariantKind::laplacian(5), grid).max_residual, 1e-4);
    EXPECT_GT(check_network_invariant(find_activation("abs2"), 1, InvariantKind::laplacian(1), grid).max_residual, 1e-1);
}

TEST(Invariants, UniversalActivationBreaksThem) {
    EXPECT_GT(check_network_invariant(find_activation("ratio"), 1, InvariantKind{}, grid).max_residual, 1e-2);
}

TEST(Invariants, ReportIsSeededAndDeterministic) {
    InvariantOptions a;
    a.seed = 5;
    auto s = find_activation("sin");
    auto r1 = check_network_invariant(s, 2, InvariantKind{}, grid, a).to_json().dump();
    auto r2 = check_network_invariant(s, 2, InvariantKind{}, grid, a).to_json().dump();
    EXPECT_EQ(r1, r2);
    EXPECT_THROW(check_network_invariant(s, 0, InvariantKind{}, grid), std::invalid_argument);
}

TEST(Floor, UniversalActivationImprovesWithWidth) {
    auto t = error_floor_experiment(find_activation("ratio"), find_target("cone"), {50, 100, 200}, 0.0, 1.0, 0);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_GT(t.rows[0].l1_error, t.rows[1].l1_error);
    EXPECT_GT(t.rows[1].l1_error, t.rows[2].l1_error);
    EXPECT_LT(t.rows[2].l1_error, 0.01);
    EXPECT_EQ(t.best().width, 200);
    EXPECT_EQ(t.to_csv().substr(0, 24), "width,sup_error,l1_error");
}

TEST(Floor, HolomorphicActivationStalls) {
    auto s = find_activation("sin");
    auto t = error_floor_experiment(s, find_target("cone"), {50, 100, 200}, 0.0, 1.0, 0);
    for (const auto& r : t.rows) EXPECT_GT(r.l1_error, 0.3);
    EXPECT_LE(holomorphy_of_best_fit(s, t), 1e-4);
    EXPECT_LE(holomorphy_of_best_fit(find_activation("tanh"), find_target("cone"), {50, 100}, 0.0, 1.0, 0), 1e-4);
}

TEST(Floor, Preconditions) {
    auto cone = find_target("cone");
    EXPECT_THROW(holomorphy_of_best_fit(find_activation("ratio"), cone, {10}, 0.0, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(error_floor_experiment(find_activation("sin"), cone, {100, 50}, 0.0, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(error_floor_experiment(find_activation("sin"), cone, {}, 0.0, 1.0, 0), std::invalid_argument);
}
