#include <gtest/gtest.h>

#include "cvnn/deep.hpp"

using namespace cvnn;

TEST(Minimax, ChebyshevToPower) {
    auto a = chebyshev_to_power({0.0, 0.0, 1.0});
    ASSERT_EQ(a.size(), 3u);
    EXPECT_DOUBLE_EQ(a[0], -1.0);
    EXPECT_DOUBLE_EQ(a[1], 0.0);
    EXPECT_DOUBLE_EQ(a[2], 2.0);
    auto b = chebyshev_to_power({0.0, 0.0, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(b[1], -3.0);
    EXPECT_DOUBLE_EQ(b[3], 4.0);
}

TEST(Minimax, QuadraticReluMatchesClosedForm) {
    // best quadratic for |x| on [-1,1] is x^2 + 1/8 with error 1/8, and relu = (x + |x|)/2
    auto [a, err] = relu_minimax_power(2, 1.0);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_NEAR(a[0], 1.0 / 16, 1e-4);
    EXPECT_NEAR(a[1], 0.5, 1e-4);
    EXPECT_NEAR(a[2], 0.5, 1e-4);
    EXPECT_NEAR(err, 1.0 / 16, 1e-4);
}

TEST(Minimax, ErrorShrinksWithDegree) {
    double prev = relu_minimax_power(2, 2.0).second;
    for (int n : {4, 8, 12}) {
        double e = relu_minimax_power(n, 2.0).second;
        EXPECT_LT(e, prev);
        prev = e;
    }
    // relu error of degree-n minimax behaves like r * 0.14 / n
    EXPECT_LT(prev, 2.0 * 0.02);
}

TEST(ReluC, ExactCompositionIsDetected) {
    EXPECT_TRUE(composes_to_relu_c(find_activation("example_4_8"), 2.0));
    EXPECT_TRUE(composes_to_relu_c(find_activation("rho_c"), 2.0));
    EXPECT_FALSE(composes_to_relu_c(find_activation("ratio"), 2.0));
    auto res = build_relu_c(find_activation("example_4_8"), 2.0, 0.1);
    EXPECT_TRUE(res.exact_composition);
    EXPECT_EQ(res.measured_error, 0.0);
    EXPECT_EQ(res.network.depth(), 2);
}

TEST(ReluC, RatioSurrogateMeetsTolerance) {
    auto sigma = find_activation("ratio");
    auto res = build_relu_c(sigma, 2.0, 0.1);
    EXPECT_FALSE(res.exact_composition);
    EXPECT_EQ(res.network.depth(), 2);
    EXPECT_LE(res.measured_error, 0.1);
    EXPECT_GT(res.test_points, 3000u);
    EXPECT_NEAR(std::abs(res.network(sigma, cplx{1.0}) - 1.0), 0.0, 0.1);
    EXPECT_NEAR(std::abs(res.network(sigma, cplx{-1.0})), 0.0, 0.1);
    EXPECT_NEAR(std::abs(res.network(sigma, cplx{0.0, 1.0})), 0.0, 0.1);
}

TEST(ReluC, InvalidArguments) {
    EXPECT_THROW(build_relu_c(find_activation("ratio"), 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(build_relu_c(find_activation("ratio"), 1.0, -0.1), std::invalid_argument);
}

TEST(Identity, ShallowIdentityWithinBudget) {
    auto sigma = find_activation("ratio");
    ShallowNetwork id = identity_network(sigma, 1.5, 1e-3, ConstructorConfig{});
    double e = 0.0;
    for (cplx z : make_grid(cplx{0.0}, 1.5, 25).scalars()) e = std::max(e, std::abs(id(sigma, z) - z));
    EXPECT_LT(e, 2e-3);
}

TEST(Ridge, RandomFeaturesFitACone) {
    Domain dom{{0.0}, 1.0};
    auto fit = make_grid(cplx{0.0}, 1.0, 40).points;
    RidgeExpansion re = fit_ridge_expansion(find_target("cone"), dom, 256, 0, fit, 0.0, 1e-6);
    EXPECT_EQ(re.size(), 256u);
    double e = 0.0;
    for (const auto& z : make_grid(cplx{0.0}, 1.0, 65).points) e = std::max(e, std::abs(re(z) - find_target("cone")(z)));
    EXPECT_LT(e, 0.05);
    EXPECT_THROW(fit_ridge_expansion(find_target("cone"), dom, 0, 0, fit), std::invalid_argument);
}

TEST(Deep, DiscontinuousActivationComposesExactly) {
    auto res = synthesize_deep(find_activation("example_4_8"), find_target("relu_c"), Domain{{0.0}, 1.0}, 2);
    EXPECT_LT(res.certificate.sup_error, 1e-15);
    EXPECT_EQ(res.certificate.depth, 2);
}

TEST(Deep, ConeWithDiscontinuousActivation) {
    auto res = synthesize_deep(find_activation("example_4_8"), find_target("cone"), Domain{{0.0}, 1.0}, 3);
    EXPECT_EQ(res.network.depth(), 3);
    EXPECT_LE(res.certificate.sup_error, 0.1);
    EXPECT_NEAR(res.certificate.sup_error, res.ridge_error, 1e-12);
}

TEST(Deep, RefusedForHolomorphicActivation) {
    EXPECT_THROW(synthesize_deep(find_activation("sin"), find_target("cone"), Domain{{0.0}, 1.0}, 2), SynthesisRefused);
    EXPECT_THROW(synthesize_deep(find_activation("ratio"), find_target("cone"), Domain{{0.0}, 1.0}, 1),
                 std::invalid_argument);
}

TEST(Lift, RealPartInTwoVariables) {
    auto res = lift_dimension(find_activation("ratio"), find_target("rez", 2), Domain{{0.0, 0.0}, 1.0});
    EXPECT_EQ(res.network.dim(), 2);
    EXPECT_LT(res.certificate.sup_error, 0.02);
    EXPECT_EQ(res.ridge_error, 0.0);
}
