#include <gtest/gtest.h>

#include "cvnn/stencil.hpp"

using namespace cvnn;

TEST(CentralWeights, KnownCoefficients) {
    auto d2 = central_weights(2, 2);
    ASSERT_EQ(d2.size(), 3u);
    EXPECT_NEAR(d2[0], 1.0, 1e-15);
    EXPECT_NEAR(d2[1], -2.0, 1e-15);
    EXPECT_NEAR(d2[2], 1.0, 1e-15);
    auto d1 = central_weights(1, 4);
    ASSERT_EQ(d1.size(), 5u);
    const double expect[] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(d1[i], expect[i], 1e-15);
    auto d4 = central_weights(4, 2);
    const double e4[] = {1, -4, 6, -4, 1};
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(d4[i], e4[i], 1e-13);
}

namespace {

cplx monomial(cplx z, int a, int b) { return std::pow(z, a) * std::pow(std::conj(z), b); }

// d^m dbar^l of z^a zbar^b at z0
cplx exact(cplx z0, int a, int b, int m, int l) {
    if (m > a || l > b) return 0.0;
    double c = 1.0;
    for (int k = 0; k < m; ++k) c *= a - k;
    for (int k = 0; k < l; ++k) c *= b - k;
    return c * monomial(z0, a - m, b - l);
}

}  // namespace

class CartesianExactness : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(CartesianExactness, ReproducesMonomialDerivatives) {
    auto [m, l] = GetParam();
    const cplx z0{0.3, -0.4};
    Stencil st = cartesian_stencil(m, l, 0.1);
    // accuracy-4 central rules are exact up to total degree m + l + 3
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b + a <= m + l + 3; ++b) {
            cplx got = st.apply([&](cplx z) { return monomial(z, a, b); }, z0);
            EXPECT_NEAR(std::abs(got - exact(z0, a, b, m, l)), 0.0, 1e-9) << a << "," << b;
        }
}

INSTANTIATE_TEST_SUITE_P(Orders, CartesianExactness,
                         ::testing::Combine(::testing::Values(0, 1, 2), ::testing::Values(0, 1, 2)));

TEST(PolarStencil, ReproducesMonomialDerivatives) {
    const cplx z0{-0.2, 0.5};
    for (int m = 0; m <= 3; ++m)
        for (int l = 0; l <= 3; ++l) {
            if (m == 0 && l == 0) continue;
            PolarParams p;
            p.radius = 0.4;
            Stencil st = polar_stencil(m, l, p);
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; b <= 4; ++b) {
                    cplx got = st.apply([&](cplx z) { return monomial(z, a, b); }, z0);
                    EXPECT_NEAR(std::abs(got - exact(z0, a, b, m, l)), 0.0, 1e-7) << m << l << a << b;
                }
        }
}

TEST(Stencil, SingularSamplesAreReported) {
    Stencil st = cartesian_stencil(1, 0, 0.1);
    EXPECT_THROW(st.apply([](cplx) { return cplx{std::nan(""), 0.0}; }, 0.0), StencilSingularity);
    EXPECT_THROW(st.apply([](cplx) -> cplx { throw ActivationSingularity("f"); }, 0.0), StencilSingularity);
}

TEST(Stencil, DefaultStepGrowsWithOrderAndModulus) {
    EXPECT_LT(default_step(0.0, 1), default_step(0.0, 4));
    EXPECT_LT(default_step(0.0, 2), default_step(3.0, 2));
    EXPECT_THROW(cartesian_stencil(1, 0, 0.0), std::invalid_argument);
}
