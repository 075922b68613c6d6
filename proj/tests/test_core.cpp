#include <gtest/gtest.h>

#include "cvnn/activation.hpp"
#include "cvnn/certificate.hpp"
#include "cvnn/core.hpp"

using namespace cvnn;

TEST(Grid, TensorGridStaysInBall) {
    Grid g = make_grid(cplx{0.5, -0.25}, 1.5, 17);
    ASSERT_FALSE(g.empty());
    for (const auto& p : g.points) EXPECT_LE(std::abs(p[0] - cplx{0.5, -0.25}), 1.5 * (1 + 1e-12));
}

TEST(Grid, SizeOfUnitDiscGrid) {
    // lattice points of a 5x5 grid on [-1,1]^2 inside the closed unit disc: 1 + 4 + 4 + 4 = 13 (oracle count by hand)
    EXPECT_EQ(make_grid(cplx{0.0}, 1.0, 5).size(), 13u);
}

TEST(Grid, AvoidanceDropsPointsOnTheSet) {
    Grid g = make_grid(cplx{0.0}, 1.0, 9, SetDescription::real_axis());
    for (const auto& p : g.points) EXPECT_GT(std::abs(p[0].imag()), 0.0);
}

TEST(Grid, ExhaustedWhenEverythingIsAvoided) {
    EXPECT_THROW(make_grid(cplx{0.0}, 1.0, 3, SetDescription::points({0.0, 1.0, -1.0, I, -I})),
                 GridExhausted);
}

TEST(Grid, MultiDimensionalBall) {
    Grid g = make_grid(CVec{0.0, 0.0}, 1.0, 5);
    EXPECT_EQ(g.dim(), 2u);
    for (const auto& p : g.points) EXPECT_LE(norm2(p), 1.0 + 1e-12);
}

TEST(Grid, RandomGridIsSeeded) {
    Grid a = random_grid(CVec{0.0}, 2.0, 50, 7);
    Grid b = random_grid(CVec{0.0}, 2.0, 50, 7);
    Grid c = random_grid(CVec{0.0}, 2.0, 50, 8);
    ASSERT_EQ(a.size(), 50u);
    EXPECT_EQ(a.points, b.points);
    EXPECT_NE(a.points, c.points);
    for (const auto& p : a.points) EXPECT_LE(std::abs(p[0]), 2.0);
}

TEST(SetDescription, Distances) {
    EXPECT_DOUBLE_EQ(SetDescription::real_axis().distance({3.0, -2.0}), 2.0);
    EXPECT_DOUBLE_EQ(SetDescription::imag_axis().distance({-1.5, 4.0}), 1.5);
    auto ray = SetDescription::ray(0.0, -1.0);
    EXPECT_DOUBLE_EQ(ray.distance({-3.0, 0.5}), 0.5);
    EXPECT_DOUBLE_EQ(ray.distance({3.0, 4.0}), 5.0);
    auto pts = SetDescription::points({I, -I});
    EXPECT_DOUBLE_EQ(pts.distance(0.0), 1.0);
    EXPECT_TRUE(SetDescription::none().empty());
    EXPECT_EQ((SetDescription::real_axis() | pts).pieces().size(), 2u);
}

TEST(SetDescription, ProbesSitAtTheRequestedOffset) {
    auto s = SetDescription::real_axis();
    CVec p = s.probes(0.0, 2.0, 0.1, 8);
    ASSERT_EQ(p.size(), 16u);
    for (cplx z : p) EXPECT_NEAR(s.distance(z), 0.1, 1e-12);
}

TEST(Activation, CatalogContainsRequiredNames) {
    for (const char* n : {"ratio", "sigmoid_split", "zlog", "rho_c", "example_4_8", "tanh", "sin", "sinh", "conj_sin",
                          "poly_zzbar", "abs2", "arcsin_principal", "arctan_principal"})
        EXPECT_NO_THROW(find_activation(n)) << n;
}

TEST(Activation, UnknownNameListsCatalog) {
    try {
        find_activation("nosuch");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("ratio"), std::string::npos);
    }
}

TEST(Activation, ValuesAgreeWithClosedForms) {
    cplx z{0.3, -1.2};
    EXPECT_NEAR(std::abs(find_activation("ratio")(z) - z / (1.0 + std::abs(z))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(find_activation("conj_sin")(z) - std::conj(std::sin(z))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(find_activation("abs2")(z) - std::norm(z)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(find_activation("poly_zzbar")(z) - (z + std::conj(z))), 0.0, 1e-15);
    EXPECT_EQ(find_activation("rho_c")(z), cplx(0.3));
    EXPECT_EQ(find_activation("zlog")(cplx{-2.0, 0.0}), cplx(0.0));
    // off the real axis example_4_8 is Re z, on it max(0, x)
    auto e = find_activation("example_4_8");
    EXPECT_EQ(e(cplx{-0.7, 0.1}), cplx(-0.7));
    EXPECT_EQ(e(cplx{-0.7, 0.0}), cplx(0.0));
    EXPECT_EQ(e(cplx{0.7, 0.0}), cplx(0.7));
    EXPECT_EQ(e(cplx{-1.0, 0.0}), cplx(0.0));
    EXPECT_EQ(e(cplx{-1.0, 1.0}), cplx(-1.0));
    EXPECT_TRUE(e.has_annotation(annotation::deep_by_composition));
    auto s = find_activation("sigmoid_split");
    EXPECT_NEAR(std::abs(s(0.0) - cplx(0.5, 0.5)), 0.0, 1e-15);
}

TEST(Activation, SingularitiesRaise) {
    EXPECT_THROW(find_activation("tanh")(cplx{0.0, pi / 2}), ActivationSingularity);
    EXPECT_THROW(find_activation("arctan_principal")(I), ActivationSingularity);
    EXPECT_NO_THROW(find_activation("tanh")(cplx{0.0, 1.0}));
}

TEST(Certificate, DisjointnessCheck) {
    std::vector<CVec> a{{0.0}, {1.0}}, b{{0.5}}, c{{1.0}};
    EXPECT_NO_THROW(require_disjoint(a, b));
    EXPECT_THROW(require_disjoint(a, c), std::invalid_argument);
    // 40 and 65 points per axis share no lattice point
    EXPECT_NO_THROW(require_disjoint(make_grid(cplx{0.0}, 1.0, 40).points, make_grid(cplx{0.0}, 1.0, 65).points));
}

TEST(Certificate, ErrorsAndVolume) {
    Certificate c;
    c.domain = {{0.0}, 2.0};
    EXPECT_NEAR(c.domain.volume(), 4.0 * pi, 1e-12);
    std::vector<CVec> pts{{0.0}, {1.0}, {I}};
    measure_errors(c, pts, [](const CVec& z) { return z[0]; }, [](const CVec&) { return cplx{0.0}; });
    EXPECT_DOUBLE_EQ(c.sup_error, 1.0);
    EXPECT_NEAR(c.l1_error, 2.0 / 3.0 * 4.0 * pi, 1e-12);
    EXPECT_EQ(c.test_grid_size, 3u);
    auto j = c.to_json();
    EXPECT_FALSE(j.contains("wall_time"));
    EXPECT_TRUE(c.to_json(true).contains("wall_time"));
}
