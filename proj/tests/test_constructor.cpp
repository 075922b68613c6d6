#include <gtest/gtest.h>

#include "cvnn/synthesis.hpp"

using namespace cvnn;

namespace {

double sup_on_disc(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g, double r, int ppa = 33) {
    double e = 0.0;
    for (cplx z : make_grid(cplx{0.0}, r, ppa).scalars()) e = std::max(e, std::abs(f(z) - g(z)));
    return e;
}

}  // namespace

TEST(TranslateSum, CarriesUnitMass) {
    ShallowNetwork t = translate_sum(0.05, 0.05, 8);
    cplx mass{0.0};
    for (cplx a : t.coeffs()) mass += a;
    EXPECT_NEAR(mass.real(), 1.0, 1e-3);
    EXPECT_NEAR(mass.imag(), 0.0, 1e-15);
    for (cplx w : t.weights()) EXPECT_EQ(w, cplx(1.0));
}

TEST(TranslateSum, ApproximatesTheMollification) {
    auto sigma = find_activation("ratio");
    ShallowNetwork t = translate_sum(0.1, 0.1, 16);
    Mollified m = mollify(sigma, make_mollifier(0.1));
    for (cplx z : {cplx{0.0}, cplx{0.3, 0.1}, cplx{-1.0, 0.5}}) EXPECT_NEAR(std::abs(t(sigma, z) - m(z)), 0.0, 1e-3);
}

TEST(PolyFit, ExactOnPolynomials) {
    auto p = [](cplx z) { return cplx{1.0, -2.0} + 3.0 * z * std::conj(z) - I * z * z + 0.5 * std::pow(std::conj(z), 3); };
    PolyFit fit = fit_poly_coeffs(p, make_grid(cplx{0.0}, 1.5, 20).scalars(), 3, 1.5);
    EXPECT_NEAR(std::abs(fit.coeffs.at({0, 0}) - cplx{1.0, -2.0}), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(fit.coeffs.at({1, 1}) - 3.0), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(fit.coeffs.at({2, 0}) + I), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(fit.coeffs.at({0, 3}) - 0.5), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(fit.coeffs.at({2, 1})), 0.0, 1e-11);
    EXPECT_LT(fit.residual_sup, 1e-11);
    EXPECT_NEAR(std::abs(fit(cplx{0.2, 0.9}) - p(cplx{0.2, 0.9})), 0.0, 1e-11);
}

TEST(PolyFit, RejectsUnderdeterminedSystems) {
    EXPECT_THROW(fit_poly_coeffs([](cplx z) { return z; }, {0.0, 1.0}, 2, 1.0), std::invalid_argument);
}

TEST(Extraction, QuadraticActivationMonomialsOfLowOrder) {
    auto sigma = find_activation("abs2");
    ConstructorConfig cfg;
    CVec validation = make_grid(cplx{0.0}, 1.0, 16).scalars();
    for (int m = 0; m <= 1; ++m)
        for (int l = 0; l <= 1; ++l) {
            if (m == 0 && l == 0) continue;
            ShallowNetwork net = realize_polynomial(sigma, {{{m, l}, 1.0}}, 1.0, validation, cfg, nullptr, nullptr);
            double e = sup_on_disc([&](cplx z) { return net(sigma, z); },
                                   [&](cplx z) { return std::pow(z, m) * std::pow(std::conj(z), l); }, 1.0);
            EXPECT_LT(e, 1e-2) << m << "," << l;
        }
}

TEST(Extraction, MixedMonomialOfQuadraticActivationAtOrigin) {
    auto sigma = find_activation("abs2");
    MonomialRequest req;
    req.m = 1;
    req.ell = 1;
    req.theta = 0.0;
    req.fd_step = 0.5;
    ShallowNetwork net = extract_monomial(sigma, req);
    double e = sup_on_disc([&](cplx z) { return net(sigma, z); }, [](cplx z) { return z * std::conj(z); }, 1.0);
    EXPECT_LT(e, 1e-3);
    EXPECT_NEAR(std::abs(net(sigma, cplx{2.0}) - 4.0), 0.0, 4e-3);
}

TEST(Shallow, QuadraticTargetWithQuadraticActivation) {
    ConstructorConfig cfg;
    cfg.degree = 2;
    cfg.check_verdict = false;
    auto res = synthesize_shallow(find_activation("abs2"), find_target("abs2_target"), 0.0, 1.0, cfg);
    EXPECT_LT(res.certificate.sup_error, 1e-3);
}

TEST(Extraction, ExplicitRequestReproducesAMonomial) {
    auto sigma = find_activation("sigmoid_split");
    MonomialRequest req;
    req.m = 2;
    req.ell = 0;
    req.theta = cplx{1.0, 1.0};
    req.fd_step = 0.4;
    req.domain_radius = 0.5;
    ShallowNetwork net = extract_monomial(sigma, req);
    double e = sup_on_disc([&](cplx z) { return net(sigma, z); }, [](cplx z) { return z * z; }, 0.5);
    EXPECT_LT(e, 1e-3);
}

TEST(Extraction, HolomorphicActivationHasNoConjugateMonomial) {
    auto sigma = find_activation("sin");
    ConstructorConfig cfg;
    EXPECT_THROW(find_expansion_point(sigma, 0, 1, cfg), NoActivePoint);
    EXPECT_NO_THROW(find_expansion_point(sigma, 3, 0, cfg));
    MonomialRequest req;
    req.m = 0;
    req.ell = 1;
    req.theta = 0.4;
    EXPECT_THROW(extract_monomial(sigma, req), InactiveExpansionPoint);
}

TEST(Extraction, LogarithmicActivationConjugateMonomialIsInactiveOffTheCut) {
    auto sigma = find_activation("zlog");
    EXPECT_THROW(find_active_point(sigma, 0, 1, {cplx{0.0, 2.0}, cplx{2.0, 0.0}}), NoActivePoint);
}

TEST(Shallow, RefusedForObstructedActivations) {
    auto target = find_target("cone");
    for (const char* n : {"sin", "tanh", "abs2", "poly_zzbar", "conj_sin"})
        EXPECT_THROW(synthesize_shallow(find_activation(n), target, 0.0, 1.0), SynthesisRefused) << n;
}

TEST(Shallow, ReproducesRealPart) {
    auto res = synthesize_shallow(find_activation("ratio"), find_target("rez"), 0.0, 1.0);
    EXPECT_LT(res.certificate.sup_error, 1e-3);
    EXPECT_TRUE(res.certificate.failures.empty());
    EXPECT_EQ(res.certificate.test_grid_size, make_grid(cplx{0.0}, 1.0, 65).size());
}

TEST(Shallow, ErrorDecreasesWithDegree) {
    auto sigma = find_activation("ratio");
    auto target = find_target("cone");
    double prev = std::numeric_limits<double>::infinity();
    for (int deg : {2, 4, 6}) {
        ConstructorConfig cfg;
        cfg.degree = deg;
        double e = synthesize_shallow(sigma, target, 0.0, 1.0, cfg).certificate.sup_error;
        EXPECT_LT(e, prev) << deg;
        prev = e;
    }
    EXPECT_LE(prev, 0.1);
}

TEST(Shallow, CertificateIsReproducible) {
    auto sigma = find_activation("sigmoid_split");
    auto target = find_target("cone");
    ConstructorConfig cfg;
    cfg.degree = 4;
    auto a = synthesize_shallow(sigma, target, 0.0, 1.0, cfg).certificate.to_json().dump();
    auto b = synthesize_shallow(sigma, target, 0.0, 1.0, cfg).certificate.to_json().dump();
    EXPECT_EQ(a, b);
}
