#include <gtest/gtest.h>

#include "cvnn/classifier.hpp"

using namespace cvnn;

TEST(Classifier, PolyharmonicOrders) {
    EXPECT_EQ(detect_polyharmonic(find_activation("poly_zzbar")).order, 1);
    EXPECT_EQ(detect_polyharmonic(find_activation("abs2")).order, 2);
    EXPECT_EQ(detect_polyharmonic(find_activation("sin")).order, 1);
    EXPECT_FALSE(detect_polyharmonic(find_activation("ratio")).order.has_value());
}

TEST(Classifier, Holomorphy) {
    EXPECT_TRUE(detect_holomorphy(find_activation("sinh")).holomorphic());
    EXPECT_TRUE(detect_holomorphy(find_activation("conj_sin")).antiholomorphic());
    auto r = detect_holomorphy(find_activation("abs2"));
    EXPECT_EQ(r.cls, HolomorphyClass::neither);
    EXPECT_EQ(detect_holomorphy(find_activation("real_part")).cls, HolomorphyClass::neither);
}

TEST(Classifier, PolynomialDegree) {
    EXPECT_EQ(detect_polynomial(find_activation("poly_zzbar")).degree, 1);
    EXPECT_EQ(detect_polynomial(find_activation("abs2")).degree, 2);
    EXPECT_FALSE(detect_polynomial(find_activation("sin")).degree.has_value());
}

TEST(Classifier, AlmostEverywherePolynomialButDiscontinuous) {
    auto rep = classify(find_activation("example_4_8"));
    EXPECT_EQ(rep.shallow_universal, Verdict::no);
    EXPECT_EQ(rep.deep_universal, Verdict::yes);
    EXPECT_TRUE(rep.ae_equal_but_discontinuous);
}

TEST(Classifier, RealPartIsNeitherUniversal) {
    auto rep = classify(find_activation("real_part"));
    EXPECT_EQ(rep.shallow_universal, Verdict::no);
    EXPECT_EQ(rep.deep_universal, Verdict::no);
}

TEST(Classifier, NotLocallyBoundedIsIndeterminate) {
    auto rep = classify(find_activation("arctan_principal"));
    EXPECT_EQ(rep.shallow_universal, Verdict::indeterminate);
    EXPECT_EQ(rep.deep_universal, Verdict::indeterminate);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(Classifier, ArcsinIsUniversal) {
    auto rep = classify(find_activation("arcsin_principal"));
    EXPECT_EQ(rep.shallow_universal, Verdict::yes);
    EXPECT_EQ(rep.deep_universal, Verdict::yes);
}

TEST(Classifier, ReportIsDeterministic) {
    auto s = find_activation("zlog");
    EXPECT_EQ(classify(s).to_json().dump(), classify(s).to_json().dump());
}

TEST(Classifier, InvalidSpecIsRejected) {
    ActivationSpec s;
    s.name = "bad";
    s.fn = [](cplx z) { return z; };
    s.smooth = true;
    s.nonsmooth = SetDescription::real_axis();
    EXPECT_THROW(classify(s), std::invalid_argument);
}
