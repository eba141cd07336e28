#include <mixed_spectra/extrapolate.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace mixed_spectra;

namespace {
std::vector<LevelValue> model(double (*f)(double)) {
    std::vector<LevelValue> v;
    for (double h : {0.25, 0.125, 0.0625}) v.push_back({h, f(h)});
    return v;
}
} // namespace

TEST(Extrapolate, QuadraticModelIsExact) {
    const auto e = extrapolate(model([](double h) { return 10 + h * h; }));
    EXPECT_NEAR(e.value, 10.0, 1e-13);
    EXPECT_NEAR(e.order, 2.0, 1e-12);
    EXPECT_TRUE(e.reliable);
    EXPECT_NEAR(e.error_bar, 2 * 0.0625 * 0.0625, 1e-12);
}

TEST(Extrapolate, LinearModelOrderOne) {
    const auto e = extrapolate(model([](double h) { return 10 + h; }));
    EXPECT_NEAR(e.order, 1.0, 1e-12);
    EXPECT_NEAR(e.value, 10.0, 1e-13);
}

TEST(Extrapolate, ConstantSequenceFlagged) {
    const auto e = extrapolate(model([](double) { return 3.0; }));
    EXPECT_EQ(e.value, 3.0);
    EXPECT_EQ(e.error_bar, 0.0);
    EXPECT_TRUE(std::isnan(e.order));
    EXPECT_FALSE(e.reliable);
}

TEST(Extrapolate, NonMonotoneFlagged) {
    const auto e = extrapolate({{0.25, 1.0}, {0.125, 2.0}, {0.0625, 1.5}});
    EXPECT_FALSE(e.reliable);
    EXPECT_NE(e.note.find("unreliable"), std::string::npos);
    EXPECT_EQ(e.order, 0.5);
}

TEST(Extrapolate, OrderClampedAboveTwo) {
    const auto e = extrapolate(model([](double h) { return 1 + h * h * h; }));
    EXPECT_EQ(e.order, 2.0);
    EXPECT_FALSE(e.reliable);
}

TEST(Extrapolate, UsesThreeFinestLevels) {
    auto v = model([](double h) { return 10 + h * h; });
    v.insert(v.begin(), LevelValue{0.5, 99.0}); // an off-model coarse level is ignored
    EXPECT_NEAR(extrapolate(v).value, 10.0, 1e-13);
}

TEST(Extrapolate, InsufficientLevels) {
    EXPECT_THROW(extrapolate({{0.5, 1.0}, {0.25, 1.0}}), InsufficientLevels);
}

TEST(Extrapolate, NonHalvingSizesRejected) {
    EXPECT_THROW(extrapolate({{0.5, 1.0}, {0.3, 1.1}, {0.1, 1.2}}), Error);
}

TEST(ExtrapolateProperties, RecoversPowerModels) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> lim(-5, 50), c(0.1, 3), s(0.6, 1.95);
    for (int i = 0; i < 100; ++i) {
        const double L = lim(rng), C = c(rng), S = s(rng);
        std::vector<LevelValue> v;
        for (double h : {0.125, 0.0625, 0.03125}) v.push_back({h, L + C * std::pow(h, S)});
        const auto e = extrapolate(v);
        EXPECT_NEAR(e.order, S, 1e-9);
        EXPECT_NEAR(e.value, L, 1e-9 * std::max(1.0, std::abs(L)));
        EXPECT_GE(e.error_bar, 0.0);
    }
}
