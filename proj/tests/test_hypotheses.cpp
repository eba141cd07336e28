#include <mixed_spectra/hypotheses.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace mixed_spectra;

namespace {
const PotentialSpec kZero(ConstantPotential{0.0});

PotentialSpec trapezium_bump() { return PotentialSpec(SeparablePotential{Vec3::UnitY(), Bump{2.0, 2.0, 5.0}}); }

PotentialSpec obtuse_linear() { return PotentialSpec(LinearPotential{Vec3(-1, -2, 0) / std::sqrt(5.0), 0.0}); }
} // namespace

TEST(Profile, TrapeziumEdgeFactors) {
    const auto prof = edge_profile(trapezium(), {1}, {3}, trapezium_bump());
    ASSERT_EQ(prof.edges.size(), 3u);
    EXPECT_EQ(prof.edges[0].facet, 2);
    EXPECT_NEAR(prof.edges[0].t, 6.0 / 13.0, 1e-12);
    EXPECT_TRUE(prof.edges[1].is_gamma_prime);
    EXPECT_EQ(prof.edges[1].t, 0.0);
    EXPECT_NEAR(prof.edges[2].t, -6.0 / 13.0, 1e-12);
    ASSERT_EQ(prof.corner_jumps.size(), 2u);
    for (double j : prof.corner_jumps) EXPECT_GT(j, 0.0);
}

TEST(Profile, TrapeziumBumpMonotone) {
    const double lambda = 4.0; // any value in the feasible interval
    const auto r = check_monotone_profile(trapezium(), {1}, {3}, trapezium_bump(), lambda);
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.feasible_nonempty);
    EXPECT_LE(r.lambda_min, lambda);
    EXPECT_GE(r.lambda_max, lambda);
}

TEST(Profile, ObtuseTriangleMonotone) {
    const auto r = check_monotone_profile(obtuse_triangle(), {1}, {2}, obtuse_linear(), 5.0);
    EXPECT_TRUE(r.ok);
}

TEST(Profile, SquareOppositeEdgesIdenticallyZero) {
    const auto r = check_monotone_profile(unit_square(), {1}, {3}, kZero, 10.0);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.value_scale, 0.0);
    for (const auto& e : r.profile.edges) EXPECT_NEAR(e.t, 0.0, 1e-15);
}

TEST(StraightSegment, TrapeziumBranchOne) {
    const auto hv = check_straight_segment(trapezium(), {1}, {3}, trapezium_bump(), 4.0);
    EXPECT_TRUE(hv.ok);
    EXPECT_EQ(hv.branch, "i");
    EXPECT_EQ(hv.theorem, theorem_id::kStraightSegment);
}

TEST(StraightSegment, ObtuseTriangleBranchTwo) {
    const auto hv = check_straight_segment(obtuse_triangle(), {1}, {2}, obtuse_linear(), 5.0);
    EXPECT_TRUE(hv.ok);
    EXPECT_EQ(hv.branch, "ii");
}

TEST(StraightSegment, SquareAdjacentEdgesRejected) {
    const auto hv = check_straight_segment(unit_square(), {3}, {0}, kZero, 3.0);
    EXPECT_FALSE(hv.ok);
    const auto* c = hv.find("gamma_endpoint_angles_acute");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->ok);
}

TEST(StraightSegment, StructuralErrors) {
    EXPECT_THROW(check_straight_segment(unit_square(), {0, 2}, {1}, kZero, 1.0), GammaNotConnected);
    EXPECT_THROW(check_straight_segment(unit_square(), {0}, {1, 2}, kZero, 1.0), GammaPrimeNotStraight);
}

TEST(DualPlanar, RightIsocelesHypotenuse) {
    EXPECT_TRUE(check_dual_planar(right_isoceles_triangle(), {0, 2}, {1}, kZero).ok);
}

TEST(DualPlanar, SquareOneEdgeRejected) {
    EXPECT_FALSE(check_dual_planar(unit_square(), {0, 1, 2}, {3}, kZero).ok);
}

TEST(DualPlanar, NotExhaustiveRejected) {
    EXPECT_THROW(check_dual_planar(unit_square(), {0, 1}, {3}, kZero), PartitionNotExhaustive);
}

TEST(DualPlanar, ReflectedDistancePotential) {
    const auto p = right_isoceles_triangle();
    HypothesisOptions opt;
    opt.reflected_distance = true;
    EXPECT_TRUE(check_dual_planar(p, {0, 2}, {1}, distance_to_facets(p, {0, 2}), opt).ok);
}

TEST(DualPlanar, AnyTriangleLongestSide) {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    while (tested < 30) {
        std::vector<std::pair<double, double>> v{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const double cross = (v[1].first - v[0].first) * (v[2].second - v[0].second) -
                             (v[1].second - v[0].second) * (v[2].first - v[0].first);
        if (std::abs(cross) < 0.05) continue;
        if (cross < 0) std::swap(v[1], v[2]);
        const auto p = polygon(v);
        int longest = 0;
        for (int f = 1; f < 3; ++f)
            if (facet_frame(p, f).measure > facet_frame(p, longest).measure) longest = f;
        std::set<int> gamma;
        for (int f = 0; f < 3; ++f)
            if (f != longest) gamma.insert(f);
        EXPECT_TRUE(check_dual_planar(p, gamma, {longest}, kZero).ok);
        ++tested;
    }
}

TEST(DualHigherDim, CubeSimplexPrismAccepted) {
    EXPECT_TRUE(check_dual_higher_dim(unit_cube(), {1, 2, 3, 4, 5}, {0}, kZero).ok);
    for (int f = 0; f < 4; ++f) {
        std::set<int> rest;
        for (int g = 0; g < 4; ++g)
            if (g != f) rest.insert(g);
        EXPECT_TRUE(check_dual_higher_dim(unit_simplex(), rest, {f}, kZero).ok) << "face " << f;
    }
    EXPECT_TRUE(check_dual_higher_dim(slanted_prism(), {1, 2, 3, 4, 5, 6}, {0}, kZero).ok);
    EXPECT_TRUE(check_dual_higher_dim(square_prism(), {1, 2, 3, 4, 5}, {0}, kZero).ok);
}

TEST(DualHigherDim, ShearedPrismRejected) {
    const auto p = sheared_prism(0.5);
    std::set<int> rest;
    for (int f = 1; f < static_cast<int>(p.num_facets()); ++f) rest.insert(f);
    const auto hv = check_dual_higher_dim(p, rest, {0}, kZero);
    EXPECT_FALSE(hv.ok);
    const auto* c = hv.find("dihedral_angles_at_most_right");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->ok);
    EXPECT_LT(c->margin, 0.0);
}

TEST(DimensionM, SquareLeftEdgeLinear) {
    EXPECT_EQ(dimension_m(PotentialSpec(LinearPotential{Vec3(4, 0, 0), 0}), {3}, unit_square()).m, 1);
}

TEST(DimensionM, CubeFaceSeparable) {
    const auto d = dimension_m(PotentialSpec(SeparablePotential{Vec3::UnitX(), Polynomial{{0, 0, 5}}}), {5}, unit_cube());
    EXPECT_EQ(d.m, 2);
    EXPECT_EQ(d.dim_s, 2);
    EXPECT_EQ(d.dim_grad_perp, 2);
}

TEST(DimensionM, SquareAdjacentEdgesZero) {
    EXPECT_EQ(dimension_m(kZero, {0, 3}, unit_square()).m, 0);
    EXPECT_EQ(dimension_m(PotentialSpec(LinearPotential{Vec3(1, 1, 0), 0}), {0, 3}, unit_square()).m, 0);
}

TEST(DimensionM, SimplexSlantedFaceExponential) {
    const auto d = dimension_m(PotentialSpec(ExponentialPotential{1, 1, Vec3(1, 1, 1)}), {3}, unit_simplex());
    EXPECT_EQ(d.m, 2);
}

TEST(DimensionM, GradientNotAlignedWithGammaGivesFewer) {
    const auto d = dimension_m(PotentialSpec(LinearPotential{Vec3(1, 1, 0), 0}), {3}, unit_square());
    EXPECT_EQ(d.m, 0);
}
