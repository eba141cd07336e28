#include <mixed_spectra/potentials.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace mixed_spectra;

TEST(Evaluate, LinearPotential) {
    const PotentialSpec V(LinearPotential{Vec3(1, 0, 0), 0.0});
    const Point x(0.3, 0.7, 0);
    EXPECT_DOUBLE_EQ(evaluate(V, x), 0.3);
    EXPECT_TRUE(gradient(V, x).value.isApprox(Vec3(1, 0, 0)));
    EXPECT_TRUE(hessian(V, x).value.isZero());
}

TEST(Evaluate, ExponentialAtOrigin) {
    const PotentialSpec V(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 0)});
    const Point o = Point::Zero();
    EXPECT_DOUBLE_EQ(evaluate(V, o), 1.0);
    EXPECT_TRUE(gradient(V, o).value.isApprox(Vec3(1, 1, 0)));
    Mat3 h = Mat3::Zero();
    h.topLeftCorner(2, 2).setOnes();
    EXPECT_TRUE(hessian(V, o).value.isApprox(h));
    EXPECT_FALSE(gradient(V, o).sampled);
}

TEST(Evaluate, DistanceToRightEdge) {
    const PotentialSpec V = distance_to_facets(unit_square(), {1});
    const Point x(0.25, 0.5, 0);
    EXPECT_NEAR(evaluate(V, x), 0.75, 1e-15);
    EXPECT_TRUE(gradient(V, x).value.isApprox(Vec3(-1, 0, 0), 1e-12));
}

TEST(Evaluate, DistanceOnMedialAxisNotDifferentiable) {
    const PotentialSpec V = distance_to_facets(unit_square(), {1, 3});
    EXPECT_THROW(gradient(V, Point(0.5, 0.4, 0)), NotDifferentiableHere);
    EXPECT_THROW(hessian(V, Point(0.5, 0.4, 0)), NotDifferentiableHere);
}

TEST(Evaluate, DistanceHessianIsSampled) {
    const PotentialSpec V = distance_to_facets(unit_square(), {1});
    const auto H = hessian(V, Point(0.3, 0.6, 0));
    EXPECT_TRUE(H.sampled);
    EXPECT_LT(H.value.cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Evaluate, OffsetAddsConstant) {
    const PotentialSpec V(LinearPotential{Vec3(2, 1, 0), 0.5});
    const Point x(0.2, 0.3, 0);
    EXPECT_DOUBLE_EQ(evaluate(shifted(V, 7.0), x), evaluate(V, x) + 7.0);
}

TEST(GradPerp, ConstantIsFullSpace) {
    const auto pts = interior_samples(unit_square(), default_sample_count(2));
    EXPECT_EQ(grad_perp_space(PotentialSpec(ConstantPotential{5.0}), pts, 2).dim(), 2);
}

TEST(GradPerp, SeparableInX1SpansE2) {
    const auto pts = interior_samples(unit_square(), default_sample_count(2));
    const PotentialSpec V(SeparablePotential{Vec3::UnitX(), Polynomial{{0, 0, 1}}});
    const auto r = grad_perp_space(V, pts, 2);
    ASSERT_EQ(r.dim(), 1);
    EXPECT_NEAR(std::abs(r.basis(1, 0)), 1.0, 1e-12);
}

TEST(GradPerp, ExponentialInThreeDims) {
    const auto pts = interior_samples(unit_cube(), default_sample_count(3));
    const PotentialSpec V(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 1)});
    const auto r = grad_perp_space(V, pts, 3);
    ASSERT_EQ(r.dim(), 2);
    for (Eigen::Index c = 0; c < 2; ++c) EXPECT_NEAR(r.basis.col(c).sum(), 0.0, 1e-10);
}

TEST(Concavity, LinearIsConcave) {
    const auto pts = interior_samples(unit_square(), 64);
    const auto v = concavity_check(PotentialSpec(LinearPotential{Vec3(1, 2, 0), 0}), pts, 2);
    EXPECT_TRUE(v.concave);
    EXPECT_NEAR(v.max_eigenvalue, 0.0, 1e-15);
}

TEST(Concavity, PositiveExponentialIsConvex) {
    const auto pts = interior_samples(unit_square(), 64);
    const auto v = concavity_check(PotentialSpec(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 0)}), pts, 2);
    EXPECT_FALSE(v.concave);
    EXPECT_GT(v.max_eigenvalue, 1.0);
}

TEST(Concavity, ReflectedDistanceIsConcave) {
    const auto r = reflected_distance_concavity(right_isoceles_triangle(), {0, 2}, {1});
    EXPECT_TRUE(r.reflected_convex);
    EXPECT_TRUE(r.verdict.concave);
    EXPECT_LT(r.max_restriction_mismatch, 1e-12);
}

TEST(Concavity, ReflectionOverLegIsNotConvexForObtuseTriangle) {
    // reflecting over the side on x = 0 of the obtuse triangle leaves a reflex corner
    const auto r = reflected_distance_concavity(obtuse_triangle(), {1}, {0});
    EXPECT_FALSE(r.reflected_convex);
    EXPECT_FALSE(r.verdict.concave);
}

TEST(Infimum, ClosedForms) {
    const auto sq = unit_square();
    EXPECT_DOUBLE_EQ(infimum(PotentialSpec(LinearPotential{Vec3(1, -1, 0), 2.0}), sq), 1.0);
    EXPECT_DOUBLE_EQ(infimum(PotentialSpec(ExponentialPotential{2.0, -1.0, Vec3(1, 1, 0)}), sq), 2.0 * std::exp(-2.0));
    EXPECT_NEAR(infimum(PotentialSpec(SeparablePotential{Vec3::UnitX(), Polynomial{{1, -1, 1}}}), sq), 0.75, 1e-9);
    EXPECT_DOUBLE_EQ(infimum(distance_to_facets(sq, {0}), sq), 0.0);
}

TEST(Spline, InterpolatesKnots) {
    const auto s = CubicSpline::make({0, 1, 2, 3}, {0, 2, 1, 3});
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(eval_profile(s, i).g, s.values[i], 1e-14);
    EXPECT_NEAR(eval_profile(s, 0).d2g, 0.0, 1e-14);
    EXPECT_NEAR(eval_profile(s, 3).d2g, 0.0, 1e-14);
}

TEST(GridCsv, BilinearReproducesAffineData) {
    std::stringstream csv;
    csv << "x,y,value\n";
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 2; ++j) csv << i * 0.25 << ',' << j * 0.5 << ',' << 1 + 2 * i * 0.25 - j * 0.5 << '\n';
    const PotentialSpec V(read_grid_csv(csv, 2));
    EXPECT_NEAR(evaluate(V, Point(0.3, 0.7, 0)), 1 + 0.6 - 0.7, 1e-12);
    EXPECT_TRUE(gradient(V, Point(0.3, 0.7, 0)).sampled);
    EXPECT_NEAR(gradient(V, Point(0.3, 0.7, 0)).value.x(), 2.0, 1e-6);
}

TEST(GridCsv, IncompleteLatticeRejected) {
    std::stringstream csv("0,0,1\n1,0,1\n0,1,1\n");
    EXPECT_THROW(read_grid_csv(csv, 2), ScenarioError);
}

// Properties

namespace {
std::vector<PotentialSpec> analytic_family() {
    return {PotentialSpec(LinearPotential{Vec3(1.5, -0.5, 0.25), 0.3}),
            PotentialSpec(SeparablePotential{Vec3(0.6, 0.8, 0), Polynomial{{1, -2, 0.5, 0.3}}}),
            PotentialSpec(SeparablePotential{Vec3::UnitY(), Bump{0.5, 0.6, 2.0}}),
            PotentialSpec(SeparablePotential{Vec3::UnitX(), CubicSpline::make({0, 0.3, 0.6, 1}, {1, 0, 2, 1})}),
            PotentialSpec(ExponentialPotential{2.0, -0.7, Vec3(1, 2, 0)})};
}
} // namespace

TEST(PotentialProperties, GradientMatchesFiniteDifferences) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (const auto& V : analytic_family()) {
        for (int i = 0; i < 100; ++i) {
            const Point x(u(rng), u(rng), 0);
            const Vec3 g = gradient(V, x).value;
            const double h = 1e-6;
            for (int a = 0; a < 2; ++a) {
                Point xp = x, xm = x;
                xp(a) += h;
                xm(a) -= h;
                const double fd = (evaluate(V, xp) - evaluate(V, xm)) / (2 * h);
                EXPECT_NEAR(g(a), fd, 1e-6 * std::max(1.0, std::abs(g(a)))) << variant_name(V) << " at " << x.transpose();
            }
        }
    }
}

TEST(PotentialProperties, GradPerpOrthogonalToSampledGradients) {
    const auto pts = interior_samples(unit_square(), default_sample_count(2));
    for (const auto& V : analytic_family()) {
        const auto r = grad_perp_space(V, pts, 2);
        for (const auto& x : pts) {
            const Vec3 g = gradient(V, x).value;
            for (Eigen::Index c = 0; c < r.basis.cols(); ++c)
                EXPECT_LE(std::abs(r.basis.col(c).dot(g.head(2))), 1e-6 * g.norm());
        }
    }
}

TEST(PotentialProperties, SeparableGradientParallelToDirection) {
    const Vec3 u = Vec3(0.6, 0.8, 0);
    const PotentialSpec V(SeparablePotential{u, Polynomial{{0, 1, -3, 1}}});
    for (const auto& x : interior_samples(unit_square(), 100)) {
        const Vec3 g = gradient(V, x).value;
        if (g.norm() > 0) {
            EXPECT_NEAR(g.cross(u).norm(), 0.0, 1e-12 * g.norm());
        }
    }
}

TEST(PotentialProperties, BoundedOnDomain) {
    for (const auto& V : analytic_family()) {
        double m = 0.0;
        for (const auto& x : interior_samples(unit_square(), 1000)) m = std::max(m, std::abs(evaluate(V, x)));
        EXPECT_TRUE(std::isfinite(m));
    }
}
