#include <mixed_spectra/eigensolve.hpp>
#include <mixed_spectra/fem.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace mixed_spectra;

namespace {

struct Problem {
    SparseMatrix K, M;
    double inf_v = 0.0;
};

Problem build(const ConvexPolytope& p, const std::set<int>& gamma, const PotentialSpec& V, int level) {
    const auto m = refine_times(triangulate(p, {gamma, {}}), level);
    const auto s = assemble_system(m, V);
    const auto d = make_dofmap(m);
    return {constrain(s.stiffness, d), constrain(s.mass, d), infimum(V, p)};
}

SolverOptions with(SolverMethod method, int k, double shift) {
    SolverOptions o;
    o.method = method;
    o.k = k;
    o.shift = shift;
    return o;
}

} // namespace

TEST(Smallest, OneByOneSystem) {
    SparseMatrix K(1, 1), M(1, 1);
    K.insert(0, 0) = 2.0;
    M.insert(0, 0) = 1.0;
    for (auto method : {SolverMethod::Dense, SolverMethod::Iterative}) {
        SolverOptions o;
        o.k = 1;
        o.method = method;
        const auto r = smallest_eigenpairs(K, M, o);
        ASSERT_EQ(r.eigenvalues.size(), 1u);
        EXPECT_NEAR(r.eigenvalues[0], 2.0, 1e-14);
    }
}

TEST(Smallest, KCappedAtN) {
    SparseMatrix K(2, 2), M(2, 2);
    K.insert(0, 0) = 3.0;
    K.insert(1, 1) = 1.0;
    M.insert(0, 0) = 1.0;
    M.insert(1, 1) = 1.0;
    const auto r = smallest_eigenpairs(K, M, with(SolverMethod::Dense, 5, -1.0));
    ASSERT_EQ(r.eigenvalues.size(), 2u);
    EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-14);
    EXPECT_NEAR(r.eigenvalues[1], 3.0, 1e-14);
}

TEST(Smallest, DiagonalSpectrumIterative) {
    const int n = 800;
    SparseMatrix K(n, n), M(n, n);
    for (int i = 0; i < n; ++i) {
        K.insert(i, i) = 1.0 + i;
        M.insert(i, i) = 1.0;
    }
    const auto r = smallest_eigenpairs(K, M, with(SolverMethod::Iterative, 4, 0.0));
    EXPECT_EQ(r.solver, "iterative");
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.eigenvalues[i], 1.0 + i, 1e-9);
}

TEST(Smallest, SquareDirichletLevelFour) {
    const auto pb = build(unit_square(), {0, 1, 2, 3}, PotentialSpec(ConstantPotential{0.0}), 4);
    const auto r = smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Auto, 3, -1.0));
    EXPECT_NEAR(r.eigenvalues[0], 2 * kPi * kPi, 0.02 * 2 * kPi * kPi);
    EXPECT_GT(r.eigenvalues[0], 2 * kPi * kPi); // conforming P1 bounds from above
    EXPECT_NEAR(r.eigenvalues[1], r.eigenvalues[2], 1e-8 * r.eigenvalues[1]);
}

TEST(Smallest, InvariantsHold) {
    const auto pb = build(trapezium(), {1}, PotentialSpec(SeparablePotential{Vec3::UnitY(), Bump{2, 2, 5}}), 3);
    for (auto method : {SolverMethod::Dense, SolverMethod::Iterative}) {
        auto o = with(method, 5, pb.inf_v - 1.0);
        const auto r = smallest_eigenpairs(pb.K, pb.M, o);
        EXPECT_TRUE(r.converged);
        for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) EXPECT_LE(r.eigenvalues[i - 1], r.eigenvalues[i]);
        const MatX g = r.vectors.transpose() * (pb.M * r.vectors);
        EXPECT_LE((g - MatX::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-8);
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
            EXPECT_LE(r.residuals[i], o.tol);
            EXPECT_NEAR(r.residuals[i], relative_residual(pb.K, pb.M, r.vectors.col(i), r.eigenvalues[i]), 1e-12);
        }
    }
}

TEST(Smallest, DenseAndIterativeAgree) {
    const auto pb = build(obtuse_triangle(), {1}, PotentialSpec(LinearPotential{Vec3(-1, -2, 0) / std::sqrt(5.0), 0}), 3);
    ASSERT_LE(pb.K.rows(), 500);
    const auto a = smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Dense, 4, pb.inf_v - 1));
    const auto b = smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Iterative, 4, pb.inf_v - 1));
    EXPECT_EQ(a.solver, "dense-fallback");
    EXPECT_EQ(b.solver, "iterative");
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-8 * std::abs(a.eigenvalues[i]));
}

TEST(SignFix, Conventions) {
    EigenResult r;
    r.vectors = MatX(3, 1);
    r.vectors << -1, -2, -0.5;
    EXPECT_GT(first_eigenvector_sign_fix(r).vectors.col(0).mean(), 0.0);
    r.vectors << 1, 2, 0.5;
    EXPECT_TRUE(first_eigenvector_sign_fix(r).vectors.isApprox(r.vectors));
    r.vectors << 1, -1, 0;
    const auto z = first_eigenvector_sign_fix(r);
    EXPECT_TRUE(z.zero_mean_flag);
    EXPECT_TRUE(z.vectors.isApprox(r.vectors));
}

TEST(SignFix, FirstEigenvectorHasOneSign) {
    const auto pb = build(unit_square(), {3}, PotentialSpec(ConstantPotential{0.0}), 3);
    const auto r = first_eigenvector_sign_fix(smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Auto, 1, -1)));
    EXPECT_FALSE(r.zero_mean_flag);
    EXPECT_GE(r.vectors.col(0).minCoeff(), -1e-10);
}

// Properties

TEST(EigenProperties, NodePermutationInvariance) {
    const auto p = trapezium();
    const auto m = refine_times(triangulate(p, {{1}, {3}}), 3);
    std::vector<int> perm(m.nodes.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 rng(17);
    std::shuffle(perm.begin(), perm.end(), rng);
    const PotentialSpec V(SeparablePotential{Vec3::UnitY(), Bump{2, 2, 5}});
    auto solve = [&](const SimplicialMesh& mesh) {
        const auto s = assemble_system(mesh, V);
        const auto d = make_dofmap(mesh);
        return smallest_eigenpairs(constrain(s.stiffness, d), constrain(s.mass, d), with(SolverMethod::Iterative, 3, -1));
    };
    const auto a = solve(m), b = solve(permute_nodes(m, perm));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-9 * std::abs(a.eigenvalues[i]));
}

TEST(EigenProperties, ConstantShiftInvariance) {
    const PotentialSpec V(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 0)});
    const auto a = build(unit_square(), {3}, V, 3);
    const auto b = build(unit_square(), {3}, shifted(V, 3.5), 3);
    const auto ra = smallest_eigenpairs(a.K, a.M, with(SolverMethod::Iterative, 3, a.inf_v - 1));
    const auto rb = smallest_eigenpairs(b.K, b.M, with(SolverMethod::Iterative, 3, b.inf_v - 1));
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(rb.eigenvalues[i] - ra.eigenvalues[i], 3.5, 1e-10 * std::abs(rb.eigenvalues[i]));
}

TEST(EigenProperties, NestedBoundaryConditionsOrdered) {
    const auto V = PotentialSpec(LinearPotential{Vec3(1, 1, 0), 0});
    const auto small = build(unit_square(), {3}, V, 3), mid = build(unit_square(), {0, 3}, V, 3),
               full = build(unit_square(), {0, 1, 2, 3}, V, 3);
    const auto o = with(SolverMethod::Auto, 3, -1);
    const auto a = smallest_eigenpairs(small.K, small.M, o), b = smallest_eigenpairs(mid.K, mid.M, o),
               c = smallest_eigenpairs(full.K, full.M, o);
    for (int i = 0; i < 3; ++i) {
        EXPECT_LE(a.eigenvalues[i], b.eigenvalues[i] + 1e-10);
        EXPECT_LE(b.eigenvalues[i], c.eigenvalues[i] + 1e-10);
    }
}

TEST(EigenProperties, GalerkinMonotoneUnderRefinement) {
    const auto V = PotentialSpec(ConstantPotential{0.0});
    double prev = 1e300;
    for (int l = 1; l <= 4; ++l) {
        const auto pb = build(obtuse_triangle(), {1, 2}, V, l);
        const double lam = smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Auto, 1, -1)).eigenvalues[0];
        EXPECT_LE(lam, prev * (1 + 1e-12));
        prev = lam;
    }
}

TEST(EigenProperties, AboveInfimumOfPotential) {
    const PotentialSpec V(SeparablePotential{Vec3::UnitX(), Polynomial{{1, -1, 1}}});
    const auto pb = build(unit_square(), {2}, V, 3);
    const auto r = smallest_eigenpairs(pb.K, pb.M, with(SolverMethod::Auto, 1, pb.inf_v - 1));
    EXPECT_GT(r.eigenvalues[0], pb.inf_v);
}
