#include <mixed_spectra/fem.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace mixed_spectra;

namespace {

SimplicialMesh unit_right_triangle() {
    SimplicialMesh m;
    m.nodes = {Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
    m.elements = {{0, 1, 2, -1}};
    return m;
}

double quad_form(const SparseMatrix& a, const VecX& u) { return u.dot(a * u); }

} // namespace

TEST(ElementMatrices, UnitRightTriangleStiffness) {
    MatX expected(3, 3);
    expected << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    EXPECT_TRUE(element_stiffness(unit_right_triangle(), 0).isApprox(0.5 * expected, 1e-14));
}

TEST(ElementMatrices, UnitRightTriangleMass) {
    MatX expected(3, 3);
    expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    EXPECT_TRUE(element_mass(unit_right_triangle(), 0).isApprox(expected / 24.0, 1e-14));
}

TEST(Assemble, PartitionOfUnity) {
    for (const auto& p : {unit_square(), trapezium(), unit_cube(), slanted_prism()}) {
        const auto m = refine_times(triangulate(p), p.dim == 2 ? 3 : 1);
        const VecX one = VecX::Ones(static_cast<Eigen::Index>(m.nodes.size()));
        EXPECT_NEAR(quad_form(assemble_mass(m), one), volume(p), 1e-12 * volume(p));
        EXPECT_NEAR(quad_form(assemble_stiffness(m), one), 0.0, 1e-12);
        EXPECT_LT((assemble_stiffness(m) * one).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Assemble, UnitPotentialIsMass) {
    const auto m = refine_times(triangulate(trapezium()), 2);
    const SparseMatrix d = assemble_potential(m, PotentialSpec(ConstantPotential{1.0})) - assemble_mass(m);
    EXPECT_LT(MatX(d).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assemble, LinearPotentialIntegratesX1) {
    for (const auto& p : {trapezium(), slanted_prism()}) {
        const auto m = refine_times(triangulate(p), 1);
        const VecX one = VecX::Ones(static_cast<Eigen::Index>(m.nodes.size()));
        const double v = quad_form(assemble_potential(m, PotentialSpec(LinearPotential{Vec3(1, 0, 0), 0})), one);
        double exact = 0.0; // sum over elements of |T| times the x1 of its centroid
        for (std::size_t e = 0; e < m.elements.size(); ++e) {
            double cx = 0.0;
            for (int i = 0; i < m.nodes_per_element(); ++i) cx += m.nodes[m.elements[e][i]].x();
            exact += std::abs(element_volume(m, e)) * cx / m.nodes_per_element();
        }
        EXPECT_NEAR(v, exact, 1e-12 * volume(p));
    }
}

TEST(Assemble, ZeroPotentialIsZero) {
    const auto m = triangulate(unit_square());
    EXPECT_EQ(MatX(assemble_potential(m, PotentialSpec(ConstantPotential{0.0}))).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, Symmetric) {
    const auto m = refine_times(triangulate(obtuse_triangle()), 2);
    const auto s = assemble_system(m, PotentialSpec(ExponentialPotential{1.0, 0.5, Vec3(1, -1, 0)}));
    EXPECT_LT(MatX(SparseMatrix(s.stiffness.transpose()) - s.stiffness).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(MatX(SparseMatrix(s.mass.transpose()) - s.mass).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Assemble, DegenerateElementRejected) {
    SimplicialMesh m;
    m.nodes = {Point(0, 0, 0), Point(1, 0, 0), Point(2, 0, 0), Point(0, 1, 0)};
    m.elements = {{0, 1, 2, -1}, {0, 1, 3, -1}};
    EXPECT_THROW(assemble_stiffness(m), DegenerateElement);
    EXPECT_THROW(assemble_mass(m), DegenerateElement);
}

TEST(DofMapTest, SquareLevelOneOneEdge) {
    const auto m = refine(triangulate(unit_square(), {{0}, {}}));
    const auto d = make_dofmap(m);
    EXPECT_EQ(d.n_free(), 10);
    EXPECT_EQ(d.n_constrained(), 3);
}

TEST(DofMapTest, SquareLevelOneWholeBoundary) {
    const auto m = refine(triangulate(unit_square()));
    const auto d = make_dofmap(m, {0, 1, 2, 3});
    // 13 nodes, 8 on the boundary
    EXPECT_EQ(d.n_free(), 5);
}

TEST(DofMapTest, AllConstrainedIsEmpty) {
    const auto m = triangulate(right_isoceles_triangle());
    SimplicialMesh boundary_only = m;
    boundary_only.nodes.pop_back(); // drop the centroid
    boundary_only.elements.clear();
    const auto d = make_dofmap(boundary_only, {0, 1, 2});
    EXPECT_EQ(d.n_free(), 0);
    EXPECT_THROW(constrain(assemble_mass(triangulate(unit_square())), d), EmptyFreeSet);
}

TEST(Constrain, DeletesRowsAndColumns) {
    const auto m = refine(triangulate(unit_square(), {{0}, {}}));
    const auto d = make_dofmap(m);
    const auto K = assemble_stiffness(m);
    const auto Kr = constrain(K, d);
    ASSERT_EQ(Kr.rows(), d.n_free());
    for (int i = 0; i < d.n_free(); ++i)
        for (int j = 0; j < d.n_free(); ++j) EXPECT_EQ(Kr.coeff(i, j), K.coeff(d.free_nodes[i], d.free_nodes[j]));
}

TEST(Constrain, ReducedStiffnessPositiveDefinite) {
    const auto m = refine_times(triangulate(trapezium(), {{1}, {}}), 2);
    const auto d = make_dofmap(m);
    Eigen::LLT<MatX> llt(MatX(constrain(assemble_stiffness(m), d)));
    EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(MatrixMarket, Header) {
    std::stringstream ss;
    write_matrix_market(ss, assemble_mass(triangulate(unit_square())));
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "%%MatrixMarket matrix coordinate real symmetric");
    std::getline(ss, line);
    EXPECT_EQ(line.substr(0, 4), "5 5 ");
}
