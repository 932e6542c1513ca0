#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "mmdust/linalg.hpp"
#include "mmdust/simulate.hpp"
#include "mmdust/structure.hpp"
#include "testutil.hpp"

using namespace mmdust;

TEST_CASE("identity and chain builders") {
    const StructureMatrix I3 = identity_structure(3);
    CHECK(I3.row_count() == 3);
    CHECK(I3.col_count() == 3);
    CHECK(I3.nnz() == 3);
    for (const Triplet& t : I3.triplets()) {
        CHECK(t.row == t.col);
        CHECK(t.value == 1.0);
    }

    const StructureMatrix C3 = chain_difference(3);
    CHECK(C3.row_count() == 2);
    const DenseMatrix dense = C3.dense();
    CHECK(dense(0, 0) == 1.0);
    CHECK(dense(0, 1) == -1.0);
    CHECK(dense(0, 2) == 0.0);
    CHECK(dense(1, 1) == 1.0);
    CHECK(dense(1, 2) == -1.0);
}

TEST_CASE("pair differences stacked over identity has full column rank") {
    const auto pairs = pair_differences({{0, 1}, {1, 2}, {3, 4}}, 10);
    const StructureMatrix D = vstack(pairs, identity_structure(10));
    CHECK(D.row_count() == 13);
    CHECK(D.col_count() == 10);
    CHECK(linalg::numerical_rank(D.dense()) == 10);
}

TEST_CASE("construction rejects bad entries") {
    CHECK_THROWS(StructureMatrix(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}));
    CHECK_THROWS(StructureMatrix(2, 2, {{2, 0, 1.0}}));
    // explicit zeros are dropped, not stored
    const StructureMatrix D(2, 2, {{0, 0, 0.0}, {1, 1, 3.0}});
    CHECK(D.nnz() == 1);
}

TEST_CASE("sparse products match dense reconstruction") {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 12);
        const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 19);
        const StructureMatrix D = testutil::random_structure(rng, m, p);
        const DenseMatrix A = D.dense();
        const Vector beta = testutil::random_vector(rng, p);
        const Vector u = testutil::random_vector(rng, m);

        Vector got, want;
        D.apply(beta, got);
        matvec(A, beta, want);
        CHECK(testutil::sup_diff(got, want) <= 1e-12);

        D.apply_transpose(u, got);
        matvec_t(A, u, want);
        CHECK(testutil::sup_diff(got, want) <= 1e-12);

        double l1 = 0.0;
        Vector db;
        D.apply(beta, db);
        for (double v : db) l1 += std::fabs(v);
        CHECK(D.l1_norm_of_product(beta) == doctest::Approx(l1).epsilon(1e-12));
    }
}

TEST_CASE("row squared-norm cache is consistent") {
    Rng rng(6);
    const StructureMatrix D = testutil::random_structure(rng, 9, 7);
    for (std::size_t i = 0; i < D.row_count(); ++i) {
        double want = 0.0;
        for (const Triplet& t : D.triplets()) {
            if (t.row == i) want += t.value * t.value;
        }
        CHECK(D.row_sqnorms()[i] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("triplet file round trip and errors") {
    Rng rng(8);
    const StructureMatrix D = testutil::random_structure(rng, 6, 4);
    const std::string path = "structure_rt.txt";
    write_triplet_file(D, path);
    const StructureMatrix E = read_triplet_file(path);
    CHECK(E.row_count() == D.row_count());
    CHECK(E.col_count() == D.col_count());
    REQUIRE(E.nnz() == D.nnz());
    for (std::size_t k = 0; k < D.triplets().size(); ++k) {
        CHECK(E.triplets()[k].row == D.triplets()[k].row);
        CHECK(E.triplets()[k].col == D.triplets()[k].col);
        CHECK(E.triplets()[k].value == D.triplets()[k].value);
    }
    {
        std::ofstream bad("structure_bad.txt");
        bad << "2 2 1\n0 1 1.0\n";  // 0 index in a 1-based file
    }
    CHECK_THROWS(read_triplet_file("structure_bad.txt"));
    std::remove(path.c_str());
    std::remove("structure_bad.txt");
}

namespace {

// five leaves: {1,2,3} under one internal node, {4,5} under another
AggregationTree five_leaf_tree() {
    using Node = AggregationTree::Node;
    constexpr auto npos = AggregationTree::npos;
    std::vector<Node> nodes;
    nodes.push_back({npos, npos});  // 0: root
    nodes.push_back({0, npos});     // 1: left internal
    nodes.push_back({0, npos});     // 2: right internal
    nodes.push_back({1, 0});        // leaves
    nodes.push_back({1, 1});
    nodes.push_back({1, 2});
    nodes.push_back({2, 3});
    nodes.push_back({2, 4});
    return make_tree(std::move(nodes));
}

}  // namespace

TEST_CASE("tree reparameterization matches the path-to-root expansion") {
    const AggregationTree tree = five_leaf_tree();
    CHECK(tree.leaf_count == 5);
    const TreeMatrices tm = tree_to_matrices(tree);
    CHECK(tm.A.row_count() == 5);
    CHECK(tm.A.col_count() == 8);
    CHECK(tm.D.row_count() == 13);
    CHECK(tm.D.col_count() == 8);

    // beta_1 expands over its leaf, its internal parent and the root:
    // columns 1, 6, 8 in 1-based gamma ordering
    const DenseMatrix A = tm.A.dense();
    std::vector<std::size_t> ones;
    for (std::size_t c = 0; c < 8; ++c) {
        if (A(0, c) != 0.0) ones.push_back(c + 1);
    }
    CHECK(ones == std::vector<std::size_t>{1, 6, 8});

    // leaves keep feature order, root occupies the last column
    for (std::size_t f = 0; f < 5; ++f) CHECK(A(f, f) == 1.0);
    for (std::size_t f = 0; f < 5; ++f) CHECK(A(f, 7) == 1.0);

    // tree D is always of full column rank
    CHECK(linalg::numerical_rank(tm.D.dense()) == 8);
}

TEST_CASE("star tree: every leaf directly under the root") {
    using Node = AggregationTree::Node;
    constexpr auto npos = AggregationTree::npos;
    std::vector<Node> nodes;
    nodes.push_back({npos, npos});
    for (std::size_t f = 0; f < 4; ++f) nodes.push_back({0, f});
    const TreeMatrices tm = tree_to_matrices(make_tree(std::move(nodes)));
    const DenseMatrix A = tm.A.dense();
    CHECK(A.rows == 4);
    CHECK(A.cols == 5);
    for (std::size_t f = 0; f < 4; ++f) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(A(f, c) == (f == c ? 1.0 : 0.0));
        CHECK(A(f, 4) == 1.0);
    }
}

TEST_CASE("built-in aggregation tree produces the 109x67 structure") {
    const AggregationTree tree = default_aggregation_tree();
    CHECK(tree.leaf_count == 42);
    CHECK(tree.size() == 67);
    const TreeMatrices tm = tree_to_matrices(tree);
    CHECK(tm.D.row_count() == 109);
    CHECK(tm.D.col_count() == 67);
    CHECK(linalg::numerical_rank(tm.D.dense()) == 67);
}

TEST_CASE("tree file round trip and validation errors") {
    const AggregationTree tree = five_leaf_tree();
    write_tree_file(tree, "tree_rt.txt");
    const AggregationTree back = read_tree_file("tree_rt.txt");
    CHECK(back.size() == tree.size());
    CHECK(back.leaf_count == tree.leaf_count);
    std::remove("tree_rt.txt");

    using Node = AggregationTree::Node;
    constexpr auto npos = AggregationTree::npos;
    // two roots
    CHECK_THROWS(make_tree({{npos, npos}, {npos, npos}}));
    // leaf without a feature
    CHECK_THROWS(make_tree({{npos, npos}, {0, npos}}));
    // duplicate feature
    CHECK_THROWS(make_tree({{npos, npos}, {0, 0}, {0, 0}}));
    // cycle
    {
        std::ofstream bad("tree_cycle.txt");
        bad << "1 2\n2 1 1\n";
        bad.close();
        CHECK_THROWS(read_tree_file("tree_cycle.txt"));
        std::remove("tree_cycle.txt");
    }
}

TEST_CASE("null space basis") {
    CHECK(null_space_basis(identity_structure(3)).cols == 0);

    const DenseMatrix V = null_space_basis(chain_difference(3));
    REQUIRE(V.cols == 1);
    const double s = V(0, 0) > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(V(i, 0) * s == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }

    // random rank-5 D in R^{5x8}: q = 3, D v = 0, V^T V = I
    Rng rng(17);
    const StructureMatrix D = testutil::random_structure(rng, 5, 8, 0.8);
    REQUIRE(linalg::numerical_rank(D.dense()) == 5);
    const DenseMatrix N = null_space_basis(D);
    REQUIRE(N.cols == 3);
    for (std::size_t c = 0; c < N.cols; ++c) {
        Vector v(8);
        for (std::size_t r = 0; r < 8; ++r) v[r] = N(r, c);
        Vector dv;
        D.apply(v, dv);
        CHECK(max_abs(dv) <= 1e-10);
        for (std::size_t c2 = 0; c2 < N.cols; ++c2) {
            Vector v2(8);
            for (std::size_t r = 0; r < 8; ++r) v2[r] = N(r, c2);
            CHECK(dot(v, v2) == doctest::Approx(c == c2 ? 1.0 : 0.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("pad_columns appends unpenalized coordinates") {
    const StructureMatrix D = pad_columns(identity_structure(2), 1);
    CHECK(D.col_count() == 3);
    Vector dv;
    D.apply({1.0, 2.0, 99.0}, dv);
    CHECK(dv == Vector{1.0, 2.0});
}
