#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mmdust/vec.hpp"

namespace mmdust {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

// Sparse m x p structural matrix. Triplets at rest, compressed rows for the
// dual inner loop; the per-row squared norms ||d_i||^2 are cached because the
// stagewise update cost of every candidate move depends on them.
class StructureMatrix {
public:
    StructureMatrix() = default;
    // Validates indices, rejects duplicate (row, col) pairs, drops explicit zeros.
    StructureMatrix(std::size_t m, std::size_t p, std::vector<Triplet> entries);

    std::size_t row_count() const { return m_; }
    std::size_t col_count() const { return p_; }
    std::size_t nnz() const { return cols_.size(); }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    const Vector& row_sqnorms() const { return row_sqnorms_; }

    // out = D x
    void apply(const Vector& x, Vector& out) const;
    // out = D^T u
    void apply_transpose(const Vector& u, Vector& out) const;
    // d_i . x
    double row_dot(std::size_t i, const Vector& x) const;
    // x += s * d_i
    void add_row_multiple(std::size_t i, double s, Vector& x) const;
    // ||D beta||_1
    double l1_norm_of_product(const Vector& beta) const;

    DenseMatrix dense() const;
    // Dense copy of D with the rows in `keep` only.
    DenseMatrix dense_rows(const std::vector<std::size_t>& keep) const;

private:
    std::size_t m_ = 0;
    std::size_t p_ = 0;
    std::vector<Triplet> triplets_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    Vector values_;
    Vector row_sqnorms_;
};

StructureMatrix identity_structure(std::size_t p);
// Rows (+1, -1) on consecutive coordinates; p-1 rows.
StructureMatrix chain_difference(std::size_t p);
// One row e_a - e_b per (a, b) pair, 0-indexed.
StructureMatrix pair_differences(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                 std::size_t p);
StructureMatrix vstack(const StructureMatrix& top, const StructureMatrix& bottom);
// Appends `extra` all-zero columns (unpenalized coordinates, e.g. intercept).
StructureMatrix pad_columns(const StructureMatrix& D, std::size_t extra);

// Triplet file: header "m p nnz", then "row col value" per line, 1-indexed.
StructureMatrix read_triplet_file(const std::string& path);
void write_triplet_file(const StructureMatrix& D, const std::string& path);

// Rooted feature-aggregation tree. Leaves carry the original features.
struct AggregationTree {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    struct Node {
        std::size_t parent = npos;   // npos for the root
        std::size_t feature = npos;  // 0-based feature index, leaves only
    };
    std::vector<Node> nodes;
    std::size_t root = npos;
    std::size_t leaf_count = 0;

    std::size_t size() const { return nodes.size(); }
};

// Validates: one root, acyclic, every leaf mapped to a distinct feature and
// features covering 0..p0-1 exactly.
AggregationTree make_tree(std::vector<AggregationTree::Node> nodes);

// Tree file: one line per node "node_id parent_id [feature_id]", 1-indexed,
// root has parent_id 0.
AggregationTree read_tree_file(const std::string& path);
void write_tree_file(const AggregationTree& tree, const std::string& path);

struct TreeMatrices {
    StructureMatrix A;  // p0 x |T|, beta = A gamma
    StructureMatrix D;  // (|T| + p0) x |T|, [I; A]
    // node index occupying each gamma column: leaves first in feature order,
    // then internal nodes deepest level first, root last
    std::vector<std::size_t> column_nodes;
};

TreeMatrices tree_to_matrices(const AggregationTree& tree);

// Orthonormal null-space basis of D (p x q; q = 0 gives an empty basis).
DenseMatrix null_space_basis(const StructureMatrix& D, double tol = -1.0);

// sigma_max(D D^T), the smoothness constant of the quadratic dual loss.
double dual_smoothness(const StructureMatrix& D);

}  // namespace mmdust
