#include "mmdust/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mmdust/linalg.hpp"

namespace mmdust {

StructureMatrix::StructureMatrix(std::size_t m, std::size_t p, std::vector<Triplet> entries)
    : m_(m), p_(p) {
    std::erase_if(entries, [](const Triplet& t) { return t.value == 0.0; });
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Triplet& t = entries[i];
        if (t.row >= m || t.col >= p) {
            throw std::invalid_argument("structure entry (" + std::to_string(t.row + 1) + "," +
                                        std::to_string(t.col + 1) + ") out of range for " +
                                        std::to_string(m) + "x" + std::to_string(p));
        }
        if (i > 0 && entries[i - 1].row == t.row && entries[i - 1].col == t.col) {
            throw std::invalid_argument("duplicate structure entry at (" +
                                        std::to_string(t.row + 1) + "," +
                                        std::to_string(t.col + 1) + ")");
        }
    }
    triplets_ = std::move(entries);

    row_ptr_.assign(m_ + 1, 0);
    cols_.resize(triplets_.size());
    values_.resize(triplets_.size());
    for (const Triplet& t : triplets_) ++row_ptr_[t.row + 1];
    for (std::size_t i = 0; i < m_; ++i) row_ptr_[i + 1] += row_ptr_[i];
    for (std::size_t i = 0; i < triplets_.size(); ++i) {  // triplets already row-sorted
        cols_[i] = triplets_[i].col;
        values_[i] = triplets_[i].value;
    }
    row_sqnorms_.assign(m_, 0.0);
    for (const Triplet& t : triplets_) row_sqnorms_[t.row] += t.value * t.value;
}

void StructureMatrix::apply(const Vector& x, Vector& out) const {
    check_size(x, p_, "D*x");
    out.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[cols_[k]];
        out[i] = acc;
    }
}

void StructureMatrix::apply_transpose(const Vector& u, Vector& out) const {
    check_size(u, m_, "D^T*u");
    out.assign(p_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out[cols_[k]] += ui * values_[k];
    }
}

double StructureMatrix::row_dot(std::size_t i, const Vector& x) const {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[cols_[k]];
    return acc;
}

void StructureMatrix::add_row_multiple(std::size_t i, double s, Vector& x) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) x[cols_[k]] += s * values_[k];
}

double StructureMatrix::l1_norm_of_product(const Vector& beta) const {
    check_size(beta, p_, "||D beta||_1");
    double acc = 0.0;
    for (std::size_t i = 0; i < m_; ++i) acc += std::fabs(row_dot(i, beta));
    return acc;
}

DenseMatrix StructureMatrix::dense() const {
    DenseMatrix A(m_, p_);
    for (const Triplet& t : triplets_) A(t.row, t.col) = t.value;
    return A;
}

DenseMatrix StructureMatrix::dense_rows(const std::vector<std::size_t>& keep) const {
    DenseMatrix A(keep.size(), p_);
    std::vector<std::size_t> pos(m_, static_cast<std::size_t>(-1));
    for (std::size_t r = 0; r < keep.size(); ++r) pos[keep[r]] = r;
    for (const Triplet& t : triplets_) {
        if (pos[t.row] != static_cast<std::size_t>(-1)) A(pos[t.row], t.col) = t.value;
    }
    return A;
}

StructureMatrix identity_structure(std::size_t p) {
    std::vector<Triplet> ts;
    ts.reserve(p);
    for (std::size_t i = 0; i < p; ++i) ts.push_back({i, i, 1.0});
    return {p, p, std::move(ts)};
}

StructureMatrix chain_difference(std::size_t p) {
    if (p < 1) throw std::invalid_argument("chain_difference: p must be >= 1");
    std::vector<Triplet> ts;
    ts.reserve(2 * (p - 1));
    for (std::size_t i = 0; i + 1 < p; ++i) {
        ts.push_back({i, i, 1.0});
        ts.push_back({i, i + 1, -1.0});
    }
    return {p - 1, p, std::move(ts)};
}

StructureMatrix pair_differences(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                 std::size_t p) {
    std::vector<Triplet> ts;
    ts.reserve(2 * pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [a, b] = pairs[i];
        if (a == b) throw std::invalid_argument("pair_differences: pair with equal indices");
        ts.push_back({i, a, 1.0});
        ts.push_back({i, b, -1.0});
    }
    return {pairs.size(), p, std::move(ts)};
}

StructureMatrix vstack(const StructureMatrix& top, const StructureMatrix& bottom) {
    if (top.col_count() != bottom.col_count()) {
        throw std::invalid_argument("vstack: column counts differ");
    }
    std::vector<Triplet> ts = top.triplets();
    for (const Triplet& t : bottom.triplets()) ts.push_back({t.row + top.row_count(), t.col, t.value});
    return {top.row_count() + bottom.row_count(), top.col_count(), std::move(ts)};
}

StructureMatrix pad_columns(const StructureMatrix& D, std::size_t extra) {
    return {D.row_count(), D.col_count() + extra, D.triplets()};
}

StructureMatrix read_triplet_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open structure file: " + path);
    std::size_t m = 0, p = 0, nnz = 0;
    if (!(in >> m >> p >> nnz)) throw std::runtime_error("bad triplet header in " + path);
    std::vector<Triplet> ts;
    ts.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t r = 0, c = 0;
        double v = 0.0;
        if (!(in >> r >> c >> v)) throw std::runtime_error("truncated triplet file: " + path);
        if (r == 0 || c == 0) throw std::runtime_error("triplet indices are 1-based in " + path);
        ts.push_back({r - 1, c - 1, v});
    }
    return {m, p, std::move(ts)};
}

void write_triplet_file(const StructureMatrix& D, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write structure file: " + path);
    out << D.row_count() << ' ' << D.col_count() << ' ' << D.nnz() << '\n';
    char buf[64];
    for (const Triplet& t : D.triplets()) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.value);
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << buf << '\n';
    }
}

AggregationTree make_tree(std::vector<AggregationTree::Node> nodes) {
    AggregationTree tree;
    tree.nodes = std::move(nodes);
    const std::size_t n = tree.nodes.size();
    if (n == 0) throw std::invalid_argument("tree: empty");

    std::vector<std::size_t> child_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = tree.nodes[i];
        if (node.parent == AggregationTree::npos) {
            if (tree.root != AggregationTree::npos) throw std::invalid_argument("tree: multiple roots");
            tree.root = i;
        } else {
            if (node.parent >= n) throw std::invalid_argument("tree: parent index out of range");
            ++child_count[node.parent];
        }
    }
    if (tree.root == AggregationTree::npos) throw std::invalid_argument("tree: no root");

    // acyclicity: every node must reach the root in < n hops
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t v = i, hops = 0;
        while (v != tree.root) {
            v = tree.nodes[v].parent;
            if (++hops > n) throw std::invalid_argument("tree: cycle detected");
        }
    }

    std::vector<bool> seen;
    for (std::size_t i = 0; i < n; ++i) {
        const bool leaf = child_count[i] == 0;
        const auto f = tree.nodes[i].feature;
        if (leaf) {
            if (f == AggregationTree::npos) {
                throw std::invalid_argument("tree: leaf node without a feature");
            }
            if (f >= seen.size()) seen.resize(f + 1, false);
            if (seen[f]) throw std::invalid_argument("tree: feature mapped to two leaves");
            seen[f] = true;
            ++tree.leaf_count;
        } else if (f != AggregationTree::npos) {
            throw std::invalid_argument("tree: internal node carries a feature");
        }
    }
    if (seen.size() != tree.leaf_count) {
        throw std::invalid_argument("tree: features must cover 1..p0 exactly");
    }
    for (std::size_t f = 0; f < seen.size(); ++f) {
        if (!seen[f]) throw std::invalid_argument("tree: missing feature " + std::to_string(f + 1));
    }
    return tree;
}

AggregationTree read_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tree file: " + path);
    struct Raw {
        long id, parent, feature;
    };
    std::vector<Raw> raws;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Raw r{0, 0, 0};
        if (!(ls >> r.id >> r.parent)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            throw std::runtime_error("bad tree line: '" + line + "'");
        }
        if (!(ls >> r.feature)) r.feature = 0;
        raws.push_back(r);
    }
    std::map<long, std::size_t> index;
    for (std::size_t i = 0; i < raws.size(); ++i) {
        if (!index.emplace(raws[i].id, i).second) {
            throw std::runtime_error("duplicate tree node id " + std::to_string(raws[i].id));
        }
    }
    std::vector<AggregationTree::Node> nodes(raws.size());
    for (std::size_t i = 0; i < raws.size(); ++i) {
        if (raws[i].parent == 0) {
            nodes[i].parent = AggregationTree::npos;
        } else {
            auto it = index.find(raws[i].parent);
            if (it == index.end()) {
                throw std::runtime_error("tree node " + std::to_string(raws[i].id) +
                                         " has unknown parent " + std::to_string(raws[i].parent));
            }
            nodes[i].parent = it->second;
        }
        nodes[i].feature =
            raws[i].feature > 0 ? static_cast<std::size_t>(raws[i].feature - 1) : AggregationTree::npos;
    }
    return make_tree(std::move(nodes));
}

void write_tree_file(const AggregationTree& tree, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write tree file: " + path);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& n = tree.nodes[i];
        out << (i + 1) << ' ' << (n.parent == AggregationTree::npos ? 0 : n.parent + 1);
        if (n.feature != AggregationTree::npos) out << ' ' << (n.feature + 1);
        out << '\n';
    }
}

TreeMatrices tree_to_matrices(const AggregationTree& tree) {
    const std::size_t n = tree.size();
    const std::size_t p0 = tree.leaf_count;

    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (tree.nodes[i].parent != AggregationTree::npos) children[tree.nodes[i].parent].push_back(i);
    }

    // gamma column order: leaves in feature order, then internal nodes from
    // the deepest level up (BFS order within a level), root last
    std::vector<std::size_t> column_nodes(n, AggregationTree::npos);
    std::vector<std::vector<std::size_t>> internal_by_depth;
    std::deque<std::pair<std::size_t, std::size_t>> queue{{tree.root, 0}};
    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        if (children[v].empty()) {
            column_nodes[tree.nodes[v].feature] = v;
        } else {
            if (depth >= internal_by_depth.size()) internal_by_depth.resize(depth + 1);
            internal_by_depth[depth].push_back(v);
            for (std::size_t c : children[v]) queue.emplace_back(c, depth + 1);
        }
    }
    std::size_t next = p0;
    for (auto level = internal_by_depth.rbegin(); level != internal_by_depth.rend(); ++level) {
        for (std::size_t v : *level) column_nodes[next++] = v;
    }

    std::vector<std::size_t> column_of(n);
    for (std::size_t c = 0; c < n; ++c) column_of[column_nodes[c]] = c;

    std::vector<Triplet> a_entries;
    for (std::size_t f = 0; f < p0; ++f) {
        std::size_t v = column_nodes[f];  // the leaf carrying feature f
        while (true) {
            a_entries.push_back({f, column_of[v], 1.0});
            if (v == tree.root) break;
            v = tree.nodes[v].parent;
        }
    }

    TreeMatrices out;
    out.A = StructureMatrix(p0, n, std::move(a_entries));
    out.D = vstack(identity_structure(n), out.A);
    out.column_nodes = std::move(column_nodes);
    return out;
}

DenseMatrix null_space_basis(const StructureMatrix& D, double tol) {
    return linalg::null_space(D.dense(), tol);
}

double dual_smoothness(const StructureMatrix& D) {
    const double s = linalg::spectral_norm(D.dense());
    return s * s;
}

}  // namespace mmdust
