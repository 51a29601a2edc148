#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "depgraph.hpp"

namespace packminer {

using node_index = std::uint32_t;

//! Per-leaf value counts for the target attribute; the code lengths
//! -log(n_v / (n0+n1)) are always derived, never stored.
struct coding_table {
    std::uint64_t n0 = 0;
    std::uint64_t n1 = 0;
    std::uint64_t rows() const { return n0 + n1; }
};

struct tree_node {
    std::int32_t split = -1; // tested attribute, -1 marks a leaf
    std::int32_t parent = -1;
    node_index pos = 0, neg = 0; // children when internal
    coding_table counts;         // meaningful on leaves
    row_set rows;                // rows reaching the leaf; empty on internals

    bool is_leaf() const { return split < 0; }
};

//! Decision tree encoding one target attribute. Internal nodes test
//! previously transmitted attributes; leaves carry coding tables plus the
//! row bitmap that reaches them.
class decision_tree {
public:
    static decision_tree leaf(item_id target, coding_table counts, row_set rows)
    {
        decision_tree t;
        t.target_ = target;
        tree_node n;
        n.counts = counts;
        n.rows = std::move(rows);
        t.nodes_.push_back(std::move(n));
        return t;
    }

    item_id target() const { return target_; }
    node_index root() const { return 0; }
    const std::vector<tree_node>& nodes() const { return nodes_; }

    const tree_node& node(node_index i) const { return nodes_.at(i); }

    std::size_t n_leaves() const
    {
        std::size_t c = 0;
        for (const auto& n : nodes_)
            c += n.is_leaf();
        return c;
    }

    std::size_t n_internal() const { return nodes_.size() - n_leaves(); }

    //! Leaf indices in preorder (node, positive branch, negative branch).
    std::vector<node_index> leaves() const
    {
        std::vector<node_index> out;
        std::vector<node_index> stack{root()};
        while (!stack.empty()) {
            node_index i = stack.back();
            stack.pop_back();
            const auto& n = nodes_[i];
            if (n.is_leaf())
                out.push_back(i);
            else {
                stack.push_back(n.neg); // pos explored first
                stack.push_back(n.pos);
            }
        }
        return out;
    }

    //! Attributes tested anywhere in the tree.
    itemset sources() const
    {
        std::vector<item_id> s;
        for (const auto& n : nodes_)
            if (!n.is_leaf())
                s.push_back(static_cast<item_id>(n.split));
        return itemset(std::move(s));
    }

    //! (pospath, negpath): attributes tested positive/negative on the way
    //! from the root to `leaf`.
    std::pair<itemset, itemset> path(node_index leaf) const
    {
        std::vector<item_id> pos, neg;
        node_index v = leaf;
        while (nodes_[v].parent >= 0) {
            node_index p = static_cast<node_index>(nodes_[v].parent);
            const auto& pn = nodes_[p];
            (pn.pos == v ? pos : neg).push_back(static_cast<item_id>(pn.split));
            v = p;
        }
        return {itemset(std::move(pos)), itemset(std::move(neg))};
    }

    bool on_path(node_index leaf, item_id attr) const
    {
        node_index v = leaf;
        while (nodes_[v].parent >= 0) {
            v = static_cast<node_index>(nodes_[v].parent);
            if (static_cast<item_id>(nodes_[v].split) == attr)
                return true;
        }
        return false;
    }

    //! Replace `leaf` by a test on `attr` with two fresh leaves.
    void apply_split(const binary_dataset& ds, node_index leaf, item_id attr)
    {
        if (leaf >= nodes_.size() || !nodes_[leaf].is_leaf())
            throw std::invalid_argument("split target is not a leaf");
        if (attr == target_)
            throw std::invalid_argument("cannot split on the tree's own target");
        if (on_path(leaf, attr))
            throw std::invalid_argument("attribute already tested on the path");

        tree_node pos_leaf, neg_leaf;
        pos_leaf.rows = nodes_[leaf].rows & ds.column(attr);
        neg_leaf.rows = nodes_[leaf].rows.and_not(ds.column(attr));
        auto [p0, p1] = ds.value_counts(pos_leaf.rows, target_);
        auto [n0, n1] = ds.value_counts(neg_leaf.rows, target_);
        pos_leaf.counts = {p0, p1};
        neg_leaf.counts = {n0, n1};
        pos_leaf.parent = neg_leaf.parent = static_cast<std::int32_t>(leaf);

        node_index pi = static_cast<node_index>(nodes_.size());
        nodes_.push_back(std::move(pos_leaf));
        node_index ni = static_cast<node_index>(nodes_.size());
        nodes_.push_back(std::move(neg_leaf));

        auto& n = nodes_[leaf];
        n.split = static_cast<std::int32_t>(attr);
        n.pos = pi;
        n.neg = ni;
        n.counts = {};
        n.rows = row_set();
    }

    //! Deterministic walk: positive child iff row[split] = 1.
    node_index route(std::span<const std::uint8_t> row) const
    {
        node_index v = root();
        while (!nodes_[v].is_leaf()) {
            const auto& n = nodes_[v];
            v = row[static_cast<std::size_t>(n.split)] ? n.pos : n.neg;
        }
        return v;
    }

    //! Turn an existing leaf into an internal test node over two already
    //! grafted children.
    void set_internal(node_index i, item_id attr, node_index pos, node_index neg)
    {
        auto& n = nodes_.at(i);
        n.split = static_cast<std::int32_t>(attr);
        n.pos = pos;
        n.neg = neg;
        n.counts = {};
        n.rows = row_set();
    }

    //! Graft `sub`'s nodes under this tree; returns the new root index of
    //! the grafted copy.
    node_index graft(const decision_tree& sub, std::int32_t parent)
    {
        node_index base = static_cast<node_index>(nodes_.size());
        for (const auto& n : sub.nodes_) {
            tree_node c = n;
            if (c.parent >= 0)
                c.parent += static_cast<std::int32_t>(base);
            else
                c.parent = parent;
            if (!c.is_leaf()) {
                c.pos += base;
                c.neg += base;
            }
            nodes_.push_back(std::move(c));
        }
        return base;
    }

private:
    decision_tree() = default;

    item_id target_ = 0;
    std::vector<tree_node> nodes_;
};

//! Single leaf over all rows; source(T) is empty.
inline decision_tree trivial_tree(const binary_dataset& ds, item_id target)
{
    row_set rows = ds.all_rows();
    auto [n0, n1] = ds.value_counts(rows, target);
    return decision_tree::leaf(target, {n0, n1}, std::move(rows));
}

inline decision_tree split_tree(const binary_dataset& ds, const decision_tree& tree,
                                node_index leaf, item_id attr)
{
    decision_tree t = tree;
    t.apply_split(ds, leaf, attr);
    return t;
}

//! New tree with `attr` at the root, `pos` as the positive branch and
//! `neg` as the negative branch.
inline decision_tree join_tree(item_id attr, const decision_tree& pos, const decision_tree& neg)
{
    if (pos.target() != neg.target())
        throw std::invalid_argument("join of trees with different targets");
    if (attr == pos.target())
        throw std::invalid_argument("join attribute equals the target");
    if (pos.sources().contains(attr) || neg.sources().contains(attr))
        throw std::invalid_argument("join attribute already used in a branch");

    decision_tree t = decision_tree::leaf(pos.target(), {}, row_set());
    node_index pi = t.graft(pos, 0);
    node_index ni = t.graft(neg, 0);
    t.set_internal(0, attr, pi, ni);
    return t;
}

//! One tree per attribute plus the dependency graph and transmission order.
struct tree_model {
    std::vector<decision_tree> trees;
    dependency_graph graph{0};
    std::vector<item_id> order;
};

inline tree_model trivial_model(const binary_dataset& ds)
{
    tree_model m;
    m.trees.reserve(ds.n_attrs());
    for (item_id a = 0; a < ds.n_attrs(); ++a)
        m.trees.push_back(trivial_tree(ds, a));
    m.graph = dependency_graph(ds.n_attrs());
    m.order = m.graph.topological_order();
    return m;
}

//! Recompute graph edges from the trees' actual sources and derive a
//! deterministic transmission order.
inline void rebuild_graph_and_order(tree_model& m)
{
    dependency_graph g(m.trees.size());
    for (const auto& t : m.trees) {
        const itemset srcs = t.sources();
        for (item_id s : srcs.items())
            g.add_edge(t.target(), s);
    }
    m.graph = std::move(g);
    m.order = m.graph.topological_order();
}

enum class smoothing { ml, kt };

//! Bits to transmit one transaction under the model: sum over attributes of
//! -log p(value | routed leaf). ML probabilities may be zero, in which case
//! the +infinity sentinel is returned; KT (add-half) lengths are always
//! finite.
inline double transaction_code_length(const tree_model& m, std::span<const std::uint8_t> row,
                                      smoothing s)
{
    if (row.size() != m.trees.size())
        throw std::invalid_argument("row width does not match the model");
    double total = 0;
    for (item_id a : m.order) {
        const auto& t = m.trees[a];
        const auto& leaf = t.node(t.route(row));
        const std::uint64_t nv = row[a] ? leaf.counts.n1 : leaf.counts.n0;
        const std::uint64_t mm = leaf.counts.rows();
        double p;
        if (s == smoothing::kt)
            p = (static_cast<double>(nv) + 0.5) / (static_cast<double>(mm) + 1.0);
        else {
            if (nv == 0)
                return std::numeric_limits<double>::infinity();
            p = static_cast<double>(nv) / static_cast<double>(mm);
        }
        total -= std::log2(p);
    }
    return total;
}

//! Consistency checks used by tests and the search assertions: leaf row
//! bitmaps partition the dataset and coding tables match recounting.
inline void validate_tree(const decision_tree& t, const binary_dataset& ds)
{
    row_set seen(ds.n_rows());
    std::uint64_t covered = 0;
    for (node_index li : t.leaves()) {
        const auto& n = t.node(li);
        if (n.rows.size() != ds.n_rows())
            throw std::logic_error("leaf row bitmap has wrong width");
        if ((seen & n.rows).any())
            throw std::logic_error("leaf row sets overlap");
        seen |= n.rows;
        covered += n.rows.count();
        auto [c0, c1] = ds.value_counts(n.rows, t.target());
        if (c0 != n.counts.n0 || c1 != n.counts.n1)
            throw std::logic_error("coding table does not match leaf rows");
    }
    if (covered != ds.n_rows())
        throw std::logic_error("leaf row sets do not cover the dataset");
}

inline void validate_model(const tree_model& m, const binary_dataset& ds)
{
    if (m.trees.size() != ds.n_attrs())
        throw std::logic_error("model must hold one tree per attribute");
    for (item_id a = 0; a < m.trees.size(); ++a) {
        if (m.trees[a].target() != a)
            throw std::logic_error("tree target out of place");
        validate_tree(m.trees[a], ds);
        const itemset srcs = m.trees[a].sources();
        for (item_id s : srcs.items())
            if (!m.graph.has_edge(a, s))
                throw std::logic_error("dependency edge missing");
    }
    if (!m.graph.is_acyclic())
        throw std::logic_error("dependency graph is cyclic");
    std::vector<std::size_t> position(m.trees.size());
    if (m.order.size() != m.trees.size())
        throw std::logic_error("transmission order incomplete");
    for (std::size_t i = 0; i < m.order.size(); ++i)
        position[m.order[i]] = i;
    for (auto [t, s] : m.graph.edges())
        if (position[s] >= position[t])
            throw std::logic_error("transmission order violates a dependency");
}

} // namespace packminer
