#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dataset.hpp"
#include "dtree.hpp"
#include "mdlcost.hpp"
#include "parallel.hpp"

namespace packminer {

//! One admissible split: tree i, a leaf of it, the tested attribute j, and
//! the tree's total cost after the split.
struct split_candidate {
    item_id tree;
    node_index leaf;
    item_id attr;
    bits_t new_tree_cost;
};

struct greedy_options {
    bool use_cache = true; // caching is output-identical; false runs the literal per-pass rescan
    int threads = 0;       // 0 = auto
};

struct greedy_result {
    tree_model model;
    cost_report cost;
    cost_report baseline;
    std::size_t n_splits = 0;
};

//! Best admissible (leaf, attribute) split of tree i, or nullopt when no
//! split beats the tree's current cost. Cost is evaluated incrementally:
//! only the affected leaf's terms change. Deterministic tie-breaking:
//! first strictly better candidate in (leaf preorder, attribute) scan order.
inline std::optional<split_candidate> best_split_for_tree(const binary_dataset& ds,
                                                          const tree_model& m, item_id i)
{
    const std::size_t k = ds.n_attrs();
    const auto& tree = m.trees[i];
    const row_set& target_col = ds.column(i);
    const double per_split = split_cost(k);
    const double current = tree_cost(tree, k).total;

    std::optional<split_candidate> best;
    for (node_index li : tree.leaves()) {
        const auto& leaf = tree.node(li);
        const std::uint64_t m_rows = leaf.counts.rows();
        const double old_leaf = leaf_cost(leaf.counts);
        for (item_id j = 0; j < k; ++j) {
            if (j == i || tree.on_path(li, j))
                continue;
            if (!m.graph.would_be_acyclic(i, j))
                continue;
            const row_set& col = ds.column(j);
            const std::uint64_t m_pos = leaf.rows.count_and(col);
            const std::uint64_t n1_pos = leaf.rows.count_and(col, target_col);
            const std::uint64_t n0_pos = m_pos - n1_pos;
            const std::uint64_t n1_neg = leaf.counts.n1 - n1_pos;
            const std::uint64_t n0_neg = (m_rows - m_pos) - n1_neg;
            const double delta = per_split + leaf_cost({n0_pos, n1_pos})
                                 + leaf_cost({n0_neg, n1_neg}) - old_leaf;
            const double candidate_cost = current + delta;
            const double best_so_far = best ? best->new_tree_cost : current;
            if (candidate_cost < best_so_far)
                best = split_candidate{i, li, j, candidate_cost};
        }
    }
    return best;
}

//! Greedy model construction: start from all trivial trees, repeatedly
//! apply the one split (over all trees) that saves the most bits, keeping
//! the dependency graph acyclic; stop when no split saves bits.
inline greedy_result greedy_pack(const binary_dataset& ds, const greedy_options& opt = {})
{
    const std::size_t k = ds.n_attrs();
    precompute_leaf_regret(ds.n_rows());

    greedy_result res;
    res.model.trees.reserve(k);
    for (item_id a = 0; a < k; ++a)
        res.model.trees.push_back(trivial_tree(ds, a));
    res.model.graph = dependency_graph(k);

    std::vector<double> tree_total(k);
    for (item_id a = 0; a < k; ++a)
        tree_total[a] = tree_cost(res.model.trees[a], k).total;
    res.baseline = model_cost(res.model);
    double model_total = res.baseline.total;

    std::vector<std::optional<split_candidate>> cand(k);
    auto recompute = [&](item_id i) { cand[i] = best_split_for_tree(ds, res.model, i); };
    detail::parallel_for(k, opt.threads, [&](std::size_t i) { recompute(static_cast<item_id>(i)); });

    while (true) {
        item_id pick = static_cast<item_id>(k);
        double best_gain = 0.0;
        for (item_id i = 0; i < k; ++i) {
            if (!cand[i])
                continue;
            const double gain = cand[i]->new_tree_cost - tree_total[i];
            if (gain < best_gain) {
                best_gain = gain;
                pick = i;
            }
        }
        if (pick == k)
            break;

        const split_candidate chosen = *cand[pick];
        res.model.trees[pick].apply_split(ds, chosen.leaf, chosen.attr);
        const bool new_edge = !res.model.graph.has_edge(pick, chosen.attr);
        res.model.graph.add_edge(pick, chosen.attr); // throws if a cycle would form
        tree_total[pick] = chosen.new_tree_cost;
        model_total += best_gain;
        ++res.n_splits;

        // incrementally tracked cost must match recomputation from scratch
        const double recheck = model_cost(res.model).total;
        if (std::abs(recheck - model_total) > 1e-6)
            throw std::logic_error("incremental cost drifted from full recomputation");

        if (opt.use_cache) {
            std::vector<item_id> stale{pick};
            if (new_edge)
                for (item_id i = 0; i < k; ++i)
                    if (i != pick && cand[i]
                        && !res.model.graph.would_be_acyclic(i, cand[i]->attr))
                        stale.push_back(i);
            detail::parallel_for(stale.size(), opt.threads,
                                 [&](std::size_t s) { recompute(stale[s]); });
        } else {
            detail::parallel_for(k, opt.threads,
                                 [&](std::size_t i) { recompute(static_cast<item_id>(i)); });
        }
    }

    res.model.order = res.model.graph.topological_order();
    res.cost = model_cost(res.model);
    if (res.cost.total > res.baseline.total + 1e-9)
        throw std::logic_error("model cost exceeds the trivial baseline");
    return res;
}

} // namespace packminer
