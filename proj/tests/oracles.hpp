// Independent reference implementations used only by the test suites. Each
// oracle deliberately avoids the code path it checks: the regret oracle uses
// extended-precision linear-space summation with a multiplicative binomial
// recurrence (no log-gamma, no log-sum-exp), support counts come from raw
// row scans rather than column bitmaps, and the search oracles enumerate
// exhaustively.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <packminer/candidates.hpp>
#include <packminer/dataset.hpp>
#include <packminer/depgraph.hpp>
#include <packminer/dtree.hpp>
#include <packminer/mdlcost.hpp>

namespace oracles {

using namespace packminer;

//! log2 of the Bernoulli NML sum by direct long-double summation.
inline long double regret_bits(std::uint64_t m)
{
    if (m == 0)
        return 0.0L;
    const long double md = static_cast<long double>(m);
    long double binom = 1.0L; // C(m, k), updated multiplicatively
    long double sum = 0.0L;
    for (std::uint64_t k = 0; k <= m; ++k) {
        const long double kd = static_cast<long double>(k);
        long double term = binom;
        if (k > 0)
            term *= std::pow(kd / md, kd);
        if (k < m)
            term *= std::pow((md - kd) / md, md - kd);
        sum += term;
        if (k < m)
            binom *= (md - kd) / (kd + 1.0L);
    }
    return std::log(sum) / std::log(2.0L);
}

//! Binary entropy based cost M * H(n1/M), the algebraic identity the
//! entropy_cost invariant states.
inline double entropy_via_binary_entropy(std::uint64_t n0, std::uint64_t n1)
{
    const std::uint64_t m = n0 + n1;
    if (m == 0 || n0 == 0 || n1 == 0)
        return 0.0;
    const double p = static_cast<double>(n1) / static_cast<double>(m);
    return static_cast<double>(m) * (-p * std::log2(p) - (1 - p) * std::log2(1 - p));
}

//! Support by scanning materialized rows, no bitmaps involved.
inline std::uint64_t support_by_row_scan(const binary_dataset& ds, const itemset& x)
{
    std::uint64_t sup = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        auto row = ds.row_values(r);
        bool all = true;
        for (item_id a : x.items())
            all = all && row[a];
        sup += all;
    }
    return sup;
}

//! All itemsets with support >= minsup by full 2^K enumeration (K <= 20).
inline std::vector<itemset> frequent_by_enumeration(const binary_dataset& ds,
                                                    std::uint64_t minsup)
{
    std::vector<itemset> out;
    const std::size_t k = ds.n_attrs();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<item_id> items;
        for (std::size_t a = 0; a < k; ++a)
            if (mask >> a & 1)
                items.push_back(static_cast<item_id>(a));
        itemset x(items);
        if (x.empty() || support_by_row_scan(ds, x) >= minsup)
            out.push_back(std::move(x));
    }
    return out;
}

//! Minimum arborescence weight by enumerating every out-edge assignment.
inline double arborescence_minimum(const weighted_digraph& h, std::uint32_t sink = 0)
{
    const std::size_t n = h.n_vertices();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> out(n);
    for (const auto& e : h.edges())
        if (e.tail != sink && e.tail != e.head)
            out[e.tail].push_back({e.head, e.weight});

    std::vector<std::size_t> choice(n, 0);
    double best = std::numeric_limits<double>::infinity();
    auto valid = [&] {
        for (std::uint32_t v = 0; v < n; ++v) {
            if (v == sink)
                continue;
            std::uint32_t cur = v;
            for (std::size_t hops = 0; cur != sink; ++hops) {
                if (hops > n)
                    return false; // cycle
                cur = out[cur][choice[cur]].first;
            }
        }
        return true;
    };
    // odometer over all assignments
    while (true) {
        bool feasible = true;
        for (std::uint32_t v = 0; v < n && feasible; ++v)
            feasible = v == sink || !out[v].empty();
        if (!feasible)
            return best;
        if (valid()) {
            double w = 0;
            for (std::uint32_t v = 0; v < n; ++v)
                if (v != sink)
                    w += out[v][choice[v]].second;
            best = std::min(best, w);
        }
        std::uint32_t v = 0;
        for (; v < n; ++v) {
            if (v == sink)
                continue;
            if (++choice[v] < out[v].size())
                break;
            choice[v] = 0;
        }
        if (v == n)
            break;
    }
    return best;
}

//! Minimum cost over every tree with target `target`, sources within
//! `sources`, and sets(T) inside `family` (checked leaf-wise through the
//! downward-closure characterization path(L) + target in F).
inline double best_tree_by_enumeration(const binary_dataset& ds, item_id target,
                                       const std::vector<item_id>& sources,
                                       const itemset_family& family, const row_set& rows,
                                       const itemset& path)
{
    double best = std::numeric_limits<double>::infinity();
    if (family.contains(path.with(target))) {
        auto [n0, n1] = ds.value_counts(rows, target);
        best = 1.0 + leaf_regret(n0 + n1) + entropy_cost(n0, n1);
    }
    for (item_id b : sources) {
        if (path.contains(b) || b == target)
            continue;
        if (!family.contains(path.with(b).with(target)))
            continue; // every deeper leaf would need this set too
        const double pos = best_tree_by_enumeration(ds, target, sources, family,
                                                    rows & ds.column(b), path.with(b));
        const double neg = best_tree_by_enumeration(ds, target, sources, family,
                                                    rows.and_not(ds.column(b)), path.with(b));
        best = std::min(best, split_cost(ds.n_attrs()) + pos + neg);
    }
    return best;
}

//! Cost of the single-split tree for `target` testing `src` over all rows.
inline double single_split_tree_cost(const binary_dataset& ds, item_id target, item_id src)
{
    const row_set all = ds.all_rows();
    auto [p0, p1] = ds.value_counts(all & ds.column(src), target);
    auto [n0, n1] = ds.value_counts(all.and_not(ds.column(src)), target);
    return split_cost(ds.n_attrs()) + leaf_cost({p0, p1}) + leaf_cost({n0, n1});
}

inline double trivial_tree_cost(const binary_dataset& ds, item_id target)
{
    auto [n0, n1] = ds.value_counts(ds.all_rows(), target);
    return 1.0 + leaf_regret(n0 + n1) + entropy_cost(n0, n1);
}

//! Optimal total cost over every acyclic depth-<=1 model: each attribute is
//! either trivial or splits once on a single parent.
inline double depth1_model_minimum(const binary_dataset& ds)
{
    const std::size_t k = ds.n_attrs();
    std::vector<std::vector<double>> cost(k, std::vector<double>(k + 1));
    for (item_id i = 0; i < k; ++i) {
        cost[i][k] = trivial_tree_cost(ds, i); // index k = no parent
        for (item_id j = 0; j < k; ++j)
            cost[i][j] = i == j ? std::numeric_limits<double>::infinity()
                                : single_split_tree_cost(ds, i, j);
    }
    std::vector<std::size_t> parent(k, 0); // digits run 0..k; k means "no parent"
    double best = std::numeric_limits<double>::infinity();
    auto acyclic = [&] {
        for (std::size_t start = 0; start < k; ++start) {
            std::size_t cur = start, hops = 0;
            while (parent[cur] != k) {
                cur = parent[cur];
                if (++hops > k)
                    return false;
            }
        }
        return true;
    };
    while (true) {
        if (acyclic()) {
            double w = 0;
            for (std::size_t i = 0; i < k; ++i)
                w += cost[i][parent[i]];
            best = std::min(best, w);
        }
        std::size_t i = 0;
        for (; i < k; ++i) {
            if (parent[i] < k) {
                ++parent[i];
                break;
            }
            parent[i] = 0;
        }
        if (i == k)
            break;
    }
    return best;
}

//! Global optimum over every model with sets inside `family`: any valid
//! model's dependency relation embeds in some attribute permutation, and
//! per attribute the best tree over the full predecessor set dominates every
//! tree with fewer sources, so minimizing over permutations is exact.
inline double best_model_by_order_enumeration(const binary_dataset& ds,
                                              const itemset_family& family)
{
    const std::size_t k = ds.n_attrs();
    std::vector<item_id> perm(k);
    for (std::size_t i = 0; i < k; ++i)
        perm[i] = static_cast<item_id>(i);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0;
        for (std::size_t pos = 0; pos < k; ++pos) {
            std::vector<item_id> sources(perm.begin(), perm.begin() + pos);
            std::sort(sources.begin(), sources.end());
            total += best_tree_by_enumeration(ds, perm[pos], sources, family, ds.all_rows(),
                                              itemset{});
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

//! Uniform random dataset with per-attribute densities drawn in [0.15, 0.85].
inline binary_dataset random_dataset(std::size_t n_rows, std::size_t n_attrs,
                                     std::mt19937_64& g)
{
    std::vector<row_set> cols(n_attrs, row_set(n_rows));
    for (std::size_t a = 0; a < n_attrs; ++a) {
        const double p = 0.15 + 0.7 * (static_cast<double>(g() >> 11) * 0x1.0p-53);
        for (std::size_t r = 0; r < n_rows; ++r)
            if (static_cast<double>(g() >> 11) * 0x1.0p-53 < p)
                cols[a].set(r);
    }
    return binary_dataset(n_rows, std::move(cols), {});
}

//! Random tree for `target`: a few random valid splits applied to the
//! trivial tree.
inline decision_tree random_tree(const binary_dataset& ds, item_id target, std::size_t n_splits,
                                 std::mt19937_64& g)
{
    decision_tree t = trivial_tree(ds, target);
    for (std::size_t s = 0; s < n_splits; ++s) {
        auto leaves = t.leaves();
        const node_index leaf = leaves[g() % leaves.size()];
        std::vector<item_id> options;
        for (item_id a = 0; a < ds.n_attrs(); ++a)
            if (a != target && !t.on_path(leaf, a))
                options.push_back(a);
        if (options.empty())
            break;
        t.apply_split(ds, leaf, options[g() % options.size()]);
    }
    return t;
}

} // namespace oracles
