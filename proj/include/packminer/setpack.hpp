#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "candidates.hpp"
#include "dataset.hpp"
#include "depgraph.hpp"
#include "dtree.hpp"
#include "extract.hpp"
#include "mdlcost.hpp"
#include "parallel.hpp"

namespace packminer {

enum class search_mode { exhaustive, greedy };
enum class propagate_mode { ancestors, parents };

namespace detail {

struct generate_ctx {
    const binary_dataset& ds;
    item_id target;
    std::vector<item_id> sources; // ascending
    std::size_t k;
    search_mode mode;
    // memo key: canonical signed path, one (attr << 1 | positive) key per
    // tested attribute, kept sorted. The projected family and the row subset
    // are both functions of the signed path, so subtrees can be reused
    // across split orderings.
    std::map<std::vector<std::uint64_t>, std::pair<double, decision_tree>> memo;
};

inline std::pair<double, decision_tree> generate_rec(generate_ctx& cx, const itemset_family& fam,
                                                     const row_set& rows,
                                                     std::vector<std::uint64_t>& path)
{
    if (cx.mode == search_mode::exhaustive) {
        auto hit = cx.memo.find(path);
        if (hit != cx.memo.end())
            return hit->second;
    }

    auto [n0, n1] = cx.ds.value_counts(rows, cx.target);
    double best_cost = 1.0 + leaf_regret(n0 + n1) + entropy_cost(n0, n1);
    decision_tree best = decision_tree::leaf(cx.target, {n0, n1}, rows);

    std::vector<item_id> roots;
    for (item_id b : cx.sources) {
        bool used = false;
        for (std::uint64_t key : path)
            used = used || static_cast<item_id>(key >> 1) == b;
        if (!used && fam.contains(itemset::singleton(b)))
            roots.push_back(b);
    }

    const double per_split = split_cost(cx.k);

    if (cx.mode == search_mode::greedy) {
        // single best immediately cost-reducing split, then recurse
        std::optional<item_id> pick;
        double pick_cost = best_cost;
        for (item_id b : roots) {
            const row_set& col = cx.ds.column(b);
            const std::uint64_t m_pos = rows.count_and(col);
            const std::uint64_t n1_pos = rows.count_and(col, cx.ds.column(cx.target));
            const coding_table cp{m_pos - n1_pos, n1_pos};
            const coding_table cn{(n0 + n1 - m_pos) - (n1 - n1_pos), n1 - n1_pos};
            const double c = per_split + leaf_cost(cp) + leaf_cost(cn);
            if (c < pick_cost) {
                pick_cost = c;
                pick = b;
            }
        }
        if (!pick)
            return {best_cost, std::move(best)};
        const item_id b = *pick;
        itemset_family projected = fam.project(b);
        row_set pos_rows = rows & cx.ds.column(b);
        row_set neg_rows = rows.and_not(cx.ds.column(b));
        path.push_back(static_cast<std::uint64_t>(b) << 1 | 1);
        auto [pc, pt] = generate_rec(cx, projected, pos_rows, path);
        path.back() = static_cast<std::uint64_t>(b) << 1;
        auto [ncst, nt] = generate_rec(cx, projected, neg_rows, path);
        path.pop_back();
        return {per_split + pc + ncst, join_tree(b, pt, nt)};
    }

    for (item_id b : roots) {
        itemset_family projected = fam.project(b);
        row_set pos_rows = rows & cx.ds.column(b);
        row_set neg_rows = rows.and_not(cx.ds.column(b));

        const std::uint64_t kp = static_cast<std::uint64_t>(b) << 1 | 1;
        const std::uint64_t kn = static_cast<std::uint64_t>(b) << 1;
        auto at = std::lower_bound(path.begin(), path.end(), kn);
        const std::size_t slot = static_cast<std::size_t>(at - path.begin());

        path.insert(path.begin() + slot, kp);
        auto [pc, pt] = generate_rec(cx, projected, pos_rows, path);
        path[slot] = kn;
        auto [ncst, nt] = generate_rec(cx, projected, neg_rows, path);
        path.erase(path.begin() + slot);

        const double c = per_split + pc + ncst;
        if (c < best_cost) {
            best_cost = c;
            best = join_tree(b, pt, nt);
        }
    }

    if (cx.mode == search_mode::exhaustive)
        cx.memo.emplace(path, std::make_pair(best_cost, best));
    return {best_cost, std::move(best)};
}

} // namespace detail

//! BestTree(target; sources, family): the cost-minimal tree for `target`
//! splitting only on `sources` with sets(T) inside `family`. The family is
//! first projected onto the target, which makes the per-node admissibility
//! test enforce path + root + target membership exactly. Exhaustive mode
//! searches all candidate roots recursively; greedy mode commits to the
//! locally best split like ID3.
inline decision_tree generate(const binary_dataset& ds, item_id target, const itemset& sources,
                              const itemset_family& family, search_mode mode)
{
    if (sources.contains(target))
        throw std::invalid_argument("target cannot be its own source");
    if (!family.contains(itemset::singleton(target)))
        throw std::invalid_argument("family cannot represent the target's trivial tree");
    detail::generate_ctx cx{ds, target, sources.items(), ds.n_attrs(), mode, {}};
    itemset_family projected = family.project(target);
    std::vector<std::uint64_t> path;
    auto [cost, tree] = detail::generate_rec(cx, projected, ds.all_rows(), path);
    (void)cost;
    return tree;
}

struct set_pack_options {
    search_mode mode = search_mode::exhaustive;
    propagate_mode propagate = propagate_mode::ancestors;
    bool use_cache = true; // caching is output-identical; false recomputes every weight
    int threads = 0;
};

struct set_pack_result {
    tree_model model;
    cost_report cost;
    cost_report baseline;
    std::vector<std::vector<item_id>> sources; // final S_i, ascending
    std::vector<item_id> marking_order;
    std::vector<item_id> repaired_singletons;
    std::size_t n_passes = 0;
    std::vector<std::vector<double>> best_cost_trace; // per pass: cost(BestTree(a_i; S_i))
};

namespace detail {

inline bool source_contains(const std::vector<item_id>& s, item_id a)
{
    return std::binary_search(s.begin(), s.end(), a);
}

inline std::vector<item_id> source_with(const std::vector<item_id>& s, item_id a)
{
    std::vector<item_id> r = s;
    r.insert(std::lower_bound(r.begin(), r.end(), a), a);
    return r;
}

} // namespace detail

//! Iterative source-set construction: each pass proposes, for every
//! unmarked attribute, the one extra source that helps most, solves a
//! minimum arborescence toward the sink over those proposals, then marks
//! the attributes the arborescence attaches to the sink and propagates
//! them into the source sets of the attributes routed through them.
inline set_pack_result set_pack(const binary_dataset& ds, const itemset_family& candidates,
                                const set_pack_options& opt = {})
{
    const std::size_t k = ds.n_attrs();
    precompute_leaf_regret(ds.n_rows());

    set_pack_result res;
    itemset_family family = candidates;
    family.force_singletons(k, &res.repaired_singletons);

    std::vector<std::vector<item_id>> src(k);
    std::vector<char> marked(k, 0);
    std::size_t n_marked = 0;

    using weight_key = std::pair<item_id, std::vector<item_id>>;
    std::map<weight_key, double> cache;

    const std::size_t max_passes = k * (k + 1);
    while (n_marked < k) {
        if (++res.n_passes > max_passes)
            throw std::logic_error("source-set construction failed to make progress");

        // weights needed this pass
        std::vector<weight_key> need;
        for (item_id i = 0; i < k; ++i) {
            need.emplace_back(i, src[i]);
            if (!marked[i])
                for (item_id j = 0; j < k; ++j)
                    if (j != i && !detail::source_contains(src[i], j))
                        need.emplace_back(i, detail::source_with(src[i], j));
        }
        std::map<weight_key, double> weights;
        std::vector<const weight_key*> missing;
        for (const auto& key : need) {
            auto hit = cache.find(key);
            if (opt.use_cache && hit != cache.end())
                weights.emplace(key, hit->second);
            else
                weights.emplace(key, -1.0), missing.push_back(&key);
        }
        // deduplicate pointers to map nodes; evaluate misses in parallel
        std::vector<std::pair<const weight_key*, double>> computed(missing.size());
        detail::parallel_for(missing.size(), opt.threads, [&](std::size_t idx) {
            const auto& [i, s] = *missing[idx];
            decision_tree t = generate(ds, i, itemset(s), family, opt.mode);
            computed[idx] = {missing[idx], tree_cost(t, k).total};
        });
        for (auto& [key, w] : computed) {
            weights[*key] = w;
            if (opt.use_cache)
                cache.emplace(*key, w);
        }

        weighted_digraph h(k + 1); // vertex 0 = sink, attribute a = vertex a+1
        std::vector<double> sink_w(k);
        for (item_id i = 0; i < k; ++i) {
            sink_w[i] = weights.at({i, src[i]});
            h.add_edge(i + 1, 0, sink_w[i]);
        }
        res.best_cost_trace.push_back(sink_w);
        for (item_id i = 0; i < k; ++i) {
            if (marked[i])
                continue;
            for (item_id j = 0; j < k; ++j) {
                if (j == i || detail::source_contains(src[i], j))
                    continue;
                const double w = weights.at({i, detail::source_with(src[i], j)});
                if (w <= sink_w[i])
                    h.add_edge(i + 1, j + 1, w);
            }
        }

        arborescence u = dmst(h, 0);

        std::vector<char> newly(k, 0);
        bool progressed = false;
        for (item_id i = 0; i < k; ++i)
            if (!marked[i] && u.out[i + 1] == 0) {
                marked[i] = 1;
                newly[i] = 1;
                res.marking_order.push_back(i);
                ++n_marked;
                progressed = true;
            }

        auto add_source = [&](item_id to, item_id what) {
            if (!detail::source_contains(src[to], what)) {
                src[to] = detail::source_with(src[to], what);
                progressed = true;
            }
        };

        for (item_id j = 0; j < k; ++j) {
            if (marked[j])
                continue;
            if (opt.propagate == propagate_mode::ancestors) {
                // every newly marked attribute on j's sink path joins S_j
                std::uint32_t v = j + 1;
                while (u.out[v] > 0) {
                    v = static_cast<std::uint32_t>(u.out[v]);
                    const item_id a = static_cast<item_id>(v - 1);
                    if (newly[a])
                        add_source(j, a);
                }
            } else {
                const std::int32_t p = u.out[j + 1];
                if (p > 0 && newly[static_cast<item_id>(p - 1)])
                    add_source(j, static_cast<item_id>(p - 1));
            }
            // an arborescence edge into an attribute marked on an earlier
            // pass still records a usable, already frozen source
            const std::int32_t p = u.out[j + 1];
            if (p > 0) {
                const item_id a = static_cast<item_id>(p - 1);
                if (marked[a] && !newly[a])
                    add_source(j, a);
            }
        }

        if (!progressed)
            throw std::logic_error("pass neither marked an attribute nor grew a source set");
    }

    res.sources = src;
    res.model.trees.reserve(k);
    std::vector<std::optional<decision_tree>> trees(k);
    detail::parallel_for(k, opt.threads, [&](std::size_t i) {
        trees[i] = generate(ds, static_cast<item_id>(i), itemset(src[i]), family, opt.mode);
    });
    for (item_id i = 0; i < k; ++i)
        res.model.trees.push_back(std::move(*trees[i]));
    rebuild_graph_and_order(res.model);

    for (item_id i = 0; i < k; ++i) {
        for (const itemset& x : tree_sets(res.model.trees[i]).sets)
            if (!family.contains(x))
                throw std::logic_error("selected tree uses an itemset outside the family");
        const itemset tree_sources = res.model.trees[i].sources();
        for (item_id s : tree_sources.items())
            if (!detail::source_contains(src[i], s))
                throw std::logic_error("selected tree uses a source outside S_i");
    }

    res.cost = model_cost(res.model);
    res.baseline = model_cost(trivial_model(ds));
    if (res.cost.total > res.baseline.total + 1e-9)
        throw std::logic_error("model cost exceeds the trivial baseline");
    return res;
}

} // namespace packminer
