#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "itemset.hpp"
#include "rowset.hpp"

namespace packminer {

//! Directed graph over attributes; edge (t, s) records that the tree
//! encoding attribute t tests attribute s. Kept acyclic at all times so a
//! transmission order exists.
class dependency_graph {
public:
    explicit dependency_graph(std::size_t k) : n_(k), adj_(k, row_set(k)) {}

    std::size_t n_vertices() const { return n_; }

    bool has_edge(item_id from, item_id to) const { return adj_.at(from).test(to); }

    void add_edge(item_id from, item_id to)
    {
        if (has_edge(from, to))
            return;
        if (!would_be_acyclic(from, to))
            throw std::logic_error("edge would create a dependency cycle");
        adj_[from].set(to);
    }

    //! True iff adding (from, to) leaves the graph acyclic.
    bool would_be_acyclic(item_id from, item_id to) const
    {
        if (from == to)
            return false;
        return !reaches(to, from);
    }

    bool reaches(item_id from, item_id to) const
    {
        if (from == to)
            return true;
        row_set seen(n_);
        std::vector<item_id> stack{from};
        seen.set(from);
        while (!stack.empty()) {
            item_id v = stack.back();
            stack.pop_back();
            bool hit = false;
            adj_[v].for_each([&](std::size_t u) {
                if (u == to)
                    hit = true;
                if (!seen.test(u)) {
                    seen.set(u);
                    stack.push_back(static_cast<item_id>(u));
                }
            });
            if (hit)
                return true;
        }
        return false;
    }

    bool is_acyclic() const
    {
        for (item_id v = 0; v < n_; ++v) {
            bool cyc = false;
            adj_[v].for_each([&](std::size_t u) { cyc = cyc || reaches(static_cast<item_id>(u), v); });
            if (cyc)
                return false;
        }
        return true;
    }

    std::vector<std::pair<item_id, item_id>> edges() const
    {
        std::vector<std::pair<item_id, item_id>> out;
        for (item_id v = 0; v < n_; ++v)
            adj_[v].for_each([&](std::size_t u) { out.emplace_back(v, static_cast<item_id>(u)); });
        return out;
    }

    //! Transmission order: sources precede the attributes that test them.
    //! Deterministic (smallest index first among ready vertices).
    std::vector<item_id> topological_order() const
    {
        std::vector<std::size_t> deps(n_);
        for (item_id v = 0; v < n_; ++v)
            deps[v] = adj_[v].count();
        std::vector<item_id> order;
        order.reserve(n_);
        row_set emitted(n_);
        for (std::size_t step = 0; step < n_; ++step) {
            item_id pick = static_cast<item_id>(n_);
            for (item_id v = 0; v < n_; ++v)
                if (!emitted.test(v) && deps[v] == 0) {
                    pick = v;
                    break;
                }
            if (pick == n_)
                throw std::logic_error("dependency graph is cyclic");
            emitted.set(pick);
            order.push_back(pick);
            for (item_id u = 0; u < n_; ++u)
                if (!emitted.test(u) && adj_[u].test(pick))
                    --deps[u];
        }
        return order;
    }

private:
    std::size_t n_;
    std::vector<row_set> adj_;
};

struct weighted_edge {
    std::uint32_t tail;
    std::uint32_t head;
    double weight;
};

//! Graph for the per-pass tree assignment: vertex 0 is the sink, vertices
//! 1..K the attributes; edge (v_i, v_j) proposes encoding a_i after a_j.
class weighted_digraph {
public:
    explicit weighted_digraph(std::size_t n_vertices) : n_(n_vertices) {}

    void add_edge(std::uint32_t tail, std::uint32_t head, double weight)
    {
        if (tail >= n_ || head >= n_)
            throw std::out_of_range("edge endpoint out of range");
        edges_.push_back({tail, head, weight});
    }

    std::size_t n_vertices() const { return n_; }
    const std::vector<weighted_edge>& edges() const { return edges_; }

private:
    std::size_t n_;
    std::vector<weighted_edge> edges_;
};

//! One outgoing edge per non-sink vertex; every path terminates at the sink.
struct arborescence {
    std::vector<std::int32_t> out; // out[v] = chosen head, -1 for the sink
    double total_weight = 0;
};

namespace detail {

struct dm_edge {
    std::uint32_t tail, head;   // current contraction level
    double weight;              // reduced weight
    std::uint32_t otail, ohead; // original endpoints, tie-breaking only
    std::size_t parent;         // index into the previous level's edge list
};

inline bool dm_less(const dm_edge& a, const dm_edge& b)
{
    if (a.weight != b.weight)
        return a.weight < b.weight;
    if (a.otail != b.otail)
        return a.otail < b.otail;
    return a.ohead < b.ohead;
}

//! Chosen out-edge index per vertex (npos for the sink).
inline std::vector<std::size_t> dmst_rec(std::size_t n, std::uint32_t sink,
                                         const std::vector<dm_edge>& edges)
{
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best(n, npos);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        std::uint32_t t = edges[e].tail;
        if (t == sink || t == edges[e].head)
            continue;
        if (best[t] == npos || dm_less(edges[e], edges[best[t]]))
            best[t] = e;
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (v != sink && best[v] == npos)
            throw std::logic_error("vertex cannot reach the sink");

    // cycle in the functional graph v -> head(best[v])?
    std::vector<std::uint8_t> color(n, 0); // 0 new, 1 on path, 2 done
    std::vector<std::uint32_t> cycle;
    for (std::uint32_t s = 0; s < n && cycle.empty(); ++s) {
        std::uint32_t v = s;
        std::vector<std::uint32_t> path;
        while (v != sink && color[v] == 0) {
            color[v] = 1;
            path.push_back(v);
            v = edges[best[v]].head;
        }
        if (v != sink && color[v] == 1) {
            auto it = std::find(path.begin(), path.end(), v);
            cycle.assign(it, path.end());
        }
        for (std::uint32_t p : path)
            color[p] = 2;
    }

    if (cycle.empty())
        return best;

    // contract the cycle into one super node
    std::vector<std::uint8_t> in_cycle(n, 0);
    for (std::uint32_t v : cycle)
        in_cycle[v] = 1;
    std::vector<std::uint32_t> id(n);
    std::uint32_t next = 0;
    std::uint32_t super = std::numeric_limits<std::uint32_t>::max();
    for (std::uint32_t v = 0; v < n; ++v) {
        if (in_cycle[v]) {
            if (super == std::numeric_limits<std::uint32_t>::max())
                super = next++;
            id[v] = super;
        } else {
            id[v] = next++;
        }
    }

    std::vector<dm_edge> contracted;
    contracted.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& ed = edges[e];
        std::uint32_t t = id[ed.tail], h = id[ed.head];
        if (t == h)
            continue;
        double w = ed.weight;
        if (in_cycle[ed.tail])
            w -= edges[best[ed.tail]].weight;
        contracted.push_back({t, h, w, ed.otail, ed.ohead, e});
    }

    auto sub = dmst_rec(next, id[sink], contracted);

    std::vector<std::size_t> chosen(n, npos);
    for (std::uint32_t v = 0; v < next; ++v) {
        if (v == id[sink] || sub[v] == npos)
            continue;
        const auto& ce = contracted[sub[v]];
        chosen[edges[ce.parent].tail] = ce.parent;
    }
    for (std::uint32_t v : cycle)
        if (chosen[v] == npos)
            chosen[v] = best[v];
    return chosen;
}

} // namespace detail

//! Minimum directed spanning tree toward `sink` (Chu-Liu/Edmonds).
//! Deterministic: weight ties resolve to the lexicographically smallest
//! (tail, head) pair.
inline arborescence dmst(const weighted_digraph& h, std::uint32_t sink = 0)
{
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<detail::dm_edge> edges;
    edges.reserve(h.edges().size());
    for (std::size_t e = 0; e < h.edges().size(); ++e) {
        const auto& we = h.edges()[e];
        edges.push_back({we.tail, we.head, we.weight, we.tail, we.head, e});
    }
    auto chosen = detail::dmst_rec(h.n_vertices(), sink, edges);

    arborescence a;
    a.out.assign(h.n_vertices(), -1);
    for (std::uint32_t v = 0; v < h.n_vertices(); ++v) {
        if (v == sink)
            continue;
        if (chosen[v] == npos)
            throw std::logic_error("missing arborescence edge");
        const auto& we = h.edges()[edges[chosen[v]].parent];
        a.out[v] = static_cast<std::int32_t>(we.head);
        a.total_weight += we.weight;
    }
    return a;
}

} // namespace packminer
