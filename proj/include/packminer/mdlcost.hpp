#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <vector>

#include "dtree.hpp"

namespace packminer {

//! Code lengths are real-valued bit counts throughout; nothing is ever
//! rounded up to whole bits.
using bits_t = double;

//! Empirical entropy cost of transmitting a two-valued attribute M times
//! with counts (n0, n1): -n1*log(n1/M) - n0*log(n0/M), with 0 log 0 = 0.
inline bits_t entropy_cost(std::uint64_t n0, std::uint64_t n1)
{
    const std::uint64_t m = n0 + n1;
    if (m == 0 || n0 == 0 || n1 == 0)
        return 0.0;
    const double md = static_cast<double>(m);
    return -static_cast<double>(n1) * std::log2(static_cast<double>(n1) / md)
           - static_cast<double>(n0) * std::log2(static_cast<double>(n0) / md);
}

namespace detail {

//! log2 of the Bernoulli NML normalizer over M rows, by direct summation of
//! the M+1 binomial terms in log space (log-sum-exp over log-gamma).
inline double regret_direct(std::uint64_t m)
{
    if (m == 0)
        return 0.0;
    const double md = static_cast<double>(m);
    const double lg_fact_m = std::lgamma(md + 1.0);
    constexpr double log2e = std::numbers::log2e;

    std::vector<double> lt(m + 1);
    double max_lt = 0.0; // k = 0 and k = m terms are exactly 1
    for (std::uint64_t k = 1; k < m; ++k) {
        const double kd = static_cast<double>(k);
        const double rd = static_cast<double>(m - k);
        const double v = (lg_fact_m - std::lgamma(kd + 1.0) - std::lgamma(rd + 1.0)) * log2e
                         + kd * std::log2(kd / md) + rd * std::log2(rd / md);
        lt[k] = v;
        if (v > max_lt)
            max_lt = v;
    }
    lt[0] = lt[m] = 0.0;
    double sum = 0.0;
    for (double v : lt)
        sum += std::exp2(v - max_lt);
    return max_lt + std::log2(sum);
}

} // namespace detail

//! Parametric-complexity penalty of one leaf's coding table over M rows.
//! Memoized; grows the table up to the largest M seen. Safe for concurrent
//! readers with serialized extension.
inline bits_t leaf_regret(std::uint64_t m)
{
    static std::shared_mutex mu;
    static std::vector<double> table{0.0, 1.0};
    {
        std::shared_lock lock(mu);
        if (m < table.size())
            return table[m];
    }
    std::unique_lock lock(mu);
    while (table.size() <= m)
        table.push_back(detail::regret_direct(table.size()));
    return table[m];
}

//! Fill the memo table before parallel phases.
inline void precompute_leaf_regret(std::uint64_t max_m)
{
    leaf_regret(max_m);
}

//! Decomposed code length of a tree or model: data bits (entropy terms),
//! structure bits (node markers and split-attribute ids), regret bits
//! (per-leaf NML complexity).
struct cost_report {
    bits_t data_bits = 0;
    bits_t structure_bits = 0;
    bits_t regret_bits = 0;
    bits_t total = 0;

    static cost_report of(bits_t data, bits_t structure, bits_t regret)
    {
        return {data, structure, regret, data + structure + regret};
    }

    cost_report& operator+=(const cost_report& o)
    {
        data_bits += o.data_bits;
        structure_bits += o.structure_bits;
        regret_bits += o.regret_bits;
        total += o.total;
        return *this;
    }
};

//! Cost contribution of one leaf: 1-bit marker + NML regret + data bits.
inline bits_t leaf_cost(const coding_table& c)
{
    return 1.0 + leaf_regret(c.rows()) + entropy_cost(c.n0, c.n1);
}

//! Bits per internal node: 1-bit marker + log K to name the split attribute.
inline bits_t split_cost(std::size_t k)
{
    return 1.0 + std::log2(static_cast<double>(k));
}

inline cost_report tree_cost(const decision_tree& t, std::size_t k)
{
    if (k < 1)
        throw std::invalid_argument("attribute count must be positive");
    cost_report r;
    const double per_split = split_cost(k);
    for (const auto& n : t.nodes()) {
        if (n.is_leaf()) {
            if (n.rows.size() > 0 && n.counts.rows() != n.rows.count())
                throw std::logic_error("leaf counts inconsistent with its row set");
            r.structure_bits += 1.0;
            r.regret_bits += leaf_regret(n.counts.rows());
            r.data_bits += entropy_cost(n.counts.n0, n.counts.n1);
        } else {
            r.structure_bits += per_split;
        }
    }
    r.total = r.data_bits + r.structure_bits + r.regret_bits;
    return r;
}

//! Componentwise sum of tree_cost over the model's K trees.
inline cost_report model_cost(const tree_model& m)
{
    const std::size_t k = m.trees.size();
    if (k == 0)
        throw std::invalid_argument("model holds no trees");
    cost_report r;
    for (item_id a = 0; a < k; ++a) {
        if (m.trees[a].target() != a)
            throw std::logic_error("model is missing the tree for an attribute");
        r += tree_cost(m.trees[a], k);
    }
    return r;
}

} // namespace packminer
