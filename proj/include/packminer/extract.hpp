#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtree.hpp"

namespace packminer {

//! Deduplicated itemsets in display order (cardinality, then lexicographic).
struct extracted_family {
    std::vector<itemset> sets;

    bool contains(const itemset& x) const
    {
        return std::binary_search(sets.begin(), sets.end(), x, family_order{});
    }

    std::size_t size() const { return sets.size(); }

    std::size_t size_nonempty() const
    {
        return sets.size() - (contains(itemset{}) ? 1 : 0);
    }

    void normalize()
    {
        std::sort(sets.begin(), sets.end(), family_order{});
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    }
};

//! The minimal family from which one leaf's coding table is computable:
//! every subset of negpath joined with pospath, with and without the target.
inline std::vector<itemset> leaf_sets(const decision_tree& t, node_index leaf)
{
    auto [pos, neg] = t.path(leaf);
    const auto& nv = neg.items();
    if (nv.size() > 30)
        throw std::invalid_argument("negpath too long to enumerate");
    std::vector<itemset> out;
    out.reserve(std::size_t{2} << nv.size());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv.size()); ++mask) {
        std::vector<item_id> v = pos.items();
        for (std::size_t i = 0; i < nv.size(); ++i)
            if (mask >> i & 1)
                v.push_back(nv[i]);
        itemset base(v);
        out.push_back(base.with(t.target()));
        out.push_back(std::move(base));
    }
    return out;
}

inline extracted_family tree_sets(const decision_tree& t)
{
    extracted_family f;
    for (node_index li : t.leaves()) {
        auto ls = leaf_sets(t, li);
        f.sets.insert(f.sets.end(), std::make_move_iterator(ls.begin()),
                      std::make_move_iterator(ls.end()));
    }
    f.normalize();
    return f;
}

//! Union of sets(T_i) over all trees of the model; the headline "# sets".
inline extracted_family model_sets(const tree_model& m)
{
    extracted_family f;
    for (const auto& t : m.trees) {
        auto ts = tree_sets(t);
        f.sets.insert(f.sets.end(), std::make_move_iterator(ts.sets.begin()),
                      std::make_move_iterator(ts.sets.end()));
    }
    f.normalize();
    return f;
}

using freq_map = std::unordered_map<itemset, double, itemset_hash>;

//! q(L): probability of reaching a leaf with the given signed path, by
//! inclusion-exclusion over the frequencies of pospath joined with subsets
//! of negpath.
inline double leaf_probability(const freq_map& freqs, const itemset& pospath,
                               const itemset& negpath)
{
    const auto& nv = negpath.items();
    if (nv.size() > 30)
        throw std::invalid_argument("negpath too long to enumerate");
    double q = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv.size()); ++mask) {
        std::vector<item_id> v = pospath.items();
        int parity = 0;
        for (std::size_t i = 0; i < nv.size(); ++i)
            if (mask >> i & 1) {
                v.push_back(nv[i]);
                parity ^= 1;
            }
        auto it = freqs.find(itemset(v));
        if (it == freqs.end())
            throw std::out_of_range("frequency missing for an inclusion-exclusion term");
        q += parity ? -it->second : it->second;
    }
    constexpr double eps = 1e-9;
    if (q < -eps || q > 1.0 + eps)
        throw std::runtime_error("inconsistent frequencies: leaf probability outside [0,1]");
    return std::clamp(q, 0.0, 1.0);
}

//! q(target = 1 | L) recovered from itemset frequencies alone.
inline double reconstruct_coding_table(const freq_map& freqs, const decision_tree& t,
                                       node_index leaf)
{
    auto [pos, neg] = t.path(leaf);
    const double ql = leaf_probability(freqs, pos, neg);
    if (ql == 0.0)
        throw std::runtime_error("conditional undefined: leaf has probability 0");
    const double q1 = leaf_probability(freqs, pos.with(t.target()), neg);
    return q1 / ql;
}

//! Exact frequencies for every set the model's leaves need.
inline freq_map frequencies_for_model(const binary_dataset& ds, const tree_model& m)
{
    freq_map f;
    for (const auto& t : m.trees)
        for (node_index li : t.leaves())
            for (auto& x : leaf_sets(t, li))
                if (!f.count(x))
                    f.emplace(x, ds.frequency(x));
    return f;
}

//! Itemset list format: one itemset per line, names space-separated, the
//! empty set written as "{}", optional " : support" suffix.
inline void write_itemset_lines(std::ostream& os, const std::vector<itemset>& sets,
                                const std::vector<std::string>& names, bool drop_empty = false,
                                const std::vector<std::optional<std::uint64_t>>* supports = nullptr)
{
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const itemset& x = sets[i];
        if (x.empty() && drop_empty)
            continue;
        if (x.empty())
            os << "{}";
        else
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (j)
                    os << ' ';
                const item_id a = x.items()[j];
                if (a < names.size())
                    os << names[a];
                else
                    os << a;
            }
        if (supports && i < supports->size() && (*supports)[i])
            os << " : " << *(*supports)[i];
        os << '\n';
    }
}

} // namespace packminer
