#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset.hpp"
#include "extract.hpp"
#include "itemset.hpp"

namespace packminer {

//! Downward-closed candidate collection for the selection search. Members
//! are kept in canonical order (cardinality, then lexicographic) with an
//! optional support count each.
class itemset_family {
public:
    using map_type = std::map<itemset, std::optional<std::uint64_t>, family_order>;

    bool contains(const itemset& x) const { return sets_.count(x) != 0; }

    bool insert(const itemset& x, std::optional<std::uint64_t> support = {})
    {
        auto [it, inserted] = sets_.emplace(x, support);
        if (!inserted && support && !it->second)
            it->second = support;
        if (inserted)
            for (item_id a : x.items())
                universe_.insert(a);
        return inserted;
    }

    std::size_t size() const { return sets_.size(); }
    bool empty() const { return sets_.empty(); }
    const map_type& entries() const { return sets_; }

    std::optional<std::uint64_t> support_of(const itemset& x) const
    {
        auto it = sets_.find(x);
        return it == sets_.end() ? std::nullopt : it->second;
    }

    //! Items appearing in at least one member.
    const std::set<item_id>& universe() const { return universe_; }

    //! {X - b | b in X in F}; downward closed whenever this family is.
    itemset_family project(item_id b) const
    {
        itemset_family g;
        for (const auto& [x, sup] : sets_)
            if (x.contains(b))
                g.insert(x.without(b));
        return g;
    }

    //! Members with at most `max_items` items.
    itemset_family truncated(std::size_t max_items) const
    {
        itemset_family g;
        for (const auto& [x, sup] : sets_)
            if (x.size() <= max_items)
                g.insert(x, sup);
        return g;
    }

    //! Every (|X|-1)-subset of every member present?
    bool downward_closed() const
    {
        for (const auto& [x, sup] : sets_) {
            for (item_id a : x.items())
                if (!contains(x.without(a)))
                    return false;
        }
        return true;
    }

    //! Add all missing subsets; reports what was added.
    void complete_closure(std::vector<itemset>* added = nullptr)
    {
        std::vector<itemset> work;
        for (const auto& [x, sup] : sets_)
            work.push_back(x);
        while (!work.empty()) {
            itemset x = std::move(work.back());
            work.pop_back();
            for (item_id a : x.items()) {
                itemset sub = x.without(a);
                if (insert(sub)) {
                    if (added)
                        added->push_back(sub);
                    work.push_back(std::move(sub));
                }
            }
        }
    }

    //! Ensure the empty set and every singleton over k attributes are
    //! present, so each attribute admits at least its trivial tree.
    void force_singletons(std::size_t k, std::vector<item_id>* added = nullptr)
    {
        insert(itemset{});
        for (item_id a = 0; a < k; ++a)
            if (insert(itemset::singleton(a)) && added)
                added->push_back(a);
    }

    std::vector<itemset> to_vector() const
    {
        std::vector<itemset> v;
        v.reserve(sets_.size());
        for (const auto& [x, sup] : sets_)
            v.push_back(x);
        return v;
    }

private:
    map_type sets_;
    std::set<item_id> universe_;
};

namespace detail {

struct eclat_ext {
    item_id attr;
    row_set rows;
    std::uint64_t support;
};

inline void eclat_grow(const std::vector<item_id>& prefix, const std::vector<eclat_ext>& exts,
                       std::uint64_t minsup, itemset_family& out)
{
    for (std::size_t i = 0; i < exts.size(); ++i) {
        std::vector<item_id> items = prefix;
        items.push_back(exts[i].attr);
        out.insert(itemset(items), exts[i].support);
        std::vector<eclat_ext> tails;
        for (std::size_t j = i + 1; j < exts.size(); ++j) {
            row_set rows = exts[i].rows & exts[j].rows;
            std::uint64_t sup = rows.count();
            if (sup >= minsup)
                tails.push_back({exts[j].attr, std::move(rows), sup});
        }
        if (!tails.empty())
            eclat_grow(items, tails, minsup, out);
    }
}

} // namespace detail

//! Depth-first intersection miner over the dataset's column bitmaps. The
//! result contains every itemset with support >= minsup, plus the empty set;
//! it is downward closed by antimonotonicity of support.
inline itemset_family mine_frequent(const binary_dataset& ds, std::uint64_t minsup)
{
    if (minsup < 1)
        throw std::invalid_argument("minsup must be at least 1");
    itemset_family out;
    out.insert(itemset{}, ds.n_rows());
    std::vector<detail::eclat_ext> roots;
    for (item_id a = 0; a < ds.n_attrs(); ++a) {
        std::uint64_t sup = ds.column(a).count();
        if (sup >= minsup)
            roots.push_back({a, ds.column(a), sup});
    }
    detail::eclat_grow({}, roots, minsup, out);
    return out;
}

//! Parse an itemset line file (same format write_itemset_lines emits).
//! Tokens resolve against attribute names first, then as raw ids; lines may
//! end with " : support"; '#' lines are comments. Downward closure is
//! verified after reading and repaired by closure completion; `repaired`
//! reports whether that was needed.
inline itemset_family load_family(std::istream& in, const std::vector<std::string>& names = {},
                                  bool* repaired = nullptr)
{
    std::unordered_map<std::string, item_id> by_name;
    for (std::size_t i = 0; i < names.size(); ++i)
        by_name.emplace(names[i], static_cast<item_id>(i));

    itemset_family fam;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        std::vector<std::string_view> tokens;
        std::size_t pos = 0;
        while (pos < s.size()) {
            while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
                ++pos;
            std::size_t end = pos;
            while (end < s.size() && s[end] != ' ' && s[end] != '\t')
                ++end;
            if (end > pos)
                tokens.push_back(s.substr(pos, end - pos));
            pos = end;
        }
        std::optional<std::uint64_t> support;
        if (tokens.size() >= 2 && tokens[tokens.size() - 2] == ":") {
            std::uint64_t sup = 0;
            auto tok = tokens.back();
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), sup);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw parse_error("malformed support count", line_no);
            support = sup;
            tokens.resize(tokens.size() - 2);
            if (tokens.empty())
                throw parse_error("support count without an itemset", line_no);
        }
        std::vector<item_id> items;
        for (auto tok : tokens) {
            if (tok == "{}") {
                if (tokens.size() != 1)
                    throw parse_error("'{}' must stand alone", line_no);
                break;
            }
            auto it = by_name.find(std::string(tok));
            if (it != by_name.end()) {
                items.push_back(it->second);
                continue;
            }
            item_id id = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw parse_error("unknown item '" + std::string(tok) + "'", line_no);
            if (!names.empty() && id >= names.size())
                throw parse_error("item id " + std::to_string(id) + " out of range", line_no);
            items.push_back(id);
        }
        fam.insert(itemset(std::move(items)), support);
    }
    bool needs_repair = !fam.contains(itemset{}) || !fam.downward_closed();
    if (repaired)
        *repaired = needs_repair;
    if (needs_repair) {
        fam.insert(itemset{});
        fam.complete_closure();
    }
    return fam;
}

inline void save_family(std::ostream& os, const itemset_family& fam,
                        const std::vector<std::string>& names = {})
{
    std::vector<itemset> sets;
    std::vector<std::optional<std::uint64_t>> supports;
    for (const auto& [x, sup] : fam.entries()) {
        sets.push_back(x);
        supports.push_back(sup);
    }
    write_itemset_lines(os, sets, names, false, &supports);
}

} // namespace packminer
