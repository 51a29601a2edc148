#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace packminer {

using item_id = std::uint32_t;

//! Set of attributes kept as a strictly ascending id sequence.
class itemset {
public:
    itemset() = default;

    itemset(std::initializer_list<item_id> ids) : itemset(std::vector<item_id>(ids)) {}

    explicit itemset(std::vector<item_id> ids) : items_(std::move(ids))
    {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    static itemset singleton(item_id a) { return itemset({a}); }

    const std::vector<item_id>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    bool contains(item_id a) const
    {
        return std::binary_search(items_.begin(), items_.end(), a);
    }

    bool subset_of(const itemset& o) const
    {
        return std::includes(o.items_.begin(), o.items_.end(), items_.begin(), items_.end());
    }

    itemset with(item_id a) const
    {
        itemset r = *this;
        auto it = std::lower_bound(r.items_.begin(), r.items_.end(), a);
        if (it == r.items_.end() || *it != a)
            r.items_.insert(it, a);
        return r;
    }

    itemset without(item_id a) const
    {
        itemset r = *this;
        auto it = std::lower_bound(r.items_.begin(), r.items_.end(), a);
        if (it != r.items_.end() && *it == a)
            r.items_.erase(it);
        return r;
    }

    itemset unite(const itemset& o) const
    {
        itemset r;
        r.items_.reserve(items_.size() + o.items_.size());
        std::set_union(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                       std::back_inserter(r.items_));
        return r;
    }

    auto operator<=>(const itemset&) const = default;

private:
    std::vector<item_id> items_;
};

struct itemset_hash {
    std::size_t operator()(const itemset& x) const
    {
        std::uint64_t h = 1469598103934665603ull;
        for (item_id a : x.items()) {
            h ^= a;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

//! Display/file order: by cardinality, then lexicographically by id sequence.
struct family_order {
    bool operator()(const itemset& a, const itemset& b) const
    {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    }
};

//! One tested attribute value on a tree path.
struct signed_literal {
    item_id attr;
    bool positive;
};

} // namespace packminer
