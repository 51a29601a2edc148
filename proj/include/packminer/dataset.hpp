#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "itemset.hpp"
#include "rowset.hpp"

namespace packminer {

struct parse_error : std::runtime_error {
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line)
    {
    }
    explicit parse_error(const std::string& what) : std::runtime_error(what), line(0) {}
    std::size_t line;
};

enum class data_format { fimi, csv01 };

//! Immutable fact base: K attribute columns stored as row bitmaps.
//! Duplicate transactions are kept (multiset semantics).
class binary_dataset {
public:
    binary_dataset(std::size_t n_rows, std::vector<row_set> columns,
                   std::vector<std::string> attr_names)
        : n_rows_(n_rows), columns_(std::move(columns)), names_(std::move(attr_names))
    {
        if (n_rows_ == 0 || columns_.empty())
            throw std::invalid_argument("dataset needs at least one row and one attribute");
        for (const auto& c : columns_)
            if (c.size() != n_rows_)
                throw std::invalid_argument("column bitmap width mismatch");
        if (names_.empty())
            for (std::size_t k = 0; k < columns_.size(); ++k)
                names_.push_back(std::to_string(k));
        if (names_.size() != columns_.size())
            throw std::invalid_argument("attribute name count mismatch");
    }

    //! Test helper: rows given as item-id lists.
    static binary_dataset from_rows(std::size_t n_attrs,
                                    const std::vector<std::vector<item_id>>& rows,
                                    std::vector<std::string> names = {})
    {
        std::vector<row_set> cols(n_attrs, row_set(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (item_id a : rows[r])
                cols.at(a).set(r);
        return binary_dataset(rows.size(), std::move(cols), std::move(names));
    }

    static binary_dataset load(std::istream& in, data_format fmt)
    {
        return fmt == data_format::fimi ? load_fimi(in) : load_csv01(in);
    }

    //! FIMI: one transaction per line, whitespace-separated non-negative item
    //! ids, LF or CRLF. Item ids map directly to attribute indices; if the id
    //! range has gaps the ids are densely renumbered and the original ids kept
    //! as attribute names.
    static binary_dataset load_fimi(std::istream& in);

    //! CSV: header row of attribute names, then rows of 0/1 cells.
    static binary_dataset load_csv01(std::istream& in);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_attrs() const { return columns_.size(); }

    const row_set& column(item_id a) const
    {
        check_attr(a);
        return columns_[a];
    }

    const std::string& attr_name(item_id a) const
    {
        check_attr(a);
        return names_[a];
    }

    const std::vector<std::string>& attr_names() const { return names_; }

    //! True when FIMI ids were renumbered (names carry the original ids).
    bool renumbered() const { return renumbered_; }

    row_set all_rows() const { return row_set::full(n_rows_); }

    std::uint64_t support(const itemset& x) const
    {
        if (x.empty())
            return n_rows_;
        check_attr(x.items().back());
        if (x.size() == 1)
            return columns_[x.items()[0]].count();
        if (x.size() == 2)
            return columns_[x.items()[0]].count_and(columns_[x.items()[1]]);
        row_set acc = columns_[x.items()[0]];
        for (std::size_t i = 1; i + 1 < x.size(); ++i)
            acc &= columns_[x.items()[i]];
        return acc.count_and(columns_[x.items().back()]);
    }

    double frequency(const itemset& x) const
    {
        return static_cast<double>(support(x)) / static_cast<double>(n_rows_);
    }

    //! Rows on which every positive literal is 1 and every negative is 0.
    row_set select_rows(std::span<const signed_literal> literals) const
    {
        for (std::size_t i = 0; i < literals.size(); ++i)
            for (std::size_t j = i + 1; j < literals.size(); ++j)
                if (literals[i].attr == literals[j].attr)
                    throw std::invalid_argument("duplicate attribute in literal conjunction");
        row_set r = all_rows();
        for (const auto& l : literals) {
            check_attr(l.attr);
            if (l.positive)
                r &= columns_[l.attr];
            else
                r = r.and_not(columns_[l.attr]);
        }
        return r;
    }

    //! (n0, n1) of `attr` among `rows`.
    std::pair<std::uint64_t, std::uint64_t> value_counts(const row_set& rows, item_id attr) const
    {
        check_attr(attr);
        std::uint64_t n1 = rows.count_and(columns_[attr]);
        return {rows.count() - n1, n1};
    }

    std::vector<std::uint8_t> row_values(std::size_t r) const
    {
        if (r >= n_rows_)
            throw std::out_of_range("row index out of range");
        std::vector<std::uint8_t> v(n_attrs());
        for (std::size_t k = 0; k < n_attrs(); ++k)
            v[k] = columns_[k].test(r);
        return v;
    }

    double density() const
    {
        std::uint64_t ones = 0;
        for (const auto& c : columns_)
            ones += c.count();
        return static_cast<double>(ones) / (static_cast<double>(n_rows_) * n_attrs());
    }

private:
    void check_attr(item_id a) const
    {
        if (a >= columns_.size())
            throw std::out_of_range("attribute id " + std::to_string(a) + " out of range");
    }

    std::size_t n_rows_;
    std::vector<row_set> columns_;
    std::vector<std::string> names_;
    bool renumbered_ = false;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    return s;
}

} // namespace detail

inline binary_dataset binary_dataset::load_fimi(std::istream& in)
{
    std::vector<std::vector<item_id>> rows;
    std::string line;
    std::size_t line_no = 0;
    item_id max_id = 0;
    bool any_item = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        std::vector<item_id> items;
        std::size_t pos = 0;
        while (pos < s.size()) {
            while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
                ++pos;
            if (pos >= s.size())
                break;
            std::size_t end = pos;
            while (end < s.size() && s[end] != ' ' && s[end] != '\t')
                ++end;
            item_id id = 0;
            auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, id);
            if (ec != std::errc() || p != s.data() + end)
                throw parse_error("malformed item id '" + std::string(s.substr(pos, end - pos)) + "'",
                                  line_no);
            items.push_back(id);
            max_id = std::max(max_id, id);
            any_item = true;
            pos = end;
        }
        rows.push_back(std::move(items));
    }
    if (rows.empty())
        throw parse_error("empty input");
    if (!any_item)
        throw parse_error("no items in input");

    std::vector<bool> present(static_cast<std::size_t>(max_id) + 1, false);
    for (const auto& r : rows)
        for (item_id a : r)
            present[a] = true;
    bool gaps = false;
    for (bool p : present)
        gaps = gaps || !p;

    if (!gaps) {
        auto ds = from_rows(static_cast<std::size_t>(max_id) + 1, rows);
        return ds;
    }
    // dense renumbering; original ids become the attribute names
    std::vector<item_id> remap(present.size(), 0);
    std::vector<std::string> names;
    item_id next = 0;
    for (std::size_t id = 0; id < present.size(); ++id)
        if (present[id]) {
            remap[id] = next++;
            names.push_back(std::to_string(id));
        }
    for (auto& r : rows)
        for (auto& a : r)
            a = remap[a];
    auto ds = from_rows(next, rows, std::move(names));
    ds.renumbered_ = true;
    return ds;
}

inline binary_dataset binary_dataset::load_csv01(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty input");
    std::vector<std::string> names;
    {
        std::string_view s = detail::trim(line);
        std::size_t start = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            std::string_view cell =
                comma == std::string_view::npos ? s.substr(start) : s.substr(start, comma - start);
            names.emplace_back(detail::trim(cell));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
    }
    if (names.empty() || (names.size() == 1 && names[0].empty()))
        throw parse_error("missing header row", 1);

    std::vector<std::vector<item_id>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        if (s.empty())
            continue;
        std::vector<item_id> items;
        std::size_t start = 0, col = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            std::string_view cell =
                comma == std::string_view::npos ? s.substr(start) : s.substr(start, comma - start);
            cell = detail::trim(cell);
            if (col >= names.size())
                throw parse_error("too many columns", line_no);
            if (cell == "1")
                items.push_back(static_cast<item_id>(col));
            else if (cell != "0")
                throw parse_error("cell value '" + std::string(cell) + "' is not 0 or 1", line_no);
            ++col;
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (col != names.size())
            throw parse_error("wrong column count", line_no);
        rows.push_back(std::move(items));
    }
    if (rows.empty())
        throw parse_error("no data rows");
    const std::size_t n_attrs = names.size();
    return from_rows(n_attrs, rows, std::move(names));
}

} // namespace packminer
