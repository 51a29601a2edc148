#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "candidates.hpp"
#include "dataset.hpp"
#include "greedypack.hpp"
#include "setpack.hpp"

namespace packminer {

struct labeled_dataset {
    binary_dataset data;
    std::vector<std::string> labels; // one per row
};

inline labeled_dataset make_labeled(binary_dataset ds, std::vector<std::string> labels)
{
    if (labels.size() != ds.n_rows())
        throw std::invalid_argument("label count must match the row count");
    return {std::move(ds), std::move(labels)};
}

//! CSV with one non-binary label column named `label_col`; the remaining
//! columns must be 0/1 attributes.
inline labeled_dataset load_labeled_csv(std::istream& in, const std::string& label_col)
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // locate the label column from the header first
    std::size_t header_end = text.find('\n');
    if (header_end == std::string::npos)
        throw parse_error("empty input");
    std::vector<std::string> header;
    {
        std::string_view s = detail::trim(std::string_view(text).substr(0, header_end));
        std::size_t start = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            auto cell = comma == std::string_view::npos ? s.substr(start)
                                                        : s.substr(start, comma - start);
            header.emplace_back(detail::trim(cell));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
    }
    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_col)
            label_idx = i;
    if (label_idx == header.size())
        throw parse_error("label column '" + label_col + "' not found", 1);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx)
            names.push_back(header[i]);

    std::vector<std::vector<item_id>> rows;
    std::vector<std::string> labels;
    std::size_t line_no = 1;
    std::size_t pos = header_end + 1;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos)
            eol = text.size();
        std::string_view s = detail::trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (s.empty())
            continue;
        std::vector<item_id> items;
        std::string label;
        std::size_t start = 0, col = 0, attr = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            auto cell = detail::trim(comma == std::string_view::npos
                                         ? s.substr(start)
                                         : s.substr(start, comma - start));
            if (col >= header.size())
                throw parse_error("too many columns", line_no);
            if (col == label_idx)
                label = std::string(cell);
            else {
                if (cell == "1")
                    items.push_back(static_cast<item_id>(attr));
                else if (cell != "0")
                    throw parse_error("cell value '" + std::string(cell) + "' is not 0 or 1",
                                      line_no);
                ++attr;
            }
            ++col;
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (col != header.size())
            throw parse_error("wrong column count", line_no);
        rows.push_back(std::move(items));
        labels.push_back(std::move(label));
    }
    if (rows.empty())
        throw parse_error("no data rows");
    const std::size_t n_attrs = names.size();
    return make_labeled(binary_dataset::from_rows(n_attrs, rows, std::move(names)),
                        std::move(labels));
}

//! FIMI transactions paired with one label per line.
inline labeled_dataset load_fimi_with_labels(std::istream& data, std::istream& label_stream)
{
    binary_dataset ds = binary_dataset::load_fimi(data);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(label_stream, line)) {
        auto s = detail::trim(line);
        if (!s.empty())
            labels.emplace_back(s);
    }
    return make_labeled(std::move(ds), std::move(labels));
}

//! Rows of `ds` restricted to the given indices, in order.
inline binary_dataset subset_dataset(const binary_dataset& ds, const std::vector<std::size_t>& rows)
{
    if (rows.empty())
        throw std::invalid_argument("row subset is empty");
    std::vector<row_set> cols(ds.n_attrs(), row_set(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (item_id a = 0; a < ds.n_attrs(); ++a)
            if (ds.column(a).test(rows[r]))
                cols[a].set(r);
    return binary_dataset(rows.size(), std::move(cols),
                          std::vector<std::string>(ds.attr_names()));
}

enum class train_algorithm { greedy, select };

struct classify_options {
    train_algorithm algorithm = train_algorithm::greedy;
    // select-specific: one shared candidate family, or mine per run
    const itemset_family* candidates = nullptr;
    std::uint64_t minsup = 0; // used when no family is given
    search_mode mode = search_mode::greedy;
    bool add_prior = false; // add -log(class fraction) to each code length
    int threads = 0;
};

//! One packed model per class plus its training weight.
struct classifier_model {
    std::vector<std::string> classes;
    std::vector<tree_model> models;
    std::vector<std::uint64_t> train_counts;
};

inline classifier_model train(const labeled_dataset& data, const classify_options& opt = {})
{
    std::map<std::string, std::vector<std::size_t>> partition;
    for (std::size_t r = 0; r < data.labels.size(); ++r)
        partition[data.labels[r]].push_back(r);
    if (partition.size() < 2)
        throw std::invalid_argument("training data must contain at least two classes");

    classifier_model cm;
    for (auto& [label, rows] : partition) {
        binary_dataset part = subset_dataset(data.data, rows);
        tree_model model;
        if (opt.algorithm == train_algorithm::greedy) {
            greedy_options go;
            go.threads = opt.threads;
            model = std::move(greedy_pack(part, go).model);
        } else {
            itemset_family fam;
            if (opt.candidates)
                fam = *opt.candidates;
            else if (opt.minsup > 0)
                fam = mine_frequent(part, opt.minsup);
            else
                throw std::invalid_argument(
                    "select training needs a candidate family or a support threshold");
            set_pack_options so;
            so.mode = opt.mode;
            so.threads = opt.threads;
            model = std::move(set_pack(part, fam, so).model);
        }
        cm.classes.push_back(label);
        cm.models.push_back(std::move(model));
        cm.train_counts.push_back(rows.size());
    }
    return cm;
}

//! Class whose model compresses the row best (KT-smoothed code lengths, so
//! every length is finite). Ties go to the class with more training rows,
//! then the smaller class index.
inline std::size_t predict(const classifier_model& cm, std::span<const std::uint8_t> row,
                           bool add_prior = false)
{
    std::uint64_t total_rows = 0;
    for (auto c : cm.train_counts)
        total_rows += c;
    std::size_t best = 0;
    double best_len = 0;
    for (std::size_t c = 0; c < cm.models.size(); ++c) {
        double len = transaction_code_length(cm.models[c], row, smoothing::kt);
        if (add_prior)
            len -= std::log2(static_cast<double>(cm.train_counts[c])
                             / static_cast<double>(total_rows));
        const bool better =
            c == 0 || len < best_len
            || (len == best_len && cm.train_counts[c] > cm.train_counts[best]);
        if (better) {
            best = c;
            best_len = len;
        }
    }
    return best;
}

struct eval_report {
    double accuracy = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<std::string> classes;
    std::vector<std::uint64_t> train_counts;
    std::vector<std::vector<std::uint64_t>> confusion; // [actual][predicted]
};

//! Seeded holdout: shuffle rows, train on the first `split` fraction,
//! report accuracy and per-class confusion counts on the rest.
inline eval_report evaluate(const labeled_dataset& data, double split, std::uint64_t seed,
                            const classify_options& opt = {})
{
    if (!(split > 0.0 && split < 1.0))
        throw std::invalid_argument("split fraction must be strictly between 0 and 1");
    const std::size_t n = data.data.n_rows();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    std::mt19937_64 g(seed);
    for (std::size_t i = n; i > 1; --i) // Fisher-Yates, platform independent
        std::swap(idx[i - 1], idx[g() % i]);

    const std::size_t n_train = static_cast<std::size_t>(std::llround(split * n));
    if (n_train == 0 || n_train >= n)
        throw std::invalid_argument("split leaves an empty train or test side");

    std::vector<std::size_t> train_rows(idx.begin(), idx.begin() + n_train);
    std::vector<std::size_t> test_rows(idx.begin() + n_train, idx.end());

    labeled_dataset train_data = make_labeled(
        subset_dataset(data.data, train_rows), [&] {
            std::vector<std::string> l;
            for (auto r : train_rows)
                l.push_back(data.labels[r]);
            return l;
        }());
    classifier_model cm = train(train_data, opt);

    std::set<std::string> all_classes(data.labels.begin(), data.labels.end());
    std::vector<std::string> classes(all_classes.begin(), all_classes.end());
    auto class_index = [&](const std::string& s) {
        return static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), s) - classes.begin());
    };

    eval_report rep;
    rep.classes = classes;
    rep.n_train = n_train;
    rep.n_test = test_rows.size();
    rep.train_counts.assign(classes.size(), 0);
    for (const auto& l : train_data.labels)
        ++rep.train_counts[class_index(l)];
    rep.confusion.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));

    std::size_t correct = 0;
    for (std::size_t r : test_rows) {
        auto row = data.data.row_values(r);
        const std::size_t pred = predict(cm, row, opt.add_prior);
        const std::string& pred_label = cm.classes[pred];
        if (pred_label == data.labels[r])
            ++correct;
        ++rep.confusion[class_index(data.labels[r])][class_index(pred_label)];
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
    return rep;
}

} // namespace packminer
