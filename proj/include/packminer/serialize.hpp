#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtree.hpp"
#include "mdlcost.hpp"

namespace packminer {

using nlohmann::json;

inline json to_json(const cost_report& r)
{
    return json{{"data_bits", r.data_bits},
                {"structure_bits", r.structure_bits},
                {"regret_bits", r.regret_bits},
                {"total", r.total}};
}

inline cost_report cost_report_from_json(const json& j)
{
    cost_report r;
    r.data_bits = j.at("data_bits").get<double>();
    r.structure_bits = j.at("structure_bits").get<double>();
    r.regret_bits = j.at("regret_bits").get<double>();
    r.total = j.at("total").get<double>();
    return r;
}

namespace detail {

inline json node_to_json(const decision_tree& t, node_index i)
{
    const auto& n = t.node(i);
    if (n.is_leaf())
        return json{{"leaf", {n.counts.n0, n.counts.n1}}};
    return json{{"split", n.split},
                {"pos", node_to_json(t, n.pos)},
                {"neg", node_to_json(t, n.neg)}};
}

inline decision_tree tree_from_json(const json& j, item_id target)
{
    if (j.contains("leaf")) {
        coding_table c{j.at("leaf").at(0).get<std::uint64_t>(),
                       j.at("leaf").at(1).get<std::uint64_t>()};
        return decision_tree::leaf(target, c, row_set());
    }
    const item_id attr = j.at("split").get<item_id>();
    return join_tree(attr, tree_from_json(j.at("pos"), target),
                     tree_from_json(j.at("neg"), target));
}

} // namespace detail

inline json tree_to_json(const decision_tree& t)
{
    return detail::node_to_json(t, t.root());
}

//! Model file: nested per-attribute trees, the transmission order, the cost
//! decomposition and the attribute names.
inline json model_to_json(const tree_model& m, const std::vector<std::string>& attr_names)
{
    json trees = json::array();
    for (const auto& t : m.trees)
        trees.push_back(tree_to_json(t));
    return json{{"attrs", attr_names},
                {"order", m.order},
                {"trees", std::move(trees)},
                {"cost", to_json(model_cost(m))}};
}

//! Rebuilds the model structure (coding tables but no row bitmaps, which
//! only exist relative to a dataset); the graph and order are recomputed.
inline tree_model model_from_json(const json& j, std::vector<std::string>* attr_names = nullptr)
{
    tree_model m;
    const auto& trees = j.at("trees");
    for (item_id a = 0; a < trees.size(); ++a)
        m.trees.push_back(detail::tree_from_json(trees.at(a), a));
    rebuild_graph_and_order(m);
    if (attr_names && j.contains("attrs"))
        *attr_names = j.at("attrs").get<std::vector<std::string>>();
    return m;
}

//! Dependency graph as DOT text, attribute names as node labels.
inline void write_dot(std::ostream& os, const dependency_graph& g,
                      const std::vector<std::string>& names)
{
    os << "digraph dependencies {\n";
    for (std::size_t v = 0; v < g.n_vertices(); ++v)
        os << "  n" << v << " [label=\"" << (v < names.size() ? names[v] : std::to_string(v))
           << "\"];\n";
    for (auto [from, to] : g.edges())
        os << "  n" << from << " -> n" << to << ";\n";
    os << "}\n";
}

//! FNV-1a 64 over a byte stream, as a hex string; used for input digests in
//! run manifests.
inline std::string fnv1a_hex(std::istream& in)
{
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace packminer
