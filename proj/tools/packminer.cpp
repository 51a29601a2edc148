// packminer: command-line front end for MDL decision-tree packing of binary
// transaction data. Subcommands: stats, mine, extract, pack greedy,
// pack select, classify. Exit codes: 0 ok, 1 I/O or parse error, 2 bad
// flags, 3 infeasible candidate family.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <packminer/candidates.hpp>
#include <packminer/classify.hpp>
#include <packminer/dataset.hpp>
#include <packminer/extract.hpp>
#include <packminer/greedypack.hpp>
#include <packminer/serialize.hpp>
#include <packminer/setpack.hpp>

namespace pm = packminer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* packminer_version = "0.1.0";
constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_usage = 2;
constexpr int exit_infeasible = 3;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! Reproducibility metadata written as a sidecar next to every output
//! artifact (<artifact>.manifest.json), so the artifacts themselves stay
//! byte-identical across reruns.
struct run_info {
    std::string command_line;
    json flags = json::object();
    std::uint64_t seed = 0;
    json inputs = json::object(); // path -> content digest
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void record_input(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        if (f)
            inputs[path] = pm::fnv1a_hex(f);
    }
};

void write_manifest(const std::string& artifact, const run_info& info)
{
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - info.started)
                               .count();
    json m{{"artifact", artifact}, {"command", info.command_line},
           {"inputs", info.inputs}, {"flags", info.flags},
           {"seed", info.seed},     {"version", packminer_version},
           {"wall_ms", wall_ms}};
    std::ofstream out(artifact + ".manifest.json");
    out << m.dump(2) << '\n';
}

void write_artifact(const std::string& path, const std::string& content, const run_info& info)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write '" + path + "'");
    out << content;
    out.close();
    write_manifest(path, info);
}

pm::data_format resolve_format(const std::string& format, const std::string& path)
{
    if (format == "fimi")
        return pm::data_format::fimi;
    if (format == "csv")
        return pm::data_format::csv01;
    // auto: by extension
    return fs::path(path).extension() == ".csv" ? pm::data_format::csv01
                                                : pm::data_format::fimi;
}

pm::binary_dataset load_dataset(const std::string& path, const std::string& format,
                                run_info& info)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "'");
    info.record_input(path);
    return pm::binary_dataset::load(in, resolve_format(format, path));
}

std::string render_itemsets(const pm::extracted_family& fam,
                            const std::vector<std::string>& names, bool drop_empty)
{
    std::ostringstream os;
    pm::write_itemset_lines(os, fam.sets, names, drop_empty);
    return os.str();
}

json pack_report(const char* algorithm, const pm::binary_dataset& ds,
                 const pm::cost_report& baseline, const pm::cost_report& cost,
                 const pm::extracted_family& sets)
{
    return json{{"algorithm", algorithm},
                {"n_rows", ds.n_rows()},
                {"n_trees", ds.n_attrs()},
                {"baseline_bits", baseline.total},
                {"model_bits", cost.total},
                {"ratio_percent", 100.0 * cost.total / baseline.total},
                {"n_sets", sets.size()},
                {"n_sets_nonempty", sets.size_nonempty()},
                {"cost", pm::to_json(cost)},
                {"baseline", pm::to_json(baseline)}};
}

void print_pack_report(const json& rep, bool pretty)
{
    if (!pretty) {
        std::cout << rep.dump(2) << '\n';
        return;
    }
    std::cout << "rows           " << rep.at("n_rows").get<std::uint64_t>() << '\n'
              << "trees          " << rep.at("n_trees").get<std::uint64_t>() << '\n'
              << "baseline bits  " << rep.at("baseline_bits").get<double>() << '\n'
              << "model bits     " << rep.at("model_bits").get<double>() << '\n'
              << "ratio          " << rep.at("ratio_percent").get<double>() << " %\n"
              << "itemsets       " << rep.at("n_sets").get<std::uint64_t>() << " ("
              << rep.at("n_sets_nonempty").get<std::uint64_t>() << " nonempty)\n";
}

struct pack_common {
    std::string input;
    std::string format = "auto";
    std::string output;
    std::string emit_itemsets;
    std::string emit_dot;
    bool drop_empty = false;
    bool no_cache = false;
    bool pretty = false;
    std::uint64_t seed = 0;
    int threads = 0;
};

void add_pack_common(CLI::App* cmd, pack_common& o)
{
    cmd->add_option("-i,--input", o.input, "input dataset")->required();
    cmd->add_option("--format", o.format, "input format")
        ->check(CLI::IsMember({"auto", "fimi", "csv"}));
    cmd->add_option("-o,--output", o.output, "write the model as JSON");
    cmd->add_option("--emit-itemsets", o.emit_itemsets, "write the extracted itemset list");
    cmd->add_option("--emit-dot", o.emit_dot, "write the dependency graph as DOT");
    cmd->add_flag("--drop-empty", o.drop_empty, "exclude the empty itemset from lists");
    cmd->add_flag("--no-cache", o.no_cache, "rescan every candidate each pass (A/B check)");
    cmd->add_flag("--pretty", o.pretty, "human-readable report instead of JSON");
    cmd->add_option("--seed", o.seed, "seed recorded in the run manifest");
    cmd->add_option("--threads", o.threads, "worker threads (0 = auto)")
        ->envname("PACKMINER_THREADS");
}

void emit_pack_outputs(const pack_common& o, run_info& info, const pm::binary_dataset& ds,
                       const pm::tree_model& model, const pm::extracted_family& sets)
{
    if (!o.output.empty())
        write_artifact(o.output, pm::model_to_json(model, ds.attr_names()).dump(2) + "\n",
                       info);
    if (!o.emit_itemsets.empty())
        write_artifact(o.emit_itemsets, render_itemsets(sets, ds.attr_names(), o.drop_empty),
                       info);
    if (!o.emit_dot.empty()) {
        std::ostringstream dot;
        pm::write_dot(dot, model.graph, ds.attr_names());
        write_artifact(o.emit_dot, dot.str(), info);
    }
}

int run(int argc, char** argv)
{
    CLI::App app{"MDL decision-tree packing and itemset extraction for binary data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("packminer ") + packminer_version);

    run_info info;
    {
        std::ostringstream cmd;
        for (int i = 0; i < argc; ++i)
            cmd << (i ? " " : "") << argv[i];
        info.command_line = cmd.str();
    }

    // ---- stats ----
    auto* stats = app.add_subcommand("stats", "dataset statistics");
    struct {
        std::string input, format = "auto";
        bool pretty = false;
    } st;
    stats->add_option("-i,--input", st.input)->required();
    stats->add_option("--format", st.format)->check(CLI::IsMember({"auto", "fimi", "csv"}));
    stats->add_flag("--pretty", st.pretty);
    stats->callback([&] {
        auto ds = load_dataset(st.input, st.format, info);
        if (st.pretty)
            std::cout << "rows " << ds.n_rows() << ", attrs " << ds.n_attrs() << ", "
                      << 100.0 * ds.density() << "% of 1s\n";
        else
            std::cout << json{{"n_rows", ds.n_rows()},
                              {"n_attrs", ds.n_attrs()},
                              {"density_percent", 100.0 * ds.density()}}
                             .dump(2)
                      << '\n';
    });

    // ---- mine ----
    auto* mine = app.add_subcommand("mine", "mine frequent itemsets as a candidate family");
    struct {
        std::string input, format = "auto", output;
        std::uint64_t minsup = 0;
        double minsup_frac = -1;
    } mn;
    mine->add_option("-i,--input", mn.input)->required();
    mine->add_option("--format", mn.format)->check(CLI::IsMember({"auto", "fimi", "csv"}));
    mine->add_option("-o,--output", mn.output, "candidate family file");
    auto* mopt = mine->add_option("--minsup", mn.minsup, "absolute support threshold");
    mine->add_option("--minsup-frac", mn.minsup_frac, "support threshold as a fraction of |D|")
        ->excludes(mopt);
    mine->callback([&] {
        auto ds = load_dataset(mn.input, mn.format, info);
        std::uint64_t minsup = mn.minsup;
        if (mn.minsup_frac >= 0)
            minsup = static_cast<std::uint64_t>(std::ceil(mn.minsup_frac * ds.n_rows()));
        if (minsup < 1)
            throw CLI::ValidationError("--minsup", "one of --minsup/--minsup-frac is required");
        auto fam = pm::mine_frequent(ds, minsup);
        std::ostringstream os;
        pm::save_family(os, fam, ds.attr_names());
        if (mn.output.empty())
            std::cout << os.str();
        else {
            write_artifact(mn.output, os.str(), info);
            std::cout << json{{"n_sets", fam.size()}, {"minsup", minsup}}.dump(2) << '\n';
        }
    });

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "itemset family implied by a saved model");
    struct {
        std::string model, output;
        bool drop_empty = false;
    } ex;
    extract->add_option("--model", ex.model, "model JSON written by pack")->required();
    extract->add_option("-o,--output", ex.output, "itemset list file");
    extract->add_flag("--drop-empty", ex.drop_empty);
    extract->callback([&] {
        std::ifstream in(ex.model);
        if (!in)
            throw io_error("cannot open '" + ex.model + "'");
        info.record_input(ex.model);
        json j = json::parse(in, nullptr, true);
        std::vector<std::string> names;
        pm::tree_model model = pm::model_from_json(j, &names);
        auto sets = pm::model_sets(model);
        std::string text = render_itemsets(sets, names, ex.drop_empty);
        if (ex.output.empty())
            std::cout << text;
        else {
            write_artifact(ex.output, text, info);
            std::cout << json{{"n_sets", sets.size()},
                              {"n_sets_nonempty", sets.size_nonempty()}}
                             .dump(2)
                      << '\n';
        }
    });

    // ---- pack ----
    auto* pack = app.add_subcommand("pack", "build a decision tree model");
    pack->require_subcommand(1);

    auto* pg = pack->add_subcommand("greedy", "greedy tree construction directly from data");
    auto pgo = std::make_shared<pack_common>();
    add_pack_common(pg, *pgo);
    pg->callback([&, pgo] {
        info.flags = json{{"algorithm", "greedy"}, {"no_cache", pgo->no_cache}};
        info.seed = pgo->seed;
        auto ds = load_dataset(pgo->input, pgo->format, info);
        pm::greedy_options opt;
        opt.use_cache = !pgo->no_cache;
        opt.threads = pgo->threads;
        auto res = pm::greedy_pack(ds, opt);
        auto sets = pm::model_sets(res.model);
        json rep = pack_report("greedy", ds, res.baseline, res.cost, sets);
        rep["n_splits"] = res.n_splits;
        print_pack_report(rep, pgo->pretty);
        emit_pack_outputs(*pgo, info, ds, res.model, sets);
    });

    auto* ps = pack->add_subcommand("select", "select trees restricted to a candidate family");
    auto pso = std::make_shared<pack_common>();
    struct select_extra {
        std::string candidates;
        std::uint64_t minsup = 0;
        double minsup_frac = -1;
        std::size_t max_size = 0;
        std::string mode = "exhaustive";
        std::string propagate = "ancestors";
        std::string emit_sources;
    };
    auto sxo = std::make_shared<select_extra>();
    add_pack_common(ps, *pso);
    ps->add_option("--candidates", sxo->candidates, "candidate family file");
    ps->add_option("--minsup", sxo->minsup, "mine candidates at this absolute support");
    ps->add_option("--minsup-frac", sxo->minsup_frac, "mine candidates at this relative support");
    ps->add_option("--max-size", sxo->max_size, "drop candidate itemsets larger than this");
    ps->add_option("--mode", sxo->mode)->check(CLI::IsMember({"exhaustive", "greedy"}));
    ps->add_option("--propagate", sxo->propagate)->check(CLI::IsMember({"ancestors", "parents"}));
    ps->add_option("--emit-sources", sxo->emit_sources, "write per-attribute source sets as JSON");
    ps->callback([&, pso, sxo] {
        info.flags = json{{"algorithm", "select"},  {"mode", sxo->mode},
                          {"propagate", sxo->propagate}, {"no_cache", pso->no_cache},
                          {"max_size", sxo->max_size}};
        info.seed = pso->seed;
        auto ds = load_dataset(pso->input, pso->format, info);

        pm::itemset_family fam;
        if (!sxo->candidates.empty()) {
            std::ifstream in(sxo->candidates);
            if (!in)
                throw io_error("cannot open '" + sxo->candidates + "'");
            info.record_input(sxo->candidates);
            bool repaired = false;
            fam = pm::load_family(in, ds.attr_names(), &repaired);
            if (repaired)
                std::cerr << "warning: candidate family was not downward closed; "
                             "completed by closure\n";
        } else {
            std::uint64_t minsup = sxo->minsup;
            if (sxo->minsup_frac >= 0)
                minsup =
                    static_cast<std::uint64_t>(std::ceil(sxo->minsup_frac * ds.n_rows()));
            if (minsup < 1)
                throw CLI::ValidationError(
                    "--candidates", "give a candidates file or a --minsup/--minsup-frac");
            fam = pm::mine_frequent(ds, minsup);
        }
        if (sxo->max_size > 0)
            fam = fam.truncated(sxo->max_size);

        if (!fam.universe().empty() && *fam.universe().rbegin() >= ds.n_attrs())
            throw infeasible_error("candidate family names attribute "
                                   + std::to_string(*fam.universe().rbegin())
                                   + " beyond the dataset's " + std::to_string(ds.n_attrs()));

        pm::set_pack_options opt;
        opt.mode = sxo->mode == "greedy" ? pm::search_mode::greedy
                                         : pm::search_mode::exhaustive;
        opt.propagate = sxo->propagate == "parents" ? pm::propagate_mode::parents
                                                    : pm::propagate_mode::ancestors;
        opt.use_cache = !pso->no_cache;
        opt.threads = pso->threads;
        auto res = pm::set_pack(ds, fam, opt);

        auto sets = pm::model_sets(res.model);
        json rep = pack_report(sxo->mode == "greedy" ? "select-greedy" : "select", ds,
                               res.baseline, res.cost, sets);
        rep["n_candidates"] = fam.size();
        rep["n_passes"] = res.n_passes;
        rep["repaired_singletons"] = res.repaired_singletons;
        print_pack_report(rep, pso->pretty);
        emit_pack_outputs(*pso, info, ds, res.model, sets);
        if (!sxo->emit_sources.empty()) {
            json sources = json::array();
            for (pm::item_id a = 0; a < res.sources.size(); ++a)
                sources.push_back(json{{"attr", ds.attr_name(a)}, {"sources", [&] {
                                           std::vector<std::string> v;
                                           for (auto s : res.sources[a])
                                               v.push_back(ds.attr_name(s));
                                           return v;
                                       }()}});
            json out{{"sources", std::move(sources)}, {"marking_order", [&] {
                         std::vector<std::string> v;
                         for (auto a : res.marking_order)
                             v.push_back(ds.attr_name(a));
                         return v;
                     }()}};
            write_artifact(sxo->emit_sources, out.dump(2) + "\n", info);
        }
    });

    // ---- classify ----
    auto* cls = app.add_subcommand("classify", "compression-based classification holdout");
    struct {
        std::string input, format = "auto", label_col, labels, candidates, output;
        std::string algorithm = "greedy", mode = "greedy";
        double split = 0.9;
        std::uint64_t seed = 0, minsup = 0;
        bool prior = false, pretty = false;
        int threads = 0;
    } cf;
    cls->add_option("-i,--input", cf.input)->required();
    cls->add_option("--format", cf.format)->check(CLI::IsMember({"auto", "fimi", "csv"}));
    cls->add_option("--label-col", cf.label_col, "label column name (CSV input)");
    cls->add_option("--labels", cf.labels, "label file, one label per row (FIMI input)");
    cls->add_option("--split", cf.split, "training fraction");
    cls->add_option("--seed", cf.seed, "shuffle seed");
    cls->add_option("--algorithm", cf.algorithm)->check(CLI::IsMember({"greedy", "select"}));
    cls->add_option("--minsup", cf.minsup, "candidate support threshold for select");
    cls->add_option("--candidates", cf.candidates, "shared candidate family file for select");
    cls->add_option("--mode", cf.mode)->check(CLI::IsMember({"exhaustive", "greedy"}));
    cls->add_flag("--prior", cf.prior, "add -log(class fraction) to each code length");
    cls->add_option("-o,--output", cf.output, "write the report as JSON");
    cls->add_flag("--pretty", cf.pretty);
    cls->add_option("--threads", cf.threads)->envname("PACKMINER_THREADS");
    cls->callback([&] {
        if (cf.algorithm == "select" && cf.candidates.empty() && cf.minsup == 0)
            throw CLI::ValidationError("--algorithm",
                                       "select needs --minsup or --candidates");
        info.flags = json{{"algorithm", cf.algorithm}, {"split", cf.split},
                          {"prior", cf.prior}};
        info.seed = cf.seed;
        pm::labeled_dataset data = [&] {
            std::ifstream in(cf.input, std::ios::binary);
            if (!in)
                throw io_error("cannot open '" + cf.input + "'");
            info.record_input(cf.input);
            if (!cf.label_col.empty())
                return pm::load_labeled_csv(in, cf.label_col);
            if (cf.labels.empty())
                throw CLI::ValidationError("--labels",
                                           "give --label-col for CSV or --labels for FIMI");
            std::ifstream lab(cf.labels);
            if (!lab)
                throw io_error("cannot open '" + cf.labels + "'");
            info.record_input(cf.labels);
            return pm::load_fimi_with_labels(in, lab);
        }();

        pm::classify_options opt;
        opt.algorithm = cf.algorithm == "select" ? pm::train_algorithm::select
                                                 : pm::train_algorithm::greedy;
        opt.minsup = cf.minsup;
        opt.mode = cf.mode == "exhaustive" ? pm::search_mode::exhaustive
                                           : pm::search_mode::greedy;
        opt.add_prior = cf.prior;
        opt.threads = cf.threads;
        pm::itemset_family shared;
        if (!cf.candidates.empty()) {
            std::ifstream in(cf.candidates);
            if (!in)
                throw io_error("cannot open '" + cf.candidates + "'");
            info.record_input(cf.candidates);
            shared = pm::load_family(in, data.data.attr_names());
            opt.candidates = &shared;
        }

        auto rep = pm::evaluate(data, cf.split, cf.seed, opt);
        json out{{"accuracy", rep.accuracy},
                 {"n_train", rep.n_train},
                 {"n_test", rep.n_test},
                 {"classes", rep.classes},
                 {"train_counts", rep.train_counts},
                 {"confusion", rep.confusion}};
        if (cf.pretty)
            std::cout << "accuracy " << 100.0 * rep.accuracy << "% on " << rep.n_test
                      << " held-out rows (" << rep.n_train << " trained)\n";
        else
            std::cout << out.dump(2) << '\n';
        if (!cf.output.empty())
            write_artifact(cf.output, out.dump(2) + "\n", info);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const pm::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
}
