#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <packminer/synthetic.hpp>

namespace fs = std::filesystem;

namespace {

const std::string bin = PACKMINER_BIN;

struct temp_dir {
    fs::path path;
    temp_dir()
    {
        path = fs::temp_directory_path()
               / ("packminer_cli_test_" + std::to_string(::getpid()) + "_"
                  + std::to_string(counter()));
        fs::create_directories(path);
    }
    ~temp_dir() { fs::remove_all(path); }
    static int counter()
    {
        static int c = 0;
        return c++;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null")
{
    const std::string cmd = bin + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
}

void write_fimi(const std::string& path, const packminer::binary_dataset& ds)
{
    std::ofstream out(path);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        bool first = true;
        for (packminer::item_id a = 0; a < ds.n_attrs(); ++a)
            if (ds.column(a).test(r)) {
                out << (first ? "" : " ") << a;
                first = false;
            }
        out << '\n';
    }
}

const char* d0_fimi = "0 1\n0\n1 2\n2\n";

} // namespace

TEST_CASE("stats")
{
    temp_dir tmp;
    write_file(tmp.file("d0.dat"), d0_fimi);
    const auto out = tmp.file("stats.json");
    REQUIRE(run("stats -i " + tmp.file("d0.dat"), out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("\"n_rows\": 4") != std::string::npos);
    CHECK(text.find("\"n_attrs\": 3") != std::string::npos);
    CHECK(text.find("\"density_percent\": 50.0") != std::string::npos);
}

TEST_CASE("mine writes a six-line family for D0 at minsup 1")
{
    temp_dir tmp;
    write_file(tmp.file("d0.dat"), d0_fimi);
    const auto fam = tmp.file("family.txt");
    REQUIRE(run("mine -i " + tmp.file("d0.dat") + " --minsup 1 -o " + fam) == 0);
    std::istringstream lines(slurp(fam));
    std::string line;
    int n = 0;
    while (std::getline(lines, line))
        ++n;
    CHECK(n == 6);
    CHECK(slurp(fam).find("{} : 4") != std::string::npos);
    CHECK(fs::exists(fam + ".manifest.json"));
}

TEST_CASE("pack greedy on D0 reports ratio 100 and the four sets")
{
    temp_dir tmp;
    write_file(tmp.file("d0.dat"), d0_fimi);
    const auto rep = tmp.file("report.json");
    const auto model = tmp.file("model.json");
    const auto sets = tmp.file("sets.txt");
    REQUIRE(run("pack greedy -i " + tmp.file("d0.dat") + " -o " + model
                    + " --emit-itemsets " + sets,
                rep)
            == 0);
    const std::string report = slurp(rep);
    CHECK(report.find("\"ratio_percent\": 100.0") != std::string::npos);
    CHECK(report.find("\"n_splits\": 0") != std::string::npos);
    CHECK(slurp(sets) == "{}\n0\n1\n2\n");
    CHECK(fs::exists(model + ".manifest.json"));
}

TEST_CASE("missing input exits 1, bad flags exit 2")
{
    temp_dir tmp;
    CHECK(run("stats -i " + tmp.file("nope.dat")) == 1);
    write_file(tmp.file("d0.dat"), d0_fimi);
    CHECK(run("pack select -i " + tmp.file("d0.dat") + " --minsup 1 --propagate bogus") == 2);
    CHECK(run("pack greedy") == 2); // missing required --input
    CHECK(run("pack select -i " + tmp.file("d0.dat")) == 2); // no candidates source
}

TEST_CASE("golden determinism across reruns and cache modes")
{
    temp_dir tmp;
    const auto data = tmp.file("chain.dat");
    write_fimi(data, packminer::make_chain(400, 8, 4));

    auto pack_once = [&](const std::string& tag, const std::string& extra) {
        const auto model = tmp.file("model_" + tag + ".json");
        const auto sets = tmp.file("sets_" + tag + ".txt");
        const auto dot = tmp.file("graph_" + tag + ".dot");
        REQUIRE(run("pack greedy -i " + data + " -o " + model + " --emit-itemsets " + sets
                        + " --emit-dot " + dot + " --seed 7 " + extra,
                    tmp.file("rep_" + tag + ".json"))
                == 0);
        return slurp(model) + "\x1f" + slurp(sets) + "\x1f" + slurp(dot) + "\x1f"
               + slurp(tmp.file("rep_" + tag + ".json"));
    };
    const std::string a = pack_once("a", "");
    const std::string b = pack_once("b", "");
    CHECK(a == b);
    const std::string c = pack_once("c", "--no-cache");
    CHECK(a == c);

    auto select_once = [&](const std::string& tag, const std::string& extra) {
        const auto model = tmp.file("smodel_" + tag + ".json");
        REQUIRE(run("pack select -i " + data + " --minsup 40 -o " + model + " " + extra,
                    tmp.file("srep_" + tag + ".json"))
                == 0);
        return slurp(model) + "\x1f" + slurp(tmp.file("srep_" + tag + ".json"));
    };
    const std::string sa = select_once("a", "");
    const std::string sb = select_once("b", "");
    CHECK(sa == sb);
    const std::string sc = select_once("c", "--no-cache");
    CHECK(sa == sc);
}

TEST_CASE("extract from a saved model matches the emitted list")
{
    temp_dir tmp;
    const auto data = tmp.file("chain.dat");
    write_fimi(data, packminer::make_chain(300, 6, 11));
    const auto model = tmp.file("model.json");
    const auto sets = tmp.file("sets.txt");
    REQUIRE(run("pack greedy -i " + data + " -o " + model + " --emit-itemsets " + sets) == 0);
    const auto sets2 = tmp.file("sets2.txt");
    REQUIRE(run("extract --model " + model + " -o " + sets2) == 0);
    CHECK(slurp(sets) == slurp(sets2));

    SECTION("drop-empty removes exactly the {} line")
    {
        const auto sets3 = tmp.file("sets3.txt");
        REQUIRE(run("extract --model " + model + " -o " + sets3 + " --drop-empty") == 0);
        CHECK(slurp(sets2).find("{}\n") == 0);
        CHECK(slurp(sets3) == slurp(sets2).substr(3));
    }
}

TEST_CASE("pack select accepts an external candidates file")
{
    temp_dir tmp;
    write_file(tmp.file("d0.dat"), d0_fimi);
    write_file(tmp.file("family.txt"), "{}\n0\n1\n2\n0 1\n");
    REQUIRE(run("pack select -i " + tmp.file("d0.dat") + " --candidates "
                    + tmp.file("family.txt"),
                tmp.file("rep.json"))
            == 0);
    const std::string rep = slurp(tmp.file("rep.json"));
    CHECK(rep.find("\"ratio_percent\": 100.0") != std::string::npos);
}

TEST_CASE("flag breadth: pretty, fractions, max-size, modes, env threads")
{
    temp_dir tmp;
    write_file(tmp.file("d0.dat"), d0_fimi);
    const auto chain = tmp.file("chain.dat");
    write_fimi(chain, packminer::make_chain(300, 6, 8));

    SECTION("pretty stats")
    {
        const auto out = tmp.file("stats.txt");
        REQUIRE(run("stats -i " + tmp.file("d0.dat") + " --pretty", out) == 0);
        CHECK(slurp(out) == "rows 4, attrs 3, 50% of 1s\n");
    }
    SECTION("mine with a fractional threshold")
    {
        const auto fam = tmp.file("fam.txt");
        // 0.5 of 4 rows = support 2: empty set plus the three singletons
        REQUIRE(run("mine -i " + tmp.file("d0.dat") + " --minsup-frac 0.5 -o " + fam) == 0);
        CHECK(slurp(fam) == "{} : 4\n0 : 2\n1 : 2\n2 : 2\n");
    }
    SECTION("select with max-size, greedy mode and parents propagation")
    {
        REQUIRE(run("pack select -i " + chain
                        + " --minsup 30 --max-size 2 --mode greedy --propagate parents",
                    tmp.file("rep.json"))
                == 0);
        CHECK(slurp(tmp.file("rep.json")).find("\"algorithm\": \"select-greedy\"")
              != std::string::npos);
    }
    SECTION("classify select without a candidate source exits 2")
    {
        CHECK(run("classify -i " + chain + " --labels /dev/null --algorithm select") == 2);
    }
    SECTION("thread env variable is accepted")
    {
        const std::string cmd = "PACKMINER_THREADS=2 " + bin + " pack greedy -i " + chain
                                + " > /dev/null 2>/dev/null";
        const int status = std::system(cmd.c_str());
        CHECK((WIFEXITED(status) && WEXITSTATUS(status) == 0));
    }
}

TEST_CASE("classify runs a holdout end to end")
{
    temp_dir tmp;
    auto chain = packminer::make_chain(150, 6, 2);
    auto indep = packminer::make_independent(150, 6, 3);
    std::ostringstream csv;
    csv << "c0,c1,c2,c3,c4,c5,label\n";
    auto dump = [&](const packminer::binary_dataset& ds, const char* label) {
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            for (packminer::item_id a = 0; a < 6; ++a)
                csv << (ds.column(a).test(r) ? '1' : '0') << ',';
            csv << label << '\n';
        }
    };
    dump(chain, "chain");
    dump(indep, "noise");
    write_file(tmp.file("two.csv"), csv.str());

    const auto rep = tmp.file("report.json");
    REQUIRE(run("classify -i " + tmp.file("two.csv") + " --label-col label --split 0.8 --seed 5 -o "
                    + tmp.file("out.json"),
                rep)
            == 0);
    CHECK(slurp(rep).find("\"accuracy\"") != std::string::npos);
    CHECK(fs::exists(tmp.file("out.json")));
}
