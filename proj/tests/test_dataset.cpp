#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include <packminer/dataset.hpp>

#include "oracles.hpp"

using namespace packminer;

namespace {
// D0: rows over (a,b,c) = 110, 100, 011, 001
binary_dataset d0()
{
    return binary_dataset::from_rows(3, {{0, 1}, {0}, {1, 2}, {2}});
}
} // namespace

TEST_CASE("fimi loading")
{
    std::istringstream in("0 1\n0\n1 2\n2\n");
    auto ds = binary_dataset::load_fimi(in);
    CHECK(ds.n_rows() == 4);
    CHECK(ds.n_attrs() == 3);
    CHECK(ds.frequency(itemset{0}) == 0.5);

    SECTION("crlf and blank transaction lines")
    {
        std::istringstream crlf("0 1\r\n\r\n2\r\n");
        auto d = binary_dataset::load_fimi(crlf);
        CHECK(d.n_rows() == 3);
        CHECK(d.n_attrs() == 3);
        CHECK(d.support(itemset{2}) == 1);
    }

    SECTION("empty input errors")
    {
        std::istringstream empty("");
        CHECK_THROWS_AS(binary_dataset::load_fimi(empty), parse_error);
    }

    SECTION("malformed line reports its number")
    {
        std::istringstream bad("0 1\n0 x\n");
        try {
            binary_dataset::load_fimi(bad);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line == 2);
        }
    }

    SECTION("gapped ids are renumbered, names keep the original ids")
    {
        std::istringstream gap("3 7\n3\n");
        auto d = binary_dataset::load_fimi(gap);
        CHECK(d.n_attrs() == 2);
        CHECK(d.renumbered());
        CHECK(d.attr_name(0) == "3");
        CHECK(d.attr_name(1) == "7");
    }
}

TEST_CASE("csv01 loading")
{
    std::istringstream in("a,b\n1,0\n0,1\n");
    auto ds = binary_dataset::load_csv01(in);
    CHECK(ds.n_rows() == 2);
    CHECK(ds.n_attrs() == 2);
    CHECK(ds.attr_name(0) == "a");
    CHECK(ds.column(0).test(0));
    CHECK_FALSE(ds.column(0).test(1));
    CHECK(ds.column(1).test(1));

    SECTION("non-binary cell errors")
    {
        std::istringstream bad("a,b\n1,2\n");
        CHECK_THROWS_AS(binary_dataset::load_csv01(bad), parse_error);
    }
    SECTION("empty input errors")
    {
        std::istringstream empty("");
        CHECK_THROWS_AS(binary_dataset::load_csv01(empty), parse_error);
    }
}

TEST_CASE("frequency on the D0 fixture")
{
    auto ds = d0();
    CHECK(ds.frequency(itemset{}) == 1.0);
    CHECK(ds.frequency(itemset{0, 1}) == 0.25);
    CHECK(ds.frequency(itemset{0, 2}) == 0.0);
    CHECK_THROWS_AS(ds.frequency(itemset{5}), std::out_of_range);
}

TEST_CASE("select_rows")
{
    auto ds = d0();
    CHECK(ds.select_rows({}).count() == 4);

    std::vector<signed_literal> a_pos{{0, true}};
    auto rows = ds.select_rows(a_pos);
    CHECK(rows.count() == 2);
    CHECK(rows.test(0));
    CHECK(rows.test(1));

    std::vector<signed_literal> an_bp{{0, false}, {1, true}};
    auto rows2 = ds.select_rows(an_bp);
    CHECK(rows2.count() == 1);
    CHECK(rows2.test(2));

    std::vector<signed_literal> dup{{0, true}, {0, false}};
    CHECK_THROWS_AS(ds.select_rows(dup), std::invalid_argument);
}

TEST_CASE("value_counts")
{
    auto ds = d0();
    auto all = ds.all_rows();
    CHECK(ds.value_counts(all, 1) == std::pair<std::uint64_t, std::uint64_t>{2, 2});

    std::vector<signed_literal> a_pos{{0, true}};
    CHECK(ds.value_counts(ds.select_rows(a_pos), 1)
          == std::pair<std::uint64_t, std::uint64_t>{1, 1});
    CHECK(ds.value_counts(row_set(4), 2) == std::pair<std::uint64_t, std::uint64_t>{0, 0});
}

TEST_CASE("frequency is antimonotone (exhaustive, random data)")
{
    std::mt19937_64 g(7);
    auto ds = oracles::random_dataset(40, 6, g);
    const std::size_t k = ds.n_attrs();
    for (std::uint64_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<item_id> items;
        for (std::size_t a = 0; a < k; ++a)
            if (mask >> a & 1)
                items.push_back(static_cast<item_id>(a));
        itemset x(items);
        const double fx = ds.frequency(x);
        for (item_id a : x.items())
            CHECK(ds.frequency(x.without(a)) >= fx);
        CHECK(ds.support(x) == oracles::support_by_row_scan(ds, x));
    }
}

TEST_CASE("positive and negative selections partition the rows")
{
    std::mt19937_64 g(11);
    auto ds = oracles::random_dataset(33, 5, g);
    for (item_id a = 0; a < ds.n_attrs(); ++a) {
        std::vector<signed_literal> pos{{a, true}}, neg{{a, false}};
        auto rp = ds.select_rows(pos), rn = ds.select_rows(neg);
        CHECK((rp & rn).count() == 0);
        CHECK((rp | rn).count() == ds.n_rows());
    }
}

TEST_CASE("value_counts sums componentwise over a row partition")
{
    std::mt19937_64 g(13);
    auto ds = oracles::random_dataset(50, 4, g);
    std::vector<signed_literal> pos{{0, true}}, neg{{0, false}};
    auto rp = ds.select_rows(pos), rn = ds.select_rows(neg);
    for (item_id a = 1; a < ds.n_attrs(); ++a) {
        auto [p0, p1] = ds.value_counts(rp, a);
        auto [n0, n1] = ds.value_counts(rn, a);
        auto [t0, t1] = ds.value_counts(ds.all_rows(), a);
        CHECK(p0 + n0 == t0);
        CHECK(p1 + n1 == t1);
    }
}
