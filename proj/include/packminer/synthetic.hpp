#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dataset.hpp"

namespace packminer {

namespace detail {

// uniform in [0,1) built from raw mt19937_64 output; identical across
// platforms, unlike std distributions
inline double unit_double(std::mt19937_64& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

} // namespace detail

//! Every attribute an independent fair coin.
inline binary_dataset make_independent(std::size_t n_rows, std::size_t n_attrs,
                                       std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    std::vector<row_set> cols(n_attrs, row_set(n_rows));
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t a = 0; a < n_attrs; ++a)
            if (g() & 1)
                cols[a].set(r);
    return binary_dataset(n_rows, std::move(cols), {});
}

//! First attribute a fair coin; each following attribute copies the
//! previous one with probability `copy_prob`, otherwise flips it.
inline binary_dataset make_chain(std::size_t n_rows, std::size_t n_attrs, std::uint64_t seed,
                                 double copy_prob = 0.9)
{
    std::mt19937_64 g(seed);
    std::vector<row_set> cols(n_attrs, row_set(n_rows));
    for (std::size_t r = 0; r < n_rows; ++r) {
        bool v = g() & 1;
        if (v)
            cols[0].set(r);
        for (std::size_t a = 1; a < n_attrs; ++a) {
            if (detail::unit_double(g) >= copy_prob)
                v = !v;
            if (v)
                cols[a].set(r);
        }
    }
    return binary_dataset(n_rows, std::move(cols), {});
}

} // namespace packminer
