#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace packminer {

//! Fixed-width bitmap over transaction indices. Intersection + popcount is
//! the hot kernel of every split evaluation, so those paths avoid allocation.
class row_set {
public:
    row_set() = default;

    explicit row_set(std::size_t n_bits, bool fill = false)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, fill ? ~std::uint64_t{0} : 0)
    {
        trim_tail();
    }

    static row_set full(std::size_t n_bits) { return row_set(n_bits, true); }

    std::size_t size() const { return n_bits_; }

    bool test(std::size_t i) const
    {
        assert(i < n_bits_);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(std::size_t i)
    {
        assert(i < n_bits_);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }

    void reset(std::size_t i)
    {
        assert(i < n_bits_);
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += std::popcount(w);
        return c;
    }

    bool any() const
    {
        for (auto w : words_)
            if (w)
                return true;
        return false;
    }

    row_set& operator&=(const row_set& o)
    {
        check_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }

    row_set& operator|=(const row_set& o)
    {
        check_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= o.words_[i];
        return *this;
    }

    friend row_set operator&(row_set a, const row_set& b) { return a &= b; }
    friend row_set operator|(row_set a, const row_set& b) { return a |= b; }

    //! this \ o
    row_set and_not(const row_set& o) const
    {
        check_size(o);
        row_set r(n_bits_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            r.words_[i] = words_[i] & ~o.words_[i];
        return r;
    }

    //! popcount(this & o) without materializing the intersection
    std::size_t count_and(const row_set& o) const
    {
        check_size(o);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }

    //! popcount(this & a & b)
    std::size_t count_and(const row_set& a, const row_set& b) const
    {
        check_size(a);
        check_size(b);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += std::popcount(words_[i] & a.words_[i] & b.words_[i]);
        return c;
    }

    bool is_subset_of(const row_set& o) const
    {
        check_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    bool operator==(const row_set&) const = default;

    //! visit set bit indices in ascending order
    template <typename F>
    void for_each(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t x = words_[w];
            while (x) {
                f(w * 64 + std::countr_zero(x));
                x &= x - 1;
            }
        }
    }

private:
    void check_size(const row_set& o) const
    {
        if (n_bits_ != o.n_bits_)
            throw std::invalid_argument("row_set size mismatch");
    }

    void trim_tail()
    {
        if (n_bits_ % 64 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (n_bits_ % 64)) - 1;
    }

    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace packminer
