#pragma once

#include "automaton.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace ecidpda {

namespace detail {

class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const noexcept { return size_; }
    bool test(std::size_t i) const { return ((words_[i >> 6] >> (i & 63)) & 1U) != 0; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    bool any() const noexcept
    {
        for (auto w : words_)
            if (w != 0)
                return true;
        return false;
    }

    std::size_t count() const noexcept
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    Bits& operator|=(const Bits& other)
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= other.words_[i];
        return *this;
    }

    bool intersects(const Bits& other) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if ((words_[i] & other.words_[i]) != 0)
                return true;
        return false;
    }

    template <class F>
    void for_each(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word != 0) {
                const int bit = std::countr_zero(word);
                f(w * 64 + static_cast<std::size_t>(bit));
                word &= word - 1;
            }
        }
    }

    std::size_t hash() const noexcept
    {
        std::size_t h = size_ * 0x9e3779b97f4a7c15ULL;
        for (auto w : words_)
            h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

    friend bool operator==(const Bits& a, const Bits& b)
    {
        return a.size_ == b.size_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
    }
    friend bool operator<(const Bits& a, const Bits& b)
    {
        if (a.size_ != b.size_)
            return a.size_ < b.size_;
        return std::lexicographical_compare(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
    }

private:
    std::size_t size_ = 0;
    boost::container::small_vector<std::uint64_t, 2> words_;
};

} // namespace detail

/// Set of states of a source automaton with n states.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t n) : bits_(n) {}

    static StateSet all(std::size_t n)
    {
        StateSet s(n);
        for (std::size_t q = 0; q < n; ++q)
            s.insert(q);
        return s;
    }

    std::size_t universe() const noexcept { return bits_.size(); }
    bool contains(StateId q) const { return bits_.test(q); }
    void insert(StateId q) { bits_.set(q); }
    bool empty() const noexcept { return !bits_.any(); }
    std::size_t size() const noexcept { return bits_.count(); }
    StateSet& operator|=(const StateSet& o)
    {
        bits_ |= o.bits_;
        return *this;
    }
    bool intersects(const StateSet& o) const { return bits_.intersects(o.bits_); }

    template <class F>
    void for_each(F&& f) const
    {
        bits_.for_each(std::forward<F>(f));
    }

    std::vector<StateId> members() const
    {
        std::vector<StateId> out;
        for_each([&](std::size_t q) { out.push_back(q); });
        return out;
    }

    std::size_t hash() const noexcept { return bits_.hash(); }
    friend bool operator==(const StateSet&, const StateSet&) = default;
    friend bool operator<(const StateSet& a, const StateSet& b) { return a.bits_ < b.bits_; }

private:
    detail::Bits bits_;
};

/// Set of pairs (p, q) of source states, stored row-major in an n*n bitset.
class PairSet {
public:
    PairSet() = default;
    explicit PairSet(std::size_t n) : n_(n), bits_(n * n) {}

    static PairSet diagonal(const StateSet& states)
    {
        PairSet p(states.universe());
        states.for_each([&](std::size_t q) { p.insert(q, q); });
        return p;
    }

    std::size_t universe() const noexcept { return n_; }
    bool contains(StateId p, StateId q) const { return bits_.test(p * n_ + q); }
    void insert(StateId p, StateId q) { bits_.set(p * n_ + q); }
    bool empty() const noexcept { return !bits_.any(); }
    std::size_t size() const noexcept { return bits_.count(); }

    template <class F>
    void for_each(F&& f) const
    {
        bits_.for_each([&](std::size_t k) { f(k / n_, k % n_); });
    }

    std::vector<std::pair<StateId, StateId>> pairs() const
    {
        std::vector<std::pair<StateId, StateId>> out;
        for_each([&](StateId p, StateId q) { out.emplace_back(p, q); });
        return out;
    }

    StateSet second_components() const
    {
        StateSet s(n_);
        for_each([&](StateId, StateId q) { s.insert(q); });
        return s;
    }

    std::size_t hash() const noexcept { return bits_.hash(); }
    friend bool operator==(const PairSet&, const PairSet&) = default;
    friend bool operator<(const PairSet& a, const PairSet& b) { return a.bits_ < b.bits_; }

private:
    std::size_t n_ = 0;
    detail::Bits bits_;
};

inline PairSet make_pair_set(std::size_t n, const std::vector<std::pair<StateId, StateId>>& pairs)
{
    PairSet p(n);
    for (const auto& [a, b] : pairs)
        p.insert(a, b);
    return p;
}

/// Canonical text: P{(q0,q1),(q1,q1)}.
inline std::string format_pair_set(const PairSet& p, const std::vector<std::string>& names)
{
    std::string out = "P{";
    bool first = true;
    p.for_each([&](StateId a, StateId b) {
        if (!first)
            out += ',';
        first = false;
        out += '(' + names[a] + ',' + names[b] + ')';
    });
    return out + '}';
}

/// Canonical text: R{q0,q2}.
inline std::string format_state_set(const StateSet& s, const std::vector<std::string>& names)
{
    std::string out = "R{";
    bool first = true;
    s.for_each([&](StateId q) {
        if (!first)
            out += ',';
        first = false;
        out += names[q];
    });
    return out + '}';
}

} // namespace ecidpda
