#pragma once

#include "automaton.hpp"
#include "pair_set.hpp"

#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ecidpda {

/// Brute-force pair semantics: runs A over the first i symbols of w (clocks
/// read on all of w) and returns the pairs (state at the start of the
/// longest well-nested suffix of the prefix, current state) over all
/// surviving computations.
inline PairSet pair_semantics_oracle(const Ecidpda& a, const TimedString& w, std::size_t i)
{
    if (i > w.size())
        throw std::out_of_range("prefix length exceeds the string");
    const std::size_t s = longest_well_nested_suffix_start(w, i);

    // (anchor, state, stack); the anchor is fixed once position s-1 is read.
    using Config = std::tuple<StateId, StateId, std::vector<StackId>>;
    std::set<Config> current;
    for (auto q : a.initial())
        current.insert({q, q, {}});

    auto enabled = [&](const Rule& r, std::size_t pos) { return eval(r.guard, w, pos); };

    for (std::size_t pos = 1; pos <= i; ++pos) {
        if (pos - 1 == s - 1) {
            std::set<Config> anchored;
            for (const auto& [anchor, q, stack] : current)
                anchored.insert({q, q, stack});
            current = std::move(anchored);
        }
        const auto sym = a.alphabet().require(w.at(pos).symbol);
        std::set<Config> next;
        for (const auto& [anchor, q, stack] : current) {
            for (const auto& r : a.rules()) {
                if (r.from != q || r.symbol != sym || !enabled(r, pos))
                    continue;
                auto st = stack;
                if (r.kind == RuleKind::call) {
                    st.push_back(*r.stack);
                } else if (r.kind == RuleKind::ret) {
                    if (st.empty()) {
                        if (r.stack)
                            continue;
                    } else {
                        if (!r.stack || *r.stack != st.back())
                            continue;
                        st.pop_back();
                    }
                }
                next.insert({anchor, r.to, std::move(st)});
            }
        }
        current = std::move(next);
    }
    if (s == i + 1) {
        std::set<Config> anchored;
        for (const auto& [anchor, q, stack] : current)
            anchored.insert({q, q, stack});
        current = std::move(anchored);
    }

    PairSet out(a.state_count());
    for (const auto& [anchor, q, stack] : current)
        out.insert(anchor, q);
    return out;
}

} // namespace ecidpda
