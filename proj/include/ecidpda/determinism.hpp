#pragma once

#include "automaton.hpp"
#include "exclusivity.hpp"
#include "guard_syntax.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ecidpda {

struct DeterminismVerdict {
    bool deterministic = true;
    std::string reason;                                        // empty when deterministic
    std::optional<std::pair<std::size_t, std::size_t>> rules;  // offending rule pair, if any

    explicit operator bool() const noexcept { return deterministic; }
};

/// Conservative determinism check: a unique initial state and, for every
/// two rules sharing (state, symbol[, popped symbol]), provably exclusive
/// guards. Guards that merely might overlap count as nondeterminism.
inline DeterminismVerdict is_deterministic(const Ecidpda& a)
{
    if (a.initial().size() != 1)
        return {false, "automaton has " + std::to_string(a.initial().size()) + " initial states", std::nullopt};

    std::map<std::pair<std::size_t, std::size_t>, bool> exclusive_cache;
    auto exclusive = [&](std::size_t r1, std::size_t r2) {
        auto g1 = a.guard_id(r1);
        auto g2 = a.guard_id(r2);
        if (g1 > g2)
            std::swap(g1, g2);
        auto [it, fresh] = exclusive_cache.emplace(std::make_pair(g1, g2), false);
        if (fresh)
            it->second = mutually_exclusive(a.rules()[r1].guard, a.rules()[r2].guard)
                         == Exclusivity::provably_exclusive;
        return it->second;
    };

    auto check_group = [&](std::span<const std::size_t> group) -> std::optional<DeterminismVerdict> {
        for (std::size_t x = 0; x < group.size(); ++x) {
            for (std::size_t y = x + 1; y < group.size(); ++y) {
                const Rule& r1 = a.rules()[group[x]];
                const Rule& r2 = a.rules()[group[y]];
                // A repeated rule denotes the same transition.
                if (r1.to == r2.to && r1.stack == r2.stack && r1.guard == r2.guard)
                    continue;
                if (exclusive(group[x], group[y]))
                    continue;
                DeterminismVerdict v{false, {}, std::make_pair(group[x], group[y])};
                v.reason = "state '" + a.states()[r1.from] + "' on '" + a.alphabet().symbol(r1.symbol)
                           + "': guards '" + to_string(r1.guard) + "' and '" + to_string(r2.guard)
                           + "' may hold together";
                return v;
            }
        }
        return std::nullopt;
    };

    // Rules sharing (state, symbol, popped symbol) form one group.
    std::vector<std::size_t> order(a.rules().size());
    for (std::size_t r = 0; r < order.size(); ++r)
        order[r] = r;
    auto key = [&](std::size_t r) {
        const Rule& rule = a.rules()[r];
        const std::size_t pop = rule.kind == RuleKind::ret && rule.stack ? *rule.stack + 1 : 0;
        return std::make_tuple(rule.from, rule.symbol, pop);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin + 1;
        while (end < order.size() && key(order[end]) == key(order[begin]))
            ++end;
        if (auto bad = check_group(std::span<const std::size_t>(order.data() + begin, end - begin)))
            return *bad;
        begin = end;
    }
    return {};
}

} // namespace ecidpda
