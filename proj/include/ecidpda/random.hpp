#pragma once

#include "automaton.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ecidpda {

using Rng = std::mt19937_64;

inline PartitionedAlphabet default_random_alphabet()
{
    return PartitionedAlphabet({"<"}, {">"}, {"a", "b"});
}

struct RandomAutomatonOptions {
    std::size_t max_states = 4;
    std::size_t max_stack = 2;
    std::size_t max_atoms = 3; // 0 gives an untimed (all guards true) automaton
    std::size_t max_guard_depth = 3;
    std::size_t max_rules_per_slot = 2;
    unsigned true_guard_percent = 30;
};

struct RandomStringOptions {
    std::size_t max_length = 12;
};

namespace detail {

inline std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline const std::vector<Rational>& constant_pool()
{
    static const std::vector<Rational> pool{Rational(0), Rational(1, 2), Rational(1), Rational(3, 2), Rational(2)};
    return pool;
}

inline const std::vector<Rational>& increment_pool()
{
    static const std::vector<Rational> pool{Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1),
                                            Rational(3, 2)};
    return pool;
}

inline Clock random_clock(Rng& rng, const PartitionedAlphabet& alphabet)
{
    switch (pick(rng, 4)) {
    case 0:
        return Clock::history(alphabet.symbol(pick(rng, alphabet.size())));
    case 1:
        return Clock::prediction(alphabet.symbol(pick(rng, alphabet.size())));
    case 2:
        return Clock::stack_history();
    default:
        return Clock::stack_prediction();
    }
}

inline std::vector<AtomicConstraint> random_atom_pool(Rng& rng, const PartitionedAlphabet& alphabet, std::size_t max)
{
    std::vector<AtomicConstraint> pool;
    const std::size_t count = 1 + pick(rng, max);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& constants = constant_pool();
        pool.push_back({random_clock(rng, alphabet), pick(rng, 2) == 0 ? Comparison::at_most : Comparison::at_least,
                        constants[pick(rng, constants.size())]});
    }
    return pool;
}

inline Constraint random_formula(Rng& rng, const std::vector<AtomicConstraint>& pool, std::size_t depth)
{
    if (depth == 0 || pick(rng, 3) == 0) {
        auto a = Constraint::atom(pool[pick(rng, pool.size())]);
        return pick(rng, 3) == 0 ? Constraint::negate(a) : a;
    }
    switch (pick(rng, 3)) {
    case 0:
        return Constraint::conj(random_formula(rng, pool, depth - 1), random_formula(rng, pool, depth - 1));
    case 1:
        return Constraint::disj(random_formula(rng, pool, depth - 1), random_formula(rng, pool, depth - 1));
    default:
        return Constraint::negate(random_formula(rng, pool, depth - 1));
    }
}

} // namespace detail

inline Constraint random_guard(Rng& rng, const std::vector<AtomicConstraint>& pool, const RandomAutomatonOptions& o)
{
    if (pool.empty() || detail::pick(rng, 100) < o.true_guard_percent)
        return Constraint::top();
    return detail::random_formula(rng, pool, o.max_guard_depth);
}

/// Random automaton over `alphabet`, with at least one initial and one
/// accepting state. Every (state, symbol[, popped]) slot gets 0..max rules.
inline Ecidpda random_automaton(Rng& rng, const PartitionedAlphabet& alphabet, const RandomAutomatonOptions& o = {})
{
    using detail::pick;
    const std::size_t n = 1 + pick(rng, o.max_states);
    const std::size_t k = 1 + pick(rng, o.max_stack);
    std::vector<AtomicConstraint> pool;
    if (o.max_atoms > 0)
        pool = detail::random_atom_pool(rng, alphabet, o.max_atoms);

    std::vector<std::string> states;
    for (std::size_t q = 0; q < n; ++q)
        states.push_back("q" + std::to_string(q));
    std::vector<std::string> stack;
    for (std::size_t s = 0; s < k; ++s)
        stack.push_back("g" + std::to_string(s));

    std::vector<StateId> initial, accepting;
    for (StateId q = 0; q < n; ++q) {
        if (pick(rng, 2) == 0)
            initial.push_back(q);
        if (pick(rng, 2) == 0)
            accepting.push_back(q);
    }
    if (initial.empty())
        initial.push_back(pick(rng, n));
    if (accepting.empty())
        accepting.push_back(pick(rng, n));

    std::vector<Rule> rules;
    auto slot = [&](RuleKind kind, StateId q, std::size_t sym, std::optional<StackId> pop) {
        const std::size_t count = pick(rng, o.max_rules_per_slot + 1);
        for (std::size_t r = 0; r < count; ++r) {
            Rule rule{kind, q, sym, random_guard(rng, pool, o), pick(rng, n), pop};
            if (kind == RuleKind::call)
                rule.stack = pick(rng, k);
            rules.push_back(std::move(rule));
        }
    };
    for (StateId q = 0; q < n; ++q)
        for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
            switch (alphabet.kind(sym)) {
            case SymbolKind::internal:
                slot(RuleKind::internal, q, sym, std::nullopt);
                break;
            case SymbolKind::call:
                slot(RuleKind::call, q, sym, std::nullopt);
                break;
            case SymbolKind::ret:
                slot(RuleKind::ret, q, sym, std::nullopt);
                for (StackId s = 0; s < k; ++s)
                    slot(RuleKind::ret, q, sym, s);
                break;
            }
        }
    return Ecidpda(alphabet, std::move(states), std::move(initial), std::move(accepting), std::move(stack),
                   std::move(rules));
}

/// Random timed string of length 0..max_length; brackets need not match.
inline TimedString random_timed_string(Rng& rng, const PartitionedAlphabet& alphabet, const RandomStringOptions& o = {})
{
    using detail::pick;
    const std::size_t length = pick(rng, o.max_length + 1);
    std::vector<TimedEvent> events;
    Rational t(0);
    for (std::size_t i = 0; i < length; ++i) {
        const auto& inc = detail::increment_pool();
        t += inc[pick(rng, inc.size())];
        events.push_back({alphabet.symbol(pick(rng, alphabet.size())), t});
    }
    return TimedString(alphabet, std::move(events));
}

/// Same symbol distribution as random_timed_string with unit spacing.
inline TimedString random_untimed_string(Rng& rng, const PartitionedAlphabet& alphabet, const RandomStringOptions& o = {})
{
    using detail::pick;
    const std::size_t length = pick(rng, o.max_length + 1);
    std::vector<TimedEvent> events;
    for (std::size_t i = 0; i < length; ++i)
        events.push_back({alphabet.symbol(pick(rng, alphabet.size())), Rational(static_cast<long long>(i + 1))});
    return TimedString(alphabet, std::move(events));
}

/// splitmix64 step, for deriving independent sub-seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace ecidpda
