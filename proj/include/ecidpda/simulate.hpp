#pragma once

#include "automaton.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ecidpda {

struct Configuration {
    StateId state = 0;
    std::vector<StackId> stack; // top at back

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Reachable configurations after one prefix.
struct TraceStep {
    std::size_t stack_height = 0;
    std::vector<StateId> states; // sorted, distinct
    std::size_t configurations = 0;
};

/// One step of an accepting computation: the rule fired at that position
/// and the state it led to.
struct WitnessStep {
    std::size_t rule = 0;
    StateId state = 0;
};

struct RunResult {
    bool accepted = false;
    std::vector<Configuration> final_configs;
    std::vector<TraceStep> trace;  // one entry per prefix length 0..|w|
    std::size_t max_configurations = 0;
    std::optional<StateId> witness_start;
    std::optional<std::vector<WitnessStep>> witness;

    std::vector<StateId> final_states() const
    {
        std::vector<StateId> out;
        for (const auto& c : final_configs)
            out.push_back(c.state);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

struct SimulateOptions {
    bool record_trace = true;
    bool record_witness = false;
};

namespace detail {

/// Maps each position of w to the automaton's symbol index, checking classes.
inline std::vector<std::size_t> translate_symbols(const Ecidpda& a, const TimedString& w)
{
    std::vector<std::size_t> ids;
    ids.reserve(w.size());
    for (std::size_t i = 1; i <= w.size(); ++i) {
        const auto& symbol = w.at(i).symbol;
        const auto idx = a.alphabet().index_of(symbol);
        if (!idx)
            throw std::invalid_argument("position " + std::to_string(i) + ": symbol '" + symbol
                                        + "' is outside the automaton's alphabet");
        if (a.alphabet().kind(*idx) != w.kind(i))
            throw std::invalid_argument("symbol '" + symbol + "' has a different class in the automaton's alphabet");
        ids.push_back(*idx);
    }
    return ids;
}

/// Lazily evaluated truth of each distinct guard at one position.
class GuardCache {
public:
    GuardCache(const Ecidpda& a, const TimedString& w) : a_(a), w_(w) {}

    void move_to(std::size_t position)
    {
        position_ = position;
        atom_truth_.assign(a_.atoms().size(), -1);
        guard_truth_.assign(a_.distinct_guards().size(), -1);
    }

    bool rule_enabled(std::size_t rule)
    {
        auto& slot = guard_truth_[a_.guard_id(rule)];
        if (slot < 0)
            slot = a_.compiled_guard(rule).evaluate([this](std::size_t k) { return atom(k); }) ? 1 : 0;
        return slot == 1;
    }

private:
    bool atom(std::size_t k)
    {
        auto& slot = atom_truth_[k];
        if (slot < 0)
            slot = eval(a_.atoms()[k], w_, position_) ? 1 : 0;
        return slot == 1;
    }

    const Ecidpda& a_;
    const TimedString& w_;
    std::size_t position_ = 0;
    std::vector<signed char> atom_truth_;
    std::vector<signed char> guard_truth_;
};

} // namespace detail

/// Exact nondeterministic run: tracks the full set of reachable
/// configurations position by position. Computations with no applicable
/// rule die; acceptance needs some surviving configuration in F.
inline RunResult simulate(const Ecidpda& a, const TimedString& w, SimulateOptions options = {})
{
    struct Node {
        Configuration config;
        std::size_t parent;
        std::size_t rule;
    };

    const auto symbols = detail::translate_symbols(a, w);
    detail::GuardCache guards(a, w);
    RunResult result;

    std::vector<std::vector<Node>> history;
    std::vector<Node> current;
    for (auto q : a.initial())
        current.push_back({{q, {}}, 0, 0});

    auto record = [&](const std::vector<Node>& layer) {
        result.max_configurations = std::max(result.max_configurations, layer.size());
        if (!options.record_trace)
            return;
        TraceStep step;
        step.configurations = layer.size();
        step.stack_height = layer.empty() ? 0 : layer.front().config.stack.size();
        for (const auto& n : layer)
            step.states.push_back(n.config.state);
        std::sort(step.states.begin(), step.states.end());
        step.states.erase(std::unique(step.states.begin(), step.states.end()), step.states.end());
        result.trace.push_back(std::move(step));
    };
    record(current);

    for (std::size_t i = 1; i <= w.size(); ++i) {
        guards.move_to(i);
        const std::size_t symbol = symbols[i - 1];
        const SymbolKind kind = w.kind(i);
        std::vector<Node> next;
        std::map<Configuration, std::size_t> seen;
        auto emit = [&](Configuration c, std::size_t parent, std::size_t rule) {
            if (seen.emplace(c, next.size()).second)
                next.push_back({std::move(c), parent, rule});
        };

        for (std::size_t p = 0; p < current.size(); ++p) {
            const Configuration& c = current[p].config;
            if (kind == SymbolKind::ret) {
                std::optional<StackId> top;
                if (!c.stack.empty())
                    top = c.stack.back();
                for (auto r : a.returns_from(c.state, symbol, top)) {
                    if (!guards.rule_enabled(r))
                        continue;
                    Configuration n{a.rules()[r].to, c.stack};
                    if (top)
                        n.stack.pop_back();
                    emit(std::move(n), p, r);
                }
            } else {
                for (auto r : a.rules_from(c.state, symbol)) {
                    if (!guards.rule_enabled(r))
                        continue;
                    Configuration n{a.rules()[r].to, c.stack};
                    if (kind == SymbolKind::call)
                        n.stack.push_back(*a.rules()[r].stack);
                    emit(std::move(n), p, r);
                }
            }
        }
        if (options.record_witness)
            history.push_back(std::move(current));
        current = std::move(next);
        record(current);
    }

    for (const auto& n : current)
        result.final_configs.push_back(n.config);
    const auto accepting =
        std::find_if(current.begin(), current.end(), [&](const Node& n) { return a.is_accepting(n.config.state); });
    result.accepted = accepting != current.end();

    if (options.record_witness && result.accepted) {
        std::vector<WitnessStep> steps(w.size());
        std::size_t at = static_cast<std::size_t>(accepting - current.begin());
        const Node* node = &current[at];
        for (std::size_t i = w.size(); i >= 1; --i) {
            steps[i - 1] = {node->rule, node->config.state};
            node = &history[i - 1][node->parent];
        }
        result.witness_start = node->config.state;
        result.witness = std::move(steps);
    }
    return result;
}

inline bool accepts(const Ecidpda& a, const TimedString& w)
{
    return simulate(a, w, {.record_trace = false, .record_witness = false}).accepted;
}

} // namespace ecidpda
