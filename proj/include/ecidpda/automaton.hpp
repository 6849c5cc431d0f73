#pragma once

#include "constraint.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ecidpda {

using StateId = std::size_t;
using StackId = std::size_t;

enum class RuleKind { internal, call, ret };

/// One guarded transition. For calls `stack` is the pushed symbol; for
/// returns it is the popped symbol, with nullopt standing for the empty
/// stack (bottom).
struct Rule {
    RuleKind kind = RuleKind::internal;
    StateId from = 0;
    std::size_t symbol = 0; // alphabet index
    Constraint guard;
    StateId to = 0;
    std::optional<StackId> stack;
};

/// Event-clock input-driven pushdown automaton. Immutable once built;
/// a deterministic automaton is one that passes is_deterministic().
class Ecidpda {
public:
    Ecidpda(PartitionedAlphabet alphabet, std::vector<std::string> states, std::vector<StateId> initial,
            std::vector<StateId> accepting, std::vector<std::string> stack_symbols, std::vector<Rule> rules)
        : alphabet_(std::move(alphabet)),
          states_(std::move(states)),
          initial_(std::move(initial)),
          stack_symbols_(std::move(stack_symbols)),
          rules_(std::move(rules))
    {
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (!state_index_.emplace(states_[i], i).second)
                throw std::invalid_argument("state '" + states_[i] + "' declared twice");
        for (std::size_t i = 0; i < stack_symbols_.size(); ++i)
            if (!stack_index_.emplace(stack_symbols_[i], i).second)
                throw std::invalid_argument("stack symbol '" + stack_symbols_[i] + "' declared twice");

        if (initial_.empty())
            throw std::invalid_argument("an automaton needs at least one initial state");
        std::sort(initial_.begin(), initial_.end());
        initial_.erase(std::unique(initial_.begin(), initial_.end()), initial_.end());
        for (auto q : initial_)
            check_state(q, "initial state");

        accepting_.assign(states_.size(), false);
        for (auto q : accepting) {
            check_state(q, "accepting state");
            accepting_[q] = true;
        }

        std::unordered_map<const void*, std::size_t> guard_ids;
        std::vector<Constraint> unique_guards;
        rule_guard_.reserve(rules_.size());
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            const Rule& rule = rules_[r];
            check_state(rule.from, "transition source");
            check_state(rule.to, "transition target");
            if (rule.symbol >= alphabet_.size())
                throw std::invalid_argument("transition symbol index out of range");
            const SymbolKind kind = alphabet_.kind(rule.symbol);
            const bool kind_ok = (rule.kind == RuleKind::internal && kind == SymbolKind::internal)
                                 || (rule.kind == RuleKind::call && kind == SymbolKind::call)
                                 || (rule.kind == RuleKind::ret && kind == SymbolKind::ret);
            if (!kind_ok)
                throw std::invalid_argument("transition on '" + alphabet_.symbol(rule.symbol)
                                            + "' does not match the symbol's class");
            if (rule.kind == RuleKind::internal && rule.stack)
                throw std::invalid_argument("internal transitions do not touch the stack");
            if (rule.kind == RuleKind::call && !rule.stack)
                throw std::invalid_argument("call transitions must push a stack symbol");
            if (rule.stack && *rule.stack >= stack_symbols_.size())
                throw std::invalid_argument("transition refers to an undeclared stack symbol");

            auto [it, fresh] = guard_ids.emplace(rule.guard.id(), unique_guards.size());
            if (fresh)
                unique_guards.push_back(rule.guard);
            rule_guard_.push_back(it->second);
        }

        atoms_ = AtomUniverse::of_constraints(unique_guards);
        for (const auto& a : atoms_) {
            if ((a.clock.kind == ClockKind::symbol_history || a.clock.kind == ClockKind::symbol_prediction)
                && !alphabet_.contains(a.clock.symbol))
                throw std::invalid_argument("guard clock refers to symbol '" + a.clock.symbol
                                            + "' outside the alphabet");
        }
        guards_.reserve(unique_guards.size());
        for (const auto& g : unique_guards)
            guards_.emplace_back(g, atoms_);
        unique_guards_ = std::move(unique_guards);

        index_rules();
    }

    const PartitionedAlphabet& alphabet() const noexcept { return alphabet_; }
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::vector<StateId>& initial() const noexcept { return initial_; }
    const std::vector<std::string>& stack_symbols() const noexcept { return stack_symbols_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    std::size_t stack_count() const noexcept { return stack_symbols_.size(); }

    bool is_accepting(StateId q) const { return accepting_.at(q); }
    std::vector<StateId> accepting() const
    {
        std::vector<StateId> out;
        for (StateId q = 0; q < states_.size(); ++q)
            if (accepting_[q])
                out.push_back(q);
        return out;
    }

    std::optional<StateId> state_index(const std::string& name) const
    {
        const auto it = state_index_.find(name);
        return it == state_index_.end() ? std::nullopt : std::optional<StateId>(it->second);
    }
    std::optional<StackId> stack_index(const std::string& name) const
    {
        const auto it = stack_index_.find(name);
        return it == stack_index_.end() ? std::nullopt : std::optional<StackId>(it->second);
    }

    /// All atoms used by any guard, canonically ordered.
    const AtomUniverse& atoms() const noexcept { return atoms_; }

    const CompiledGuard& compiled_guard(std::size_t rule) const { return guards_[rule_guard_.at(rule)]; }
    std::size_t guard_id(std::size_t rule) const { return rule_guard_.at(rule); }
    const std::vector<Constraint>& distinct_guards() const noexcept { return unique_guards_; }

    /// Internal or call rules leaving `q` on symbol `symbol`.
    std::span<const std::size_t> rules_from(StateId q, std::size_t symbol) const
    {
        const auto& v = by_source_[q * alphabet_.size() + symbol];
        return {v.data(), v.size()};
    }

    /// Return rules leaving `q` on `symbol` popping `pop` (nullopt = bottom).
    std::span<const std::size_t> returns_from(StateId q, std::size_t symbol, std::optional<StackId> pop) const
    {
        const auto key = return_key(q, symbol, pop);
        const auto it = std::lower_bound(return_keys_.begin(), return_keys_.end(), key);
        if (it == return_keys_.end() || *it != key)
            return {};
        const auto slot = static_cast<std::size_t>(it - return_keys_.begin());
        return {return_rules_.data() + return_offsets_[slot], return_offsets_[slot + 1] - return_offsets_[slot]};
    }

private:
    void check_state(StateId q, const char* what) const
    {
        if (q >= states_.size())
            throw std::invalid_argument(std::string(what) + " index out of range");
    }

    std::uint64_t return_key(StateId q, std::size_t symbol, std::optional<StackId> pop) const
    {
        const std::uint64_t pop_slot = pop ? *pop + 1 : 0;
        return (static_cast<std::uint64_t>(q) * alphabet_.size() + symbol) * (stack_symbols_.size() + 1) + pop_slot;
    }

    void index_rules()
    {
        by_source_.assign(states_.size() * alphabet_.size(), {});
        std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            const Rule& rule = rules_[r];
            if (rule.kind == RuleKind::ret)
                keyed.emplace_back(return_key(rule.from, rule.symbol, rule.stack), r);
            else
                by_source_[rule.from * alphabet_.size() + rule.symbol].push_back(r);
        }
        std::sort(keyed.begin(), keyed.end());
        return_rules_.reserve(keyed.size());
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (i == 0 || keyed[i].first != keyed[i - 1].first) {
                return_keys_.push_back(keyed[i].first);
                return_offsets_.push_back(i);
            }
            return_rules_.push_back(keyed[i].second);
        }
        return_offsets_.push_back(keyed.size());
    }

    PartitionedAlphabet alphabet_;
    std::vector<std::string> states_;
    std::vector<StateId> initial_;
    std::vector<bool> accepting_;
    std::vector<std::string> stack_symbols_;
    std::vector<Rule> rules_;
    std::unordered_map<std::string, StateId> state_index_;
    std::unordered_map<std::string, StackId> stack_index_;
    AtomUniverse atoms_;
    std::vector<Constraint> unique_guards_;
    std::vector<CompiledGuard> guards_;
    std::vector<std::size_t> rule_guard_;
    std::vector<std::vector<std::size_t>> by_source_;
    std::vector<std::uint64_t> return_keys_; // sorted
    std::vector<std::size_t> return_offsets_;
    std::vector<std::size_t> return_rules_;
};

/// Name-based incremental construction of an Ecidpda.
class AutomatonBuilder {
public:
    explicit AutomatonBuilder(PartitionedAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

    AutomatonBuilder& state(const std::string& name, bool initial = false, bool accepting = false)
    {
        const StateId q = intern_state(name);
        if (initial)
            initial_.push_back(q);
        if (accepting)
            accepting_.push_back(q);
        return *this;
    }

    AutomatonBuilder& stack_symbol(const std::string& name)
    {
        intern_stack(name);
        return *this;
    }

    AutomatonBuilder& internal(const std::string& from, const std::string& symbol, Constraint guard,
                               const std::string& to)
    {
        rules_.push_back({RuleKind::internal, intern_state(from), alphabet_.require(symbol), std::move(guard),
                          intern_state(to), std::nullopt});
        return *this;
    }

    AutomatonBuilder& call(const std::string& from, const std::string& symbol, Constraint guard,
                           const std::string& to, const std::string& push)
    {
        rules_.push_back({RuleKind::call, intern_state(from), alphabet_.require(symbol), std::move(guard),
                          intern_state(to), intern_stack(push)});
        return *this;
    }

    // pop = nullopt encodes the empty-stack (bottom) case.
    AutomatonBuilder& ret(const std::string& from, const std::string& symbol, std::optional<std::string> pop,
                          Constraint guard, const std::string& to)
    {
        std::optional<StackId> popped;
        if (pop)
            popped = intern_stack(*pop);
        rules_.push_back(
            {RuleKind::ret, intern_state(from), alphabet_.require(symbol), std::move(guard), intern_state(to), popped});
        return *this;
    }

    Ecidpda build() const
    {
        return Ecidpda(alphabet_, states_, initial_, accepting_, stack_, rules_);
    }

private:
    StateId intern_state(const std::string& name)
    {
        auto [it, fresh] = state_ids_.emplace(name, states_.size());
        if (fresh)
            states_.push_back(name);
        return it->second;
    }

    StackId intern_stack(const std::string& name)
    {
        auto [it, fresh] = stack_ids_.emplace(name, stack_.size());
        if (fresh)
            stack_.push_back(name);
        return it->second;
    }

    PartitionedAlphabet alphabet_;
    std::vector<std::string> states_;
    std::vector<StateId> initial_;
    std::vector<StateId> accepting_;
    std::vector<std::string> stack_;
    std::vector<Rule> rules_;
    std::unordered_map<std::string, StateId> state_ids_;
    std::unordered_map<std::string, StackId> stack_ids_;
};

/// Unguarded transition of an untimed input-driven automaton.
struct UntimedRule {
    RuleKind kind = RuleKind::internal;
    StateId from = 0;
    std::size_t symbol = 0;
    StateId to = 0;
    std::optional<StackId> stack;
};

/// Wraps an untimed automaton as an Ecidpda whose guards are all `true`.
inline Ecidpda embed_untimed(PartitionedAlphabet alphabet, std::vector<std::string> states,
                             std::vector<StateId> initial, std::vector<StateId> accepting,
                             std::vector<std::string> stack_symbols, const std::vector<UntimedRule>& rules)
{
    std::vector<Rule> guarded;
    guarded.reserve(rules.size());
    for (const auto& r : rules)
        guarded.push_back({r.kind, r.from, r.symbol, Constraint::top(), r.to, r.stack});
    return Ecidpda(std::move(alphabet), std::move(states), std::move(initial), std::move(accepting),
                   std::move(stack_symbols), std::move(guarded));
}

inline bool all_guards_true(const Ecidpda& a)
{
    return std::all_of(a.distinct_guards().begin(), a.distinct_guards().end(),
                       [](const Constraint& g) { return g.kind() == Constraint::Kind::truth; });
}

} // namespace ecidpda
