#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ecidpda {

enum class SymbolKind { call, ret, internal };

/// Input alphabet split into left brackets (calls), right brackets (returns)
/// and neutral symbols. Symbols are indexed calls first, then returns, then
/// internals, each group in the order given.
class PartitionedAlphabet {
public:
    PartitionedAlphabet() = default;

    PartitionedAlphabet(std::vector<std::string> calls, std::vector<std::string> returns,
                        std::vector<std::string> internals)
        : calls_(std::move(calls)), returns_(std::move(returns)), internals_(std::move(internals))
    {
        auto enroll = [this](const std::vector<std::string>& group, SymbolKind kind) {
            for (const auto& symbol : group) {
                if (symbol.empty())
                    throw std::invalid_argument("alphabet symbols must be non-empty");
                if (std::any_of(symbol.begin(), symbol.end(),
                                [](unsigned char ch) { return std::isspace(ch) != 0; }))
                    throw std::invalid_argument("alphabet symbol '" + symbol + "' contains whitespace");
                if (!index_.emplace(symbol, symbols_.size()).second)
                    throw std::invalid_argument("alphabet symbol '" + symbol + "' declared twice");
                symbols_.push_back(symbol);
                kinds_.push_back(kind);
            }
        };
        enroll(calls_, SymbolKind::call);
        enroll(returns_, SymbolKind::ret);
        enroll(internals_, SymbolKind::internal);
        if (symbols_.empty())
            throw std::invalid_argument("alphabet must contain at least one symbol");
    }

    const std::vector<std::string>& calls() const noexcept { return calls_; }
    const std::vector<std::string>& returns() const noexcept { return returns_; }
    const std::vector<std::string>& internals() const noexcept { return internals_; }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }

    std::optional<std::size_t> index_of(std::string_view symbol) const
    {
        const auto it = index_.find(std::string(symbol));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    std::size_t require(std::string_view symbol) const
    {
        if (auto idx = index_of(symbol))
            return *idx;
        throw std::invalid_argument("symbol '" + std::string(symbol) + "' is not in the alphabet");
    }

    bool contains(std::string_view symbol) const { return index_of(symbol).has_value(); }
    SymbolKind kind(std::size_t index) const { return kinds_.at(index); }
    const std::string& symbol(std::size_t index) const { return symbols_.at(index); }

    std::optional<SymbolKind> kind_of(std::string_view symbol) const
    {
        if (auto idx = index_of(symbol))
            return kinds_[*idx];
        return std::nullopt;
    }

    friend bool operator==(const PartitionedAlphabet& a, const PartitionedAlphabet& b)
    {
        return a.calls_ == b.calls_ && a.returns_ == b.returns_ && a.internals_ == b.internals_;
    }

private:
    std::vector<std::string> calls_;
    std::vector<std::string> returns_;
    std::vector<std::string> internals_;
    std::vector<std::string> symbols_;
    std::vector<SymbolKind> kinds_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Bracket partners of a string, by 1-based position.
struct Matching {
    std::vector<std::optional<std::size_t>> partner_of; // slot i-1 holds partner of position i

    std::optional<std::size_t> partner(std::size_t position) const { return partner_of.at(position - 1); }
    std::size_t size() const noexcept { return partner_of.size(); }
};

struct TimedEvent {
    std::string symbol;
    Rational time;

    friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

namespace detail {

inline Matching scan_matching(const std::vector<SymbolKind>& kinds)
{
    Matching m;
    m.partner_of.resize(kinds.size());
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] == SymbolKind::call) {
            open.push_back(i + 1);
        } else if (kinds[i] == SymbolKind::ret && !open.empty()) {
            const std::size_t left = open.back();
            open.pop_back();
            m.partner_of[i] = left;
            m.partner_of[left - 1] = i + 1;
        }
    }
    return m;
}

} // namespace detail

/// Sequence of (symbol, timestamp) with strictly increasing timestamps.
/// Immutable; the bracket matching is computed once on construction.
class TimedString {
public:
    TimedString() = default;

    TimedString(PartitionedAlphabet alphabet, std::vector<TimedEvent> events)
        : alphabet_(std::move(alphabet)), events_(std::move(events))
    {
        symbol_ids_.reserve(events_.size());
        kinds_.reserve(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) {
            const auto idx = alphabet_.index_of(events_[i].symbol);
            if (!idx)
                throw std::invalid_argument("event " + std::to_string(i + 1) + ": symbol '" + events_[i].symbol
                                            + "' is not in the alphabet");
            if (events_[i].time < 0)
                throw std::invalid_argument("event " + std::to_string(i + 1) + ": negative timestamp");
            if (i > 0 && !(events_[i - 1].time < events_[i].time))
                throw std::invalid_argument("event " + std::to_string(i + 1)
                                            + ": timestamps must strictly increase");
            symbol_ids_.push_back(*idx);
            kinds_.push_back(alphabet_.kind(*idx));
        }
        matching_ = detail::scan_matching(kinds_);
    }

    const PartitionedAlphabet& alphabet() const noexcept { return alphabet_; }
    const std::vector<TimedEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }

    // 1-based accessors.
    const TimedEvent& at(std::size_t position) const { return events_.at(position - 1); }
    const Rational& time(std::size_t position) const { return events_.at(position - 1).time; }
    SymbolKind kind(std::size_t position) const { return kinds_.at(position - 1); }
    std::size_t symbol_id(std::size_t position) const { return symbol_ids_.at(position - 1); }
    const Matching& matching() const noexcept { return matching_; }

    std::vector<std::string> symbols() const
    {
        std::vector<std::string> out;
        out.reserve(events_.size());
        for (const auto& e : events_)
            out.push_back(e.symbol);
        return out;
    }

    TimedString prefix(std::size_t length) const
    {
        return TimedString(alphabet_, std::vector<TimedEvent>(events_.begin(), events_.begin() + length));
    }

    friend bool operator==(const TimedString& a, const TimedString& b)
    {
        return a.alphabet_ == b.alphabet_ && a.events_ == b.events_;
    }

private:
    PartitionedAlphabet alphabet_;
    std::vector<TimedEvent> events_;
    std::vector<std::size_t> symbol_ids_;
    std::vector<SymbolKind> kinds_;
    Matching matching_;
};

/// Builds a timed string from parallel symbol and timestamp lists.
inline TimedString make_timed_string(PartitionedAlphabet alphabet, const std::vector<std::string>& symbols,
                                     const std::vector<Rational>& times)
{
    if (symbols.size() != times.size())
        throw std::invalid_argument("symbol and timestamp counts differ");
    std::vector<TimedEvent> events;
    events.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        events.push_back({symbols[i], times[i]});
    return TimedString(std::move(alphabet), std::move(events));
}

// ---------------------------------------------------------------------------
// Event clocks

enum class ClockKind { symbol_history, symbol_prediction, stack_history, stack_prediction };

struct Clock {
    ClockKind kind = ClockKind::stack_history;
    std::string symbol; // empty for the two stack clocks

    static Clock history(std::string symbol) { return {ClockKind::symbol_history, std::move(symbol)}; }
    static Clock prediction(std::string symbol) { return {ClockKind::symbol_prediction, std::move(symbol)}; }
    static Clock stack_history() { return {ClockKind::stack_history, {}}; }
    static Clock stack_prediction() { return {ClockKind::stack_prediction, {}}; }

    bool is_stack_clock() const noexcept
    {
        return kind == ClockKind::stack_history || kind == ClockKind::stack_prediction;
    }

    friend auto operator<=>(const Clock&, const Clock&) = default;
    friend bool operator==(const Clock&, const Clock&) = default;
};

inline Matching compute_matching(const TimedString& w) { return w.matching(); }

/// Value of `clock` on `w` at 1-based position `i`; nullopt when undefined.
inline std::optional<Rational> clock_value(const TimedString& w, std::size_t i, const Clock& clock)
{
    if (i < 1 || i > w.size())
        throw std::out_of_range("position " + std::to_string(i) + " outside 1.." + std::to_string(w.size()));

    switch (clock.kind) {
    case ClockKind::symbol_history:
        for (std::size_t j = i - 1; j >= 1; --j)
            if (w.at(j).symbol == clock.symbol)
                return w.time(i) - w.time(j);
        return std::nullopt;
    case ClockKind::symbol_prediction:
        for (std::size_t j = i + 1; j <= w.size(); ++j)
            if (w.at(j).symbol == clock.symbol)
                return w.time(j) - w.time(i);
        return std::nullopt;
    case ClockKind::stack_history:
        if (w.kind(i) == SymbolKind::ret)
            if (auto left = w.matching().partner(i))
                return w.time(i) - w.time(*left);
        return std::nullopt;
    case ClockKind::stack_prediction:
        if (w.kind(i) == SymbolKind::call)
            if (auto right = w.matching().partner(i))
                return w.time(*right) - w.time(i);
        return std::nullopt;
    }
    return std::nullopt;
}

/// Least start s (1 <= s <= i+1) such that positions s..i form a well-nested
/// string. s = i+1 denotes the empty suffix.
inline std::size_t longest_well_nested_suffix_start(const TimedString& w, std::size_t i)
{
    if (i > w.size())
        throw std::out_of_range("prefix length exceeds string length");
    for (std::size_t s = 1; s <= i; ++s) {
        long depth = 0;
        bool ok = true;
        for (std::size_t j = s; j <= i && ok; ++j) {
            if (w.kind(j) == SymbolKind::call)
                ++depth;
            else if (w.kind(j) == SymbolKind::ret && --depth < 0)
                ok = false;
        }
        if (ok && depth == 0)
            return s;
    }
    return i + 1;
}

} // namespace ecidpda
