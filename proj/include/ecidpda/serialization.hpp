#pragma once

#include "automaton.hpp"
#include "errors.hpp"
#include "guard_syntax.hpp"
#include "witness.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecidpda {

using Json = nlohmann::json;

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset)
{
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        // e.byte is the 1-based offset of the offending character
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string message = e.what();
        // drop nlohmann's own "[json.exception...] parse error at line L, column C: " prefix
        if (const auto col = message.find("column"); col != std::string::npos)
            if (const auto colon = message.find(": ", col); colon != std::string::npos)
                message = message.substr(colon + 2);
        throw ParseError("invalid JSON: " + message, line, column);
    }
}

inline const Json& member(const Json& j, const char* key, const char* where)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string(where) + ": missing key '" + key + "'");
    return j.at(key);
}

inline std::string string_of(const Json& j, const std::string& where)
{
    if (!j.is_string())
        throw ParseError(where + ": expected a string");
    return j.get<std::string>();
}

inline std::vector<std::string> strings_of(const Json& j, const std::string& where)
{
    if (!j.is_array())
        throw ParseError(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j)
        out.push_back(string_of(e, where));
    return out;
}

inline Rational rational_of(const Json& j, const std::string& where)
{
    try {
        if (j.is_string())
            return parse_rational(j.get<std::string>());
        if (j.is_number_unsigned())
            return Rational(j.get<unsigned long long>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": expected a rational as a string (\"0.6\" or \"3/5\") or a nonnegative integer");
}

inline std::size_t index_of_name(const std::vector<std::string>& names, const std::string& name, const std::string& what)
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw ParseError("unknown " + what + " '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace detail

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

// ---- alphabet -------------------------------------------------------------

inline Json alphabet_to_json(const PartitionedAlphabet& a)
{
    return {{"calls", a.calls()}, {"returns", a.returns()}, {"internals", a.internals()}};
}

inline PartitionedAlphabet alphabet_from_json(const Json& j)
{
    auto part = [&](const char* key) {
        if (!j.is_object())
            throw ParseError("alphabet: expected an object");
        return j.contains(key) ? detail::strings_of(j.at(key), std::string("alphabet.") + key)
                               : std::vector<std::string>{};
    };
    try {
        return PartitionedAlphabet(part("calls"), part("returns"), part("internals"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("alphabet: ") + e.what());
    }
}

// ---- automata -------------------------------------------------------------

inline Json automaton_to_json(const Ecidpda& a)
{
    Json transitions = Json::array();
    for (const auto& r : a.rules()) {
        Json t{{"from", a.states()[r.from]}, {"symbol", a.alphabet().symbol(r.symbol)}};
        if (r.kind == RuleKind::ret)
            t["pop"] = r.stack ? a.stack_symbols()[*r.stack] : std::string("bottom");
        t["guard"] = to_string(r.guard);
        t["to"] = a.states()[r.to];
        if (r.kind == RuleKind::call)
            t["push"] = a.stack_symbols()[*r.stack];
        transitions.push_back(std::move(t));
    }
    Json initial = Json::array(), accepting = Json::array();
    for (auto q : a.initial())
        initial.push_back(a.states()[q]);
    for (auto q : a.accepting())
        accepting.push_back(a.states()[q]);
    return {{"alphabet", alphabet_to_json(a.alphabet())},
            {"states", a.states()},
            {"initial", initial},
            {"accepting", accepting},
            {"stack", a.stack_symbols()},
            {"transitions", transitions}};
}

inline Ecidpda automaton_from_json(const Json& j)
{
    using namespace detail;
    const auto alphabet = alphabet_from_json(member(j, "alphabet", "automaton"));
    const auto states = strings_of(member(j, "states", "automaton"), "states");
    const auto stack = j.contains("stack") ? strings_of(j.at("stack"), "stack") : std::vector<std::string>{};
    std::vector<StateId> initial, accepting;
    for (const auto& q : strings_of(member(j, "initial", "automaton"), "initial"))
        initial.push_back(index_of_name(states, q, "state"));
    for (const auto& q : strings_of(member(j, "accepting", "automaton"), "accepting"))
        accepting.push_back(index_of_name(states, q, "state"));

    std::vector<Rule> rules;
    const Json& transitions = member(j, "transitions", "automaton");
    if (!transitions.is_array())
        throw ParseError("transitions: expected an array");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const Json& t = transitions[i];
        const std::string where = "transition " + std::to_string(i);
        Rule r;
        r.from = index_of_name(states, string_of(member(t, "from", where.c_str()), where), "state");
        r.to = index_of_name(states, string_of(member(t, "to", where.c_str()), where), "state");
        const auto symbol = string_of(member(t, "symbol", where.c_str()), where);
        const auto idx = alphabet.index_of(symbol);
        if (!idx)
            throw ParseError(where + ": symbol '" + symbol + "' is not in the alphabet");
        r.symbol = *idx;
        try {
            r.guard = t.contains("guard") ? parse_guard(string_of(t.at("guard"), where)) : Constraint::top();
        } catch (const ParseError& e) {
            throw ParseError(where + ": guard: " + e.what());
        }
        switch (alphabet.kind(r.symbol)) {
        case SymbolKind::internal:
            r.kind = RuleKind::internal;
            if (t.contains("push") || t.contains("pop"))
                throw ParseError(where + ": internal symbols neither push nor pop");
            break;
        case SymbolKind::call:
            r.kind = RuleKind::call;
            r.stack = index_of_name(stack, string_of(member(t, "push", where.c_str()), where), "stack symbol");
            break;
        case SymbolKind::ret: {
            r.kind = RuleKind::ret;
            const auto pop = string_of(member(t, "pop", where.c_str()), where);
            if (pop != "bottom")
                r.stack = index_of_name(stack, pop, "stack symbol");
            break;
        }
        }
        rules.push_back(std::move(r));
    }
    try {
        return Ecidpda(alphabet, states, std::move(initial), std::move(accepting), stack, std::move(rules));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("automaton: ") + e.what());
    }
}

inline Ecidpda parse_automaton(std::string_view text) { return automaton_from_json(detail::parse_json(text)); }

inline std::string write_automaton(const Ecidpda& a) { return automaton_to_json(a).dump(2) + "\n"; }

// ---- timed strings --------------------------------------------------------

inline Json timed_string_to_json(const TimedString& w)
{
    Json events = Json::array();
    for (const auto& e : w.events())
        events.push_back({e.symbol, format_rational(e.time)});
    return {{"alphabet", alphabet_to_json(w.alphabet())}, {"events", events}};
}

inline TimedString timed_string_from_json(const Json& j)
{
    using namespace detail;
    const auto alphabet = alphabet_from_json(member(j, "alphabet", "timed string"));
    const Json& events = member(j, "events", "timed string");
    if (!events.is_array())
        throw ParseError("events: expected an array");
    std::vector<TimedEvent> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string where = "event " + std::to_string(i + 1);
        if (!events[i].is_array() || events[i].size() != 2)
            throw ParseError(where + ": expected [symbol, timestamp]");
        out.push_back({string_of(events[i][0], where), rational_of(events[i][1], where)});
    }
    try {
        return TimedString(alphabet, std::move(out));
    } catch (const std::exception& e) {
        throw ParseError(std::string("timed string: ") + e.what());
    }
}

/// One `<symbol> <timestamp>` per line. A line starting with '#' is a
/// comment, except `# <rational>`, which is an event on the symbol '#'.
inline TimedString parse_timed_string_text(std::string_view text, const PartitionedAlphabet& alphabet)
{
    std::vector<TimedEvent> events;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        std::vector<std::pair<std::size_t, std::string_view>> tokens; // (column, token)
        for (std::size_t i = 0; i < line.size();) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            const std::size_t from = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            tokens.emplace_back(from + 1, line.substr(from, i - from));
        }
        if (tokens.empty())
            continue;
        if (tokens[0].second.front() == '#') {
            bool event = false;
            if (tokens.size() == 2 && tokens[0].second == "#") {
                try {
                    parse_rational(tokens[1].second);
                    event = true;
                } catch (const std::invalid_argument&) {
                }
            }
            if (!event)
                continue;
        }
        if (tokens.size() != 2)
            throw ParseError("expected '<symbol> <timestamp>'", line_no, tokens[0].first);
        const std::string symbol(tokens[0].second);
        if (!alphabet.contains(symbol))
            throw ParseError("symbol '" + symbol + "' is not in the alphabet", line_no, tokens[0].first);
        Rational time;
        try {
            time = parse_rational(tokens[1].second);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no, tokens[1].first);
        }
        if (!events.empty() && time <= events.back().time)
            throw ParseError("timestamps must be strictly increasing", line_no, tokens[1].first);
        events.push_back({symbol, time});
        if (end == text.size())
            break;
    }
    return TimedString(alphabet, std::move(events));
}

inline std::string write_timed_string_text(const TimedString& w)
{
    std::string out;
    for (const auto& e : w.events())
        out += e.symbol + ' ' + format_rational(e.time) + '\n';
    return out;
}

/// JSON when the text starts with '{', otherwise the line format over
/// `fallback` (typically the automaton's alphabet).
inline TimedString parse_timed_string(std::string_view text, const std::optional<PartitionedAlphabet>& fallback)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{')
        return timed_string_from_json(detail::parse_json(text));
    if (!fallback)
        throw ParseError("the line format needs an alphabet");
    return parse_timed_string_text(text, *fallback);
}

// ---- witness specs --------------------------------------------------------

inline Json witness_spec_to_json(const WitnessSpec& spec)
{
    auto sets = [](const std::vector<EventSet>& v) {
        Json out = Json::array();
        for (const auto& x : v) {
            Json names = Json::array();
            for (auto e : x)
                names.push_back(event_symbol(e));
            out.push_back(names);
        }
        return out;
    };
    Json relations = Json::array();
    for (const auto& r : spec.R) {
        Json pairs = Json::array();
        for (const auto& [i, j] : r)
            pairs.push_back({i, j});
        relations.push_back(pairs);
    }
    return {{"n", spec.n}, {"k", spec.k}, {"m", spec.m}, {"s", spec.s},
            {"R", relations}, {"X", sets(spec.X)}, {"Y", sets(spec.Y)}};
}

struct WitnessFile {
    WitnessSpec spec;
    TimingScheme timing;
};

inline WitnessFile witness_spec_from_json(const Json& j)
{
    using namespace detail;
    auto count = [&](const char* key) {
        const Json& v = member(j, key, "witness spec");
        if (!v.is_number_unsigned())
            throw ParseError(std::string("witness spec: '") + key + "' must be a nonnegative integer");
        return v.get<std::size_t>();
    };
    WitnessFile f;
    f.spec.n = count("n");
    f.spec.k = count("k");
    f.spec.m = count("m");
    const Json& s = member(j, "s", "witness spec");
    if (!s.is_array())
        throw ParseError("witness spec: 's' must be an array");
    for (const auto& x : s) {
        if (!x.is_number_unsigned())
            throw ParseError("witness spec: 's' entries must be nonnegative integers");
        f.spec.s.push_back(x.get<std::size_t>());
    }
    const Json& relations = member(j, "R", "witness spec");
    if (!relations.is_array())
        throw ParseError("witness spec: 'R' must be an array");
    for (const auto& r : relations) {
        NumberRelation rel;
        if (!r.is_array())
            throw ParseError("witness spec: each relation must be an array of pairs");
        for (const auto& p : r) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
                throw ParseError("witness spec: relation elements must be pairs of nonnegative integers");
            rel.insert({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
        }
        f.spec.R.push_back(std::move(rel));
    }
    auto sets = [&](const char* key) {
        std::vector<EventSet> out;
        const Json& v = member(j, key, "witness spec");
        if (!v.is_array())
            throw ParseError(std::string("witness spec: '") + key + "' must be an array");
        for (const auto& names : v) {
            EventSet x;
            for (const auto& name : strings_of(names, key)) {
                std::size_t idx = 0;
                if (name.size() < 2 || name[0] != 'e' || !detail::all_digits(name.substr(1))
                    || (idx = std::stoul(name.substr(1))) == 0)
                    throw ParseError(std::string("witness spec: '") + name + "' is not an event name e1..ek");
                x.insert(idx);
            }
            out.push_back(std::move(x));
        }
        return out;
    };
    f.spec.X = sets("X");
    f.spec.Y = sets("Y");
    if (j.contains("timing")) {
        const Json& t = j.at("timing");
        if (t.contains("far_gap"))
            f.timing.far_gap = rational_of(t.at("far_gap"), "timing.far_gap");
        if (t.contains("near_gap"))
            f.timing.near_gap = rational_of(t.at("near_gap"), "timing.near_gap");
        if (t.contains("step"))
            f.timing.step = rational_of(t.at("step"), "timing.step");
        if (t.contains("spacing"))
            f.timing.spacing = rational_of(t.at("spacing"), "timing.spacing");
    }
    try {
        f.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("witness spec: ") + e.what());
    }
    return f;
}

inline WitnessFile parse_witness_spec(std::string_view text) { return witness_spec_from_json(detail::parse_json(text)); }

} // namespace ecidpda
