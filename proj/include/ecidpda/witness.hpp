#pragma once

#include "automaton.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ecidpda {

using NumberRelation = std::set<std::pair<std::size_t, std::size_t>>;
using EventSet = std::set<std::size_t>; // event indices 1..k

inline std::string event_symbol(std::size_t i) { return "e" + std::to_string(i); }

/// Calls {<}, returns {>}, internals {a, b, c, #, e1, ..., ek}.
inline PartitionedAlphabet witness_alphabet(std::size_t k)
{
    if (k == 0)
        throw std::invalid_argument("the witness alphabet needs at least one event symbol");
    std::vector<std::string> internals{"a", "b", "c", "#"};
    for (std::size_t i = 1; i <= k; ++i)
        internals.push_back(event_symbol(i));
    return PartitionedAlphabet({"<"}, {">"}, std::move(internals));
}

/// Parameters of one string of the family: numbers s_1..s_{m+1} in [0, n),
/// relations R_1..R_m and event sets X_1..X_m, Y_1..Y_m.
struct WitnessSpec {
    std::size_t n = 1;
    std::size_t k = 1;
    std::size_t m = 1;
    std::vector<std::size_t> s;
    std::vector<NumberRelation> R;
    std::vector<EventSet> X;
    std::vector<EventSet> Y;

    void validate() const
    {
        if (n == 0 || k == 0 || m == 0)
            throw std::invalid_argument("witness spec needs n, k, m >= 1");
        if (s.size() != m + 1 || R.size() != m || X.size() != m || Y.size() != m)
            throw std::invalid_argument("witness spec lengths do not match m");
        for (auto x : s)
            if (x >= n)
                throw std::invalid_argument("number " + std::to_string(x) + " out of range");
        for (const auto& r : R)
            for (const auto& [i, j] : r)
                if (i >= n || j >= n)
                    throw std::invalid_argument("relation element out of range");
        for (const auto* sets : {&X, &Y})
            for (const auto& set : *sets)
                for (auto e : set)
                    if (e == 0 || e > k)
                        throw std::invalid_argument("event index " + std::to_string(e) + " out of range");
    }

    friend bool operator==(const WitnessSpec&, const WitnessSpec&) = default;
};

/// Event placement around brackets. Each v-block puts e_1..e_k so that the
/// last of them is far_gap before the bracket and starts its member list
/// near_gap before it; step spaces consecutive events inside a block.
struct TimingScheme {
    Rational far_gap{3, 2};
    Rational near_gap{1, 2};
    std::optional<Rational> step; // default: 1 / (2 * block length)
    Rational spacing{1, 2};       // between symbols outside v-blocks
};

/// u_R: `# a^i b^j` for every (i, j) of R in lexicographic order.
inline std::vector<std::string> encode_relation(const NumberRelation& r, std::size_t n)
{
    std::vector<std::string> out;
    for (const auto& [i, j] : r) { // std::set iterates lexicographically
        if (i >= n || j >= n)
            throw std::invalid_argument("relation element out of range");
        out.emplace_back("#");
        out.insert(out.end(), i, "a");
        out.insert(out.end(), j, "b");
    }
    return out;
}

/// v_X: e_1 ... e_k, then the members of X in index order.
inline std::vector<std::string> encode_set(const EventSet& x, std::size_t k)
{
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= k; ++i)
        out.push_back(event_symbol(i));
    for (auto e : x) {
        if (e == 0 || e > k)
            throw std::invalid_argument("event index out of range");
        out.push_back(event_symbol(e));
    }
    return out;
}

namespace detail {

class WellFormedWriter {
public:
    explicit WellFormedWriter(const TimingScheme& scheme) : scheme_(scheme)
    {
        if (!(scheme.far_gap > 1 && scheme.near_gap < 1 && scheme.near_gap > 0))
            throw std::invalid_argument("timing scheme needs far_gap > 1 > near_gap > 0");
        if (scheme.step && *scheme.step <= 0)
            throw std::invalid_argument("timing scheme step must be positive");
        if (scheme.spacing <= 0)
            throw std::invalid_argument("timing scheme spacing must be positive");
    }

    void plain(const std::string& symbol)
    {
        now_ += scheme_.spacing;
        events_.push_back({symbol, now_});
    }

    void plain(const std::vector<std::string>& symbols)
    {
        for (const auto& s : symbols)
            plain(s);
    }

    // A v-block of k leading events and its member list, then the bracket.
    void block_then_bracket(const std::vector<std::string>& block, std::size_t k, const std::string& bracket)
    {
        const std::size_t members = block.size() - k;
        const Rational step = scheme_.step ? *scheme_.step : Rational(1, static_cast<long long>(2 * block.size()));
        if (members > 0 && step * static_cast<long long>(members - 1) >= scheme_.near_gap)
            throw std::invalid_argument("timing scheme cannot fit the member list within near_gap");

        const Rational first = now_ + scheme_.spacing;
        const Rational bracket_time = first + step * static_cast<long long>(k - 1) + scheme_.far_gap;
        for (std::size_t j = 0; j < k; ++j)
            events_.push_back({block[j], first + step * static_cast<long long>(j)});
        for (std::size_t j = 0; j < members; ++j)
            events_.push_back({block[k + j], bracket_time - scheme_.near_gap + step * static_cast<long long>(j)});
        events_.push_back({bracket, bracket_time});
        now_ = bracket_time;
    }

    std::vector<TimedEvent> take() { return std::move(events_); }

private:
    const TimingScheme& scheme_;
    Rational now_{0};
    std::vector<TimedEvent> events_;
};

} // namespace detail

/// w = v_X1 < u_R1 ... v_Xm < u_Rm c^{s_{m+1}} v_Ym > c^{s_m} ... v_Y1 > c^{s_1}
inline std::vector<std::string> well_formed_symbols(const WitnessSpec& spec)
{
    spec.validate();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < spec.m; ++i) {
        auto v = encode_set(spec.X[i], spec.k);
        out.insert(out.end(), v.begin(), v.end());
        out.emplace_back("<");
        auto u = encode_relation(spec.R[i], spec.n);
        out.insert(out.end(), u.begin(), u.end());
    }
    out.insert(out.end(), spec.s[spec.m], "c");
    for (std::size_t i = spec.m; i-- > 0;) {
        auto v = encode_set(spec.Y[i], spec.k);
        out.insert(out.end(), v.begin(), v.end());
        out.emplace_back(">");
        out.insert(out.end(), spec.s[i], "c");
    }
    return out;
}

inline TimedString build_well_formed(const WitnessSpec& spec, const TimingScheme& scheme = {})
{
    spec.validate();
    detail::WellFormedWriter writer(scheme);
    for (std::size_t i = 0; i < spec.m; ++i) {
        writer.block_then_bracket(encode_set(spec.X[i], spec.k), spec.k, "<");
        writer.plain(encode_relation(spec.R[i], spec.n));
    }
    writer.plain(std::vector<std::string>(spec.s[spec.m], "c"));
    for (std::size_t i = spec.m; i-- > 0;) {
        writer.block_then_bracket(encode_set(spec.Y[i], spec.k), spec.k, ">");
        writer.plain(std::vector<std::string>(spec.s[i], "c"));
    }
    return TimedString(witness_alphabet(spec.k), writer.take());
}

inline bool is_valid(const WitnessSpec& spec)
{
    spec.validate();
    for (std::size_t i = 0; i < spec.m; ++i) {
        if (!spec.R[i].count({spec.s[i], spec.s[i + 1]}))
            return false;
        const bool meet = std::any_of(spec.X[i].begin(), spec.X[i].end(), [&](std::size_t e) { return spec.Y[i].count(e) > 0; });
        if (!meet)
            return false;
    }
    return true;
}

/// Nondeterministic checker for the family, with 5n+1 states and n*k stack
/// symbols (x, e_i). Only the call and pop rules carry guards, each one
/// `hist(e_i) < 1`.
inline Ecidpda build_witness_nfa(std::size_t n, std::size_t k)
{
    if (n == 0 || k == 0)
        throw std::invalid_argument("witness automaton needs n, k >= 1");
    AutomatonBuilder b(witness_alphabet(k));
    const auto num = [](const char* prefix, std::size_t x) { return prefix + std::to_string(x); };
    const auto find = [&](std::size_t x) { return num("find", x); };
    // a-counting states; a0 is the same state as b0
    const auto need_a = [&](std::size_t r) { return r == 0 ? num("b", 0) : num("a", r); };
    const auto count_b = [&](std::size_t j) { return num("b", j); };
    const auto skip = [&](std::size_t j) { return num("skip", j); };
    const auto need_c = [&](std::size_t r) { return num("c", r); };
    const auto push = [](std::size_t x, std::size_t i) { return "(" + std::to_string(x) + "," + event_symbol(i) + ")"; };
    const auto recent = [](std::size_t i) { return desugar(Relation::lt, Clock::history(event_symbol(i)), Rational(1)); };
    const auto top = Constraint::top();

    b.state("start", true, false);
    for (std::size_t x = 0; x < n; ++x) {
        b.state(find(x));
        if (x > 0)
            b.state(need_a(x));
        b.state(count_b(x)).state(skip(x)).state(need_c(x), false, x == 0);
    }
    b.state("vy");
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t i = 1; i <= k; ++i)
            b.stack_symbol(push(x, i));

    for (std::size_t i = 1; i <= k; ++i) {
        b.internal("start", event_symbol(i), top, "start");
        b.internal("vy", event_symbol(i), top, "vy");
    }
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t i = 1; i <= k; ++i) {
            b.call("start", "<", recent(i), find(x), push(x, i));
            b.call(skip(x), "<", recent(i), find(x), push(x, i));
            b.ret("vy", ">", push(x, i), recent(i), need_c(x));
            b.ret(skip(0), ">", push(x, i), recent(i), need_c(x));
        }
        for (const char* s : {"a", "b", "#"})
            b.internal(find(x), s, top, find(x));
        b.internal(find(x), "#", top, need_a(x));
        if (x > 0)
            b.internal(need_a(x), "a", top, need_a(x - 1));
        if (x + 1 < n)
            b.internal(count_b(x), "b", top, count_b(x + 1));
        b.internal(count_b(x), "#", top, skip(x));
        for (const char* s : {"#", "a", "b"})
            b.internal(skip(x), s, top, skip(x));
        for (std::size_t i = 1; i <= k; ++i) {
            b.internal(count_b(x), event_symbol(i), top, skip(x));
            b.internal(skip(x), event_symbol(i), top, skip(x));
        }
        if (x > 0) {
            b.internal(count_b(x), "c", top, need_c(x - 1));
            b.internal(skip(x), "c", top, need_c(x - 1));
            b.internal(need_c(x), "c", top, need_c(x - 1));
        }
    }
    for (std::size_t i = 1; i <= k; ++i)
        b.internal(need_c(0), event_symbol(i), top, "vy");
    return b.build();
}

inline bool left_right_total(const NumberRelation& r, std::size_t n)
{
    std::vector<bool> left(n, false), right(n, false);
    for (const auto& [i, j] : r) {
        if (i >= n || j >= n)
            return false;
        left[i] = true;
        right[j] = true;
    }
    return std::all_of(left.begin(), left.end(), [](bool b) { return b; })
           && std::all_of(right.begin(), right.end(), [](bool b) { return b; });
}

/// All 2^{n^2} relations over {0..n-1}.
inline std::vector<NumberRelation> all_relations(std::size_t n)
{
    if (n * n > 16)
        throw std::length_error("too many relations to enumerate");
    std::vector<NumberRelation> out;
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << (n * n)); ++bits) {
        NumberRelation r;
        for (std::size_t c = 0; c < n * n; ++c)
            if ((bits >> c) & 1U)
                r.insert({c / n, c % n});
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<EventSet> all_event_sets(std::size_t k)
{
    std::vector<EventSet> out;
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << k); ++bits) {
        EventSet x;
        for (std::size_t i = 0; i < k; ++i)
            if ((bits >> i) & 1U)
                x.insert(i + 1);
        out.push_back(std::move(x));
    }
    return out;
}

/// Every spec with the given n, k, m.
inline std::vector<WitnessSpec> enumerate_specs(std::size_t n, std::size_t k, std::size_t m)
{
    const auto relations = all_relations(n);
    const auto sets = all_event_sets(k);
    std::vector<WitnessSpec> out;
    WitnessSpec spec{n, k, m, std::vector<std::size_t>(m + 1, 0), std::vector<NumberRelation>(m),
                     std::vector<EventSet>(m), std::vector<EventSet>(m)};

    // odometer over (R_i, X_i, Y_i) per level and the m+1 numbers
    std::vector<std::size_t> digits(4 * m + 1, 0);
    std::vector<std::size_t> radix;
    for (std::size_t i = 0; i < m; ++i) {
        radix.push_back(relations.size());
        radix.push_back(sets.size());
        radix.push_back(sets.size());
    }
    for (std::size_t i = 0; i <= m; ++i)
        radix.push_back(n);
    for (;;) {
        for (std::size_t i = 0; i < m; ++i) {
            spec.R[i] = relations[digits[3 * i]];
            spec.X[i] = sets[digits[3 * i + 1]];
            spec.Y[i] = sets[digits[3 * i + 2]];
        }
        for (std::size_t i = 0; i <= m; ++i)
            spec.s[i] = digits[3 * m + i];
        out.push_back(spec);
        std::size_t d = 0;
        while (d < radix.size() && ++digits[d] == radix[d])
            digits[d++] = 0;
        if (d == radix.size())
            break;
    }
    return out;
}

/// The second half of a string: numbers s_1..s_{m+1} and sets Y_1..Y_m.
/// `first_valid` tells which of the two prefixes the completed string
/// makes valid.
struct Continuation {
    std::vector<std::size_t> numbers;
    std::vector<EventSet> y_sets;
    bool first_valid = true;
};

/// spec with its numbers and Y sets taken from the continuation.
inline WitnessSpec complete(WitnessSpec spec, const Continuation& c)
{
    spec.s = c.numbers;
    spec.Y = c.y_sets;
    spec.validate();
    return spec;
}

/// c^{s_{m+1}} v_{Y_m} > c^{s_m} ... v_{Y_1} > c^{s_1}
inline std::vector<std::string> suffix_symbols(const Continuation& c, std::size_t k)
{
    std::vector<std::string> out;
    const std::size_t m = c.y_sets.size();
    out.insert(out.end(), c.numbers.at(m), "c");
    for (std::size_t i = m; i-- > 0;) {
        auto v = encode_set(c.y_sets[i], k);
        out.insert(out.end(), v.begin(), v.end());
        out.emplace_back(">");
        out.insert(out.end(), c.numbers[i], "c");
    }
    return out;
}

/// A continuation on which the prefixes w_1 of the two specs (their R and
/// X vectors) get opposite validity, or nullopt when those vectors agree.
/// Where the relations differ they must all be left- and right-total and
/// the X sets of the side made valid nonempty; where only the sets differ
/// the relations must be left-total.
inline std::optional<Continuation> distinguishing_suffix(const WitnessSpec& first, const WitnessSpec& second)
{
    if (first.n != second.n || first.k != second.k || first.m != second.m)
        throw std::invalid_argument("specs must share n, k and m");
    if (first.R.size() != first.m || second.R.size() != second.m || first.X.size() != first.m
        || second.X.size() != second.m)
        throw std::invalid_argument("witness spec lengths do not match m");
    const std::size_t n = first.n;
    const std::size_t m = first.m;

    auto left_total = [&](const NumberRelation& r) {
        for (std::size_t x = 0; x < n; ++x)
            if (std::none_of(r.begin(), r.end(), [&](const auto& p) { return p.first == x; }))
                return false;
        return true;
    };
    auto successor = [&](const NumberRelation& r, std::size_t x) {
        for (const auto& [i, j] : r)
            if (i == x)
                return j;
        throw std::invalid_argument("relation is not left-total");
    };
    auto predecessor = [&](const NumberRelation& r, std::size_t y) {
        for (const auto& [i, j] : r)
            if (j == y)
                return i;
        throw std::invalid_argument("relation is not right-total");
    };

    Continuation c;
    c.numbers.assign(m + 1, 0);

    for (std::size_t i = 0; i < m; ++i) {
        if (first.R[i] == second.R[i])
            continue;
        for (const auto* spec : {&first, &second})
            for (const auto& r : spec->R)
                if (!left_right_total(r, n))
                    throw std::invalid_argument("relations must be left- and right-total");
        std::vector<std::pair<std::size_t, std::size_t>> only_first, only_second;
        std::set_difference(first.R[i].begin(), first.R[i].end(), second.R[i].begin(), second.R[i].end(),
                            std::back_inserter(only_first));
        std::set_difference(second.R[i].begin(), second.R[i].end(), first.R[i].begin(), first.R[i].end(),
                            std::back_inserter(only_second));
        c.first_valid = !only_first.empty() && (only_second.empty() || only_first.front() < only_second.front());
        const WitnessSpec& valid = c.first_valid ? first : second;
        const auto [s, t] = c.first_valid ? only_first.front() : only_second.front();
        c.numbers[i] = s;
        c.numbers[i + 1] = t;
        for (std::size_t j = i; j-- > 0;)
            c.numbers[j] = predecessor(valid.R[j], c.numbers[j + 1]);
        for (std::size_t j = i + 1; j < m; ++j)
            c.numbers[j + 1] = successor(valid.R[j], c.numbers[j]);
        for (const auto& x : valid.X)
            if (x.empty())
                throw std::invalid_argument("event sets must be nonempty");
        c.y_sets = valid.X;
        return c;
    }

    for (std::size_t i = 0; i < m; ++i) {
        if (first.X[i] == second.X[i])
            continue;
        for (const auto& r : first.R)
            if (!left_total(r))
                throw std::invalid_argument("relations must be left-total");
        std::vector<std::size_t> only_first, only_second;
        std::set_difference(first.X[i].begin(), first.X[i].end(), second.X[i].begin(), second.X[i].end(),
                            std::back_inserter(only_first));
        std::set_difference(second.X[i].begin(), second.X[i].end(), first.X[i].begin(), first.X[i].end(),
                            std::back_inserter(only_second));
        c.first_valid = !only_first.empty() && (only_second.empty() || only_first.front() < only_second.front());
        const WitnessSpec& valid = c.first_valid ? first : second;
        const std::size_t e = c.first_valid ? only_first.front() : only_second.front();
        for (std::size_t j = 0; j < m; ++j)
            c.numbers[j + 1] = successor(valid.R[j], c.numbers[j]);
        c.y_sets = valid.X;
        c.y_sets[i] = {e};
        for (std::size_t j = 0; j < m; ++j)
            if (c.y_sets[j].empty())
                throw std::invalid_argument("event sets must be nonempty");
        return c;
    }
    return std::nullopt;
}

} // namespace ecidpda
