#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace ecidpda;
using test::q;

namespace {

// Reachable configurations, straight from the rule list and eval().
std::set<Configuration> naive_configurations(const Ecidpda& a, const TimedString& w)
{
    std::set<Configuration> current;
    for (auto p : a.initial())
        current.insert({p, {}});
    for (std::size_t i = 1; i <= w.size(); ++i) {
        std::set<Configuration> next;
        for (const auto& c : current)
            for (const auto& r : a.rules()) {
                if (r.from != c.state || a.alphabet().symbol(r.symbol) != w.at(i).symbol || !eval(r.guard, w, i))
                    continue;
                auto stack = c.stack;
                if (r.kind == RuleKind::call) {
                    stack.push_back(*r.stack);
                } else if (r.kind == RuleKind::ret) {
                    if (stack.empty() ? r.stack.has_value() : (!r.stack || *r.stack != stack.back()))
                        continue;
                    if (!stack.empty())
                        stack.pop_back();
                }
                next.insert({r.to, std::move(stack)});
            }
        current = std::move(next);
    }
    return current;
}

Ecidpda single_state(bool accepting)
{
    return AutomatonBuilder(test::example_alphabet()).state("q0", true, accepting).build();
}

TimedString retime(Rng& rng, const TimedString& w)
{
    std::vector<TimedEvent> events;
    Rational t(0);
    for (const auto& e : w.events()) {
        t += Rational(static_cast<long long>(1 + rng() % 7), static_cast<long long>(1 + rng() % 5));
        events.push_back({e.symbol, t});
    }
    return TimedString(w.alphabet(), std::move(events));
}

} // namespace

TEST_CASE("trivial automata")
{
    const auto a = single_state(true);
    CHECK(accepts(a, test::untimed(test::example_alphabet(), {})));
    CHECK_FALSE(accepts(a, make_timed_string(test::example_alphabet(), {"c"}, {q("0.5")})));
    CHECK_FALSE(accepts(single_state(false), test::untimed(test::example_alphabet(), {})));

    const auto other = make_timed_string(PartitionedAlphabet({}, {}, {"z"}), {"z"}, {q("1")});
    CHECK_THROWS_AS(simulate(a, other), std::invalid_argument);
}

TEST_CASE("automaton construction validates its parts")
{
    const auto alphabet = test::example_alphabet();
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p"}, {}, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p", "p"}, {0}, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p"}, {1}, {}, {}, {}), std::invalid_argument);
    const auto c = alphabet.require("c");
    const auto call = alphabet.require("<");
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p"}, {0}, {}, {}, {Rule{RuleKind::call, 0, c, Constraint::top(), 0, {}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p"}, {0}, {}, {}, {Rule{RuleKind::call, 0, call, Constraint::top(), 0, {}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Ecidpda(alphabet, {"p"}, {0}, {}, {"g"}, {Rule{RuleKind::call, 0, call, Constraint::top(), 0, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AutomatonBuilder(alphabet).state("p", true).internal("p", "c", parse_guard("hist(z) <= 1"), "p").build(),
                    std::invalid_argument);
}

TEST_CASE("worked-example guard fires at the outer return")
{
    const auto a = AutomatonBuilder(test::example_alphabet())
                       .state("p", true)
                       .state("q", false, true)
                       .internal("p", "c", Constraint::top(), "p")
                       .internal("q", "d", Constraint::top(), "q")
                       .call("p", "<", Constraint::top(), "p", "g")
                       .ret("p", ">", "g", parse_guard("not (stackhist > 0.5)"), "p")
                       .ret("p", ">", "g", parse_guard("stackhist > 0.5 and pred(c) >= 0"), "q")
                       .ret("p", ">", "g", parse_guard("stackhist > 0.5 and (hist(c) > 0.1 and pred(d) < 0.2)"), "q")
                       .build();
    const auto w = test::example_string();
    // the second guard needs pred(c), undefined at position 6; the third has pred(d) = 0.2
    CHECK_FALSE(accepts(a, w));
    const auto b = AutomatonBuilder(test::example_alphabet())
                       .state("p", true)
                       .state("q", false, true)
                       .internal("p", "c", Constraint::top(), "p")
                       .internal("q", "d", Constraint::top(), "q")
                       .call("p", "<", Constraint::top(), "p", "g")
                       .ret("p", ">", "g", parse_guard("not (stackhist > 0.5)"), "p")
                       .ret("p", ">", "g", parse_guard("stackhist > 0.1 or pred(c) >= 0"), "q")
                       .build();
    const auto run = simulate(b, w, {.record_trace = true, .record_witness = true});
    CHECK(run.accepted);
    REQUIRE(run.witness);
    CHECK(b.states()[(*run.witness)[5].state] == "q");
    CHECK(b.states()[(*run.witness)[4].state] == "p");
}

TEST_CASE("simulation matches a naive configuration search")
{
    Rng rng(31);
    const auto alphabet = default_random_alphabet();
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_automaton(rng, alphabet);
        for (int s = 0; s < 20; ++s) {
            const auto w = random_timed_string(rng, alphabet);
            const auto run = simulate(a, w);
            const auto expected = naive_configurations(a, w);
            REQUIRE(std::set<Configuration>(run.final_configs.begin(), run.final_configs.end()) == expected);
            bool accepting = false;
            for (const auto& c : expected)
                accepting = accepting || a.is_accepting(c.state);
            REQUIRE(run.accepted == accepting);
            REQUIRE(run.trace.size() == w.size() + 1);
        }
    }
}

TEST_CASE("all configurations share one stack height")
{
    Rng rng(32);
    const auto alphabet = default_random_alphabet();
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_automaton(rng, alphabet);
        const auto w = random_timed_string(rng, alphabet);
        for (std::size_t i = 0; i <= w.size(); ++i) {
            const auto configs = naive_configurations(a, w.prefix(i));
            std::set<std::size_t> heights;
            for (const auto& c : configs)
                heights.insert(c.stack.size());
            REQUIRE(heights.size() <= 1);
        }
    }
}

TEST_CASE("accepting witnesses replay as computations")
{
    Rng rng(33);
    const auto alphabet = default_random_alphabet();
    std::size_t checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_automaton(rng, alphabet);
        const auto w = random_timed_string(rng, alphabet);
        const auto run = simulate(a, w, {.record_trace = false, .record_witness = true});
        if (!run.accepted)
            continue;
        ++checked;
        REQUIRE(run.witness);
        REQUIRE(run.witness->size() == w.size());
        StateId state = *run.witness_start;
        REQUIRE(std::find(a.initial().begin(), a.initial().end(), state) != a.initial().end());
        std::vector<StackId> stack;
        for (std::size_t i = 1; i <= w.size(); ++i) {
            const auto& step = (*run.witness)[i - 1];
            const Rule& r = a.rules()[step.rule];
            REQUIRE(r.from == state);
            REQUIRE(a.alphabet().symbol(r.symbol) == w.at(i).symbol);
            REQUIRE(eval(r.guard, w, i));
            if (r.kind == RuleKind::call) {
                stack.push_back(*r.stack);
            } else if (r.kind == RuleKind::ret) {
                if (stack.empty()) {
                    REQUIRE_FALSE(r.stack);
                } else {
                    REQUIRE(r.stack == stack.back());
                    stack.pop_back();
                }
            }
            REQUIRE(r.to == step.state);
            state = step.state;
        }
        REQUIRE(a.is_accepting(state));
    }
    CHECK(checked > 30);
}

TEST_CASE("determinism check examples")
{
    const auto alphabet = test::example_alphabet();
    const AtomUniverse psi({make_atom(Clock::history("c"), Comparison::at_most, q("1")),
                            make_atom(Clock::stack_history(), Comparison::at_least, q("2"))});
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t t = 0; t < 4; ++t) {
            const auto a = AutomatonBuilder(alphabet)
                               .state("q", true)
                               .call("q", "<", xi(psi, s), "q", "g")
                               .call("q", "<", xi(psi, t), "q", "h")
                               .build();
            CHECK(is_deterministic(a).deterministic == (s != t));
        }

    const auto two_true = AutomatonBuilder(alphabet)
                              .state("q", true)
                              .internal("q", "c", Constraint::top(), "q")
                              .internal("q", "c", Constraint::top(), "p")
                              .build();
    const auto verdict = is_deterministic(two_true);
    CHECK_FALSE(verdict.deterministic);
    CHECK(verdict.rules == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK_FALSE(verdict.reason.empty());

    CHECK_FALSE(is_deterministic(AutomatonBuilder(alphabet).state("p", true).state("q", true).build()));

    // returns conflict only when they pop the same symbol
    const auto pops = AutomatonBuilder(alphabet)
                          .state("q", true)
                          .stack_symbol("g")
                          .stack_symbol("h")
                          .ret("q", ">", "g", Constraint::top(), "q")
                          .ret("q", ">", "h", Constraint::top(), "q")
                          .ret("q", ">", std::nullopt, Constraint::top(), "q")
                          .build();
    CHECK(is_deterministic(pops));
    const auto same_pop = AutomatonBuilder(alphabet)
                              .state("q", true)
                              .ret("q", ">", std::nullopt, Constraint::top(), "q")
                              .ret("q", ">", std::nullopt, parse_guard("stackhist <= 1"), "q")
                              .build();
    CHECK_FALSE(is_deterministic(same_pop));
}

TEST_CASE("deterministic automata keep at most one configuration")
{
    Rng rng(34);
    const auto alphabet = default_random_alphabet();
    std::size_t deterministic = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        RandomAutomatonOptions o;
        o.max_rules_per_slot = 1;
        const auto a = random_automaton(rng, alphabet, o);
        if (!is_deterministic(a))
            continue;
        ++deterministic;
        for (int s = 0; s < 10; ++s)
            REQUIRE(simulate(a, random_timed_string(rng, alphabet)).max_configurations <= 1);
    }
    CHECK(deterministic > 100);
}

TEST_CASE("untimed embedding")
{
    const auto alphabet = test::example_alphabet();
    const auto c = alphabet.require("c");
    const auto a = embed_untimed(alphabet, {"q", "r"}, {0}, {1}, {}, {UntimedRule{RuleKind::internal, 0, c, 1, {}}});
    REQUIRE(a.rules().size() == 1);
    CHECK(a.rules()[0].guard == Constraint::top());
    CHECK(all_guards_true(a));
    CHECK(accepts(a, test::untimed(alphabet, {"c"})));

    const auto empty = embed_untimed(alphabet, {"q"}, {0}, {0}, {}, {});
    CHECK(accepts(empty, test::untimed(alphabet, {})));
    for (const auto& s : alphabet.symbols())
        CHECK_FALSE(accepts(empty, test::untimed(alphabet, {s})));
}

TEST_CASE("untimed automata ignore timestamps")
{
    Rng rng(35);
    const auto alphabet = default_random_alphabet();
    RandomAutomatonOptions o;
    o.max_atoms = 0;
    std::size_t accepted = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_automaton(rng, alphabet, o);
        REQUIRE(all_guards_true(a));
        const auto w = random_timed_string(rng, alphabet);
        const bool verdict = accepts(a, w);
        accepted += verdict ? 1 : 0;
        REQUIRE(accepts(a, retime(rng, w)) == verdict);
    }
    CHECK(accepted > 0);
}

TEST_CASE("adding a rule never loses a string")
{
    Rng rng(36);
    const auto alphabet = default_random_alphabet();
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_automaton(rng, alphabet);
        const auto extra = random_automaton(rng, alphabet);
        std::vector<Rule> rules = a.rules();
        for (const auto& r : extra.rules())
            if (r.from < a.state_count() && r.to < a.state_count() && (!r.stack || *r.stack < a.stack_count())) {
                rules.push_back(r);
                break;
            }
        std::vector<StateId> accepting = a.accepting();
        const Ecidpda bigger(a.alphabet(), a.states(), a.initial(), accepting, a.stack_symbols(), rules);
        for (int s = 0; s < 20; ++s) {
            const auto w = random_timed_string(rng, alphabet);
            if (accepts(a, w))
                REQUIRE(accepts(bigger, w));
        }
    }
}

TEST_CASE("automaton JSON round trip")
{
    Rng rng(37);
    const auto alphabet = default_random_alphabet();
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_automaton(rng, alphabet);
        const auto b = parse_automaton(write_automaton(a));
        REQUIRE(b.states() == a.states());
        REQUIRE(b.initial() == a.initial());
        REQUIRE(b.accepting() == a.accepting());
        REQUIRE(b.stack_symbols() == a.stack_symbols());
        REQUIRE(b.rules().size() == a.rules().size());
        for (std::size_t r = 0; r < a.rules().size(); ++r) {
            REQUIRE(b.rules()[r].kind == a.rules()[r].kind);
            REQUIRE(b.rules()[r].from == a.rules()[r].from);
            REQUIRE(b.rules()[r].to == a.rules()[r].to);
            REQUIRE(b.rules()[r].symbol == a.rules()[r].symbol);
            REQUIRE(b.rules()[r].stack == a.rules()[r].stack);
            REQUIRE(b.rules()[r].guard == a.rules()[r].guard);
        }
    }
}

TEST_CASE("automaton JSON errors")
{
    const std::string head = R"({"alphabet":{"calls":["<"],"returns":[">"],"internals":["c"]},)"
                             R"("states":["p"],"initial":["p"],"accepting":["p"],"stack":["g"],"transitions":[)";
    auto message = [&](const std::string& transitions) -> std::string {
        try {
            parse_automaton(head + transitions + "]}");
        } catch (const ParseError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message(R"({"from":"p","symbol":"c","to":"p"})").empty());
    CHECK(message(R"({"from":"p","symbol":">","pop":"bottom","to":"p"})").empty());
    CHECK(message(R"({"from":"x","symbol":"c","to":"p"})").find("unknown state 'x'") != std::string::npos);
    CHECK(message(R"({"from":"p","symbol":"z","to":"p"})").find("not in the alphabet") != std::string::npos);
    CHECK(message(R"({"from":"p","symbol":"<","to":"p"})").find("missing key 'push'") != std::string::npos);
    CHECK(message(R"({"from":"p","symbol":"c","to":"p","push":"g"})").find("neither push nor pop")
          != std::string::npos);
    CHECK(message(R"({"from":"p","symbol":"c","to":"p","guard":"stackhist <="})").find("transition 0: guard")
          != std::string::npos);
    CHECK(message(R"({"from":"p","symbol":">","pop":"h","to":"p"})").find("unknown stack symbol")
          != std::string::npos);
    CHECK_THROWS_AS(parse_automaton(R"({"states":["p"]})"), ParseError);
    CHECK_THROWS_AS(parse_automaton("[1, 2"), ParseError);
}
