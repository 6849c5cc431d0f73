// Runs the eight acceptance criteria and prints one PASS/FAIL line each.

#include <ecidpda/ecidpda.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ecidpda;

namespace {

// pinned tolerances
constexpr double example_budget_seconds = 1.0;
constexpr double differential_budget_seconds = 900.0; // per construction
constexpr std::size_t automata_per_construction = 1000;
constexpr std::size_t strings_per_automaton = 100;
constexpr std::size_t allowed_mismatches = 0;
constexpr std::size_t sampled_runs = 100;
constexpr std::uint64_t base_seed = 20240601;

Rational q(const char* text) { return parse_rational(text); }

using Clockwatch = std::chrono::steady_clock;

double since(Clockwatch::time_point start)
{
    return std::chrono::duration<double>(Clockwatch::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

void report(int number, const std::string& title, const Outcome& o)
{
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << number << ": " << title << " (" << o.detail << ")"
              << std::endl;
}

// Facts about every determinized output, kept for criteria 5 and 8.
struct OutputLedger {
    std::size_t outputs = 0;
    std::size_t nondeterministic = 0;
    std::size_t multi_configuration_runs = 0;
    std::size_t bound_violations = 0;
    std::size_t construction_failures = 0;
};

struct Differential {
    std::size_t mismatches = 0;
    std::size_t strings = 0;
    std::size_t accepted = 0;
    std::size_t oracle_checks = 0;
    std::size_t oracle_failures = 0;
    std::size_t stack_prediction_atoms = 0;
    double seconds = 0;
};

Differential differential(Construction mode, const RandomAutomatonOptions& options, std::uint64_t seed,
                          OutputLedger& ledger)
{
    Differential r;
    const auto start = Clockwatch::now();
    const auto alphabet = default_random_alphabet();
    for (std::size_t t = 0; t < automata_per_construction; ++t) {
        const auto automaton_seed = derive_seed(seed, t);
        Rng rng(automaton_seed);
        const auto a = random_automaton(rng, alphabet, options);
        std::optional<Determinization> built;
        try {
            built.emplace(determinize(a, mode));
        } catch (const std::exception& e) {
            ++ledger.construction_failures;
            std::cerr << "seed " << automaton_seed << ": " << e.what() << '\n';
            continue;
        }
        const auto& d = *built;
        ++ledger.outputs;
        if (!is_deterministic(d.automaton))
            ++ledger.nondeterministic;
        if (!check_size_bounds(d).ok())
            ++ledger.bound_violations;
        if (mode == Construction::no_stack_prediction)
            r.stack_prediction_atoms += count_stack_prediction_atoms(d.automaton);

        bool multi = false;
        for (std::size_t j = 0; j < strings_per_automaton; ++j) {
            Rng string_rng(derive_seed(automaton_seed, j));
            const auto w = random_timed_string(string_rng, alphabet);
            const bool check_oracle = j == 0 && t < sampled_runs && mode != Construction::untimed;
            const auto run = simulate(d.automaton, w, {.record_trace = check_oracle, .record_witness = false});
            const bool expected = accepts(a, w);
            ++r.strings;
            r.accepted += expected ? 1 : 0;
            if (run.accepted != expected) {
                ++r.mismatches;
                std::cerr << "mismatch: automaton seed " << automaton_seed << ", string " << j << '\n';
            }
            multi = multi || run.max_configurations > 1;
            if (!check_oracle || run.trace.size() != w.size() + 1 || run.max_configurations != 1)
                continue;
            ++r.oracle_checks;
            if (mode == Construction::direct) {
                for (std::size_t i = 0; i <= w.size(); ++i)
                    if (d.states[run.trace[i].states.front()].pairs != pair_semantics_oracle(a, w, i)) {
                        ++r.oracle_failures;
                        break;
                    }
            } else {
                StateSet reachable(a.state_count());
                for (auto s : simulate(a, w).final_states())
                    reachable.insert(s);
                if (d.states[run.trace.back().states.front()].survivors != reachable)
                    ++r.oracle_failures;
            }
        }
        ledger.multi_configuration_runs += multi ? 1 : 0;
    }
    r.seconds = since(start);
    return r;
}

std::string describe(const Differential& r)
{
    std::ostringstream out;
    out << r.strings << " strings, " << r.accepted << " accepted, " << r.mismatches << " mismatches, "
        << std::fixed;
    out.precision(1);
    out << r.seconds << " s";
    return out.str();
}

Outcome criterion_example()
{
    const auto start = Clockwatch::now();
    const PartitionedAlphabet alphabet({"<"}, {">"}, {"c", "d"});
    const auto w = make_timed_string(alphabet, {"c", "<", "<", "c", ">", ">", "d"},
                                     {q("0.1"), q("0.2"), q("0.4"), q("0.5"), q("0.7"), q("0.8"), q("1")});
    const std::vector<std::pair<Clock, std::optional<Rational>>> expected{
        {Clock::stack_history(), q("0.6")},   {Clock::history("<"), q("0.4")},
        {Clock::history("c"), q("0.3")},      {Clock::history(">"), q("0.1")},
        {Clock::prediction("d"), q("0.2")},   {Clock::history("d"), std::nullopt},
        {Clock::prediction("<"), std::nullopt}, {Clock::prediction("c"), std::nullopt},
        {Clock::prediction(">"), std::nullopt}, {Clock::stack_prediction(), std::nullopt},
    };
    std::size_t wrong = 0;
    for (const auto& [clock, value] : expected)
        if (clock_value(w, 6, clock) != value)
            ++wrong;
    const bool first = eval(parse_guard("stackhist > 0.1 or pred(c) >= 0"), w, 6);
    const bool second = eval(parse_guard("hist(c) > 0.1 and pred(d) < 0.2"), w, 6);
    const double seconds = since(start);
    std::ostringstream out;
    out << wrong << " wrong clock values, constraints " << first << "/" << second << ", " << seconds << " s";
    return {wrong == 0 && first && !second && seconds < example_budget_seconds, out.str()};
}

Outcome criterion_untimed(OutputLedger& ledger)
{
    RandomAutomatonOptions o;
    o.max_states = 4;
    o.max_stack = 2;
    o.max_atoms = 0;
    const auto r = differential(Construction::untimed, o, derive_seed(base_seed, 2), ledger);
    return {r.mismatches <= allowed_mismatches && r.seconds <= differential_budget_seconds, describe(r)};
}

RandomAutomatonOptions timed_options()
{
    RandomAutomatonOptions o;
    o.max_states = 3;
    o.max_stack = 2;
    o.max_atoms = 3;
    return o;
}

Outcome criterion_direct(OutputLedger& ledger)
{
    const auto r = differential(Construction::direct, timed_options(), derive_seed(base_seed, 3), ledger);
    const bool pass = r.mismatches <= allowed_mismatches && r.oracle_checks == sampled_runs && r.oracle_failures == 0
                      && r.seconds <= differential_budget_seconds;
    return {pass, describe(r) + "; pair sets checked on " + std::to_string(r.oracle_checks) + " runs, "
                      + std::to_string(r.oracle_failures) + " differ"};
}

Outcome criterion_no_stack_prediction(OutputLedger& ledger)
{
    const auto r =
        differential(Construction::no_stack_prediction, timed_options(), derive_seed(base_seed, 4), ledger);
    const bool pass = r.mismatches <= allowed_mismatches && r.stack_prediction_atoms == 0
                      && r.oracle_checks == sampled_runs && r.oracle_failures == 0
                      && r.seconds <= differential_budget_seconds;
    return {pass, describe(r) + "; " + std::to_string(r.stack_prediction_atoms) + " stackpred atoms in outputs; "
                      + "final survivors checked on " + std::to_string(r.oracle_checks) + " runs, "
                      + std::to_string(r.oracle_failures) + " differ"};
}

Outcome criterion_bounds(const OutputLedger& ledger, std::size_t witness_violations)
{
    const std::size_t violations = ledger.bound_violations + witness_violations;
    return {violations == 0 && ledger.construction_failures == 0,
            std::to_string(ledger.outputs + 1) + " outputs, " + std::to_string(violations) + " over the bound, "
                + std::to_string(ledger.construction_failures) + " constructions aborted"};
}

Outcome criterion_witness(std::size_t& witness_violations)
{
    const auto start = Clockwatch::now();
    const auto nfa = build_witness_nfa(2, 1);
    const auto d = determinize_direct(nfa);
    witness_violations = check_size_bounds(d).ok() ? 0 : 1;
    std::size_t specs = 0, nfa_wrong = 0, dfa_wrong = 0;
    for (std::size_t m = 1; m <= 2; ++m)
        for (const auto& spec : enumerate_specs(2, 1, m)) {
            const auto w = build_well_formed(spec);
            const bool valid = is_valid(spec);
            ++specs;
            nfa_wrong += accepts(nfa, w) != valid ? 1 : 0;
            const auto run = simulate(d.automaton, w, {.record_trace = false, .record_witness = false});
            dfa_wrong += run.accepted != valid || run.max_configurations > 1 ? 1 : 0;
        }
    std::ostringstream out;
    out << specs << " specs, NFA wrong on " << nfa_wrong << ", determinized wrong on " << dfa_wrong << ", "
        << nfa.stack_count() << " stack symbols, " << since(start) << " s";
    return {specs == 256 + 32768 && nfa_wrong == 0 && dfa_wrong == 0 && nfa.stack_count() == 2, out.str()};
}

Outcome criterion_separation()
{
    const std::size_t n = 2, k = 1;
    const auto nfa = build_witness_nfa(n, k);
    std::vector<WitnessSpec> prefixes;
    for (const auto& r : all_relations(n)) {
        if (!left_right_total(r, n))
            continue;
        for (const auto& x : all_event_sets(k)) {
            if (x.empty())
                continue;
            WitnessSpec spec;
            spec.n = n;
            spec.k = k;
            spec.m = 1;
            spec.R = {r};
            spec.X = {x};
            prefixes.push_back(spec);
        }
    }
    std::size_t pairs = 0, separated = 0;
    for (const auto& a : prefixes)
        for (const auto& b : prefixes) {
            if (a.R == b.R && a.X == b.X)
                continue;
            ++pairs;
            const auto c = distinguishing_suffix(a, b);
            if (!c)
                continue;
            const bool va = accepts(nfa, build_well_formed(complete(a, *c)));
            const bool vb = accepts(nfa, build_well_formed(complete(b, *c)));
            separated += va != vb && va == c->first_valid ? 1 : 0;
        }
    return {pairs > 0 && separated == pairs,
            std::to_string(separated) + "/" + std::to_string(pairs) + " ordered pairs separated over "
                + std::to_string(prefixes.size()) + " prefixes"};
}

Outcome criterion_determinism(const OutputLedger& ledger)
{
    return {ledger.outputs == 3 * automata_per_construction && ledger.nondeterministic == 0
                && ledger.multi_configuration_runs == 0,
            std::to_string(ledger.outputs) + " outputs, " + std::to_string(ledger.nondeterministic)
                + " nondeterministic, " + std::to_string(ledger.multi_configuration_runs)
                + " with more than one configuration"};
}

} // namespace

int main()
{
    OutputLedger ledger;
    std::size_t witness_violations = 0;
    std::vector<std::pair<int, Outcome>> results;
    std::vector<std::string> titles{"",
                                    "worked example clock values and constraints",
                                    "untimed construction matches the simulator",
                                    "direct timed construction matches the simulator and the pair oracle",
                                    "construction without stack prediction matches and is free of it",
                                    "output sizes within the upper bounds",
                                    "witness NFA and its determinization decide validity",
                                    "distinguishing suffixes separate every pair",
                                    "all outputs are deterministic"};
    auto run = [&](int number, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        results.emplace_back(number, o);
    };
    run(1, criterion_example);
    run(2, [&] { return criterion_untimed(ledger); });
    run(3, [&] { return criterion_direct(ledger); });
    run(4, [&] { return criterion_no_stack_prediction(ledger); });
    run(6, [&] { return criterion_witness(witness_violations); });
    run(5, [&] { return criterion_bounds(ledger, witness_violations); });
    run(7, criterion_separation);
    run(8, [&] { return criterion_determinism(ledger); });
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    bool all = true;
    for (const auto& [number, o] : results) {
        report(number, titles[number], o);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
