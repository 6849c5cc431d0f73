#pragma once

#include "determinism.hpp"
#include "determinize.hpp"
#include "random.hpp"
#include "serialization.hpp"
#include "simulate.hpp"
#include "witness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace ecidpda {

/// Process exit codes shared by all subcommands.
enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_usage = 2 };

// ---- run ------------------------------------------------------------------

struct RunReport {
    bool accepted = false;
    std::vector<TraceStep> steps; // one per prefix length 0..|w|
    double seconds = 0;
};

inline RunReport run_report(const Ecidpda& a, const TimedString& w)
{
    const auto start = std::chrono::steady_clock::now();
    auto result = simulate(a, w);
    RunReport r;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.accepted = result.accepted;
    r.steps = std::move(result.trace);
    return r;
}

inline void print_run_report(std::ostream& out, const Ecidpda& a, const TimedString& w, const RunReport& r)
{
    out << "position  symbol  time      height  configs  states\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& step = r.steps[i];
        std::string states;
        for (auto q : step.states)
            states += (states.empty() ? "" : ",") + a.states()[q];
        out << std::left << std::setw(10) << i << std::setw(8) << (i == 0 ? "-" : w.at(i).symbol) << std::setw(10)
            << (i == 0 ? "-" : format_rational(w.at(i).time)) << std::setw(8) << step.stack_height << std::setw(9)
            << step.configurations << '{' << states << "}\n";
    }
    out << (r.accepted ? "accept" : "reject") << " (" << std::fixed << std::setprecision(6) << r.seconds << " s)\n";
    out.unsetf(std::ios::floatfield);
}

/// exit 0 on accept, 1 on reject, 2 on a usage or parse error.
inline int cmd_run(const std::string& automaton_path, const std::string& string_path, std::ostream& out,
                   std::ostream& err)
{
    try {
        const auto a = parse_automaton(read_file(automaton_path));
        const auto w = parse_timed_string(read_file(string_path), a.alphabet());
        const auto report = run_report(a, w);
        print_run_report(out, a, w, report);
        return report.accepted ? exit_ok : exit_negative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

// ---- determinize ----------------------------------------------------------

struct DeterminizeReport {
    Construction mode = Construction::direct;
    std::size_t source_states = 0;
    std::size_t source_stack = 0;
    std::size_t source_atoms = 0;
    std::size_t states = 0;
    std::size_t stack_symbols = 0;
    std::size_t rules = 0;
    std::size_t guard_atoms = 0;
    std::size_t stack_prediction_atoms = 0;
    SizeBoundCheck bounds;
    bool deterministic = false;
    double seconds = 0;
};

inline std::size_t count_stack_prediction_atoms(const Ecidpda& a)
{
    std::size_t count = 0;
    for (const auto& atom : a.atoms())
        if (atom.clock.kind == ClockKind::stack_prediction)
            ++count;
    return count;
}

inline DeterminizeReport determinize_report(const Ecidpda& source, const Determinization& d, double seconds)
{
    DeterminizeReport r;
    r.mode = d.construction;
    r.source_states = source.state_count();
    r.source_stack = source.stack_count();
    r.source_atoms = source.atoms().size();
    r.states = d.automaton.state_count();
    r.stack_symbols = d.automaton.stack_count();
    r.rules = d.automaton.rules().size();
    r.guard_atoms = d.automaton.atoms().size();
    r.stack_prediction_atoms = count_stack_prediction_atoms(d.automaton);
    r.bounds = check_size_bounds(d);
    r.deterministic = is_deterministic(d.automaton).deterministic;
    r.seconds = seconds;
    return r;
}

inline void print_determinize_report(std::ostream& out, const DeterminizeReport& r)
{
    const std::size_t n = r.source_states;
    out << "mode:            " << construction_name(r.mode) << '\n'
        << "source:          " << r.source_states << " states, " << r.source_stack << " stack symbols, "
        << r.source_atoms << " atoms\n"
        << "output:          " << r.states << " states, " << r.stack_symbols << " stack symbols, " << r.rules
        << " transitions, " << r.guard_atoms << " guard atoms\n"
        << "state bound:     " << r.states << " <= 2^" << r.bounds.state_exponent << " (n=" << n << "): "
        << (r.bounds.states_ok ? "ok" : "VIOLATED") << '\n'
        << "stack bound:     " << r.stack_symbols << " <= |calls| * 2^" << r.bounds.stack_exponent << ": "
        << (r.bounds.stack_ok ? "ok" : "VIOLATED") << '\n'
        << "stackpred atoms: " << r.stack_prediction_atoms << '\n'
        << "deterministic:   " << (r.deterministic ? "yes" : "no") << '\n'
        << "time:            " << std::fixed << std::setprecision(3) << r.seconds << " s\n";
    out.unsetf(std::ios::floatfield);
}

/// Writes the output automaton to `output_path` when it is nonempty.
/// exit 0 when the output is deterministic and within bounds, 1 otherwise,
/// 2 on usage or parse errors.
inline int cmd_determinize(const std::string& automaton_path, const std::string& mode_name,
                           const std::string& output_path, std::ostream& out, std::ostream& err)
{
    try {
        const auto mode = parse_construction(mode_name);
        if (!mode) {
            err << "error: unknown mode '" << mode_name << "' (expected untimed, direct or nostackpred)\n";
            return exit_usage;
        }
        const auto a = parse_automaton(read_file(automaton_path));
        const auto start = std::chrono::steady_clock::now();
        const auto d = determinize(a, *mode);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto report = determinize_report(a, d, seconds);
        if (!output_path.empty())
            write_file(output_path, write_automaton(d.automaton));
        print_determinize_report(out, report);
        return report.deterministic && report.bounds.ok() ? exit_ok : exit_negative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

// ---- check-det ------------------------------------------------------------

inline int cmd_check_det(const std::string& automaton_path, std::ostream& out, std::ostream& err)
{
    try {
        const auto a = parse_automaton(read_file(automaton_path));
        const auto verdict = is_deterministic(a);
        if (verdict.deterministic) {
            out << "deterministic\n";
            return exit_ok;
        }
        out << "not deterministic: " << verdict.reason << '\n';
        return exit_negative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

// ---- diff -----------------------------------------------------------------

struct DiffOptions {
    Construction mode = Construction::direct;
    std::size_t trials = 100;
    std::size_t strings_per_trial = 100;
    std::uint64_t seed = 1;
    RandomAutomatonOptions automata;
    RandomStringOptions strings;
};

struct DiffMismatch {
    std::uint64_t automaton_seed = 0;
    std::uint64_t string_seed = 0;
    bool source_accepts = false;
    bool determinized_accepts = false;

    friend bool operator==(const DiffMismatch&, const DiffMismatch&) = default;
};

struct DiffReport {
    Construction mode = Construction::direct;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<DiffMismatch> mismatches;            // sorted by (automaton seed, string seed)
    std::vector<std::uint64_t> nondeterministic;     // automaton seeds whose output failed is_deterministic
    std::vector<std::uint64_t> bound_violations;     // automaton seeds whose output broke the size bounds
    std::size_t strings = 0;
    std::size_t accepted = 0;
    std::size_t largest_output = 0;

    bool clean() const { return mismatches.empty() && nondeterministic.empty() && bound_violations.empty(); }

    friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

inline Ecidpda diff_automaton(std::uint64_t automaton_seed, const DiffOptions& o)
{
    Rng rng(automaton_seed);
    auto ao = o.automata;
    if (o.mode == Construction::untimed)
        ao.max_atoms = 0;
    return random_automaton(rng, default_random_alphabet(), ao);
}

inline TimedString diff_string(std::uint64_t string_seed, const DiffOptions& o)
{
    Rng rng(string_seed);
    return random_timed_string(rng, default_random_alphabet(), o.strings);
}

/// Trial t uses automaton seed derive_seed(seed, t); its j-th string uses
/// derive_seed(automaton seed, j). Either seed replays its part alone.
inline DiffReport run_diff(const DiffOptions& o)
{
    if (o.trials == 0)
        throw std::invalid_argument("diff needs at least one trial");
    DiffReport report;
    report.mode = o.mode;
    report.trials = o.trials;
    report.seed = o.seed;
    for (std::size_t t = 0; t < o.trials; ++t) {
        const std::uint64_t automaton_seed = derive_seed(o.seed, t);
        const auto a = diff_automaton(automaton_seed, o);
        const auto d = determinize(a, o.mode);
        report.largest_output = std::max(report.largest_output, d.automaton.state_count());
        if (!is_deterministic(d.automaton).deterministic)
            report.nondeterministic.push_back(automaton_seed);
        if (!check_size_bounds(d).ok())
            report.bound_violations.push_back(automaton_seed);
        for (std::size_t j = 0; j < o.strings_per_trial; ++j) {
            const std::uint64_t string_seed = derive_seed(automaton_seed, j);
            const auto w = diff_string(string_seed, o);
            const bool expected = accepts(a, w);
            const bool actual = accepts(d.automaton, w);
            ++report.strings;
            report.accepted += expected ? 1 : 0;
            if (expected != actual)
                report.mismatches.push_back({automaton_seed, string_seed, expected, actual});
        }
    }
    auto by_seed = [](const DiffMismatch& x, const DiffMismatch& y) {
        return std::tie(x.automaton_seed, x.string_seed) < std::tie(y.automaton_seed, y.string_seed);
    };
    std::sort(report.mismatches.begin(), report.mismatches.end(), by_seed);
    std::sort(report.nondeterministic.begin(), report.nondeterministic.end());
    std::sort(report.bound_violations.begin(), report.bound_violations.end());
    return report;
}

inline void print_diff_report(std::ostream& out, const DiffReport& r)
{
    out << "mode " << construction_name(r.mode) << ", seed " << r.seed << ", " << r.trials << " automata, "
        << r.strings << " strings (" << r.accepted << " accepted by the source), largest output " << r.largest_output
        << " states\n";
    for (const auto& m : r.mismatches)
        out << "MISMATCH automaton-seed " << m.automaton_seed << " string-seed " << m.string_seed << ": source "
            << (m.source_accepts ? "accepts" : "rejects") << ", determinized "
            << (m.determinized_accepts ? "accepts" : "rejects") << '\n';
    for (auto s : r.nondeterministic)
        out << "NONDETERMINISTIC automaton-seed " << s << '\n';
    for (auto s : r.bound_violations)
        out << "BOUND automaton-seed " << s << '\n';
    out << r.mismatches.size() << " mismatches\n";
}

inline int cmd_diff(const DiffOptions& o, std::ostream& out, std::ostream& err)
{
    try {
        const auto report = run_diff(o);
        print_diff_report(out, report);
        return report.clean() ? exit_ok : exit_negative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

// ---- witness --------------------------------------------------------------

struct WitnessOptions {
    std::size_t n = 2;
    std::size_t k = 1;
    std::size_t m = 1;
    bool exhaustive = false;
    std::string spec_path;
    std::string pair_path;   // second spec: print a distinguishing suffix
    std::string output_dir;  // NFA and generated strings go here when set
    bool determinized = true;
};

inline constexpr std::size_t max_exhaustive_n = 3;
inline constexpr std::size_t max_exhaustive_k = 2;
inline constexpr std::size_t max_exhaustive_m = 2;
inline constexpr std::size_t max_exhaustive_specs = 1'000'000;

/// (2^{n^2} 4^k)^m n^{m+1}, saturating.
inline std::size_t exhaustive_spec_count(std::size_t n, std::size_t k, std::size_t m)
{
    long double count = std::pow(2.0L, static_cast<long double>(n * n + 2 * k) * m)
                        * std::pow(static_cast<long double>(n), static_cast<long double>(m + 1));
    return count > 1e18L ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(count);
}

struct WitnessRow {
    WitnessSpec spec;
    bool valid = false;
    bool nfa = false;
    std::optional<bool> determinized;

    bool agrees() const { return nfa == valid && (!determinized || *determinized == valid); }
};

inline std::string describe_spec(const WitnessSpec& spec)
{
    std::string out = "s=";
    for (std::size_t i = 0; i < spec.s.size(); ++i)
        out += (i ? "," : "") + std::to_string(spec.s[i]);
    auto set_text = [](const EventSet& x) {
        std::string t = "{";
        for (auto e : x)
            t += (t.size() > 1 ? "," : "") + event_symbol(e);
        return t + "}";
    };
    for (std::size_t i = 0; i < spec.m; ++i) {
        out += " R" + std::to_string(i + 1) + "={";
        bool first = true;
        for (const auto& [x, y] : spec.R[i]) {
            out += (first ? "" : ",") + ("(" + std::to_string(x) + "," + std::to_string(y) + ")");
            first = false;
        }
        out += "} X" + std::to_string(i + 1) + "=" + set_text(spec.X[i]) + " Y" + std::to_string(i + 1) + "="
               + set_text(spec.Y[i]);
    }
    return out;
}

inline std::string verdict_text(bool v) { return v ? "accept" : "reject"; }

inline int cmd_witness(const WitnessOptions& o, std::ostream& out, std::ostream& err)
{
    try {
        std::vector<WitnessFile> specs;
        if (o.exhaustive == !o.spec_path.empty()) {
            err << "error: give exactly one of --exhaustive and --spec\n";
            return exit_usage;
        }
        if (o.exhaustive) {
            if (o.n == 0 || o.k == 0 || o.m == 0 || o.n > max_exhaustive_n || o.k > max_exhaustive_k
                || o.m > max_exhaustive_m) {
                err << "error: exhaustive mode needs 1 <= n <= " << max_exhaustive_n << ", 1 <= k <= "
                    << max_exhaustive_k << ", 1 <= m <= " << max_exhaustive_m << '\n';
                return exit_usage;
            }
            const auto count = exhaustive_spec_count(o.n, o.k, o.m);
            if (count > max_exhaustive_specs) {
                err << "error: n=" << o.n << ", k=" << o.k << ", m=" << o.m << " gives " << count
                    << " specs, more than the " << max_exhaustive_specs << " exhaustive mode runs\n";
                return exit_usage;
            }
            for (auto& spec : enumerate_specs(o.n, o.k, o.m))
                specs.push_back({std::move(spec), {}});
        } else {
            specs.push_back(parse_witness_spec(read_file(o.spec_path)));
            if (!o.pair_path.empty())
                specs.push_back(parse_witness_spec(read_file(o.pair_path)));
        }

        const std::size_t n = specs.front().spec.n, k = specs.front().spec.k;
        for (const auto& f : specs)
            if (f.spec.n != n || f.spec.k != k)
                throw std::invalid_argument("paired specs must share n and k");
        const auto nfa = build_witness_nfa(n, k);
        std::optional<Ecidpda> dfa;
        if (o.determinized)
            dfa = determinize_direct(nfa).automaton;

        out << "witness NFA: " << nfa.state_count() << " states, " << nfa.stack_count() << " stack symbols";
        if (dfa)
            out << "; determinized: " << dfa->state_count() << " states, " << dfa->stack_count() << " stack symbols";
        out << '\n';

        std::ofstream strings_file;
        if (!o.output_dir.empty()) {
            std::filesystem::create_directories(o.output_dir);
            const auto dir = std::filesystem::path(o.output_dir);
            write_file((dir / "witness_nfa.json").string(), write_automaton(nfa));
            if (dfa)
                write_file((dir / "witness_dfa.json").string(), write_automaton(*dfa));
            strings_file.open(dir / "strings.jsonl");
        }

        auto evaluate = [&](const WitnessSpec& spec, const TimingScheme& timing) {
            WitnessRow row;
            row.spec = spec;
            row.valid = is_valid(spec);
            const auto w = build_well_formed(spec, timing);
            row.nfa = accepts(nfa, w);
            if (dfa)
                row.determinized = accepts(*dfa, w);
            if (strings_file.is_open())
                strings_file << Json{{"spec", witness_spec_to_json(spec)}, {"string", timed_string_to_json(w)}}.dump()
                             << '\n';
            return row;
        };

        std::size_t disagreements = 0;
        out << "spec | valid | nfa | determinized\n";
        for (const auto& f : specs) {
            const auto row = evaluate(f.spec, f.timing);
            if (!row.agrees())
                ++disagreements;
            if (!o.exhaustive || !row.agrees())
                out << describe_spec(row.spec) << " | " << (row.valid ? "valid" : "invalid") << " | "
                    << verdict_text(row.nfa) << " | " << (row.determinized ? verdict_text(*row.determinized) : "-")
                    << (row.agrees() ? "" : "  DISAGREEMENT") << '\n';
        }

        if (specs.size() == 2) {
            const auto suffix = distinguishing_suffix(specs[0].spec, specs[1].spec);
            if (!suffix) {
                out << "the two specs share R and X; no distinguishing suffix\n";
            } else {
                std::string text;
                for (const auto& s : suffix_symbols(*suffix, k))
                    text += s + ' ';
                out << "distinguishing suffix: " << text << "(makes the " << (suffix->first_valid ? "first" : "second")
                    << " spec valid)\n";
                for (std::size_t i = 0; i < 2; ++i) {
                    const auto row = evaluate(complete(specs[i].spec, *suffix), specs[i].timing);
                    if (!row.agrees())
                        ++disagreements;
                    out << (i == 0 ? "first  " : "second ") << describe_spec(row.spec) << " | "
                        << (row.valid ? "valid" : "invalid") << " | " << verdict_text(row.nfa) << " | "
                        << (row.determinized ? verdict_text(*row.determinized) : "-") << '\n';
                }
            }
        }
        out << specs.size() << " specs, " << disagreements << " disagreements\n";
        return disagreements == 0 ? exit_ok : exit_negative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace ecidpda
