#include <ecidpda/ecidpda.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace ecidpda;

    CLI::App app{"Event-clock input-driven pushdown automata: simulation, determinization, witness strings"};
    app.require_subcommand(1);

    std::string automaton_path, string_path, output_path, mode_name = "direct";

    auto* run = app.add_subcommand("run", "Simulate an automaton on a timed string and print the trace");
    run->add_option("automaton", automaton_path, "automaton JSON")->required();
    run->add_option("string", string_path, "timed string (JSON, or one '<symbol> <time>' per line)")->required();

    auto* det = app.add_subcommand("determinize", "Determinize an automaton");
    det->add_option("automaton", automaton_path, "automaton JSON")->required();
    det->add_option("--mode", mode_name, "untimed, direct or nostackpred")
        ->check(CLI::IsMember({"untimed", "direct", "nostackpred"}));
    det->add_option("-o,--output", output_path, "where to write the deterministic automaton");

    auto* check = app.add_subcommand("check-det", "Check that an automaton is deterministic");
    check->add_option("automaton", automaton_path, "automaton JSON")->required();

    DiffOptions diff_options;
    auto* diff = app.add_subcommand("diff", "Compare random automata with their determinizations");
    diff->add_option("--mode", mode_name, "untimed, direct or nostackpred")
        ->check(CLI::IsMember({"untimed", "direct", "nostackpred"}));
    diff->add_option("--trials", diff_options.trials, "number of random automata")->check(CLI::PositiveNumber);
    diff->add_option("--strings", diff_options.strings_per_trial, "random strings per automaton");
    diff->add_option("--seed", diff_options.seed, "64-bit seed");
    diff->add_option("--max-states", diff_options.automata.max_states)->check(CLI::PositiveNumber);
    diff->add_option("--max-stack", diff_options.automata.max_stack)->check(CLI::PositiveNumber);
    diff->add_option("--max-atoms", diff_options.automata.max_atoms);
    diff->add_option("--max-length", diff_options.strings.max_length);

    WitnessOptions witness_options;
    auto* witness = app.add_subcommand("witness", "Check the witness NFA on generated well-formed strings");
    witness->add_option("--n", witness_options.n, "numbers 0..n-1")->check(CLI::PositiveNumber);
    witness->add_option("--k", witness_options.k, "events e1..ek")->check(CLI::PositiveNumber);
    witness->add_option("--m", witness_options.m, "nesting depth")->check(CLI::PositiveNumber);
    auto* exhaustive = witness->add_flag("--exhaustive", witness_options.exhaustive, "all specs for n, k, m");
    auto* spec = witness->add_option("--spec", witness_options.spec_path, "spec JSON");
    witness->add_option("--pair", witness_options.pair_path, "second spec JSON; prints a distinguishing suffix")
        ->needs(spec);
    witness->add_option("--out", witness_options.output_dir, "directory for the NFA and the strings");
    bool skip_determinized = false;
    witness->add_flag("--no-determinize", skip_determinized, "skip the determinized verdict column");
    exhaustive->excludes(spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*run)
        return cmd_run(automaton_path, string_path, std::cout, std::cerr);
    if (*det)
        return cmd_determinize(automaton_path, mode_name, output_path, std::cout, std::cerr);
    if (*check)
        return cmd_check_det(automaton_path, std::cout, std::cerr);
    if (*diff) {
        diff_options.mode = *parse_construction(mode_name);
        return cmd_diff(diff_options, std::cout, std::cerr);
    }
    witness_options.determinized = !skip_determinized;
    return cmd_witness(witness_options, std::cout, std::cerr);
}
