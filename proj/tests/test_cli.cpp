#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

using namespace ecidpda;
using test::q;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("ecidpda_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const
    {
        const auto p = (path / name).string();
        write_file(p, content);
        return p;
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// accepts when the last `a` comes within 1 of the previous one
Ecidpda close_pair()
{
    return AutomatonBuilder(default_random_alphabet())
        .state("p", true)
        .state("q", false, true)
        .internal("p", "a", Constraint::top(), "p")
        .internal("p", "b", Constraint::top(), "p")
        .internal("p", "a", parse_guard("hist(a) <= 1"), "q")
        .build();
}

int shell(const std::string& args)
{
    const std::string command = std::string(ECIDPDA_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("run exit codes")
{
    TempDir dir;
    const auto automaton = dir.file("a.json", write_automaton(close_pair()));
    const auto yes = dir.file("yes.txt", "a 1\nb 1.5\na 1.75\n");
    const auto no = dir.file("no.txt", "a 1\n# a comment\na 3\n");
    const auto json = dir.file("yes.json", timed_string_to_json(make_timed_string(default_random_alphabet(), {"a", "a"},
                                                                                 {q("0"), q("1")}))
                                               .dump());
    const auto broken = dir.file("broken.txt", "a 1\na 0.5\n");
    std::ostringstream out, err;
    CHECK(cmd_run(automaton, yes, out, err) == exit_ok);
    CHECK(out.str().find("accept") != std::string::npos);
    CHECK(cmd_run(automaton, no, out, err) == exit_negative);
    CHECK(cmd_run(automaton, json, out, err) == exit_ok);
    CHECK(err.str().empty());
    CHECK(cmd_run(automaton, broken, out, err) == exit_usage);
    CHECK(err.str().find("line 2") != std::string::npos);
    CHECK(cmd_run(automaton, dir / "missing.txt", out, err) == exit_usage);
    CHECK(cmd_run(dir.file("bad.json", "{\"alphabet\": 3}"), yes, out, err) == exit_usage);
}

TEST_CASE("run trace lists every prefix")
{
    const auto a = close_pair();
    const auto w = make_timed_string(a.alphabet(), {"a", "b", "a"}, {q("1"), q("1.5"), q("1.75")});
    const auto r = run_report(a, w);
    CHECK(r.accepted);
    REQUIRE(r.steps.size() == 4);
    CHECK(r.steps[3].configurations == 2);
    std::ostringstream out;
    print_run_report(out, a, w, r);
    CHECK(out.str().find("{p,q}") != std::string::npos);
    CHECK(out.str().find("1.75") != std::string::npos);
}

TEST_CASE("determinize writes a deterministic equivalent automaton")
{
    TempDir dir;
    const auto source = close_pair();
    const auto input = dir.file("a.json", write_automaton(source));
    for (const auto* mode : {"direct", "nostackpred"}) {
        std::ostringstream out, err;
        const auto output = dir / (std::string(mode) + ".json");
        REQUIRE(cmd_determinize(input, mode, output, out, err) == exit_ok);
        CHECK(out.str().find("deterministic") != std::string::npos);
        const auto d = parse_automaton(read_file(output));
        CHECK(is_deterministic(d));
        std::ostringstream check_out;
        CHECK(cmd_check_det(output, check_out, err) == exit_ok);
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            const auto w = random_timed_string(rng, source.alphabet());
            REQUIRE(accepts(d, w) == accepts(source, w));
        }
    }
    std::ostringstream out, err;
    CHECK(cmd_determinize(input, "untimed", "", out, err) == exit_usage);
    CHECK(cmd_determinize(input, "powerset", "", out, err) == exit_usage);
    CHECK(err.str().find("unknown mode") != std::string::npos);
}

TEST_CASE("check-det reports nondeterminism")
{
    TempDir dir;
    std::ostringstream out, err;
    CHECK(cmd_check_det(dir.file("a.json", write_automaton(close_pair())), out, err) == exit_negative);
    CHECK(out.str().find("not deterministic") != std::string::npos);
    CHECK(cmd_check_det(dir.file("b.json", "not json"), out, err) == exit_usage);
}

TEST_CASE("diff is reproducible and replayable")
{
    DiffOptions o;
    o.trials = 10;
    o.strings_per_trial = 20;
    o.seed = 99;
    o.automata.max_states = 3;
    const auto first = run_diff(o);
    CHECK(first.clean());
    CHECK(first == run_diff(o));
    CHECK(first.strings == 200);

    // a single trial replays from its automaton seed
    const auto a = diff_automaton(derive_seed(o.seed, 3), o);
    const auto again = diff_automaton(derive_seed(o.seed, 3), o);
    CHECK(write_automaton(a) == write_automaton(again));
    CHECK(diff_string(5, o) == diff_string(5, o));

    o.mode = Construction::untimed;
    const auto untimed = run_diff(o);
    CHECK(untimed.clean());

    std::ostringstream out, err;
    o.trials = 0;
    CHECK(cmd_diff(o, out, err) == exit_usage);
}

TEST_CASE("witness subcommand")
{
    TempDir dir;
    std::ostringstream out, err;
    WitnessOptions o;
    o.exhaustive = true;
    o.output_dir = dir / "out";
    CHECK(cmd_witness(o, out, err) == exit_ok);
    CHECK(out.str().find("256 specs, 0 disagreements") != std::string::npos);
    CHECK(is_deterministic(parse_automaton(read_file(dir / "out/witness_dfa.json"))));
    CHECK(parse_automaton(read_file(dir / "out/witness_nfa.json")).state_count() == 11);
    std::ifstream lines(dir / "out/strings.jsonl");
    std::size_t count = 0;
    for (std::string line; std::getline(lines, line); ++count) {
        const auto j = Json::parse(line);
        const auto spec = witness_spec_from_json(j["spec"]).spec;
        REQUIRE(timed_string_from_json(j["string"]) == build_well_formed(spec));
    }
    CHECK(count == 256);

    WitnessSpec r;
    r.n = 2;
    r.k = 1;
    r.m = 1;
    r.s = {0, 0};
    r.R = {{{0, 0}, {1, 1}}};
    r.X = {{1}};
    r.Y = {{1}};
    auto r_prime = r;
    r_prime.R[0].insert({0, 1});
    WitnessOptions pair;
    pair.spec_path = dir.file("r.json", witness_spec_to_json(r).dump());
    pair.pair_path = dir.file("r2.json", witness_spec_to_json(r_prime).dump());
    std::ostringstream pair_out;
    CHECK(cmd_witness(pair, pair_out, err) == exit_ok);
    CHECK(pair_out.str().find("distinguishing suffix: c e1 e1 > (makes the second spec valid)") != std::string::npos);
    CHECK(pair_out.str().find("2 specs, 0 disagreements") != std::string::npos);
}

TEST_CASE("witness limits")
{
    std::ostringstream out, err;
    WitnessOptions o;
    CHECK(cmd_witness(o, out, err) == exit_usage);
    o.exhaustive = true;
    o.spec_path = "x.json";
    CHECK(cmd_witness(o, out, err) == exit_usage);
    o.spec_path.clear();
    o.n = 4;
    CHECK(cmd_witness(o, out, err) == exit_usage);
    o.n = 3;
    o.k = 2;
    o.m = 2;
    CHECK(cmd_witness(o, out, err) == exit_usage);
    CHECK(err.str().find("more than the 1000000") != std::string::npos);
    CHECK(exhaustive_spec_count(2, 2, 2) == 524288);
    CHECK(exhaustive_spec_count(3, 1, 2) > max_exhaustive_specs);
    CHECK(exhaustive_spec_count(3, 2, 1) <= max_exhaustive_specs);
}

TEST_CASE("command line front end")
{
    TempDir dir;
    const auto automaton = dir.file("a.json", write_automaton(close_pair()));
    CHECK(shell("--help") == 0);
    CHECK(shell("") == exit_usage);
    CHECK(shell("frobnicate") == exit_usage);
    CHECK(shell("run " + automaton) == exit_usage);
    CHECK(shell("run " + automaton + " " + dir.file("s.txt", "a 1\na 2\n")) == exit_ok);
    CHECK(shell("run " + automaton + " " + dir.file("t.txt", "a 1\na 2.5\n")) == exit_negative);
    CHECK(shell("determinize --mode bogus " + automaton) == exit_usage);
    CHECK(shell("determinize --mode nostackpred " + automaton + " -o " + (dir / "d.json")) == exit_ok);
    CHECK(shell("check-det " + (dir / "d.json")) == exit_ok);
    CHECK(shell("check-det " + automaton) == exit_negative);
    CHECK(shell("diff --trials 3 --strings 5 --seed 11") == exit_ok);
    CHECK(shell("witness --exhaustive --n 1 --k 1 --m 1") == exit_ok);
    CHECK(shell("witness --exhaustive --n 3 --k 2 --m 2") == exit_usage);
}
