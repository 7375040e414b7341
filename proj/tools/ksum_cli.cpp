// Command-line harness: instance generation, solving under every mode,
// cross-mode verification, and CSV benchmarking.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage/parse error, 3 internal.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ksum/blocking.hpp"
#include "ksum/io_json.hpp"
#include "ksum/solver.hpp"

using namespace ksum;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Rational> parse_rational_list(const std::string& csv) {
    std::vector<Rational> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

// "lo..hi" or a comma list
std::vector<int> parse_range(const std::string& s) {
    if (auto dots = s.find(".."); dots != std::string::npos) {
        int lo = std::stoi(s.substr(0, dots));
        int hi = std::stoi(s.substr(dots + 2));
        std::vector<int> out;
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    return parse_int_list(s);
}

struct SolveArgs {
    std::string input;
    std::string gen;
    std::string mode = "meiser";
    int n = 0, k = 0;
    int blocks = 2;
    std::string epsilon = "1/2";
    std::string net_constant = "1";
    long base_case = 64;
    bool distinct = false;
    std::string alpha;
    std::string constant = "0";
    std::uint64_t seed = 1;
    bool allow_decimal = false;
    std::string emit = "json";
};

InstanceFile load_or_generate(const SolveArgs& a) {
    if (!a.input.empty()) {
        std::ifstream in(a.input);
        if (!in) throw UsageError("cannot open input file: " + a.input);
        Json j = Json::parse(in);
        return instance_from_json(j, a.allow_decimal);
    }
    if (a.gen.empty()) throw UsageError("need --input or --gen");
    if (a.n <= 0 || a.k <= 0) throw UsageError("--gen needs --n and --k");
    InstanceFile f;
    f.inst.n = a.n;
    f.inst.k = a.k;
    f.inst.alpha = a.alpha.empty() ? std::vector<Rational>(a.k, Rational(1))
                                   : parse_rational_list(a.alpha);
    f.inst.c = parse_rational(a.constant);
    f.inst.distinct = a.distinct;
    Rng rng(a.seed);
    f.values = generate_values(f.inst, gen_profile_from_string(a.gen), rng);
    return f;
}

SolveConfig config_from(const SolveArgs& a) {
    SolveConfig cfg;
    cfg.epsilon = parse_rational(a.epsilon);
    cfg.net_constant = parse_rational(a.net_constant);
    cfg.base_case_threshold = a.base_case;
    cfg.rng_seed = a.seed;
    return cfg;
}

SolverReport run_mode(const std::string& mode, const InstanceFile& f, const SolveConfig& cfg,
                      int blocks) {
    SignOracle oracle = make_oracle(f.inst, f.values);
    SolverReport r;
    if (mode == "brute")
        r = run_brute(oracle, f.inst);
    else if (mode == "mim")
        r = run_meet_in_middle(oracle, f.inst);
    else if (mode == "meiser")
        r = solve(oracle, f.inst, cfg);
    else if (mode == "two-phase")
        r = solve_two_phase(oracle, f.inst, cfg);
    else if (mode == "blocked")
        r = solve_blocked(oracle, f.inst, blocks, cfg);
    else
        throw UsageError("unknown mode: " + mode);
    oracle.seal();
    return r;
}

int cmd_solve(const SolveArgs& a) {
    if (a.emit != "json") throw UsageError("solve emits json");
    InstanceFile f = load_or_generate(a);
    SolverReport r = run_mode(a.mode, f, config_from(a), a.blocks);
    Json j = report_to_json(r);
    j["mode"] = a.mode;
    j["n"] = f.inst.n;
    j["k"] = f.inst.k;
    std::cout << j.dump(2) << "\n";
    return r.ok ? 0 : 3;
}

int cmd_gen(const SolveArgs& a, const std::string& out_path) {
    if (a.gen.empty() || a.n <= 0 || a.k <= 0) throw UsageError("gen needs --profile, --n, --k");
    InstanceFile f = load_or_generate(a);
    Json j = instance_to_json(f);
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw UsageError("cannot write: " + out_path);
        out << j.dump(2) << "\n";
    }
    return 0;
}

struct VerifyArgs {
    long count = 100;
    std::string ks = "3";
    std::string ns = "6..10";
    std::string profiles = "planted,none,zeros,duplicates";
    std::uint64_t seed = 1;
    std::string epsilon = "1/2";
    std::string net_constant = "1";
    long base_case = 64;
    std::string blocks = "2,3";
    bool inject_fault = false;  // test fixture: flip one reference answer
};

int cmd_verify(const VerifyArgs& va) {
    std::vector<int> ks = parse_int_list(va.ks);
    std::vector<int> ns = parse_range(va.ns);
    std::vector<std::string> profiles;
    {
        std::stringstream ss(va.profiles);
        std::string item;
        while (std::getline(ss, item, ',')) profiles.push_back(item);
    }
    std::vector<int> blocks = parse_int_list(va.blocks);
    if (va.count == 0) {
        std::cerr << "verify: count is 0, nothing to do\n";
        return 0;
    }

    long failures = 0;
    std::size_t combo = 0;
    for (long i = 0; i < va.count; ++i) {
        int k = ks[combo % ks.size()];
        int n = ns[(combo / ks.size()) % ns.size()];
        const std::string& profile = profiles[(combo / (ks.size() * ns.size())) % profiles.size()];
        ++combo;
        if (n < k) continue;

        std::uint64_t seed = va.seed + static_cast<std::uint64_t>(i) * 7919;
        KSumInstance inst = KSumInstance::pure(n, k);
        Rng rng(seed);
        std::vector<Rational> values;
        try {
            values = generate_values(inst, gen_profile_from_string(profile), rng);
        } catch (const std::exception& e) {
            std::cout << "seed," << seed << ",gen-error," << e.what() << "\n";
            ++failures;
            continue;
        }
        InstanceFile f{inst, values};
        SolveConfig cfg;
        cfg.epsilon = parse_rational(va.epsilon);
        cfg.net_constant = parse_rational(va.net_constant);
        cfg.base_case_threshold = va.base_case;
        cfg.rng_seed = seed;

        SolverReport reference = run_mode("brute", f, cfg, 2);
        if (va.inject_fault && i == 0) reference.yes = !reference.yes;
        auto check = [&](const std::string& mode, const SolverReport& r) {
            bool bad = !r.ok || r.yes != reference.yes || r.witnesses != reference.witnesses;
            bool oracle_mode = mode != "brute" && mode != "mim";
            if (oracle_mode && r.transcript.open_book_reads != 0) bad = true;
            if (bad) {
                ++failures;
                std::cout << "seed," << seed << ",mode," << mode << ",n," << n << ",k," << k
                          << ",profile," << profile << (r.ok ? "" : ",error," + r.error) << "\n";
            }
        };
        check("mim", run_mode("mim", f, cfg, 2));
        check("meiser", run_mode("meiser", f, cfg, 2));
        check("two-phase", run_mode("two-phase", f, cfg, 2));
        for (int b : blocks)
            if (b <= n) check("blocked-" + std::to_string(b), run_mode("blocked", f, cfg, b));
    }
    if (failures == 0) {
        std::cerr << "verify: all runs agree with brute force\n";
        return 0;
    }
    std::cerr << "verify: " << failures << " failures\n";
    return 1;
}

struct BenchArgs {
    std::string ns = "8,16";
    std::string ks = "3";
    std::string modes = "meiser";
    std::string blocks = "2";
    std::string gen = "planted";
    std::uint64_t seed = 1;
    std::string time_mode = "real";
    std::string epsilon = "1/2";
    std::string net_constant = "1";
    long base_case = 64;
};

int cmd_bench(const BenchArgs& ba) {
    std::vector<int> ns = parse_range(ba.ns);
    std::vector<int> ks = parse_int_list(ba.ks);
    std::vector<int> blocks = parse_int_list(ba.blocks);
    std::vector<std::string> modes;
    {
        std::stringstream ss(ba.modes);
        std::string item;
        while (std::getline(ss, item, ',')) modes.push_back(item);
    }
    std::cout << "n,k,mode,b,seed,answer,total_queries,max_terms,retries,wall_ms\n";
    for (int n : ns)
        for (int k : ks)
            for (const auto& mode : modes) {
                std::vector<int> bs = mode == "blocked" ? blocks : std::vector<int>{0};
                for (int b : bs) {
                    if (n < k || (mode == "blocked" && b > n)) continue;
                    KSumInstance inst = KSumInstance::pure(n, k);
                    Rng rng(ba.seed);
                    std::vector<Rational> values =
                        generate_values(inst, gen_profile_from_string(ba.gen), rng);
                    InstanceFile f{inst, values};
                    SolveConfig cfg;
                    cfg.epsilon = parse_rational(ba.epsilon);
                    cfg.net_constant = parse_rational(ba.net_constant);
                    cfg.base_case_threshold = ba.base_case;
                    cfg.rng_seed = ba.seed;
                    auto t0 = std::chrono::steady_clock::now();
                    SolverReport r = run_mode(mode, f, cfg, b);
                    auto t1 = std::chrono::steady_clock::now();
                    long ms = ba.time_mode == "zero"
                                  ? 0
                                  : std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                                        .count();
                    std::cout << n << "," << k << "," << mode << "," << b << "," << ba.seed << ","
                              << (r.yes ? "YES" : "NO") << "," << r.transcript.total << ","
                              << r.transcript.max_terms << "," << r.retries << "," << ms << "\n";
                }
            }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-SUM / k-LDT solvers behind a sign-of-linear-form oracle"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance, print a JSON report");
    solve_cmd->add_option("--input", sa.input, "instance JSON file");
    solve_cmd->add_option("--gen", sa.gen, "generate: planted|none|zeros|duplicates|adversarial-near-degenerate");
    solve_cmd->add_option("--mode", sa.mode, "brute|mim|meiser|two-phase|blocked");
    solve_cmd->add_option("--n", sa.n, "input size (with --gen)");
    solve_cmd->add_option("--k", sa.k, "tuple arity (with --gen)");
    solve_cmd->add_option("--blocks", sa.blocks, "block count for blocked mode");
    solve_cmd->add_option("--epsilon", sa.epsilon, "pruning fraction (rational)");
    solve_cmd->add_option("--net-constant", sa.net_constant, "net size multiplier (rational)");
    solve_cmd->add_option("--base-case", sa.base_case, "direct-query threshold");
    solve_cmd->add_flag("--distinct", sa.distinct, "require k distinct indices");
    solve_cmd->add_option("--alpha", sa.alpha, "comma list of k coefficients");
    solve_cmd->add_option("--c", sa.constant, "constant term");
    solve_cmd->add_option("--seed", sa.seed, "random seed");
    solve_cmd->add_flag("--allow-decimal", sa.allow_decimal, "convert decimal literals exactly");
    solve_cmd->add_option("--emit", sa.emit, "json");

    SolveArgs ga;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "generate an instance file");
    gen_cmd->add_option("--profile", ga.gen, "planted|none|zeros|duplicates|adversarial-near-degenerate")
        ->required();
    gen_cmd->add_option("--n", ga.n)->required();
    gen_cmd->add_option("--k", ga.k)->required();
    gen_cmd->add_option("--seed", ga.seed);
    gen_cmd->add_flag("--distinct", ga.distinct);
    gen_cmd->add_option("--alpha", ga.alpha, "comma list of k coefficients");
    gen_cmd->add_option("--c", ga.constant, "constant term");
    gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "cross-check all modes against brute force");
    verify_cmd->add_option("--count", va.count);
    verify_cmd->add_option("--k", va.ks, "comma list");
    verify_cmd->add_option("--n", va.ns, "lo..hi or comma list");
    verify_cmd->add_option("--profiles", va.profiles);
    verify_cmd->add_option("--seed", va.seed);
    verify_cmd->add_option("--epsilon", va.epsilon);
    verify_cmd->add_option("--net-constant", va.net_constant);
    verify_cmd->add_option("--base-case", va.base_case);
    verify_cmd->add_option("--blocks", va.blocks);
    verify_cmd->add_flag("--inject-fault", va.inject_fault,
                         "test fixture: corrupt one reference answer to prove sensitivity");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "CSV of query counts over a grid");
    bench_cmd->add_option("--n", ba.ns, "lo..hi or comma list");
    bench_cmd->add_option("--k", ba.ks, "comma list");
    bench_cmd->add_option("--mode", ba.modes, "comma list of modes");
    bench_cmd->add_option("--blocks", ba.blocks, "comma list for blocked mode");
    bench_cmd->add_option("--gen", ba.gen, "instance profile");
    bench_cmd->add_option("--seed", ba.seed);
    bench_cmd->add_option("--time", ba.time_mode, "real|zero (zero for byte-stable output)");
    bench_cmd->add_option("--epsilon", ba.epsilon);
    bench_cmd->add_option("--net-constant", ba.net_constant);
    bench_cmd->add_option("--base-case", ba.base_case);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*solve_cmd) return cmd_solve(sa);
        if (*gen_cmd) return cmd_gen(ga, gen_out);
        if (*verify_cmd) return cmd_verify(va);
        if (*bench_cmd) return cmd_bench(ba);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
