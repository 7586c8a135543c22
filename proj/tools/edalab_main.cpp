// Command-line front end: run replicated sweeps, evaluate level-based
// bounds, generate level sequences, run verification sweeps and fit growth
// models. Every randomized subcommand takes --seed; given an explicit seed,
// repeated invocations produce byte-identical stdout and files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edalab/experiments.hpp"
#include "edalab/level_theory.hpp"
#include "edalab/verify.hpp"
#include "edalab/version.hpp"

using namespace edalab;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t time_derived_seed() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

struct RunFlags {
    std::string problem = "onemax";
    std::vector<std::uint64_t> n_values;
    std::string lambda_rule = "n";
    std::string mu_rule = "sqrt_n";
    std::uint32_t repeats = 100;
    std::optional<std::uint64_t> seed;
    std::uint32_t bootstrap_samples = 100;
    double confidence = 0.95;
    std::uint64_t max_generations = 100000;
    double rho = 1.0;
    unsigned threads = 0;
    std::string out_prefix;
    std::string config_path;
    bool strict = false;
};

// configuration file first, then explicit flags on top
SweepConfig build_config(const RunFlags& flags, const CLI::App* cmd, std::uint64_t seed) {
    SweepConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + flags.config_path);
        nlohmann::json j;
        in >> j;
        if (j.contains("problem"))
            cfg.problem = problem_from_string(j["problem"].get<std::string>());
        if (j.contains("n_values")) cfg.n_values = j["n_values"].get<std::vector<std::uint64_t>>();
        if (j.contains("lambda")) cfg.lambda_rule = ParamRule::parse(j["lambda"].get<std::string>());
        if (j.contains("mu")) cfg.mu_rule = ParamRule::parse(j["mu"].get<std::string>());
        if (j.contains("repeats")) cfg.repeats = j["repeats"];
        if (j.contains("bootstrap_samples")) cfg.bootstrap_samples = j["bootstrap_samples"];
        if (j.contains("confidence")) cfg.confidence = j["confidence"];
        if (j.contains("max_generations")) cfg.max_generations = j["max_generations"];
        if (j.contains("rho")) cfg.rho = j["rho"];
    } else {
        cfg.lambda_rule = ParamRule::parse(flags.lambda_rule);
        cfg.mu_rule = ParamRule::parse(flags.mu_rule);
    }
    const auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--problem") || flags.config_path.empty())
        cfg.problem = problem_from_string(flags.problem);
    if (given("--n") || flags.config_path.empty()) cfg.n_values = flags.n_values;
    if (given("--lambda")) cfg.lambda_rule = ParamRule::parse(flags.lambda_rule);
    if (given("--mu")) cfg.mu_rule = ParamRule::parse(flags.mu_rule);
    if (given("--repeats") || flags.config_path.empty()) cfg.repeats = flags.repeats;
    if (given("--bootstrap")) cfg.bootstrap_samples = flags.bootstrap_samples;
    if (given("--confidence")) cfg.confidence = flags.confidence;
    if (given("--max-generations")) cfg.max_generations = flags.max_generations;
    if (given("--rho")) cfg.rho = flags.rho;
    cfg.master_seed = seed;
    cfg.threads = flags.threads;
    return cfg;
}

int execute_run(const RunFlags& flags, const CLI::App* cmd, bool also_fit) {
    if (flags.strict && !flags.seed) {
        std::cerr << "error: --strict requires an explicit --seed\n";
        return 2;
    }
    const bool reproducible = flags.seed.has_value();
    const std::uint64_t seed = flags.seed ? *flags.seed : time_derived_seed();
    const auto cfg = build_config(flags, cmd, seed);
    if (cfg.n_values.empty()) {
        std::cerr << "error: no problem sizes given (--n)\n";
        return 2;
    }

    const std::string started = reproducible ? "" : utc_now();
    const auto result = run_sweep(cfg);
    const std::string finished = reproducible ? "" : utc_now();

    std::printf("problem=%s lambda=%s mu=%s repeats=%u seed=%llu\n",
                to_string(cfg.problem).c_str(), cfg.lambda_rule.str().c_str(),
                cfg.mu_rule.str().c_str(), cfg.repeats,
                static_cast<unsigned long long>(seed));
    std::printf("%10s %10s %8s %14s %14s %14s %9s\n", "n", "lambda", "mu", "mean_evals",
                "ci_low", "ci_high", "failures");
    for (const auto& cell : result.cells) {
        std::printf("%10llu %10llu %8llu %14.2f %14.2f %14.2f %9u\n",
                    static_cast<unsigned long long>(cell.n),
                    static_cast<unsigned long long>(cell.lambda),
                    static_cast<unsigned long long>(cell.mu), cell.mean_evaluations,
                    cell.ci_lower, cell.ci_upper, cell.failures);
    }

    if (!flags.out_prefix.empty()) {
        write_csv(result, flags.out_prefix + ".csv");
        write_sidecar(result, flags.out_prefix + ".json", started, finished);
        std::printf("wrote %s.csv and %s.json\n", flags.out_prefix.c_str(),
                    flags.out_prefix.c_str());
    }

    if (also_fit) {
        std::vector<double> ns, means;
        for (const auto& cell : result.cells) {
            if (cell.trials.size() > cell.failures) {
                ns.push_back(static_cast<double>(cell.n));
                means.push_back(cell.mean_evaluations);
            }
        }
        if (ns.size() < 2) {
            std::cerr << "error: need at least two sizes with successful trials to fit\n";
            return 2;
        }
        std::vector<ModelFit> fits;
        for (auto g : models_for(cfg.problem)) fits.push_back(fit_model(ns, means, g));
        const auto ranked = rank_models(fits);
        std::printf("%-10s %14s %10s\n", "model", "c", "rho");
        for (std::size_t i = 0; i < ranked.size(); ++i)
            std::printf("%-10s %14.6g %10.6f%s\n", growth_name(ranked[i].model).c_str(),
                        ranked[i].c, ranked[i].rho, i == 0 ? "  <- best" : "");
    }

    if (result.has_failures()) {
        std::fprintf(stderr, "warning: some trials hit the generation cap\n");
        if (flags.strict) return 1;
    }
    return 0;
}

void print_partition_report(const LevelPartition& p, std::uint64_t lambda, bool as_json) {
    const double g3 = g3_min_population(p);
    const double bound_evals = level_based_bound(p, static_cast<double>(lambda));
    const double bound_gens = bound_evals / static_cast<double>(lambda);
    for (const auto& w : p.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (static_cast<double>(lambda) < g3)
        std::fprintf(stderr,
                     "warning: lambda = %llu is below the G3 population threshold %.3f; "
                     "the bound formula is evaluated anyway\n",
                     static_cast<unsigned long long>(lambda), g3);
    if (as_json) {
        nlohmann::ordered_json j;
        j["preset"] = p.label;
        j["m"] = p.m;
        j["delta"] = p.delta;
        j["gamma0"] = p.gamma0;
        j["z_star"] = p.z_star();
        j["g3_min_lambda"] = g3;
        j["lambda"] = lambda;
        j["bound_evaluations"] = bound_evals;
        j["bound_generations"] = bound_gens;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("preset=%s m=%zu delta=%.12g gamma0=%.12g z_star=%.12g\n",
                    p.label.c_str(), p.m, p.delta, p.gamma0, p.z_star());
        std::printf("g3_min_lambda=%.12g\n", g3);
        std::printf("bound: %.12g evaluations (%.12g generations at lambda=%llu)\n",
                    bound_evals, bound_gens, static_cast<unsigned long long>(lambda));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"runtime-analysis workbench for univariate EDAs (UMDA/PBIL)"};
    app.set_version_flag("--version", kCodeVersion);
    app.require_subcommand(1);

    // ---- run / report -----------------------------------------------------
    RunFlags run_flags;
    const auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--problem", run_flags.problem,
                        "onemax | leadingones | binval")
            ->default_val("onemax");
        cmd->add_option("--n", run_flags.n_values, "problem sizes (comma separated)")
            ->delimiter(',');
        cmd->add_option("--lambda", run_flags.lambda_rule,
                        "offspring rule: const | n | sqrt_n | log_n | sqrt_n_log_n, "
                        "optionally c*rule")
            ->default_val("n");
        cmd->add_option("--mu", run_flags.mu_rule, "parent rule (same grammar)")
            ->default_val("sqrt_n");
        cmd->add_option("--repeats", run_flags.repeats, "trials per size")
            ->default_val(100);
        cmd->add_option("--seed", run_flags.seed,
                        "master seed; omitted -> time-derived (echoed)");
        cmd->add_option("--bootstrap", run_flags.bootstrap_samples,
                        "bootstrap resamples for the CI")
            ->default_val(100);
        cmd->add_option("--confidence", run_flags.confidence, "CI level")
            ->default_val(0.95);
        cmd->add_option("--max-generations", run_flags.max_generations,
                        "per-trial generation cap")
            ->default_val(100000);
        cmd->add_option("--rho", run_flags.rho, "PBIL smoothing, 1 = UMDA")
            ->default_val(1.0);
        cmd->add_option("--threads", run_flags.threads,
                        "worker threads, 0 = hardware concurrency")
            ->default_val(0);
        cmd->add_option("--out", run_flags.out_prefix,
                        "artifact prefix; writes <prefix>.csv and <prefix>.json");
        cmd->add_option("--config", run_flags.config_path,
                        "JSON config file; explicit flags win");
        cmd->add_flag("--strict", run_flags.strict,
                      "require --seed and fail (exit 1) on capped trials");
    };
    auto* cmd_run = app.add_subcommand("run", "run a replicated runtime sweep");
    add_run_flags(cmd_run);
    auto* cmd_report = app.add_subcommand("report", "run a sweep and fit growth models");
    add_run_flags(cmd_report);

    // ---- bound ------------------------------------------------------------
    auto* cmd_bound =
        app.add_subcommand("bound", "evaluate the level-based runtime bound for a preset");
    std::string preset;
    std::uint64_t bn = 0, bmu = 0, blambda = 0;
    double bc = 0.5, ba = 1.0, bd = 0.0, bpsi = kPsiWorstCase, bkappa = -1.0;
    bool bound_json = false;
    cmd_bound->add_option("--preset", preset, "leadingones | onemax-small | onemax-large")
        ->required();
    cmd_bound->add_option("--n", bn, "problem size")->required();
    cmd_bound->add_option("--mu", bmu, "parent population size")->required();
    cmd_bound->add_option("--lambda", blambda, "offspring population size")->required();
    cmd_bound->add_option("--c", bc, "onemax-small margin constant")->default_val(0.5);
    cmd_bound->add_option("--a", ba, "advisory constant in mu >= a ln n")->default_val(1.0);
    cmd_bound->add_option("--d", bd, "onemax-large level spacing (default: d_2(psi))");
    cmd_bound->add_option("--psi", bpsi, "onemax-large tail constant");
    cmd_bound->add_option("--kappa", bkappa, "onemax-large z_j (default: psi)");
    cmd_bound->add_flag("--json", bound_json, "emit a JSON report");

    // ---- levels -----------------------------------------------------------
    auto* cmd_levels = app.add_subcommand("levels", "generate the sqrt-spaced level sequence");
    std::uint64_t ln = 0;
    double ld = 1.0;
    bool levels_json = false;
    cmd_levels->add_option("--n", ln, "problem size")->required();
    cmd_levels->add_option("--d", ld, "spacing constant in (0, 1]")->default_val(1.0);
    cmd_levels->add_flag("--json", levels_json, "emit a JSON report");

    // ---- verify -----------------------------------------------------------
    auto* cmd_verify =
        app.add_subcommand("verify", "randomized sweep of a probability inequality");
    std::string check_name;
    std::uint64_t cases = 10000, k_max = 0;
    std::optional<std::uint64_t> verify_seed;
    std::string verify_json_path;
    cmd_verify
        ->add_option("check", check_name,
                     "feige | anticoncentration | integer-median | pmin-quarter | ce | "
                     "inequality-g1")
        ->required();
    cmd_verify->add_option("--cases", cases, "number of random cases")->default_val(10000);
    cmd_verify->add_option("--k-max", k_max,
                           "max Bernoulli count (or max n for inequality-g1)");
    cmd_verify->add_option("--seed", verify_seed, "sweep seed");
    cmd_verify->add_option("--json", verify_json_path, "also write the JSON report here");

    // ---- fit --------------------------------------------------------------
    auto* cmd_fit = app.add_subcommand("fit", "fit growth models to a trials CSV");
    std::string fit_input, fit_json_path;
    cmd_fit->add_option("--input", fit_input, "trials CSV from `run --out`")->required();
    cmd_fit->add_option("--json", fit_json_path, "also write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) return execute_run(run_flags, cmd_run, false);
        if (cmd_report->parsed()) return execute_run(run_flags, cmd_report, true);

        if (cmd_bound->parsed()) {
            LevelPartition p;
            if (preset == "leadingones") {
                p = preset_leadingones(bn, bmu, blambda);
            } else if (preset == "onemax-small") {
                p = preset_onemax_small(bn, bmu, blambda, bc, ba);
            } else if (preset == "onemax-large") {
                OnemaxLargeOptions options;
                options.psi = bpsi;
                options.kappa = bkappa > 0.0 ? bkappa : bpsi;
                options.d = cmd_bound->count("--d") ? bd : onemax_large_max_spacing(bpsi);
                p = preset_onemax_large(bn, bmu, blambda, options);
            } else {
                std::cerr << "error: unknown preset '" << preset << "'\n";
                return 2;
            }
            print_partition_report(p, blambda, bound_json);
            return 0;
        }

        if (cmd_levels->parsed()) {
            const auto seq = level_sequence(ln, ld);
            const double root = std::sqrt(static_cast<double>(ln));
            if (levels_json) {
                nlohmann::ordered_json j;
                j["n"] = seq.n;
                j["d"] = seq.d;
                j["ell"] = seq.ell;
                j["lower_bound"] = root / (ld + 1.0);
                j["upper_bound"] = 2.0 * root / ld;
                j["f"] = seq.f;
                std::cout << j.dump(2) << "\n";
            } else {
                std::printf("n=%llu d=%.12g ell=%zu bounds=(%.6f, %.6f)\n",
                            static_cast<unsigned long long>(seq.n), seq.d, seq.ell,
                            root / (ld + 1.0), 2.0 * root / ld);
                for (std::size_t i = 0; i < seq.f.size(); ++i)
                    std::printf("%s%llu", i ? "," : "f=",
                                static_cast<unsigned long long>(seq.f[i]));
                std::printf("\n");
            }
            return 0;
        }

        if (cmd_verify->parsed()) {
            const auto check = verify_check_from_string(check_name);
            if (k_max == 0) k_max = check == VerifyCheck::inequality_g1 ? 10000 : 20;
            const std::uint64_t seed = verify_seed ? *verify_seed : time_derived_seed();
            if (!verify_seed)
                std::fprintf(stderr, "note: using time-derived seed %llu\n",
                             static_cast<unsigned long long>(seed));
            const auto report = run_verification(check, cases, k_max, seed);
            const auto json = report_to_json(report);
            std::fputs(json.c_str(), stdout);
            if (!verify_json_path.empty()) {
                std::ofstream out(verify_json_path, std::ios::binary | std::ios::trunc);
                out << json;
            }
            if (report.violations > 0) {
                for (const auto& cx : report.counterexamples)
                    std::fprintf(stderr, "counterexample: %s\n", cx.c_str());
                return 1;
            }
            return 0;
        }

        if (cmd_fit->parsed()) {
            const auto rows = load_trials_csv(fit_input);
            if (rows.empty()) {
                std::cerr << "error: no trial rows in " << fit_input << "\n";
                return 2;
            }
            const ProblemKind problem = rows.front().problem;
            // group by n in order of first appearance; means over successes
            std::vector<double> ns, means;
            std::vector<std::uint64_t> seen;
            for (const auto& row : rows) {
                if (row.problem != problem)
                    throw std::runtime_error(fit_input + ": mixed problems in one file");
                if (std::find(seen.begin(), seen.end(), row.n) == seen.end())
                    seen.push_back(row.n);
            }
            for (const auto n : seen) {
                unsigned __int128 total = 0;
                std::uint64_t count = 0;
                for (const auto& row : rows) {
                    if (row.n == n && row.success) {
                        total += row.evaluations;
                        ++count;
                    }
                }
                if (count > 0) {
                    ns.push_back(static_cast<double>(n));
                    means.push_back(static_cast<double>(total) / static_cast<double>(count));
                }
            }
            if (ns.size() < 2) {
                std::cerr << "error: need successful trials at >= 2 sizes to fit\n";
                return 2;
            }
            std::vector<ModelFit> fits;
            for (auto g : models_for(problem)) fits.push_back(fit_model(ns, means, g));
            const auto ranked = rank_models(fits);
            std::printf("%-10s %14s %10s\n", "model", "c", "rho");
            nlohmann::ordered_json jfits = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                std::printf("%-10s %14.6g %10.6f%s\n", growth_name(ranked[i].model).c_str(),
                            ranked[i].c, ranked[i].rho, i == 0 ? "  <- best" : "");
                jfits.push_back({{"model", growth_name(ranked[i].model)},
                                 {"c", ranked[i].c},
                                 {"rho", ranked[i].rho}});
            }
            if (!fit_json_path.empty()) {
                nlohmann::ordered_json j;
                j["fits"] = jfits;
                j["winner"] = growth_name(ranked.front().model);
                std::ofstream out(fit_json_path, std::ios::binary | std::ios::trunc);
                out << j.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
