#include "edalab/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "edalab/rng.hpp"
#include "edalab/version.hpp"

namespace edalab {

namespace {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

ParamRule::Base base_from_name(const std::string& name) {
    if (name == "n") return ParamRule::Base::linear_n;
    if (name == "sqrt_n") return ParamRule::Base::sqrt_n;
    if (name == "log_n") return ParamRule::Base::log_n;
    if (name == "sqrt_n_log_n") return ParamRule::Base::sqrt_n_log_n;
    throw std::invalid_argument("unknown rule base: " + name);
}

std::string base_name(ParamRule::Base b) {
    switch (b) {
        case ParamRule::Base::constant: return "const";
        case ParamRule::Base::linear_n: return "n";
        case ParamRule::Base::sqrt_n: return "sqrt_n";
        case ParamRule::Base::log_n: return "log_n";
        case ParamRule::Base::sqrt_n_log_n: return "sqrt_n_log_n";
    }
    return "?";
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters in: " + text);
    return v;
}

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ParamRule ParamRule::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty parameter rule");
    ParamRule rule;
    const auto star = text.find('*');
    try {
        if (star != std::string::npos) {
            rule.coefficient = parse_number(text.substr(0, star));
            rule.base = base_from_name(text.substr(star + 1));
        } else if (text == "n" || text == "sqrt_n" || text == "log_n" ||
                   text == "sqrt_n_log_n") {
            rule.base = base_from_name(text);
        } else {
            rule.base = Base::constant;
            rule.coefficient = parse_number(text);
        }
    } catch (const std::exception& e) {
        throw std::invalid_argument("cannot parse rule '" + text + "': " + e.what());
    }
    if (!(rule.coefficient > 0.0))
        throw std::invalid_argument("rule coefficient must be positive: " + text);
    return rule;
}

std::uint64_t ParamRule::eval(std::uint64_t n) const {
    const double nd = static_cast<double>(n);
    double v = coefficient;
    switch (base) {
        case Base::constant: break;
        case Base::linear_n: v *= nd; break;
        case Base::sqrt_n: v *= std::sqrt(nd); break;
        case Base::log_n: v *= std::log(nd); break;
        case Base::sqrt_n_log_n: v *= std::sqrt(nd) * std::log(nd); break;
    }
    // small epsilon so e.g. sqrt(1600)^2 artifacts do not round 40 up to 41
    const double rounded = std::ceil(v - 1e-9);
    return rounded < 1.0 ? 1 : static_cast<std::uint64_t>(rounded);
}

std::string ParamRule::str() const {
    if (base == Base::constant) return format_number(coefficient);
    if (coefficient == 1.0) return base_name(base);
    return format_number(coefficient) + "*" + base_name(base);
}

bool SweepResult::has_failures() const {
    for (const auto& cell : cells)
        if (cell.failures > 0) return true;
    return false;
}

namespace {

// Mean/CI over the successful trials; integer evaluation counts are reduced
// exactly, so the result is independent of accumulation order.
void summarize_cell(CellSummary& cell, const SweepConfig& config, std::size_t n_index) {
    unsigned __int128 total = 0;
    std::vector<double> successes;
    successes.reserve(cell.trials.size());
    cell.failures = 0;
    for (const auto& trial : cell.trials) {
        if (trial.success) {
            total += trial.evaluations;
            successes.push_back(static_cast<double>(trial.evaluations));
        } else {
            ++cell.failures;
        }
    }
    if (successes.empty()) {
        cell.mean_evaluations = cell.ci_lower = cell.ci_upper = 0.0;
        return;
    }
    cell.mean_evaluations =
        static_cast<double>(total) / static_cast<double>(successes.size());
    const std::uint64_t ci_seed =
        derive_seed(config.master_seed, {hash_tag("bootstrap"), n_index});
    std::tie(cell.ci_lower, cell.ci_upper) =
        bootstrap_ci(std::move(successes), config.bootstrap_samples, config.confidence,
                     ci_seed);
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    if (config.repeats < 1) throw std::invalid_argument("run_sweep: repeats must be >= 1");
    if (config.bootstrap_samples < 1)
        throw std::invalid_argument("run_sweep: bootstrap_samples must be >= 1");
    if (!(config.confidence > 0.0 && config.confidence < 1.0))
        throw std::invalid_argument("run_sweep: confidence must be in (0, 1)");
    if (config.n_values.empty())
        throw std::invalid_argument("run_sweep: no problem sizes given");

    SweepResult result;
    result.config = config;
    result.code_version = kCodeVersion;
    result.cells.resize(config.n_values.size());

    const Problem problem{config.problem};
    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
        auto& cell = result.cells[ni];
        cell.n = config.n_values[ni];
        cell.lambda = config.lambda_rule.eval(cell.n);
        cell.mu = config.mu_rule.eval(cell.n);
        cell.trials.resize(config.repeats);
        AlgorithmParams probe{cell.n, cell.lambda, cell.mu, config.rho,
                              config.max_generations, 0};
        validate(probe);  // fail before spending any trial time
    }

    const std::size_t per_cell = config.repeats;
    const std::size_t total = config.n_values.size() * per_cell;
    parallel_for(total, config.threads, [&](std::size_t item) {
        const std::size_t ni = item / per_cell;
        const std::size_t ti = item % per_cell;
        auto& cell = result.cells[ni];
        AlgorithmParams params{cell.n,      cell.lambda,
                               cell.mu,     config.rho,
                               config.max_generations,
                               derive_seed(config.master_seed, {ni, ti})};
        cell.trials[ti] = run(params, problem);
    });

    for (std::size_t ni = 0; ni < result.cells.size(); ++ni)
        summarize_cell(result.cells[ni], config, ni);
    return result;
}

std::pair<double, double> bootstrap_ci(std::vector<double> samples, std::uint32_t b,
                                       double level, std::uint64_t seed) {
    if (samples.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
    if (b < 1) throw std::invalid_argument("bootstrap_ci: need at least one resample");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_ci: level must be in (0, 1)");

    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    Rng rng(seed);
    std::vector<double> means(b);
    for (auto& mean : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += samples[rng.next_below(n)];
        mean = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());

    const auto nearest_rank = [&](double q) -> double {
        auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(b)));
        rank = std::min<std::size_t>(std::max<std::size_t>(rank, 1), b);
        return means[rank - 1];
    };
    const double alpha = 1.0 - level;
    return {nearest_rank(alpha / 2.0), nearest_rank(1.0 - alpha / 2.0)};
}

double eval_growth(GrowthModel g, double n) {
    switch (g) {
        case GrowthModel::n_log_n: return n * std::log(n);
        case GrowthModel::n_pow_3_2: return n * std::sqrt(n);
        case GrowthModel::n_squared: return n * n;
        case GrowthModel::n_squared_log_n: return n * n * std::log(n);
    }
    return 0.0;
}

std::string growth_name(GrowthModel g) {
    switch (g) {
        case GrowthModel::n_log_n: return "n ln n";
        case GrowthModel::n_pow_3_2: return "n^(3/2)";
        case GrowthModel::n_squared: return "n^2";
        case GrowthModel::n_squared_log_n: return "n^2 ln n";
    }
    return "?";
}

int growth_order(GrowthModel g) {
    switch (g) {
        case GrowthModel::n_log_n: return 0;
        case GrowthModel::n_pow_3_2: return 1;
        case GrowthModel::n_squared: return 2;
        case GrowthModel::n_squared_log_n: return 3;
    }
    return 4;
}

ModelFit fit_model(const std::vector<double>& n_values, const std::vector<double>& means,
                   GrowthModel g) {
    if (n_values.size() != means.size())
        throw std::invalid_argument("fit_model: size mismatch");
    if (n_values.size() < 2) throw std::invalid_argument("fit_model: need >= 2 points");

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (!(means[i] > 0.0)) throw std::invalid_argument("fit_model: means must be positive");
        const double gi = eval_growth(g, n_values[i]);
        num += means[i] * gi;
        den += gi * gi;
    }
    if (den == 0.0) throw std::invalid_argument("fit_model: degenerate model values");

    ModelFit fit;
    fit.model = g;
    fit.c = num / den;

    // Pearson correlation between observations and fitted predictions.
    const auto size = static_cast<double>(n_values.size());
    double mean_y = 0.0, mean_p = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        mean_y += means[i];
        mean_p += fit.c * eval_growth(g, n_values[i]);
    }
    mean_y /= size;
    mean_p /= size;
    double cov = 0.0, var_y = 0.0, var_p = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const double dy = means[i] - mean_y;
        const double dp = fit.c * eval_growth(g, n_values[i]) - mean_p;
        cov += dy * dp;
        var_y += dy * dy;
        var_p += dp * dp;
    }
    fit.rho = (var_y > 0.0 && var_p > 0.0) ? cov / std::sqrt(var_y * var_p) : 0.0;
    return fit;
}

std::vector<ModelFit> rank_models(std::vector<ModelFit> fits) {
    if (fits.empty()) throw std::invalid_argument("rank_models: no fits");
    std::stable_sort(fits.begin(), fits.end(), [](const ModelFit& a, const ModelFit& b) {
        if (std::fabs(a.rho - b.rho) <= 1e-12)
            return growth_order(a.model) < growth_order(b.model);
        return a.rho > b.rho;
    });
    return fits;
}

std::vector<GrowthModel> models_for(ProblemKind problem) {
    std::vector<GrowthModel> models{GrowthModel::n_log_n, GrowthModel::n_pow_3_2,
                                    GrowthModel::n_squared};
    if (problem == ProblemKind::leadingones) models.push_back(GrowthModel::n_squared_log_n);
    return models;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

constexpr const char* kCsvHeader = "problem,n,lambda,mu,trial,seed,generations,evaluations,success";

const std::array<const char*, 9> kCsvColumns = {
    "problem", "n", "lambda", "mu", "trial", "seed", "generations", "evaluations", "success"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected an integer, got '" + text + "'");
    }
}

}  // namespace

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << kCsvHeader << '\n';
    const std::string problem = to_string(result.config.problem);
    for (const auto& cell : result.cells) {
        for (std::size_t ti = 0; ti < cell.trials.size(); ++ti) {
            const auto& trial = cell.trials[ti];
            out << problem << ',' << cell.n << ',' << cell.lambda << ',' << cell.mu << ','
                << ti << ',' << trial.seed << ',' << trial.generations << ','
                << trial.evaluations << ',' << (trial.success ? 1 : 0) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sidecar(const SweepResult& result, const std::string& path,
                   const std::string& started_at, const std::string& finished_at) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json cfg;
    cfg["problem"] = to_string(result.config.problem);
    cfg["n_values"] = result.config.n_values;
    cfg["lambda"] = result.config.lambda_rule.str();
    cfg["mu"] = result.config.mu_rule.str();
    cfg["repeats"] = result.config.repeats;
    cfg["bootstrap_samples"] = result.config.bootstrap_samples;
    cfg["confidence"] = result.config.confidence;
    cfg["max_generations"] = result.config.max_generations;
    cfg["rho"] = result.config.rho;
    j["config"] = cfg;
    j["master_seed"] = result.config.master_seed;
    j["code_version"] = result.code_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TrialRow> load_trials_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ":1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.size() != kCsvColumns.size())
        throw std::runtime_error(path + ":1: expected " +
                                 std::to_string(kCsvColumns.size()) + " columns, got " +
                                 std::to_string(header.size()));
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (header[i] != kCsvColumns[i])
            throw std::runtime_error(path + ":1: column " + std::to_string(i + 1) +
                                     " must be '" + kCsvColumns[i] + "', got '" +
                                     header[i] + "'");
    }

    std::vector<TrialRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != kCsvColumns.size())
            throw std::runtime_error(where + ": expected " +
                                     std::to_string(kCsvColumns.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        TrialRow row;
        row.problem = problem_from_string(fields[0]);
        row.n = parse_u64(fields[1], where);
        row.lambda = parse_u64(fields[2], where);
        row.mu = parse_u64(fields[3], where);
        row.trial = static_cast<std::uint32_t>(parse_u64(fields[4], where));
        row.seed = parse_u64(fields[5], where);
        row.generations = parse_u64(fields[6], where);
        row.evaluations = parse_u64(fields[7], where);
        const std::uint64_t success = parse_u64(fields[8], where);
        if (success > 1)
            throw std::runtime_error(where + ": success must be 0 or 1");
        row.success = success == 1;
        rows.push_back(row);
    }
    return rows;
}

SweepResult load_sweep(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream in(sidecar_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + sidecar_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(sidecar_path + ": invalid JSON: " + e.what());
    }

    SweepResult result;
    try {
        const auto& cfg = j.at("config");
        result.config.problem = problem_from_string(cfg.at("problem").get<std::string>());
        result.config.n_values = cfg.at("n_values").get<std::vector<std::uint64_t>>();
        result.config.lambda_rule = ParamRule::parse(cfg.at("lambda").get<std::string>());
        result.config.mu_rule = ParamRule::parse(cfg.at("mu").get<std::string>());
        result.config.repeats = cfg.at("repeats").get<std::uint32_t>();
        result.config.bootstrap_samples = cfg.at("bootstrap_samples").get<std::uint32_t>();
        result.config.confidence = cfg.at("confidence").get<double>();
        result.config.max_generations = cfg.at("max_generations").get<std::uint64_t>();
        result.config.rho = cfg.at("rho").get<double>();
        result.config.master_seed = j.at("master_seed").get<std::uint64_t>();
        result.code_version = j.at("code_version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(sidecar_path + ": schema error: " + e.what());
    }

    const auto rows = load_trials_csv(csv_path);
    const std::size_t expected = result.config.n_values.size() * result.config.repeats;
    if (rows.size() != expected)
        throw std::runtime_error(csv_path + ": expected " + std::to_string(expected) +
                                 " trial rows, got " + std::to_string(rows.size()));

    result.cells.resize(result.config.n_values.size());
    std::size_t r = 0;
    for (std::size_t ni = 0; ni < result.cells.size(); ++ni) {
        auto& cell = result.cells[ni];
        cell.n = result.config.n_values[ni];
        for (std::uint32_t ti = 0; ti < result.config.repeats; ++ti, ++r) {
            const auto& row = rows[r];
            if (row.n != cell.n)
                throw std::runtime_error(csv_path + ": row " + std::to_string(r + 2) +
                                         ": expected n=" + std::to_string(cell.n));
            if (ti == 0) {
                cell.lambda = row.lambda;
                cell.mu = row.mu;
            }
            cell.trials.push_back(
                TrialRecord{row.evaluations, row.generations, row.success, row.seed});
        }
        summarize_cell(cell, result.config, ni);
    }
    return result;
}

}  // namespace edalab
