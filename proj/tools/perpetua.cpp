// perpetua: batch front door for the perpetuity tail-exponent library.
// Experiment configs (JSON + flag overrides) in, CSV/JSON data + manifest out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json_support.hpp"
#include "perpetua/bk18.hpp"
#include "perpetua/errors.hpp"
#include "perpetua/grid.hpp"
#include "perpetua/ldm.hpp"
#include "perpetua/legendre.hpp"
#include "perpetua/perpetuity.hpp"

namespace {

using namespace perpetua;
using perpetua_cli::config_error;
using perpetua_cli::json;
using perpetua_cli::mismatch_error;

constexpr const char* kVersion = "0.1.0";

// exit codes per the interface contract
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitPropertyFailure = 4;

std::string format_value(const json& v) {
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct RunContext {
    json config;  // resolved: defaults + file + flag overrides
    std::string sha;
    std::string command;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    std::string format;  // "csv" | "json"
};

void write_outputs(const RunContext& ctx, const Table& table, const json& summary) {
    if (ctx.format == "csv") {
        std::ofstream os(ctx.out, std::ios::binary);  // LF endings everywhere
        if (!os) throw std::runtime_error("cannot open output file " + ctx.out);
        os << "# perpetua-manifest: " << ctx.sha << "\n";
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
        for (const auto& row : table.rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                os << format_value(row[c]) << (c + 1 < row.size() ? "," : "\n");
    } else {
        json doc;
        doc["perpetua_manifest"] = ctx.sha;
        doc["columns"] = table.columns;
        doc["rows"] = table.rows;
        doc["summary"] = summary;
        std::ofstream os(ctx.out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file " + ctx.out);
        os << doc.dump(2) << "\n";
    }
    json manifest;
    manifest["tool"] = "perpetua";
    manifest["version"] = kVersion;
    manifest["command"] = ctx.command;
    manifest["config"] = ctx.config;
    manifest["config_sha256"] = ctx.sha;
    manifest["summary"] = summary;
    std::ofstream ms(ctx.out + ".manifest.json", std::ios::binary);
    ms << manifest.dump(2) << "\n";
    std::cout << "wrote " << ctx.out << " (manifest sha " << ctx.sha.substr(0, 12)
              << ")\n"
              << summary.dump(2) << "\n";
}

std::vector<double> grid_from_config(const RunContext& ctx, const std::string& key,
                                     std::vector<double> fallback) {
    if (!ctx.config.contains(key)) {
        if (fallback.empty()) throw config_error(key, "required grid is missing");
        return fallback;
    }
    return perpetua_cli::require_sorted_grid(ctx.config.at(key), key);
}

std::uint64_t samples_from_config(const RunContext& ctx, std::uint64_t fallback) {
    const double n = perpetua_cli::number_or(ctx.config, "n_samples", "config",
                                             static_cast<double>(fallback));
    if (n < 1000.0) throw config_error("n_samples", "must be >= 1000");
    return static_cast<std::uint64_t>(n);
}

PairModel model_from_config(const RunContext& ctx) {
    if (!ctx.config.contains("model")) throw config_error("model", "required");
    return perpetua_cli::parse_model(ctx.config.at("model"));
}

RegVarFn f_from_config(const RunContext& ctx) {
    if (!ctx.config.contains("f")) throw config_error("f", "required");
    return perpetua_cli::parse_regvar(ctx.config.at("f"), "f");
}

// --- subcommand runners -------------------------------------------------------

void run_ldm(const RunContext& ctx) {
    const PairModel model = model_from_config(ctx);
    const RegVarFn f = f_from_config(ctx);
    const auto y_grid = grid_from_config(ctx, "y_grid", {});
    const auto t_grid = grid_from_config(ctx, "t_grid", {});
    const std::string mode_str =
        perpetua_cli::string_or(ctx.config, "mode", "config", "quadrature");
    LdmMode mode;
    if (mode_str == "quadrature")
        mode = LdmMode::quadrature;
    else if (mode_str == "monte_carlo")
        mode = LdmMode::monte_carlo;
    else
        throw config_error("mode", "must be 'quadrature' or 'monte_carlo'");
    const std::uint64_t n = samples_from_config(ctx, 1000000);

    Table table{{"y", "t", "prob", "ratio", "mode", "floor_hit"}, {}};
    json estimates = json::array();
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        const LdmEstimate est = ldm_estimate(model, f, y_grid[i], t_grid, mode, n,
                                             ctx.seed + i, ctx.workers);
        for (const auto& row : est.rows)
            table.rows.push_back(
                {row.y, row.t, row.prob, row.ratio, mode_str, row.floor_hit});
        estimates.push_back({{"y", y_grid[i]},
                             {"estimate", est.infinite ? json() : json(est.estimate)},
                             {"infinite", est.infinite},
                             {"floor", est.floor}});
    }
    write_outputs(ctx, table, json{{"estimates", estimates}});
}

void run_transform(const RunContext& ctx) {
    const LdmFunction ldm = perpetua_cli::derive_ldm(ctx.config);
    const auto lambda_grid = grid_from_config(ctx, "lambda_grid", logspace(1e-3, 1e3, 61));
    const TransformReport rep = transform_report(ldm, lambda_grid);
    Table table{{"lambda", "phi", "argmin_y"}, {}};
    for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i)
        table.rows.push_back({rep.lambda_grid[i], rep.phi_values[i], rep.argmin_y[i]});
    const json summary{{"lambda_star", rep.lambda_star},
                       {"argmin", rep.lambda_star_argmin},
                       {"admissible", rep.admissible},
                       {"residual", rep.fixed_point_residual}};
    write_outputs(ctx, table, summary);
}

std::optional<double> try_lambda_star(const RunContext& ctx) {
    try {
        return lambda_star(perpetua_cli::derive_ldm(ctx.config)).value;
    } catch (const mismatch_error&) {
        return std::nullopt;
    } catch (const config_error&) {
        return std::nullopt;
    }
}

void push_tail_rows(Table& table, const TailEstimate& est) {
    for (std::size_t i = 0; i < est.t_grid.size(); ++i)
        table.rows.push_back({est.t_grid[i], static_cast<double>(est.hits[i]),
                              static_cast<double>(est.n_samples), est.prob[i],
                              est.ratios[i], static_cast<bool>(est.floor_hit[i])});
}

json tail_summary(const TailEstimate& est) {
    json s;
    s["n_samples"] = static_cast<double>(est.n_samples);
    s["all_floor"] = est.all_floor;
    double largest = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < est.t_grid.size(); ++i)
        if (!est.floor_hit[i]) largest = est.ratios[i];
    s["ratio_at_largest_resolvable_t"] = std::isnan(largest) ? json() : json(largest);
    return s;
}

void run_tail(const RunContext& ctx) {
    const PairModel model = model_from_config(ctx);
    const RegVarFn f = f_from_config(ctx);
    const auto t_grid = grid_from_config(ctx, "t_grid", {});
    const std::uint64_t n = samples_from_config(ctx, 1000000);
    const std::string method_str =
        perpetua_cli::string_or(ctx.config, "method", "config", "series");
    TailMethod method;
    if (method_str == "series")
        method = TailMethod::series;
    else if (method_str == "recursion_burnin")
        method = TailMethod::recursion_burnin;
    else
        throw config_error("method", "must be 'series' or 'recursion_burnin'");
    const int burnin =
        static_cast<int>(perpetua_cli::number_or(ctx.config, "burnin", "config", 1000));
    const double trunc_tol =
        perpetua_cli::number_or(ctx.config, "trunc_tol", "config", 1e-12);
    const auto predicted = try_lambda_star(ctx);
    const TailEstimate est = tail_log_estimate(model, f, t_grid, n, method, burnin,
                                               ctx.seed, ctx.workers,
                                               predicted.value_or(0.0), trunc_tol);
    Table table{{"t", "hits", "n", "prob", "ratio", "floor_hit"}, {}};
    push_tail_rows(table, est);
    json summary = tail_summary(est);
    summary["method"] = method_str;
    summary["predicted_lambda_star"] = predicted ? json(*predicted) : json();
    write_outputs(ctx, table, summary);
}

void run_envelope(const RunContext& ctx) {
    const PairModel model = model_from_config(ctx);
    const RegVarFn f = f_from_config(ctx);
    const auto N =
        static_cast<std::uint64_t>(perpetua_cli::number_or(ctx.config, "N", "config", 1e7));
    const int n_traj =
        static_cast<int>(perpetua_cli::number_or(ctx.config, "n_traj", "config", 8));
    const auto ls = try_lambda_star(ctx);
    if (!ls || !std::isfinite(*ls) || *ls <= 0.0)
        throw mismatch_error("envelope needs lambda* in (0, inf) for this model/f pair");
    const EnvelopeReport rep = envelope(model, f, *ls, N, n_traj, ctx.seed, ctx.workers);
    Table table{{"n", "traj", "running_max_ratio"}, {}};
    for (std::size_t cp = 0; cp < rep.checkpoints.size(); ++cp)
        for (int traj = 0; traj < rep.n_traj; ++traj)
            table.rows.push_back({static_cast<double>(rep.checkpoints[cp]),
                                  static_cast<double>(traj),
                                  rep.running_max[static_cast<std::size_t>(traj)][cp]});
    const json summary{{"lambda_star", *ls},
                       {"predicted_limit", rep.predicted_limit},
                       {"final_window_ratios", rep.final_ratios},
                       {"median_final_ratio", rep.median_final_ratio}};
    write_outputs(ctx, table, summary);
}

void run_one_step(const RunContext& ctx) {
    const PairModel model = model_from_config(ctx);
    const RegVarFn f = f_from_config(ctx);
    const auto t_grid = grid_from_config(ctx, "t_grid", {});
    const std::uint64_t n = samples_from_config(ctx, 1000000);
    if (!ctx.config.contains("lambda")) throw config_error("lambda", "required");
    const double lambda = perpetua_cli::require_number(ctx.config.at("lambda"), "lambda");
    std::optional<double> predicted;
    try {
        predicted = phi(perpetua_cli::derive_ldm(ctx.config), lambda).value;
    } catch (const mismatch_error&) {
    }
    const TailEstimate est = one_step_tail(model, f, lambda, t_grid, n, ctx.seed,
                                           ctx.workers, predicted.value_or(0.0));
    Table table{{"t", "hits", "n", "prob", "ratio", "floor_hit"}, {}};
    push_tail_rows(table, est);
    json summary = tail_summary(est);
    summary["lambda"] = lambda;
    summary["predicted_phi"] = predicted ? json(*predicted) : json();
    write_outputs(ctx, table, summary);
}

void run_compare_bk18(const RunContext& ctx) {
    if (!ctx.config.contains("case")) throw config_error("case", "required: 'a' or 'b'");
    const std::string case_str =
        perpetua_cli::require_string(ctx.config.at("case"), "case");
    if (case_str != "a" && case_str != "b")
        throw config_error("case", "must be 'a' or 'b'");
    if (!ctx.config.contains("rho")) throw config_error("rho", "required");
    const double rho = perpetua_cli::require_number(ctx.config.at("rho"), "rho");
    ComparisonReport rep;
    try {
        rep = compare_case(case_str == "a" ? ExampleCase::a : ExampleCase::b, rho);
    } catch (const std::invalid_argument& e) {
        throw config_error("rho", e.what());
    }
    Table table{{"rho", "case", "lambda_star", "bk18_value", "gap"}, {}};
    table.rows.push_back({rep.rho, case_str, rep.lambda_star, rep.bk18_value, rep.gap});
    const json summary{
        {"rho", rep.rho},
        {"case", case_str},
        {"lambda_star", rep.lambda_star},
        {"lambda_star_argmin_y", rep.lambda_star_argmin_y},
        {"bk18_value", rep.bk18_value},
        {"h_over_trho", rep.h_over_trho},
        {"argmin_s", rep.argmin_s},
        {"gap", rep.gap},
        {"verdict", rep.verdict == ComparisonVerdict::equal ? "equal" : "strict_gap"}};
    write_outputs(ctx, table, summary);
}

void run_validate_model(const RunContext& ctx) {
    const PairModel model = model_from_config(ctx);
    const std::uint64_t n = samples_from_config(ctx, 1000000);
    const double nd = static_cast<double>(n);
    Table table{{"check", "statistic", "reference", "tolerance", "ok"}, {}};
    bool all_ok = true;
    auto add = [&](const std::string& name, double stat, double ref, double tol) {
        const bool ok = std::abs(stat - ref) <= tol;
        all_ok = all_ok && ok;
        table.rows.push_back({name, stat, ref, tol, ok});
    };
    auto sigma = [&](double p) { return std::sqrt(p * (1.0 - p) / nd); };

    Rng rng(ctx.seed);
    std::vector<std::pair<double, double>> draws(n);
    bool bounds_ok = true;
    for (auto& d : draws) {
        d = model.sample(rng);
        bounds_ok = bounds_ok && d.first >= 0.0 && d.first <= model.a_plus() &&
                    d.second >= 0.0;
    }
    table.rows.push_back({"support_bounds", bounds_ok ? 1.0 : 0.0, 1.0, 0.0, bounds_ok});
    all_ok = all_ok && bounds_ok;

    auto joint_hat = [&](double a, double b) {
        std::uint64_t hits = 0;
        for (const auto& d : draws)
            if (d.first > a && d.second > b) ++hits;
        return static_cast<double>(hits) / nd;
    };

    if (!model.is_independent()) {
        const double atom_mass = 1.0 - std::exp(-1.0);
        std::uint64_t atom_hits = 0;
        for (const auto& d : draws)
            if (d.first == 0.0) ++atom_hits;
        add("atom_mass", static_cast<double>(atom_hits) / nd, atom_mass,
            4.0 * sigma(atom_mass));
        // 5x5 joint survival grid against exp(-alpha(a) b^rho)
        const std::vector<double> as{0.1, 0.25, 0.4, 0.55, 0.7};
        const std::vector<double> bs{1.1, 1.3, 1.5, 1.8, 2.2};
        for (double a : as)
            for (double b : bs) {
                const double p = model.joint_survival(a, b);
                char name[64];
                std::snprintf(name, sizeof(name), "joint_survival_a%.2f_b%.1f", a, b);
                add(name, joint_hat(a, b), p, 4.0 * sigma(p));
            }
        // the family is not PQD: some grid point must violate the inequality
        bool violated = false;
        for (double a : as)
            for (double b : bs)
                if (model.joint_survival(a, b) <
                    model.survival_a(a) * model.survival_b(b) - 1e-12)
                    violated = true;
        table.rows.push_back(
            {"pqd_violation_exists", violated ? 1.0 : 0.0, 1.0, 0.0, violated});
        all_ok = all_ok && violated;
    } else {
        // independence: the joint survival factorizes; spot-check the sampler
        for (double a : {0.1, 0.3})
            for (double b : {0.5, 1.5}) {
                const double p = model.survival_a(a) * model.survival_b(b);
                char name[64];
                std::snprintf(name, sizeof(name), "joint_product_a%.1f_b%.1f", a, b);
                add(name, joint_hat(a, b), p, 4.0 * sigma(p) + 1e-12);
            }
    }
    // B marginal at the deepest level this n can resolve (>= 1e-4 once n >= 5e5)
    if (model.b_tail_neg_log(0.0).has_value()) {
        const double level = std::max(1e-3, 50.0 / nd);
        double b_probe = 1.0;
        while (std::exp(-*model.b_tail_neg_log(b_probe)) > level) b_probe += 0.1;
        const double ref = *model.b_tail_neg_log(b_probe);
        if (std::isfinite(ref)) {
            const double p_ref = std::exp(-ref);
            std::uint64_t hits = 0;
            for (const auto& d : draws)
                if (d.second > b_probe) ++hits;
            add("b_marginal_neg_log", -std::log(static_cast<double>(hits) / nd), ref,
                4.0 * sigma(p_ref) / p_ref);
        }
    }

    // user-stated joint survival references: entries [a, b, expected_p]
    if (ctx.config.contains("expect_joint")) {
        const json& ej = ctx.config.at("expect_joint");
        if (!ej.is_array()) throw config_error("expect_joint", "expected an array");
        for (const auto& entry : ej) {
            if (!entry.is_array() || entry.size() != 3)
                throw config_error("expect_joint", "entries must be [a, b, expected_p]");
            const double a = entry[0].get<double>(), b = entry[1].get<double>();
            const double expected = entry[2].get<double>();
            char name[64];
            std::snprintf(name, sizeof(name), "expect_joint_a%.3g_b%.3g", a, b);
            add(std::string(name) + "_analytic", model.joint_survival(a, b), expected,
                1e-9 + 1e-6 * expected);
            add(std::string(name) + "_empirical", joint_hat(a, b), expected,
                4.0 * sigma(std::max(expected, 1e-12)));
        }
    }

    const json summary{{"ok", all_ok}, {"n_samples", nd}};
    write_outputs(ctx, table, summary);
    if (!all_ok) throw property_failure("validate-model: at least one check failed");
}

// --- config resolution ----------------------------------------------------------

struct FlagValues {
    std::string config_path, model, f, ldm, y_grid, t_grid, lambda_grid;
    std::string mode, method, case_tag, out, format;
    double n_samples = -1, horizon = -1, n_traj = -1, burnin = -1, lambda = -1,
           rho = -1, trunc_tol = -1;
    std::int64_t seed = -1;
    int workers = -1;
};

std::vector<double> parse_grid_flag(const std::string& text, const std::string& name) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw config_error(name, "cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw config_error(name, "empty grid");
    return out;
}

json inline_json(const std::string& text, const std::string& name) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw config_error(name, "invalid inline JSON");
    return j;
}

json resolve_config(const std::string& command, const FlagValues& flags) {
    json config;
    if (!flags.config_path.empty()) {
        std::ifstream is(flags.config_path);
        if (!is) throw config_error("config", "cannot open " + flags.config_path);
        config = json::parse(is, nullptr, false);
        if (config.is_discarded())
            throw config_error("config", "invalid JSON in " + flags.config_path);
        if (!config.is_object()) throw config_error("config", "must be a JSON object");
    }
    config["command"] = command;
    // flags win over the config file
    if (!flags.model.empty()) config["model"] = inline_json(flags.model, "model");
    if (!flags.f.empty()) config["f"] = inline_json(flags.f, "f");
    if (!flags.ldm.empty()) config["ldm"] = inline_json(flags.ldm, "ldm");
    if (!flags.y_grid.empty()) config["y_grid"] = parse_grid_flag(flags.y_grid, "y_grid");
    if (!flags.t_grid.empty()) config["t_grid"] = parse_grid_flag(flags.t_grid, "t_grid");
    if (!flags.lambda_grid.empty())
        config["lambda_grid"] = parse_grid_flag(flags.lambda_grid, "lambda_grid");
    if (!flags.mode.empty()) config["mode"] = flags.mode;
    if (!flags.method.empty()) config["method"] = flags.method;
    if (!flags.case_tag.empty()) config["case"] = flags.case_tag;
    if (flags.n_samples >= 0) config["n_samples"] = flags.n_samples;
    if (flags.horizon >= 0) config["N"] = flags.horizon;
    if (flags.n_traj >= 0) config["n_traj"] = flags.n_traj;
    if (flags.burnin >= 0) config["burnin"] = flags.burnin;
    if (flags.lambda >= 0) config["lambda"] = flags.lambda;
    if (flags.rho >= 0) config["rho"] = flags.rho;
    if (flags.trunc_tol >= 0) config["trunc_tol"] = flags.trunc_tol;
    if (flags.seed >= 0) config["seed"] = static_cast<double>(flags.seed);
    if (flags.workers >= 0) config["workers"] = flags.workers;
    if (!flags.out.empty()) config["out"] = flags.out;
    if (!flags.format.empty()) config["format"] = flags.format;

    // seed is mandatory for reproducibility; PERPETUA_SEED is the fallback
    if (!config.contains("seed")) {
        if (const char* env = std::getenv("PERPETUA_SEED"))
            config["seed"] = std::stod(env);
        else
            throw config_error("seed", "required (flag, config, or PERPETUA_SEED)");
    }
    if (!config["seed"].is_number()) throw config_error("seed", "must be a number");
    const std::string fmt = perpetua_cli::string_or(config, "format", "config", "csv");
    config["format"] = fmt;
    if (fmt != "csv" && fmt != "json")
        throw config_error("format", "must be 'csv' or 'json'");
    config["out"] = perpetua_cli::string_or(config, "out", "config",
                                            command + (fmt == "csv" ? ".csv" : ".json"));
    config["workers"] = static_cast<int>(
        perpetua_cli::number_or(config, "workers", "config", 0.0));
    return config;
}

int dispatch(const std::string& command, const FlagValues& flags) {
    RunContext ctx;
    ctx.command = command;
    ctx.config = resolve_config(command, flags);
    ctx.sha = perpetua_cli::config_sha(ctx.config);
    ctx.seed = static_cast<std::uint64_t>(ctx.config["seed"].get<double>());
    ctx.workers = ctx.config["workers"].get<int>();
    ctx.out = ctx.config["out"].get<std::string>();
    ctx.format = ctx.config["format"].get<std::string>();

    if (command == "ldm")
        run_ldm(ctx);
    else if (command == "transform")
        run_transform(ctx);
    else if (command == "tail")
        run_tail(ctx);
    else if (command == "envelope")
        run_envelope(ctx);
    else if (command == "one-step")
        run_one_step(ctx);
    else if (command == "compare-bk18")
        run_compare_bk18(ctx);
    else if (command == "validate-model")
        run_validate_model(ctx);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perpetua: logarithmic tail asymptotics of light-tailed perpetuities"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    FlagValues flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"ldm", "finite-t local dependence measure estimates on a (y, t) grid"},
        {"transform", "Legendre-type transform, lambda*, admissibility, fixed point"},
        {"tail", "Monte Carlo tail exponent of the stationary law"},
        {"envelope", "long-run upper envelope of X_n / f^{-1}(log n)"},
        {"one-step", "one-step tail map on A Z + B with Z ~ ED_f(lambda)"},
        {"compare-bk18", "lambda* against the prior-work lower bound (cases a/b)"},
        {"validate-model", "sampler validation suite (exit 4 on property failure)"}};
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--model", flags.model, "inline model descriptor JSON");
        sub->add_option("--f", flags.f, "inline scale-function descriptor JSON");
        sub->add_option("--ldm", flags.ldm, "inline LDM descriptor JSON (transform)");
        sub->add_option("--y-grid", flags.y_grid, "comma-separated y grid");
        sub->add_option("--t-grid", flags.t_grid, "comma-separated t grid");
        sub->add_option("--lambda-grid", flags.lambda_grid, "comma-separated lambda grid");
        sub->add_option("--mode", flags.mode, "ldm mode: quadrature | monte_carlo");
        sub->add_option("--method", flags.method, "tail method: series | recursion_burnin");
        sub->add_option("--case", flags.case_tag, "compare-bk18 case: a | b");
        sub->add_option("--n-samples", flags.n_samples, "Monte Carlo sample count");
        sub->add_option("--N", flags.horizon, "envelope horizon");
        sub->add_option("--n-traj", flags.n_traj, "envelope trajectory count");
        sub->add_option("--burnin", flags.burnin, "burn-in steps (recursion method)");
        sub->add_option("--lambda", flags.lambda, "exponent for the one-step map");
        sub->add_option("--rho", flags.rho, "index for compare-bk18");
        sub->add_option("--trunc-tol", flags.trunc_tol, "series truncation tolerance");
        sub->add_option("--seed", flags.seed, "root seed (mandatory; or PERPETUA_SEED)");
        sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
        sub->add_option("--out", flags.out, "data output path");
        sub->add_option("--format", flags.format, "csv | json");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, flags);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mismatch_error& e) {
        std::cerr << "model/command mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const perpetua::unsupported_query& e) {
        std::cerr << "model/command mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const perpetua::property_failure& e) {
        std::cerr << "numerical property failure: " << e.what() << "\n";
        return kExitPropertyFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
