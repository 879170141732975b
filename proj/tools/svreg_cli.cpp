#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <omp.h>
#include <CLI11.hpp>
#include <svreg/experiment.hpp>
#include <svreg/io.hpp>

using namespace svreg;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit
{
    kOk = 0,
    kUsage = 2,
    kData = 3,
    kNumeric = 4,
};

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct DataArgs
{
    std::string dir, x, z, y, groups;
    bool singleton_groups = false;

    void add(CLI::App* app)
    {
        app->add_option("--data", dir, "Directory holding X.csv, Z.csv, y.csv (and groups.json)");
        app->add_option("--x", x, "Predictor matrix CSV");
        app->add_option("--z", z, "Modifier matrix CSV");
        app->add_option("--y", y, "Response CSV");
        app->add_option("--groups", groups, "Group file (1-based indices)");
        app->add_flag("--singleton-groups", singleton_groups, "Every predictor its own group, all modifiers in one group");
    }

    std::vector<fs::path> files() const
    {
        auto pick = [&](const std::string& given, const char* flag, const char* file) {
            if (!given.empty()) return fs::path(given);
            if (dir.empty()) throw UsageError(std::string("missing ") + flag + " (or --data DIR)");
            return fs::path(dir) / file;
        };
        return {pick(x, "--x", "X.csv"), pick(z, "--z", "Z.csv"), pick(y, "--y", "y.csv")};
    }

    fs::path groups_file() const
    {
        if (!groups.empty()) return groups;
        if (!dir.empty() && fs::exists(fs::path(dir) / "groups.json")) return fs::path(dir) / "groups.json";
        return {};
    }

    GroupSpec load_groups(const Dataset& d, Method method) const
    {
        if (singleton_groups) return GroupSpec::pliable(d.p(), d.k());
        const auto file = groups_file();
        if (file.empty()) {
            if (method == Method::svreg) {
                throw UsageError("svreg needs a group structure: provide --groups FILE or pass --singleton-groups");
            }
            return GroupSpec::singletons(d.p(), d.k());
        }
        auto gs = io::groups_from_json(io::read_json(file));
        gs.validate(d.p(), d.k());
        return gs;
    }
};

struct SolverArgs
{
    std::string method = "svreg";
    double alpha = 0.5;
    bool unit_weights = false;
    std::string weight_mode = "consistent";
    std::string screen_rule = "exact";
    double tol = 1e-5;
    int max_iter = 1000;

    void add(CLI::App* app, bool with_method = true)
    {
        if (with_method) {
            app->add_option("--method", method, "svreg, plasso or lasso")
                ->check(CLI::IsMember({"svreg", "plasso", "lasso"}))
                ->capture_default_str();
        }
        app->add_option("--alpha", alpha, "Mixing weight between group and l1 penalties")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        app->add_flag("--unit-weights", unit_weights, "Unit group multipliers (pliable Lasso penalty)");
        app->add_option("--weight-mode", weight_mode, "consistent, paper-literal or unit")
            ->check(CLI::IsMember({"consistent", "paper-literal", "unit"}))
            ->capture_default_str();
        app->add_option("--screen-rule", screen_rule, "exact or displayed")
            ->check(CLI::IsMember({"exact", "displayed"}))
            ->capture_default_str();
        app->add_option("--tol", tol, "Objective-change tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--max-iter", max_iter, "Maximum outer iterations")->check(CLI::PositiveNumber)->capture_default_str();
    }

    FitConfig config() const
    {
        FitConfig cfg;
        cfg.alpha = alpha;
        cfg.weight_mode = unit_weights ? WeightMode::unit : weight_mode_from_string(weight_mode);
        cfg.screen_rule = screen_rule_from_string(screen_rule);
        cfg.tol = tol;
        cfg.max_outer_iter = max_iter;
        return cfg;
    }
};

struct GridArgs
{
    double from = 10.0, to = 0.01, step = 0.01;
    bool coarse = false;

    void add(CLI::App* app)
    {
        app->add_option("--grid-from", from, "Largest lambda")->capture_default_str();
        app->add_option("--grid-to", to, "Smallest lambda")->capture_default_str();
        app->add_option("--grid-step", step, "Lambda step")->capture_default_str();
        app->add_flag("--grid-coarse", coarse, "60 log-spaced values from --grid-from to --grid-to");
    }

    std::vector<double> grid() const { return coarse ? coarse_grid(from, to, 60) : lambda_grid(from, to, step); }
};

// Effective option values of a subcommand, for the manifest.
json effective_config(const CLI::App* app)
{
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
        const auto& name = opt->get_lnames()[0];
        if (opt->count() > 0) {
            const auto& res = opt->results();
            j[name] = res.size() == 1 ? json(res[0]) : json(res);
        } else if (!opt->get_default_str().empty()) {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

void write_files(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files,
                 const std::string& command, const CLI::App* sub, const std::vector<fs::path>& inputs)
{
    std::vector<fs::path> outputs;
    for (const auto& [name, text] : files) {
        io::write_text(dir / name, text);
        outputs.push_back(dir / name);
    }
    io::write_manifest(dir, command, effective_config(sub), inputs, outputs);
}

int cmd_simulate(const CLI::App* sub, const std::string& setting, Index n, std::uint64_t seed, const std::string& out)
{
    const auto sim = generate(setting_from_string(setting), n, seed);
    const fs::path dir(out);
    fs::create_directories(dir);
    io::write_dataset(dir, sim.data);
    json meta;
    meta["setting"] = setting;
    meta["n"] = n;
    meta["seed"] = seed;
    meta["rng_algorithm"] = sim.rng_algorithm;
    std::vector<fs::path> outputs{dir / "X.csv", dir / "Z.csv", dir / "y.csv"};
    for (const auto& [name, text] : std::vector<std::pair<std::string, std::string>>{
             {"groups.json", io::groups_to_json(sim.groups).dump(2) + "\n"},
             {"truth.json", io::truth_to_json(sim.truth).dump(2) + "\n"},
             {"meta.json", meta.dump(2) + "\n"}}) {
        io::write_text(dir / name, text);
        outputs.push_back(dir / name);
    }
    io::write_manifest(dir, "simulate", effective_config(sub), {}, outputs);
    return kOk;
}

struct Loaded
{
    Dataset raw;
    GroupSpec groups;
    std::vector<fs::path> inputs;
};

Loaded load(const DataArgs& data, Method method)
{
    Loaded l;
    l.inputs = data.files();
    l.raw = io::read_dataset(l.inputs[0], l.inputs[1], l.inputs[2]);
    l.groups = data.load_groups(l.raw, method);
    if (const auto g = data.groups_file(); !g.empty() && !data.singleton_groups) l.inputs.push_back(g);
    return l;
}

FitResult fit_one(const Dataset& std_data, const GroupSpec& gs, Method method, const FitConfig& cfg)
{
    switch (method) {
        case Method::svreg: return fit_svreg(std_data, gs, cfg);
        case Method::plasso: return fit_plasso(std_data, cfg);
        case Method::lasso: return fit_lasso_interactions(std_data, cfg);
    }
    throw InvalidArgument("unknown method");
}

int cmd_fit(const CLI::App* sub, const DataArgs& data, const SolverArgs& solver, double lambda, const std::string& out)
{
    const Method method = method_from_string(solver.method);
    const auto l = load(data, method);
    const auto s = standardize(l.raw);
    FitConfig cfg = solver.config();
    cfg.lambda = lambda;
    const auto fit = fit_one(s.data, l.groups, method, cfg);
    const auto original = s.record.to_original(fit.coefficients);
    const fs::path dir(out);
    write_files(dir, {{"fit.json", io::fit_to_json(fit, original, cfg, method).dump(2) + "\n"}}, "fit", sub, l.inputs);
    return kOk;
}

int cmd_cv(const CLI::App* sub, const DataArgs& data, const SolverArgs& solver, const GridArgs& grid, int folds,
           std::uint64_t seed, const std::string& out)
{
    const Method method = method_from_string(solver.method);
    const auto l = load(data, method);
    const FitConfig cfg = solver.config();
    const auto cv = cross_validate(l.raw, l.groups, method, grid.grid(), folds, cfg, seed);
    const auto s = standardize(l.raw);
    FitConfig best = cfg;
    best.lambda = cv.best_lambda;
    const auto fit = fit_one(s.data, l.groups, method, best);
    const auto original = s.record.to_original(fit.coefficients);
    write_files(fs::path(out),
                {{"cv.json", io::cv_to_json(cv).dump(2) + "\n"},
                 {"fit.json", io::fit_to_json(fit, original, best, method).dump(2) + "\n"}},
                "cv", sub, l.inputs);
    return kOk;
}

int cmd_bench(const CLI::App* sub, ExperimentConfig cfg, const std::vector<std::string>& methods, const GridArgs& grid,
              const SolverArgs& solver, const std::string& universe, const std::string& dummy_mode, const std::string& out)
{
    cfg.methods.clear();
    for (const auto& m : methods) cfg.methods.push_back(method_from_string(m));
    cfg.grid = grid.grid();
    cfg.fit = solver.config();
    cfg.universe = universe_from_string(universe);
    cfg.dummy_mode = dummy_mode_from_string(dummy_mode);
    const auto res = run_experiment(cfg);
    write_files(fs::path(out),
                {{"table.csv", table_csv(res)},
                 {"roc.csv", roc_csv(res)},
                 {"diffcurve.csv", diffcurve_csv(res)},
                 {"replications.csv", replications_csv(res)}},
                "bench", sub, {});
    for (const auto& r : res.replications) {
        if (!r.ok) std::cerr << "replication " << r.index << " (seed " << r.seed << ") failed: " << r.error << "\n";
    }
    if (res.failed * 10 > cfg.replications) {
        std::cerr << res.failed << " of " << cfg.replications << " replications failed\n";
        return kNumeric;
    }
    return kOk;
}

int cmd_metrics(const CLI::App* sub, const std::vector<std::string>& fits, const std::string& truth_file,
                const DataArgs& data, const std::string& universe, const std::string& dummy_mode, const std::string& out)
{
    const auto truth = io::truth_from_json(io::read_json(truth_file));
    std::vector<fs::path> inputs{truth_file};
    const auto files = data.files();
    const Dataset d = io::read_dataset(files[0], files[1], files[2]);
    const GroupSpec gs = data.load_groups(d, Method::svreg);
    for (const auto& f : files) inputs.push_back(f);
    const auto layout = modifier_layout(gs, d.z_dummy, dummy_mode_from_string(dummy_mode));
    const auto uni = universe_from_string(universe);

    json report;
    report["universe"] = universe;
    report["dummy_mode"] = dummy_mode;
    report["fits"] = json::array();
    std::vector<SelectionMask> masks;
    for (const auto& f : fits) {
        inputs.push_back(f);
        const auto c = io::coefficients_from_json(io::read_json(f).at("coefficients_standardized"));
        check_dimensions(d, c);
        masks.push_back(selection_mask(c));
        const auto r = confusion_rates(masks.back(), truth, layout, uni);
        report["fits"].push_back({{"file", f},
                                  {"fdr", r.fdr},
                                  {"sensitivity", r.sensitivity},
                                  {"specificity", r.specificity},
                                  {"geo_mean", r.geo_mean}});
    }
    const auto pct = percent_selected(masks, truth, layout);
    json pj = json::object();
    for (int c = 0; c < kPercentCategories; ++c) {
        const auto cat = static_cast<PercentCategory>(c);
        if (pct.has(cat)) pj[to_string(cat)] = pct[cat];
    }
    report["percent_selected"] = pj;
    json dj = json::object();
    for (const auto& [cat, v] : difference_curve(pct)) dj[to_string(cat)] = v;
    report["difference_curve"] = dj;
    write_files(fs::path(out), {{"metrics.json", report.dump(2) + "\n"}}, "metrics", sub, inputs);
    return kOk;
}

// Turns a JSON config object into "--key value" arguments. Keys under an
// object named after the subcommand override top-level keys.
std::vector<std::string> config_args(const json& cfg, const std::string& subcommand)
{
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    std::map<std::string, json> merged;
    for (const auto& [k, v] : cfg.items()) {
        if (!v.is_object()) merged[k] = v;
    }
    if (cfg.contains(subcommand) && cfg[subcommand].is_object()) {
        for (const auto& [k, v] : cfg[subcommand].items()) merged[k] = v;
    }
    std::vector<std::string> out;
    for (const auto& [k, v] : merged) {
        const std::string flag = "--" + k;
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back(flag);
        } else if (v.is_array()) {
            std::string joined;
            for (const auto& e : v) joined += (joined.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
            out.insert(out.end(), {flag, joined});
        } else if (v.is_string()) {
            out.insert(out.end(), {flag, v.get<std::string>()});
        } else if (!v.is_null()) {
            out.insert(out.end(), {flag, v.dump()});
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structural varying-coefficient regression: simulate, fit, cross-validate, benchmark"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    std::string config_file;
    app.add_option("--config", config_file, "JSON file supplying any flag; command-line flags win");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a simulated dataset");
    std::string setting, out;
    Index n = 100;
    std::uint64_t seed = 0;
    sim->add_option("--setting", setting, "s1, s2 or s3")->required()->check(CLI::IsMember({"s1", "s2", "s3"}));
    sim->add_option("--n", n, "Sample size")->check(CLI::Range(Index(2), Index(1) << 40))->capture_default_str();
    sim->add_option("--seed", seed, "Random seed")->required();
    sim->add_option("--out", out, "Output directory")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one model at one lambda");
    DataArgs fit_data;
    SolverArgs fit_solver;
    double lambda = 0.0;
    fit_data.add(fit);
    fit_solver.add(fit);
    fit->add_option("--lambda", lambda, "Penalty level")->required()->check(CLI::NonNegativeNumber);
    fit->add_option("--out", out, "Output directory")->required();

    // cv
    auto* cv = app.add_subcommand("cv", "Cross-validate over a lambda grid and refit at the best lambda");
    DataArgs cv_data;
    SolverArgs cv_solver;
    GridArgs cv_grid;
    int folds = 10, jobs = 0;
    cv_data.add(cv);
    cv_solver.add(cv);
    cv_grid.add(cv);
    cv->add_option("--v", folds, "Number of folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();
    cv->add_option("--seed", seed, "Fold assignment seed")->required();
    cv->add_option("--jobs", jobs, "Worker threads (0 = all)")->capture_default_str();
    cv->add_option("--out", out, "Output directory")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Replicated simulation study");
    ExperimentConfig exp;
    std::vector<std::string> methods{"lasso", "plasso", "svreg"};
    SolverArgs bench_solver;
    GridArgs bench_grid;
    std::string universe = "variables", dummy_mode = "grouped";
    bench->add_option("--setting", setting, "s1, s2 or s3")->required()->check(CLI::IsMember({"s1", "s2", "s3"}));
    bench->add_option("--methods", methods, "Comma-separated methods")
        ->delimiter(',')
        ->check(CLI::IsMember({"svreg", "plasso", "lasso"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->capture_default_str();
    bench->add_option("--reps", exp.replications, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--seed", exp.seed, "Base seed; replication r uses seed + r")->required();
    bench->add_option("--n", exp.n, "Sample size per replication")->capture_default_str();
    bench->add_option("--v", exp.folds, "Cross-validation folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();
    bench->add_option("--jobs", exp.jobs, "Worker threads (0 = all)")->capture_default_str();
    bench->add_option("--universe", universe, "variables or coefficients")
        ->check(CLI::IsMember({"variables", "coefficients"}))
        ->capture_default_str();
    bench->add_option("--dummy-mode", dummy_mode, "grouped or per-dummy")
        ->check(CLI::IsMember({"grouped", "per-dummy"}))
        ->capture_default_str();
    bench_solver.add(bench, false);
    bench_grid.add(bench);
    bench->add_option("--out", out, "Output directory")->required();

    // metrics
    auto* met = app.add_subcommand("metrics", "Recompute selection metrics from saved fits");
    std::vector<std::string> fit_files;
    std::string truth_file;
    DataArgs met_data;
    met->add_option("--fit", fit_files, "fit.json files")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    met->add_option("--truth", truth_file, "truth.json")->required();
    met_data.add(met);
    met->add_option("--universe", universe, "variables or coefficients")
        ->check(CLI::IsMember({"variables", "coefficients"}))
        ->capture_default_str();
    met->add_option("--dummy-mode", dummy_mode, "grouped or per-dummy")
        ->check(CLI::IsMember({"grouped", "per-dummy"}))
        ->capture_default_str();
    met->add_option("--out", out, "Output directory")->required();

    try {
        // splice config-file arguments in front of the user's own so flags win
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string cfg_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                cfg_path = args[i + 1];
                args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
                break;
            }
            if (args[i].rfind("--config=", 0) == 0) {
                cfg_path = args[i].substr(9);
                args.erase(args.begin() + static_cast<long>(i));
                break;
            }
        }
        if (!cfg_path.empty()) {
            const auto sub_pos = std::find_if(args.begin(), args.end(), [](const std::string& a) {
                return a == "simulate" || a == "fit" || a == "cv" || a == "bench" || a == "metrics";
            });
            if (sub_pos == args.end()) throw UsageError("--config needs a subcommand");
            const auto extra = config_args(io::read_json(cfg_path), *sub_pos);
            args.insert(sub_pos + 1, extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }

    try {
        if (*sim) return cmd_simulate(sim, setting, n, seed, out);
        if (*fit) return cmd_fit(fit, fit_data, fit_solver, lambda, out);
        if (*cv) {
            if (jobs > 0) omp_set_num_threads(jobs);
            return cmd_cv(cv, cv_data, cv_solver, cv_grid, folds, seed, out);
        }
        if (*bench) {
            exp.setting = setting_from_string(setting);
            return cmd_bench(bench, exp, methods, bench_grid, bench_solver, universe, dummy_mode, out);
        }
        if (*met) return cmd_metrics(met, fit_files, truth_file, met_data, universe, dummy_mode, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
