#include <svreg/experiment.hpp>
#include <cmath>
#include <cstdio>
#include <omp.h>

namespace svreg {
namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

Stat stat_of(const std::vector<double>& xs)
{
    Stat s;
    if (xs.empty()) return {std::nan(""), std::nan("")};
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return s;
}

} // namespace

std::uint64_t fold_seed(std::uint64_t replication_seed)
{
    // splitmix64 finalizer
    std::uint64_t z = replication_seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Replication run_replication(const ExperimentConfig& cfg, int index)
{
    Replication rep;
    rep.index = index;
    rep.seed = cfg.seed + static_cast<std::uint64_t>(index);
    const auto grid = cfg.grid.empty() ? coarse_grid() : cfg.grid;
    try {
        const auto sim = generate(cfg.setting, cfg.n, rep.seed);
        const auto layout = modifier_layout(sim.groups, sim.data.z_dummy, cfg.dummy_mode);
        const auto full = standardize(sim.data);
        for (Method m : cfg.methods) {
            MethodRun run;
            run.method = m;
            const auto cv = cross_validate(sim.data, sim.groups, m, grid, cfg.folds, cfg.fit, fold_seed(rep.seed));
            const auto path = fit_path(full.data, sim.groups, m, grid, cfg.fit);
            run.cv_mse = cv.mean_mse[cv.best_index];
            run.best_lambda = cv.best_lambda;
            run.mask = selection_mask(path.fits[cv.best_index].coefficients);
            run.rates = confusion_rates(run.mask, sim.truth, layout, cfg.universe);
            run.percent = percent_selected(run.mask, sim.truth, layout);
            run.roc = roc_points(path, sim.truth, layout, cfg.universe);
            rep.runs.push_back(std::move(run));
        }
        rep.ok = true;
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.error = e.what();
        rep.runs.clear();
    }
    return rep;
}

std::vector<MethodSummary> summarize(const ExperimentConfig& cfg, const std::vector<Replication>& reps)
{
    std::vector<MethodSummary> out;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        MethodSummary s;
        s.method = cfg.methods[mi];
        std::vector<double> fdr, sens, spec, geo, mse;
        std::vector<double> pct[kPercentCategories];
        std::vector<std::vector<RocPoint>> rocs;
        for (const auto& r : reps) {
            if (!r.ok) continue;
            const auto& run = r.runs[mi];
            fdr.push_back(run.rates.fdr);
            sens.push_back(run.rates.sensitivity);
            spec.push_back(run.rates.specificity);
            geo.push_back(run.rates.geo_mean);
            mse.push_back(run.cv_mse);
            for (int c = 0; c < kPercentCategories; ++c) {
                if (!std::isnan(run.percent.value[c])) pct[c].push_back(run.percent.value[c]);
            }
            rocs.push_back(run.roc);
        }
        s.replications = static_cast<int>(fdr.size());
        s.fdr = stat_of(fdr);
        s.sensitivity = stat_of(sens);
        s.specificity = stat_of(spec);
        s.geo_mean = stat_of(geo);
        s.mse = stat_of(mse);
        for (int c = 0; c < kPercentCategories; ++c) s.percent[c] = stat_of(pct[c]);
        if (!rocs.empty()) s.roc = average_roc(rocs);
        out.push_back(std::move(s));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    if (cfg.replications < 1) throw InvalidArgument("replications must be >= 1");
    if (cfg.methods.empty()) throw InvalidArgument("no methods requested");
    cfg.fit.validate();

    ExperimentResult res;
    res.config = cfg;
    res.replications.resize(cfg.replications);
    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int r = 0; r < cfg.replications; ++r) res.replications[r] = run_replication(cfg, r);

    for (const auto& r : res.replications) res.failed += r.ok ? 0 : 1;
    res.summaries = summarize(cfg, res.replications);
    return res;
}

std::string table_csv(const ExperimentResult& r)
{
    std::string out = "metric,category";
    for (const auto& s : r.summaries) {
        out += std::string(",") + to_string(s.method) + "," + to_string(s.method) + "_se";
    }
    out += "\n";
    auto row = [&](const std::string& metric, const std::string& category, auto&& pick) {
        out += metric + "," + category;
        for (const auto& s : r.summaries) {
            const Stat st = pick(s);
            out += "," + fmt(st.mean) + "," + fmt(st.se);
        }
        out += "\n";
    };
    for (int c = 0; c < kPercentCategories; ++c) {
        bool present = false;
        for (const auto& s : r.summaries) present = present || !std::isnan(s.percent[c].mean);
        if (!present) continue;
        row("percent_selected", to_string(static_cast<PercentCategory>(c)),
            [c](const MethodSummary& s) { return s.percent[c]; });
    }
    row("fdr", "", [](const MethodSummary& s) { return s.fdr; });
    row("sensitivity", "", [](const MethodSummary& s) { return s.sensitivity; });
    row("specificity", "", [](const MethodSummary& s) { return s.specificity; });
    row("geo_mean", "", [](const MethodSummary& s) { return s.geo_mean; });
    row("mse", "", [](const MethodSummary& s) { return s.mse; });
    return out;
}

std::string roc_csv(const ExperimentResult& r)
{
    std::string out = "method,lambda,fpr,tpr\n";
    for (const auto& s : r.summaries) {
        for (const auto& pt : s.roc) {
            out += std::string(to_string(s.method)) + "," + fmt(pt.lambda) + "," + fmt(pt.fpr) + "," + fmt(pt.tpr) + "\n";
        }
    }
    return out;
}

std::string diffcurve_csv(const ExperimentResult& r)
{
    std::string out = "method,category,difference\n";
    for (const auto& s : r.summaries) {
        PercentTable t;
        for (int c = 0; c < kPercentCategories; ++c) t.value[c] = s.percent[c].mean;
        for (const auto& [cat, d] : difference_curve(t)) {
            out += std::string(to_string(s.method)) + "," + to_string(cat) + "," + fmt(d) + "\n";
        }
    }
    return out;
}

std::string replications_csv(const ExperimentResult& r)
{
    std::string out = "replication,seed,method,ok,fdr,sensitivity,specificity,geo_mean,cv_mse,best_lambda,error\n";
    for (const auto& rep : r.replications) {
        const std::string head = std::to_string(rep.index) + "," + std::to_string(rep.seed) + ",";
        if (!rep.ok) {
            std::string msg = rep.error;
            for (auto& ch : msg) {
                if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
            }
            out += head + "," + "0,,,,,,," + msg + "\n";
            continue;
        }
        for (const auto& run : rep.runs) {
            out += head + to_string(run.method) + ",1," + fmt(run.rates.fdr) + "," + fmt(run.rates.sensitivity) + ","
                + fmt(run.rates.specificity) + "," + fmt(run.rates.geo_mean) + "," + fmt(run.cv_mse) + ","
                + fmt(run.best_lambda) + ",\n";
        }
    }
    return out;
}

} // namespace svreg
