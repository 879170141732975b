#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include <svreg/metrics.hpp>

namespace svreg {

struct ExperimentConfig
{
    Setting setting = Setting::s1;
    Index n = 100;
    std::uint64_t seed = 0;
    int replications = 100;
    std::vector<Method> methods{Method::lasso, Method::plasso, Method::svreg};
    std::vector<double> grid;   // empty means coarse_grid()
    int folds = 10;
    FitConfig fit;
    Universe universe = Universe::variables;
    DummyMode dummy_mode = DummyMode::grouped;
    int jobs = 0;               // 0 leaves the OpenMP default
};

struct MethodRun
{
    Method method = Method::svreg;
    SelectionMask mask;
    SelectionRates rates;
    PercentTable percent{};
    double cv_mse = 0.0;
    double best_lambda = 0.0;
    std::vector<RocPoint> roc;
};

struct Replication
{
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::vector<MethodRun> runs;   // parallel to ExperimentConfig::methods
};

struct Stat
{
    double mean = 0.0;
    double se = 0.0;   // standard error over replications; 0 for a single one
};

struct MethodSummary
{
    Method method = Method::svreg;
    int replications = 0;
    Stat fdr, sensitivity, specificity, geo_mean, mse;
    Stat percent[kPercentCategories];
    std::vector<RocPoint> roc;   // replication average
};

struct ExperimentResult
{
    ExperimentConfig config;
    std::vector<Replication> replications;
    int failed = 0;
    std::vector<MethodSummary> summaries;
};

/// Fold seed used by replication `seed`; shared by every method so comparisons are paired.
std::uint64_t fold_seed(std::uint64_t replication_seed);

/// One replication: simulate, cross-validate each method, refit at the best lambda, score.
Replication run_replication(const ExperimentConfig& cfg, int index);

/**
 * Runs all replications (in parallel, seed = base + index) and aggregates the
 * successful ones. A replication in which any method throws is recorded with
 * its error and excluded from every summary.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<MethodSummary> summarize(const ExperimentConfig& cfg, const std::vector<Replication>& reps);

/// Summary CSV: rows metric x category, a value and standard-error column per method.
std::string table_csv(const ExperimentResult& r);
std::string roc_csv(const ExperimentResult& r);
std::string diffcurve_csv(const ExperimentResult& r);
std::string replications_csv(const ExperimentResult& r);

} // namespace svreg
