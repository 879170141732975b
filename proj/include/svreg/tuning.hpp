#pragma once
#include <cstdint>
#include <vector>
#include <svreg/solver.hpp>

namespace svreg {

/// {from, from - step, ...} down to `to` (inclusive within rounding), decreasing.
std::vector<double> lambda_grid(double from, double to, double step);

/// `points` log-spaced values from `from` down to `to`.
std::vector<double> coarse_grid(double from = 10.0, double to = 0.01, int points = 60);

struct PathResult
{
    Method method = Method::svreg;
    double alpha = 0.5;
    std::vector<double> lambdas;
    std::vector<FitResult> fits;
};

/**
 * Fits `method` along a decreasing grid, warm-starting each fit from the
 * previous solution. `d` must already be standardized; `gs` is ignored for
 * plasso and lasso. Solver errors are rethrown with the offending lambda.
 */
PathResult fit_path(
    const Dataset& d, const GroupSpec& gs, Method method, const std::vector<double>& grid, const FitConfig& cfg
);

struct CVResult
{
    Method method = Method::svreg;
    int folds = 0;
    std::uint64_t seed = 0;
    std::vector<double> lambdas;
    std::vector<double> mean_mse;
    Matrix fold_mse;                 // folds x lambdas
    std::vector<int> fold_of_row;    // 0-based fold per observation
    std::vector<Index> fold_sizes;
    Index best_index = 0;
    double best_lambda = 0.0;
};

/// Seeded assignment of n rows to V folds whose sizes differ by at most one.
std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed);

/**
 * V-fold cross-validation on raw (unstandardized) data. Each training split
 * is standardized on its own rows and the held-out rows are mapped with the
 * same record. Folds run in parallel; results are independent of scheduling.
 */
CVResult cross_validate(
    const Dataset& raw,
    const GroupSpec& gs,
    Method method,
    const std::vector<double>& grid,
    int folds,
    const FitConfig& cfg,
    std::uint64_t seed
);

} // namespace svreg
