#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>
#include <svreg/design.hpp>
#include <svreg/kernels.hpp>
#include <svreg/model.hpp>

namespace svreg {

enum class Method
{
    svreg,
    plasso,
    lasso,
};

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct FitResult
{
    CoefficientSet coefficients;
    // objective after the intercept fit, then one entry per outer iteration
    std::vector<double> objective_trace;
    int n_outer_iterations = 0;
    bool converged = false;
    double lambda = 0.0;
    std::vector<Index> active_groups;
    std::vector<std::pair<Index, Index>> active_modifier_blocks;
    // predictor groups whose last visit zeroed the whole block by screening
    std::vector<Index> screened_groups;
    std::vector<std::string> warnings;

    double final_objective() const { return objective_trace.back(); }
};

/**
 * Blockwise coordinate descent for the structural varying-coefficient
 * regression objective on one dataset and group structure.
 *
 * Construction caches the per-group interaction design, Gram matrices and the
 * intercept projector so that a path of fits shares them.
 */
class SvregProblem
{
public:
    SvregProblem(Dataset d, GroupSpec gs);

    FitResult fit(const FitConfig& cfg, const CoefficientSet* warm = nullptr) const;

    // Smallest lambda at which every block screens to zero at beta = 0,
    // Theta = 0 (intercepts fitted). +inf when alpha == 1 and some main
    // effect is correlated with the response.
    double lambda_max(const FitConfig& cfg) const;

    const Dataset& data() const { return d_; }
    const GroupSpec& groups() const { return gs_; }
    const BlockDesign& design() const { return design_; }

private:
    Dataset d_;
    GroupSpec gs_;
    BlockDesign design_;
    Matrix intercept_basis_;  // [1, Z]
    Matrix intercept_pinv_;
};

/// Cyclic coordinate descent Lasso on the expanded design [Z, X, x_j * z_k].
class LassoProblem
{
public:
    explicit LassoProblem(Dataset d);

    FitResult fit(const FitConfig& cfg, const CoefficientSet* warm = nullptr) const;
    double lambda_max() const;

    const Dataset& data() const { return d_; }

private:
    Index feature_count() const { return features_.cols(); }

    Dataset d_;
    Matrix features_;
    Vector col_sq_;  // column squared norms / N
};

FitResult fit_svreg(
    const Dataset& d, const GroupSpec& gs, const FitConfig& cfg, const std::optional<CoefficientSet>& warm = std::nullopt
);

// Singleton predictor groups, one modifier group, unit weights.
FitResult fit_plasso(const Dataset& d, const FitConfig& cfg, const std::optional<CoefficientSet>& warm = std::nullopt);

FitResult fit_lasso_interactions(
    const Dataset& d, const FitConfig& cfg, const std::optional<CoefficientSet>& warm = std::nullopt
);

double lambda_max(const Dataset& d, const GroupSpec& gs, const FitConfig& cfg);

// Config actually used for a pliable-Lasso fit derived from `cfg`.
FitConfig plasso_config(const FitConfig& cfg);

} // namespace svreg
