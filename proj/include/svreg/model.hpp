#pragma once
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <svreg/error.hpp>

namespace svreg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * Response, main predictors and modifying variables of a varying-coefficient
 * linear model.
 *
 * X holds the main predictors (N x p), Z the modifying variables (N x K).
 * `z_dummy[k]` marks columns of Z that are 0/1 dummies; those are exempt
 * from scaling during standardization.
 */
struct Dataset
{
    Vector y;
    Matrix X;
    Matrix Z;
    std::vector<std::string> x_names;
    std::vector<std::string> z_names;
    std::vector<bool> z_dummy;
    bool standardized = false;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    Index k() const { return Z.cols(); }

    // Throws DataError when shapes disagree, N < 2, p < 1 or an entry is
    // not finite.
    void validate() const;

    // Default column names and dummy flags (auto-detected) where absent.
    void fill_metadata();

    // Dataset restricted to the given rows (in the given order).
    Dataset rows(const std::vector<Index>& idx) const;
};

/**
 * Partition of predictors into L groups and modifiers into G groups.
 * Indices are 0-based here; files use 1-based indices.
 */
struct GroupSpec
{
    std::vector<std::vector<Index>> predictor_groups;
    std::vector<std::vector<Index>> modifier_groups;

    Index n_predictor_groups() const { return static_cast<Index>(predictor_groups.size()); }
    Index n_modifier_groups() const { return static_cast<Index>(modifier_groups.size()); }

    // Throws DataError naming the first offending (1-based) index.
    void validate(Index p, Index K) const;

    // Every predictor and every modifier in its own group.
    static GroupSpec singletons(Index p, Index K);
    // Singleton predictors, all modifiers in one group (pliable-Lasso layout).
    static GroupSpec pliable(Index p, Index K);
};

struct CoefficientSet
{
    double beta0 = 0.0;
    Vector theta0;
    Vector beta;
    Matrix theta;   // p x K

    static CoefficientSet zeros(Index p, Index K);
    bool all_finite() const;
};

enum class WeightMode
{
    consistent,     // modifier-group weight sqrt(p_g)/sqrt(1+K)
    paper_literal,  // modifier-group weight sqrt(p_g)
    unit,           // all group weights 1 (pliable Lasso)
};

enum class ScreenRule
{
    exact,  // displayed conditions plus the joint subgradient condition
    displayed,  // displayed conditions only
};

struct FitConfig
{
    double lambda = 0.0;
    double alpha = 0.5;
    WeightMode weight_mode = WeightMode::consistent;
    ScreenRule screen_rule = ScreenRule::exact;
    double tol = 1e-5;
    int max_outer_iter = 1000;
    int max_inner_iter = 200;
    double inner_tol = 1e-7;
    bool require_standardized = true;

    void validate() const;
};

/// Per-group penalty multipliers derived from a GroupSpec and WeightMode.
struct GroupWeights
{
    std::vector<double> main;             // sqrt(p_l), or 1 in unit mode
    std::vector<double> modifier;         // w_g inside the penalty
    std::vector<double> modifier_screen;  // w_g used by the beta-given modifier test

    static GroupWeights make(const GroupSpec& gs, Index K, WeightMode mode);
};

/**
 * Means and scales used by standardize(); maps held-out rows into the
 * standardized space and coefficients back to original units.
 */
struct StandardizationRecord
{
    double y_mean = 0.0;
    Vector x_mean;
    Vector x_scale;
    Vector z_mean;   // 0 for dummy columns
    Vector z_scale;  // 1 for dummy columns

    Dataset apply(const Dataset& raw) const;
    CoefficientSet to_original(const CoefficientSet& c) const;
};

struct StandardizedData
{
    Dataset data;
    StandardizationRecord record;
};

// Centers y, centers and scales X and the non-dummy columns of Z to unit
// sample standard deviation. Throws DataError naming a constant column.
StandardizedData standardize(const Dataset& d, const std::vector<Index>& dummy_columns);
StandardizedData standardize(const Dataset& d);

// Indices of Z columns whose entries are all 0 or 1.
std::vector<Index> detect_dummy_columns(const Matrix& Z);

Vector predict(const Dataset& d, const CoefficientSet& c);
Vector residual(const Dataset& d, const CoefficientSet& c);

Vector partial_residual_main(const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group);
Vector partial_residual_modifier(
    const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group, Index modifier_group
);

double penalty_value(const CoefficientSet& c, const GroupSpec& gs, const FitConfig& cfg);
double objective_value(const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, const FitConfig& cfg);

// Plain l1 objective of the interaction-expanded Lasso: theta0, beta and
// theta are all penalized by lambda, beta0 is not.
double lasso_objective_value(const Dataset& d, const CoefficientSet& c, double lambda);

void check_dimensions(const Dataset& d, const CoefficientSet& c);

const char* to_string(WeightMode m);
WeightMode weight_mode_from_string(const std::string& s);
const char* to_string(ScreenRule r);
ScreenRule screen_rule_from_string(const std::string& s);

} // namespace svreg
