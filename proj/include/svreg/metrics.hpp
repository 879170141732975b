#pragma once
#include <string>
#include <vector>
#include <svreg/simgen.hpp>
#include <svreg/tuning.hpp>

namespace svreg {

struct SelectionMask
{
    std::vector<bool> main_selected;   // p
    BoolMatrix interaction_selected;   // p x K
};

/// main j is selected when |beta_j| > tol or any |theta_jk| > tol.
SelectionMask selection_mask(const CoefficientSet& c, double tol = 1e-10);

enum class ModifierKind
{
    continuous,
    categorical,
};

struct ModifierVariable
{
    std::vector<Index> columns;   // 0-based Z columns
    ModifierKind kind = ModifierKind::continuous;
};

using ModifierLayout = std::vector<ModifierVariable>;

enum class DummyMode
{
    grouped,     // a categorical modifier is one unit
    per_dummy,   // every dummy column is its own unit
};

/**
 * One modifier variable per modifier group; a group whose columns are all
 * 0/1 dummies is categorical. With DummyMode::per_dummy each column becomes
 * its own variable of the same kind.
 */
ModifierLayout modifier_layout(const GroupSpec& gs, const std::vector<bool>& z_dummy, DummyMode mode = DummyMode::grouped);

enum class Universe
{
    variables,      // main predictors and modifier variables
    coefficients,   // main predictors and (predictor, modifier) pairs
};

const char* to_string(Universe u);
Universe universe_from_string(const std::string& s);
const char* to_string(DummyMode m);
DummyMode dummy_mode_from_string(const std::string& s);

struct ConfusionCounts
{
    Index tp = 0, fp = 0, tn = 0, fn = 0;
};

struct SelectionRates
{
    ConfusionCounts counts;
    double fdr = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double geo_mean = 0.0;
};

SelectionRates confusion_rates(
    const SelectionMask& mask, const SelectionTruth& truth, const ModifierLayout& layout, Universe universe = Universe::variables
);

enum class PercentCategory
{
    main_relevant,
    continuous_relevant,
    categorical_relevant,
    main_irrelevant,
    continuous_irrelevant,
    categorical_irrelevant,
};

constexpr int kPercentCategories = 6;
const char* to_string(PercentCategory c);

/// Fraction selected per category; NaN for a category with no members.
struct PercentTable
{
    double value[kPercentCategories];

    double operator[](PercentCategory c) const { return value[static_cast<int>(c)]; }
    double& operator[](PercentCategory c) { return value[static_cast<int>(c)]; }
    bool has(PercentCategory c) const;
};

/// Single replication. A modifier counts as selected when any of its columns interacts with some predictor.
PercentTable percent_selected(const SelectionMask& mask, const SelectionTruth& truth, const ModifierLayout& layout);

/// Mean over replications. Throws if every category is empty.
PercentTable percent_selected(
    const std::vector<SelectionMask>& masks, const SelectionTruth& truth, const ModifierLayout& layout
);

/// 100 - percent for relevant categories, percent for irrelevant ones, in category order; empty categories skipped.
std::vector<std::pair<PercentCategory, double>> difference_curve(const PercentTable& table);

struct RocPoint
{
    double lambda = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

std::vector<RocPoint> roc_points(
    const PathResult& path, const SelectionTruth& truth, const ModifierLayout& layout, Universe universe = Universe::variables
);

/// Pointwise mean of curves sharing one lambda grid.
std::vector<RocPoint> average_roc(const std::vector<std::vector<RocPoint>>& curves);

/// FPR where the curve (ordered by decreasing lambda) first reaches `tpr`, linearly interpolated; NaN if never.
double fpr_at_tpr(const std::vector<RocPoint>& curve, double tpr);

} // namespace svreg
